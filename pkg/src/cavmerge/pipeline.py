"""End-to-end runs: initial K-means, adjacency, scores, merging and outputs.

``run_pipeline`` executes one configured run and ``run_benchmark`` repeats
runs over derived seeds and tabulates ARI and timing.
"""

from __future__ import annotations

import configparser
import csv
import io
import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from ._errors import CavMergeError, DataError, InvalidArgumentError
from .adjacency import AdjacencySet, find_adjacent_pairs
from .datasets import (
    LabeledDataset,
    gen_bullseye,
    gen_gaussian_blobs,
    gen_two_moons,
    load_csv,
    spherical7_centers,
)
from .evaluation import adjusted_rand_index, mean_and_stderr
from .kmeans import KMeansModel, as_data_matrix, derive_seed, multi_start_fit
from .merging import Dendrogram, FinalClustering, build_dendrogram, cut_by_count, cut_by_threshold
from .model_select import jump_select
from .plotting import plot_svg
from .scoring import ScoreMatrix, adjust_sparse_clusters, score_matrix

__all__ = [
    "BenchmarkRow",
    "PipelineError",
    "RunConfig",
    "RunResult",
    "format_report",
    "make_dataset",
    "read_suite",
    "run_benchmark",
    "run_pipeline",
    "standardize",
    "write_benchmark_csv",
    "write_dendrogram_csv",
    "write_labels_csv",
    "write_scores_csv",
]

GENERATORS = ("blobs", "bullseye", "moons")


class PipelineError(CavMergeError):
    """Failure inside a named pipeline stage; ``cause`` holds the original error."""

    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"{stage}: {cause}")
        self.stage = stage
        self.cause = cause


@dataclass
class RunConfig:
    """Settings for one pipeline run.

    Exactly one of ``input`` (a CSV path) and ``generator`` (one of
    ``"blobs"``, ``"bullseye"``, ``"moons"`` with keyword ``gen_params``)
    names the data. At most one of ``clusters`` and ``threshold`` may be set.
    With neither, the run cuts at the number of true classes when the data are
    labelled and at score threshold 1 otherwise.

    ``k`` fixes the initial cluster count and skips jump selection;
    ``k_max`` bounds the jump scan (default ``min(max(floor(sqrt(n)), 30), n)``).
    """

    input: str | None = None
    generator: str | None = None
    gen_params: dict = field(default_factory=dict)
    data_seed: int | None = None
    label_column: int | str | None = -1
    name: str | None = None
    k: int | None = None
    k_max: int | None = None
    n_starts: int = 25
    clusters: int | None = None
    threshold: float | None = None
    seed: int = 0
    standardize: bool = False
    threads: int | None = 1
    out_labels: str | None = None
    out_scores: str | None = None
    out_dendro: str | None = None
    plot: str | None = None
    plot_dims: tuple[int, int] | None = None
    summary: str | None = None

    def validate(self) -> None:
        if (self.input is None) == (self.generator is None):
            raise InvalidArgumentError("specify exactly one of an input file and a generator")
        if self.generator is not None and self.generator not in GENERATORS:
            raise InvalidArgumentError(f"unknown generator {self.generator!r}; choose from {', '.join(GENERATORS)}")
        if self.clusters is not None and self.threshold is not None:
            raise InvalidArgumentError("give either a cluster count or a score threshold, not both")
        if self.clusters is not None and self.clusters < 1:
            raise InvalidArgumentError("cluster count must be positive")
        if self.threshold is not None and not self.threshold > 0:
            raise InvalidArgumentError("score threshold must be positive")
        if self.k is not None and self.k_max is not None:
            raise InvalidArgumentError("--k and --k-max are mutually exclusive")
        if self.k is not None and self.k < 1:
            raise InvalidArgumentError("k must be positive")
        if self.n_starts < 1:
            raise InvalidArgumentError("n_starts must be positive")


@dataclass
class RunResult:
    name: str
    n: int
    p: int
    selected_k: int
    k_source: str
    adjacent_pairs: int
    final_clusters: int
    cut: str
    ari: float | None
    wall_time: float
    model: KMeansModel = field(repr=False)
    adjacency: AdjacencySet = field(repr=False)
    scores: ScoreMatrix = field(repr=False)
    dendrogram: Dendrogram = field(repr=False)
    clustering: FinalClustering = field(repr=False)
    jump_distortions: np.ndarray | None = field(default=None, repr=False)

    def report(self) -> dict:
        return {
            "dataset": self.name,
            "n": self.n,
            "p": self.p,
            "selected_k": self.selected_k,
            "k_source": self.k_source,
            "adjacent_pairs": self.adjacent_pairs,
            "final_clusters": self.final_clusters,
            "cut": self.cut,
            "ari": self.ari,
            "wall_time_s": round(self.wall_time, 6),
        }


def make_dataset(kind: str, seed: int = 0, **params) -> LabeledDataset:
    """Build a generated dataset by name.

    ``blobs`` takes ``n_per`` (100), ``sigma`` (1.0) and either ``centers``
    (an ``(m, p)`` array or a ``"x,y;x,y"`` string) or ``separation`` (10.0,
    in units of sigma) for the seven-center layout. ``bullseye`` takes
    ``n_inner``, ``n_ring``, ``r_inner``, ``ring_low``, ``ring_high``.
    ``moons`` takes ``n_per`` and ``noise``.
    """
    params = dict(params)

    def take(key, default, cast):
        return cast(params.pop(key, default))

    if kind == "blobs":
        n_per = take("n_per", 100, int)
        sigma = take("sigma", 1.0, float)
        separation = take("separation", 10.0, float)
        centers = params.pop("centers", None)
        if centers is None:
            centers = spherical7_centers(separation * sigma)
        elif isinstance(centers, str):
            centers = [[float(v) for v in c.split(",")] for c in centers.split(";")]
        ds = gen_gaussian_blobs(n_per, centers, sigma, seed, name="blobs")
    elif kind == "bullseye":
        ds = gen_bullseye(
            take("n_inner", 1000, int), take("n_ring", 2000, int), take("r_inner", 1.0, float),
            (take("ring_low", 2.5, float), take("ring_high", 3.5, float)), seed,
        )
    elif kind == "moons":
        ds = gen_two_moons(take("n_per", 500, int), take("noise", 0.1, float), seed)
    else:
        raise InvalidArgumentError(f"unknown generator {kind!r}")
    if params:
        raise InvalidArgumentError(f"unknown {kind} parameters: {', '.join(sorted(params))}")
    return ds


def standardize(X) -> np.ndarray:
    """Center columns and scale to unit (population) variance; constant columns are only centered."""
    X = np.asarray(X, dtype=np.float64)
    sd = X.std(axis=0)
    sd[sd == 0] = 1.0
    return (X - X.mean(axis=0)) / sd


def _format_float(v: float) -> str:
    if v == math.inf:
        return "inf"
    if v == -math.inf:
        return "-inf"
    return format(float(v), ".17g")


def write_labels_csv(path, initial, final) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["row", "initial", "final"])
        for i, (a, b) in enumerate(zip(initial, final)):
            w.writerow([i, int(a), int(b)])


def write_scores_csv(path, scores: ScoreMatrix) -> None:
    """Square score matrix, one row per initial cluster; infinite entries as ``inf``."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        for row in np.asarray(scores.scores):
            w.writerow([_format_float(v) for v in row])


def write_dendrogram_csv(path, dendro: Dendrogram) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["step", "left", "right", "height"])
        for s, (a, b, h) in enumerate(dendro.merges):
            w.writerow([s, a, b, _format_float(h)])


def format_report(report: dict) -> str:
    lines = []
    for key, value in report.items():
        if value is None:
            value = "NA"
        elif isinstance(value, float):
            value = format(value, ".10g")
        lines.append(f"{key}={value}")
    return "\n".join(lines) + "\n"


class _Stage:
    """Context manager that re-raises any error tagged with the stage name."""

    def __init__(self, name):
        self.name = name

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        if exc is not None and not isinstance(exc, PipelineError) and isinstance(exc, Exception):
            raise PipelineError(self.name, exc) from exc
        return False


def run_pipeline(config: RunConfig, dataset: LabeledDataset | None = None) -> RunResult:
    """Run every stage for ``config`` and write the requested output files.

    ``dataset`` short-circuits loading (used by benchmarks that generate
    their data in memory).

    Raises
    ------
    PipelineError
        With ``stage`` set to one of ``config``, ``load``, ``kmeans``,
        ``adjacency``, ``scoring``, ``merging``, ``evaluation``, ``output``.
    """
    t0 = time.perf_counter()
    with _Stage("config"):
        config.validate()
    with _Stage("load"):
        if dataset is None:
            if config.input is not None:
                dataset = load_csv(config.input, config.label_column, name=config.name)
            else:
                seed = config.data_seed if config.data_seed is not None else config.seed
                dataset = make_dataset(config.generator, seed, **config.gen_params)
        X = as_data_matrix(dataset.data)
        if config.standardize:
            X = standardize(X)
        n, p = X.shape

    distortions = None
    with _Stage("kmeans"):
        if config.k is not None:
            if config.k > n:
                raise InvalidArgumentError(f"k={config.k} exceeds n={n}")
            model = multi_start_fit(X, config.k, config.n_starts, derive_seed(config.seed, config.k),
                                    n_jobs=config.threads)
            k_source = "fixed"
        else:
            profile = jump_select(X, config.k_max, config.n_starts, config.seed, n_jobs=config.threads)
            model = profile.selected_model
            distortions = profile.distortions
            k_source = "jump"
        k = model.k

    with _Stage("adjacency"):
        adj = find_adjacent_pairs(X, model) if k >= 2 else AdjacencySet(frozenset(), k)

    with _Stage("scoring"):
        scores = adjust_sparse_clusters(score_matrix(X, model, adj), model)

    with _Stage("merging"):
        dendro = build_dendrogram(scores)
        clusters, threshold = config.clusters, config.threshold
        if clusters is None and threshold is None:
            if dataset.true_labels is not None:
                clusters = int(np.unique(dataset.true_labels).size)
            else:
                threshold = 1.0
        if clusters is not None:
            if clusters > k:
                raise InvalidArgumentError(f"cannot cut {k} initial clusters into {clusters}")
            final = cut_by_count(dendro, clusters, model.labels)
            cut = f"clusters:{clusters}"
        else:
            final = cut_by_threshold(dendro, threshold, model.labels)
            cut = f"threshold:{threshold:g}"

    with _Stage("evaluation"):
        ari = None
        if dataset.true_labels is not None and n >= 2:
            ari = float(adjusted_rand_index(dataset.true_labels, final.final_labels))

    with _Stage("output"):
        if config.out_labels:
            write_labels_csv(config.out_labels, model.labels, final.final_labels)
        if config.out_scores:
            write_scores_csv(config.out_scores, scores)
        if config.out_dendro:
            write_dendrogram_csv(config.out_dendro, dendro)
        if config.plot:
            plot_svg(X, final.final_labels, config.plot, config.plot_dims)

    result = RunResult(
        name=config.name or dataset.name or "data",
        n=n,
        p=p,
        selected_k=k,
        k_source=k_source,
        adjacent_pairs=len(adj),
        final_clusters=final.n_final,
        cut=cut,
        ari=ari,
        wall_time=time.perf_counter() - t0,
        model=model,
        adjacency=adj,
        scores=scores,
        dendrogram=dendro,
        clustering=final,
        jump_distortions=distortions,
    )
    if config.summary:
        with _Stage("output"), open(config.summary, "w", encoding="utf-8") as fh:
            json.dump(result.report(), fh, indent=2, sort_keys=True)
            fh.write("\n")
    return result


@dataclass
class BenchmarkRow:
    dataset: str
    trials: int
    failures: int
    mean_ari: float
    stderr_ari: float
    mean_time: float
    errors: list = field(default_factory=list, repr=False)


def read_suite(path) -> list[RunConfig]:
    """Parse an INI benchmark suite: one section per dataset.

    Recognised keys are ``input``, ``label_col``, ``generator``, ``clusters``,
    ``threshold``, ``k``, ``k_max``, ``n_starts``, ``standardize`` and
    ``data_seed``. Any other key is passed to the generator. Relative input
    paths resolve against the suite file's directory.
    """
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except FileNotFoundError:
        raise DataError(f"{path}: no such file") from None
    except configparser.Error as e:
        raise DataError(f"{path}: {e}") from None
    base = os.path.dirname(os.path.abspath(path))
    configs = []
    for name in parser.sections():
        sec = dict(parser[name])
        cfg = RunConfig(name=name)
        try:
            if "input" in sec:
                cfg.input = os.path.join(base, sec.pop("input"))
            if "label_col" in sec:
                raw = sec.pop("label_col")
                cfg.label_column = None if raw.lower() == "none" else (int(raw) if raw.lstrip("-").isdigit() else raw)
            cfg.generator = sec.pop("generator", None)
            for key, cast in (("clusters", int), ("k", int), ("k_max", int), ("n_starts", int),
                              ("data_seed", int), ("threshold", float)):
                if key in sec:
                    setattr(cfg, key, cast(sec.pop(key)))
            if "standardize" in sec:
                cfg.standardize = parser[name].getboolean("standardize")
                sec.pop("standardize")
        except ValueError as e:
            raise DataError(f"{path}: section [{name}]: {e}") from None
        if cfg.input is not None and sec:
            raise DataError(f"{path}: section [{name}]: unknown keys {', '.join(sorted(sec))}")
        cfg.gen_params = sec
        try:
            cfg.validate()
        except InvalidArgumentError as e:
            raise DataError(f"{path}: section [{name}]: {e}") from None
        configs.append(cfg)
    if not configs:
        raise DataError(f"{path}: no dataset sections")
    return configs


def _trial(cfg: RunConfig, trial_seed: int, cached: LabeledDataset | None):
    run_cfg = RunConfig(**{**asdict(cfg), "seed": trial_seed, "threads": 1,
                           "out_labels": None, "out_scores": None, "out_dendro": None,
                           "plot": None, "summary": None})
    t0 = time.perf_counter()
    result = run_pipeline(run_cfg, cached)
    return result.ari, time.perf_counter() - t0


def run_benchmark(configs, n_trials: int, base_seed: int = 0, threads: int | None = 1) -> list[BenchmarkRow]:
    """Run every config ``n_trials`` times and summarise ARI and wall time.

    Trial ``t`` runs with seed ``derive_seed(base_seed, t)``. Generated data
    are redrawn from that seed unless the config pins ``data_seed``. Failed
    trials are counted and left out of the averages. Trials may run on up to
    ``threads`` worker threads; the table does not depend on scheduling.
    """
    configs = list(configs)
    if not configs:
        raise InvalidArgumentError("benchmark needs at least one config")
    if n_trials < 1:
        raise InvalidArgumentError("n_trials must be positive")
    seeds = [derive_seed(base_seed, t) for t in range(n_trials)]
    rows = []
    for cfg in configs:
        cached = None
        if cfg.input is not None:
            with _Stage("load"):
                cached = load_csv(cfg.input, cfg.label_column, name=cfg.name)

        def one(s, cfg=cfg, cached=cached):
            try:
                return _trial(cfg, s, cached)
            except CavMergeError as e:
                return e

        if threads is not None and threads > 1 and n_trials > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                outcomes = list(pool.map(one, seeds))
        else:
            outcomes = [one(s) for s in seeds]
        ok = [o for o in outcomes if not isinstance(o, Exception)]
        errors = [o for o in outcomes if isinstance(o, Exception)]
        aris = [a for a, _ in ok if a is not None]
        mean_ari, se_ari = mean_and_stderr(aris) if aris else (math.nan, math.nan)
        mean_time = math.fsum(t for _, t in ok) / len(ok) if ok else math.nan
        rows.append(BenchmarkRow(cfg.name or cfg.input or cfg.generator, n_trials, len(errors),
                                 mean_ari, se_ari, mean_time, errors))
    return rows


def write_benchmark_csv(rows, path=None, timing: bool = True) -> str:
    """Benchmark table as CSV text (written to ``path`` if given)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    header = ["dataset", "trials", "failures", "mean_ari", "stderr_ari"]
    if timing:
        header.append("mean_time_s")
    w.writerow(header)
    for r in rows:
        line = [r.dataset, r.trials, r.failures, format(r.mean_ari, ".6f"), format(r.stderr_ari, ".6f")]
        if timing:
            line.append(format(r.mean_time, ".4f"))
        w.writerow(line)
    text = buf.getvalue()
    if path is not None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return text
