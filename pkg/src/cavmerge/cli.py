"""``cavmerge`` command line: ``fit``, ``gen`` and ``bench`` subcommands.

Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.
"""

from __future__ import annotations

import argparse
import os
import sys

from ._errors import DataError, InvalidArgumentError
from .datasets import save_csv
from .pipeline import (
    PipelineError,
    RunConfig,
    format_report,
    make_dataset,
    read_suite,
    run_benchmark,
    run_pipeline,
    write_benchmark_csv,
)

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INTERNAL = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; this tool reserves 2 for data errors
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _label_col(text):
    if text.lower() == "none":
        return None
    try:
        return int(text)
    except ValueError:
        return text


def _dims(text):
    try:
        a, b = (int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("expected two comma-separated column indices, e.g. 0,1") from None
    return a, b


def _default_threads():
    return os.cpu_count() or 1


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cavmerge", description="Fuse an over-split K-means partition into general-shaped clusters.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    fit = sub.add_parser("fit", help="cluster a CSV file")
    fit.add_argument("input", help="CSV file, rows = observations")
    fit.add_argument("--label-col", type=_label_col, default=-1,
                     help="ground-truth column by name or index (default: last; 'none' for unlabelled data)")
    kgroup = fit.add_mutually_exclusive_group()
    kgroup.add_argument("--k", type=int, help="fix the initial cluster count (skips jump selection)")
    kgroup.add_argument("--k-max", type=int, help="largest K scanned by jump selection")
    fit.add_argument("--n-starts", type=int, default=25, help="K-means restarts per K (default 25)")
    cut = fit.add_mutually_exclusive_group()
    cut.add_argument("--clusters", type=int, help="final cluster count")
    cut.add_argument("--threshold", type=float,
                     help="merge pairs whose score exceeds this value (default 1 when no cluster count is known)")
    fit.add_argument("--seed", type=int, default=0)
    fit.add_argument("--standardize", action="store_true", help="z-score features before clustering")
    fit.add_argument("--out-labels", metavar="F")
    fit.add_argument("--out-scores", metavar="F")
    fit.add_argument("--out-dendro", metavar="F")
    fit.add_argument("--plot", metavar="F.svg")
    fit.add_argument("--plot-dims", type=_dims, metavar="I,J", help="columns to plot when p != 2")
    fit.add_argument("--summary", metavar="F.json", help="also write the report as JSON")
    fit.add_argument("--threads", type=int, default=None, help="worker threads (default: all cores)")

    gen = sub.add_parser("gen", help="write a synthetic labelled dataset")
    gen.add_argument("shape", choices=["blobs", "bullseye", "moons"])
    gen.add_argument("--n-per", type=int, help="points per blob or moon")
    gen.add_argument("--sigma", type=float, help="blob standard deviation")
    gen.add_argument("--separation", type=float, help="seven-blob layout spacing in units of sigma")
    gen.add_argument("--centers", help="explicit blob centers, e.g. '0,0;5,5'")
    gen.add_argument("--n-inner", type=int)
    gen.add_argument("--n-ring", type=int)
    gen.add_argument("--r-inner", type=float)
    gen.add_argument("--ring-low", type=float)
    gen.add_argument("--ring-high", type=float)
    gen.add_argument("--noise", type=float, help="moons jitter standard deviation")
    gen.add_argument("--seed", type=int, required=True)
    gen.add_argument("--out", required=True, metavar="F.csv")

    bench = sub.add_parser("bench", help="repeat runs over a suite of datasets")
    bench.add_argument("suite", help="INI file, one section per dataset")
    bench.add_argument("--trials", type=int, required=True)
    bench.add_argument("--seed", type=int, required=True)
    bench.add_argument("--out", required=True, metavar="table.csv")
    bench.add_argument("--threads", type=int, default=None)
    bench.add_argument("--no-timing", action="store_true", help="omit the wall-time column")
    return parser


_GEN_KEYS = {
    "blobs": ("n_per", "sigma", "separation", "centers"),
    "bullseye": ("n_inner", "n_ring", "r_inner", "ring_low", "ring_high"),
    "moons": ("n_per", "noise"),
}


def _cmd_fit(args) -> int:
    cfg = RunConfig(
        input=args.input, label_column=args.label_col, k=args.k, k_max=args.k_max,
        n_starts=args.n_starts, clusters=args.clusters, threshold=args.threshold, seed=args.seed,
        standardize=args.standardize, threads=args.threads or _default_threads(),
        out_labels=args.out_labels, out_scores=args.out_scores, out_dendro=args.out_dendro,
        plot=args.plot, plot_dims=args.plot_dims, summary=args.summary,
    )
    result = run_pipeline(cfg)
    sys.stdout.write(format_report(result.report()))
    return EXIT_OK


def _cmd_gen(args) -> int:
    given = {k: getattr(args, k) for k in vars(args) if k in sum(_GEN_KEYS.values(), ())}
    params = {k: v for k, v in given.items() if v is not None}
    stray = sorted(k for k in params if k not in _GEN_KEYS[args.shape])
    if stray:
        raise InvalidArgumentError(f"{args.shape} does not take: {', '.join('--' + s.replace('_', '-') for s in stray)}")
    ds = make_dataset(args.shape, args.seed, **params)
    save_csv(ds, args.out)
    print(f"wrote {ds.n} rows to {args.out}")
    return EXIT_OK


def _cmd_bench(args) -> int:
    configs = read_suite(args.suite)
    rows = run_benchmark(configs, args.trials, args.seed, threads=args.threads or _default_threads())
    text = write_benchmark_csv(rows, args.out, timing=not args.no_timing)
    sys.stdout.write(text)
    for r in rows:
        for e in r.errors[:3]:
            print(f"{r.dataset}: trial failed: {e}", file=sys.stderr)
    return EXIT_OK


def _exit_code(exc: BaseException) -> int:
    if isinstance(exc, PipelineError):
        exc = exc.cause
    if isinstance(exc, (DataError, OSError)):
        return EXIT_DATA
    if isinstance(exc, InvalidArgumentError):
        return EXIT_USAGE
    return EXIT_INTERNAL


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = {"fit": _cmd_fit, "gen": _cmd_gen, "bench": _cmd_bench}[args.command]
    try:
        return handler(args)
    except Exception as exc:  # noqa: BLE001 - mapped to an exit code
        code = _exit_code(exc)
        kind = {EXIT_USAGE: "usage error", EXIT_DATA: "data error"}.get(code, "internal error")
        print(f"cavmerge: {kind}: {exc}", file=sys.stderr)
        return code


if __name__ == "__main__":
    sys.exit(main())
