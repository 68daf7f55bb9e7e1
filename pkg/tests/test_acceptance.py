"""Acceptance criteria A1-A11.

Each test prints one ``A<n> PASS|FAIL`` line (also collected in the terminal
summary) and then asserts both the statistical target and the time budget.
Numba kernels are compiled by a warm-up fixture outside the timed region.
"""

import math
import os
import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from cavmerge import (
    RunConfig,
    adjusted_rand_index,
    cylinder_membership,
    derive_seed,
    find_adjacent_pairs,
    lloyd_fit,
    multi_start_fit,
    pair_counts,
    run_benchmark,
    run_pipeline,
    score_matrix,
)
from cavmerge.kmeans import KMeansModel
from cavmerge.pipeline import read_suite
from oracles import ari_by_pairs, gaussian_rect_prob, grid_pairs, random_partition, shares_boundary

# P(middle)^2 / (P(left) P(right)) for the A2/A3 cylinders under a standard
# 2-D Gaussian; erf oracle, cross-checked against scipy.stats.norm
GAUSS_C = 1.277413826259073

# benchmark criteria use the available cores, like the CLI default
THREADS = os.cpu_count() or 1


@pytest.fixture(scope="module")
def warm():
    X = np.random.default_rng(0).normal(size=(60, 2))
    run_pipeline(RunConfig(generator="moons", gen_params={"n_per": 30}, k=5, clusters=2))
    multi_start_fit(X, 3, n_starts=2)


def budget(start, limit):
    elapsed = time.perf_counter() - start
    return elapsed, elapsed < limit


def three_cylinder_counts(X, centers, half, radius, direction=(1.0, 0.0)):
    return [int(cylinder_membership(X, c, direction, half, radius).sum()) for c in centers]


CYLINDERS = [(-0.5, 0.0), (0.0, 0.0), (0.5, 0.0)]


def test_a1_score_positivity_single_gaussian(verdict, warm):
    t0 = time.perf_counter()
    above = 0
    for s in range(100):
        X = np.random.default_rng(derive_seed(101, s)).standard_normal((2000, 2))
        m = multi_start_fit(X, 2, n_starts=25, seed=derive_seed(1, s))
        above += pair_counts(X, m, (0, 1)).score > 1
    elapsed, fast = budget(t0, 10)
    ok = verdict("A1", above >= 95 and fast, f"score>1 in {above}/100 runs (need >=95); {elapsed:.2f}s (<10s)")
    assert ok


def test_a2_fixed_geometry_ratio(verdict, warm):
    P = [gaussian_rect_prob(x - 0.25, x + 0.25, -1.0, 1.0) for x, _ in CYLINDERS]
    assert P[1] ** 2 / (P[0] * P[2]) == pytest.approx(GAUSS_C, abs=1e-12)
    t0 = time.perf_counter()
    rng = np.random.default_rng(202)
    ratios = []
    for _ in range(200):
        m1, m2, m3 = three_cylinder_counts(rng.standard_normal((5000, 2)), CYLINDERS, 0.25, 1.0)
        ratios.append(m2 * m2 / (m1 * m3))
    freq = float(np.mean(np.array(ratios) > 0.9))
    elapsed, fast = budget(t0, 20)
    ok = verdict("A2", freq >= 0.95 and fast,
                 f"P(ratio>0.9)={freq:.3f} (need >=0.95), C={GAUSS_C:.4f}, median ratio {np.median(ratios):.4f};"
                 f" {elapsed:.2f}s (<20s)")
    assert ok


def test_a3_convergence_rate(verdict, warm):
    t0 = time.perf_counter()
    rng = np.random.default_rng(303)
    sizes = [500, 2000, 8000, 32000]
    medians = []
    for n in sizes:
        err = []
        for _ in range(200):
            m1, m2, m3 = three_cylinder_counts(rng.standard_normal((n, 2)), CYLINDERS, 0.25, 1.0)
            err.append(abs(m2 * m2 / (m1 * m3) - GAUSS_C))
        medians.append(float(np.median(err)))
    slope = float(np.polyfit(np.log(sizes), np.log(medians), 1)[0])
    elapsed, fast = budget(t0, 60)
    ok = verdict("A3", -0.7 <= slope <= -0.3 and fast,
                 f"log-log slope {slope:.3f} (need [-0.7,-0.3]), medians "
                 + ", ".join(f"{v:.4f}" for v in medians) + f"; {elapsed:.2f}s (<60s)")
    assert ok


def test_a4_adjacency_bound(verdict, warm):
    t0 = time.perf_counter()
    worst, total, misses = -math.inf, 0, 0
    runs = 0
    for K in (10, 20, 30):
        for s in range(20):
            X = np.random.default_rng(derive_seed(404 + K, s)).uniform(size=(5000, 2))
            m = multi_start_fit(X, K, n_starts=25, seed=derive_seed(4, s))
            adj = find_adjacent_pairs(X, m)
            worst = max(worst, len(adj) - (3 * K - 6))
            grid = grid_pairs(X, m.centers)
            misses += sum((a, b) not in grid or not shares_boundary(m.centers, a, b) for a, b in adj)
            total += len(adj)
            runs += 1
    elapsed, fast = budget(t0, 30)
    ok = verdict("A4", worst <= 0 and misses == 0 and fast,
                 f"{runs} runs, max |adj|-(3K-6) = {worst}, {misses}/{total} pairs failing the boundary oracles;"
                 f" {elapsed:.2f}s (<30s)")
    assert ok


def test_a5_spherical7(verdict, warm):
    t0 = time.perf_counter()
    cfg = RunConfig(generator="blobs", gen_params={"n_per": 100, "sigma": 1.0, "separation": 10.0},
                    clusters=7, name="spherical7")
    (row,) = run_benchmark([cfg], 10, base_seed=5, threads=THREADS)
    elapsed, fast = budget(t0, 30)
    ok = verdict("A5", row.failures == 0 and row.mean_ari >= 0.95 and fast,
                 f"mean ARI {row.mean_ari:.4f} (se {row.stderr_ari:.4f}, need >=0.95), {row.failures} failures;"
                 f" {elapsed:.2f}s (<30s)")
    assert ok


def test_a6_bullseye(verdict, warm):
    t0 = time.perf_counter()
    cfg = RunConfig(generator="bullseye", clusters=2, name="bullseye")
    (row,) = run_benchmark([cfg], 10, base_seed=6, threads=THREADS)
    elapsed, fast = budget(t0, 30)
    ok = verdict("A6", row.failures == 0 and row.mean_ari >= 0.90 and fast,
                 f"mean ARI {row.mean_ari:.4f} (se {row.stderr_ari:.4f}, need >=0.90), {row.failures} failures;"
                 f" {elapsed:.2f}s (<30s)")
    assert ok


def test_a7_ari_oracle(verdict):
    rng = np.random.default_rng(707)
    pairs = []
    for _ in range(1000):
        n = int(rng.integers(2, 61))
        pairs.append((random_partition(rng, n, 10), random_partition(rng, n, 10)))
    expected = [ari_by_pairs(a, b) for a, b in pairs]
    t0 = time.perf_counter()
    got = [adjusted_rand_index(a, b) for a, b in pairs]
    elapsed, fast = budget(t0, 5)
    worst = max(abs(g - e) for g, e in zip(got, expected))
    ok = verdict("A7", worst <= 1e-12 and fast, f"max |ARI - oracle| = {worst:.2e} over 1000 pairs (need <=1e-12);"
                 f" {elapsed:.2f}s (<5s)")
    assert ok


def _similarity(rng, p):
    Q, _ = np.linalg.qr(rng.normal(size=(p, p)))
    return Q, float(rng.uniform(0.1, 10)), rng.normal(scale=50, size=p)


def _refit_centers(Y, labels, k):
    C = np.array([Y[labels == j].mean(axis=0) for j in range(k)])
    return KMeansModel(C, labels, np.bincount(labels, minlength=k), 0.0, 0, np.array([]), 0)


def test_a8_scale_free(verdict, warm):
    t0 = time.perf_counter()
    mismatched, compared = 0, 0
    for s in range(50):
        rng = np.random.default_rng(derive_seed(808, s))
        p = int(rng.integers(2, 5))
        X = rng.normal(size=(int(rng.integers(200, 800)), p)) * rng.uniform(0.5, 3, p)
        m = lloyd_fit(X, int(rng.integers(3, 10)), seed=s)
        adj = find_adjacent_pairs(X, m)
        base = score_matrix(X, m, adj)
        Q, c, t = _similarity(rng, p)
        Y = c * X @ Q.T + t
        moved = score_matrix(Y, _refit_centers(Y, m.labels, m.k), adj)
        for pair, counts in base.counts.items():
            other = moved.counts[pair]
            compared += 1
            same = (counts.m1, counts.m2, counts.m3) == (other.m1, other.m2, other.m3)
            mismatched += not (same and counts.score == other.score)
        mismatched += not np.array_equal(base.scores, moved.scores)
    elapsed, fast = budget(t0, 10)
    ok = verdict("A8", mismatched == 0 and fast,
                 f"{mismatched} mismatches over {compared} pairs in 50 transformed datasets; {elapsed:.2f}s (<10s)")
    assert ok


def test_a9_separated_never_merge(verdict, warm):
    t0 = time.perf_counter()
    good = 0
    for s in range(20):
        cfg = RunConfig(generator="blobs", gen_params={"centers": "0,0;20,0", "n_per": 250, "sigma": 1.0},
                        threshold=1.0, seed=derive_seed(909, s))
        r = run_pipeline(cfg)
        good += r.final_clusters == 2 and r.ari == 1.0
    elapsed, fast = budget(t0, 10)
    ok = verdict("A9", good == 20 and fast, f"{good}/20 seeds with exactly 2 clusters and ARI 1; {elapsed:.2f}s (<10s)")
    assert ok


ORIGINALS = {
    # file stem: (mean ARI target, reference seconds per trial)
    "aggregation": (0.990, 0.209),
    "compound": (0.754, 0.065),
    "spiral": (0.033, 0.098),
    "pathbased": (0.425, 0.068),
}
DATA_DIR = os.environ.get("CAVMERGE_DATA_DIR")


def _originals_present():
    return bool(DATA_DIR) and all((Path(DATA_DIR) / f"{k}.csv").exists() for k in ORIGINALS)


def test_a10_original_files(verdict, warm, tmp_path):
    if not _originals_present():
        verdict("A10", None, "set CAVMERGE_DATA_DIR to a directory holding "
                + ", ".join(f"{k}.csv" for k in ORIGINALS))
        pytest.skip("original benchmark CSVs not supplied")
    suite = tmp_path / "originals.cfg"
    suite.write_text("".join(f"[{k}]\ninput = {Path(DATA_DIR, k + '.csv').resolve()}\n\n" for k in ORIGINALS))
    rows = run_benchmark(read_suite(suite), 10, base_seed=10)
    lines, ok = [], True
    for row in rows:
        target, ref = ORIGINALS[row.dataset]
        this = abs(row.mean_ari - target) <= 0.10 and row.mean_time <= 10 * ref and row.failures == 0
        ok &= this
        lines.append(f"{row.dataset}: ARI {row.mean_ari:.3f} vs {target} (+-0.10), {row.mean_time:.3f}s vs "
                     f"{10 * ref:.2f}s cap")
    verdict("A10", ok, "; ".join(lines))
    assert ok


def test_a11_end_to_end_determinism(verdict, warm, tmp_path):
    from cavmerge import cli, gen_two_moons, save_csv

    data = tmp_path / "moons.csv"
    save_csv(gen_two_moons(300, 0.08, seed=11), data)
    outputs = ("labels.csv", "scores.csv", "dendro.csv", "plot.svg")

    def argv(d, threads):
        d.mkdir()
        return ["fit", str(data), "--seed", "13", "--clusters", "2", "--threads", str(threads),
                "--out-labels", str(d / outputs[0]), "--out-scores", str(d / outputs[1]),
                "--out-dendro", str(d / outputs[2]), "--plot", str(d / outputs[3])]

    t0 = time.perf_counter()
    runs = []
    for i, threads in enumerate((1, 4)):
        d = tmp_path / f"proc{i}"
        subprocess.run([sys.executable, "-m", "cavmerge", *argv(d, threads)], check=True, capture_output=True)
        runs.append(d)
    for i, threads in enumerate((2, 1)):
        d = tmp_path / f"inproc{i}"
        assert cli.main(argv(d, threads)) == 0
        runs.append(d)
    elapsed, fast = budget(t0, 5)
    blobs = [[(d / f).read_bytes() for f in outputs] for d in runs]
    same = all(b == blobs[0] for b in blobs[1:])
    ok = verdict("A11", same and fast,
                 f"{len(runs)} fit runs (threads 1,4,2,1; two in fresh processes) byte-identical={same};"
                 f" {elapsed:.2f}s (<5s)")
    assert ok
