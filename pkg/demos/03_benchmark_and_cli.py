"""
Repeated trials and the command line
====================================

Builds a small benchmark suite, runs it through the library, and then does
the same work through the ``cavmerge`` command.
"""

import subprocess
import sys
from pathlib import Path

import cavmerge as cm
from cavmerge.pipeline import read_suite, write_benchmark_csv

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_output")
out.mkdir(exist_ok=True)

suite = out / "suite.cfg"
suite.write_text(
    "[spherical7]\ngenerator = blobs\nclusters = 7\n\n"
    "[moons]\ngenerator = moons\nn_per = 300\nnoise = 0.06\nclusters = 2\n"
)

# every trial gets its own derived seed, which also redraws the data
rows = cm.run_benchmark(read_suite(suite), n_trials=5, base_seed=0)
print(write_benchmark_csv(rows, timing=False))

# the same thing from a shell; -m cavmerge is the installed `cavmerge` script
cli = [sys.executable, "-m", "cavmerge"]
subprocess.run(cli + ["gen", "moons", "--n-per", "300", "--noise", "0.06", "--seed", "4",
                      "--out", str(out / "moons.csv")], check=True)
subprocess.run(cli + ["fit", str(out / "moons.csv"), "--clusters", "2", "--seed", "1",
                      "--out-labels", str(out / "moons_labels.csv"), "--plot", str(out / "moons.svg")],
               check=True)
subprocess.run(cli + ["bench", str(suite), "--trials", "3", "--seed", "0", "--out", str(out / "table.csv")],
               check=True)
