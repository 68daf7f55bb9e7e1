"""Clustering by merging over-fitted K-means partitions on local log-concavity scores.

Typical use::

    from cavmerge import RunConfig, run_pipeline
    result = run_pipeline(RunConfig(input="data.csv", clusters=3))
"""

from ._errors import CavMergeError, DataError, DegeneratePairError, InvalidArgumentError
from .adjacency import AdjacencySet, find_adjacent_pairs, two_nearest_centers
from .datasets import (
    LabeledDataset,
    gen_bullseye,
    gen_gaussian_blobs,
    gen_two_moons,
    load_csv,
    save_csv,
    spherical7_centers,
)
from .evaluation import adjusted_rand_index, contingency_table, mean_and_stderr
from .geometry import Segment, cylinder_membership, line_distance, projection_length
from .kmeans import KMeansModel, canonicalize_labels, derive_seed, lloyd_fit, multi_start_fit
from .merging import Dendrogram, FinalClustering, build_dendrogram, cut_by_count, cut_by_threshold
from .model_select import JumpProfile, default_k_max, jump_select
from .pipeline import PipelineError, RunConfig, RunResult, make_dataset, run_benchmark, run_pipeline
from .plotting import plot_svg
from .scoring import CylinderCounts, ScoreMatrix, adjust_sparse_clusters, pair_counts, pair_score, score_matrix

__version__ = "0.1.0"
