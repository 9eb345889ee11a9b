"""Importance-score extrapolation toolkit.

Thin wrapper over the C++ core: trajectory scorers (DU, TDDS, unsupervised
DU), KNN and GNN score extrapolators, correlation metrics, top-k pruning and
the synthetic experiment harness.
"""

from scorex._core import (
    ScorexError,
    __version__,
    du_score,
    du_window_std,
    eval_downstream,
    gen_blobs,
    gnn_extrapolate_scores,
    knn_extrapolate,
    knn_search,
    pearson,
    pseudo_labels,
    rank_report,
    read_tensor,
    sample_subset,
    score_histogram,
    select_label_column,
    select_top,
    spearman,
    tdds_delta,
    tdds_score,
    train_probe,
    unsupervised_du,
    write_tensor,
)

__all__ = [
    "ScorexError",
    "__version__",
    "du_score",
    "du_window_std",
    "eval_downstream",
    "gen_blobs",
    "gnn_extrapolate_scores",
    "knn_extrapolate",
    "knn_search",
    "pearson",
    "pseudo_labels",
    "rank_report",
    "read_tensor",
    "sample_subset",
    "score_histogram",
    "select_label_column",
    "select_top",
    "spearman",
    "tdds_delta",
    "tdds_score",
    "train_probe",
    "unsupervised_du",
    "write_tensor",
]
