"""Evaluation harness: data ingestion, splits, heads, AUROC scoring."""

from .datasets import (
    Dataset,
    EmbeddingTable,
    load_dataset,
    load_embeddings,
    write_embeddings,
    write_matrix_csv,
)
from .evaluate import (
    ClassifierSpec,
    default_specs,
    make_head,
    stratified_folds,
    tune_and_evaluate,
)
from .heads import (
    KNeighborsHead,
    LogisticRegressionHead,
    RandomForestHead,
    logistic_loss_and_grad,
)
from .metrics import auroc, average_ranks
from .scores import BEST_HEAD, HEAD_ORDER, ScoreRecord, ScoreTable
from .splits import Split, scaffold_split

__all__ = [
    "Dataset",
    "EmbeddingTable",
    "load_dataset",
    "load_embeddings",
    "write_embeddings",
    "write_matrix_csv",
    "Split",
    "scaffold_split",
    "auroc",
    "average_ranks",
    "KNeighborsHead",
    "LogisticRegressionHead",
    "RandomForestHead",
    "logistic_loss_and_grad",
    "ClassifierSpec",
    "default_specs",
    "make_head",
    "stratified_folds",
    "tune_and_evaluate",
    "ScoreRecord",
    "ScoreTable",
    "HEAD_ORDER",
    "BEST_HEAD",
]
