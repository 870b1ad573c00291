"""Hyperparameter grids, cross-validated tuning, and test scoring.

Grid selection runs 5-fold stratified cross-validation on the train side of
the scaffold split, scored by mean AUROC over folds and tasks; the winning
grid point (ties: first in grid order) is refit on the full train side. The
reported score per head is the test AUROC averaged over tasks where it is
defined, and "best" is the maximum over the three heads.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from ..errors import DataError
from .datasets import Dataset
from .heads import KNeighborsHead, LogisticRegressionHead, RandomForestHead
from .metrics import auroc
from .scores import BEST_HEAD, HEAD_ORDER, ScoreRecord
from .splits import Split

logger = logging.getLogger(__name__)

KNN_GRID = (1, 3, 5, 7, 9)
LOGREG_GRID = tuple(float(v) for v in np.logspace(-2.0, 3.0, 10))
FOREST_GRID = (2, 4, 6, 8, 10)
N_TREES = 500
N_FOLDS = 5


class DatasetSkipped(DataError):
    """No task has both classes on both split sides; the cell is skippable."""


@dataclass(frozen=True)
class ClassifierSpec:
    head: str
    grid: tuple[dict, ...]
    seed: int = 0

    def __post_init__(self):
        if self.head not in HEAD_ORDER:
            raise ValueError(f"unknown head {self.head!r}")
        if not self.grid:
            raise ValueError("empty hyperparameter grid")


def default_specs(seed: int = 0) -> tuple[ClassifierSpec, ...]:
    return (
        ClassifierSpec(
            "knn", tuple({"n_neighbors": k} for k in KNN_GRID), seed
        ),
        ClassifierSpec(
            "logreg", tuple({"reg_strength": lam} for lam in LOGREG_GRID), seed
        ),
        ClassifierSpec(
            "random_forest",
            tuple({"min_samples_split": m} for m in FOREST_GRID),
            seed,
        ),
    )


def make_head(spec: ClassifierSpec, params: dict):
    if spec.head == "knn":
        return KNeighborsHead(**params)
    if spec.head == "logreg":
        return LogisticRegressionHead(**params)
    return RandomForestHead(n_estimators=N_TREES, seed=spec.seed, **params)


def stratified_folds(y: np.ndarray, n_folds: int) -> list[np.ndarray]:
    """Deterministic per-class round-robin fold assignment (no shuffling)."""
    assignment = np.empty(len(y), dtype=np.int64)
    for cls in (0.0, 1.0):
        members = np.flatnonzero(y == cls)
        assignment[members] = np.arange(len(members)) % n_folds
    return [np.flatnonzero(assignment == f) for f in range(n_folds)]


def _task_rows(labels: np.ndarray, indices: np.ndarray, task: int) -> np.ndarray:
    rows = indices[~np.isnan(labels[indices, task])]
    return rows


def _fit_score(spec: ClassifierSpec, params: dict, X_train, y_train, X_eval, y_eval) -> float:
    if len(np.unique(y_eval)) < 2 or len(np.unique(y_train)) < 1:
        return float("nan")
    head = make_head(spec, params).fit(X_train, y_train)
    scores = head.predict_proba(X_eval)[:, 1]
    return auroc(scores, y_eval)


def _cv_score(spec: ClassifierSpec, params: dict, features, labels, train_idx) -> float:
    """Mean AUROC over folds and tasks for one grid point."""
    per_task = []
    for task in range(labels.shape[1]):
        rows = _task_rows(labels, train_idx, task)
        if len(rows) < N_FOLDS:
            continue
        y = labels[rows, task]
        fold_scores = []
        for fold in stratified_folds(y, N_FOLDS):
            val_rows = rows[fold]
            fit_mask = np.ones(len(rows), dtype=bool)
            fit_mask[fold] = False
            fit_rows = rows[fit_mask]
            if len(fit_rows) == 0 or len(np.unique(labels[fit_rows, task])) < 2:
                continue
            value = _fit_score(
                spec,
                params,
                features[fit_rows],
                labels[fit_rows, task],
                features[val_rows],
                labels[val_rows, task],
            )
            if not np.isnan(value):
                fold_scores.append(value)
        if fold_scores:
            per_task.append(float(np.mean(fold_scores)))
    return float(np.mean(per_task)) if per_task else float("nan")


def tune_and_evaluate(
    dataset: Dataset,
    features: np.ndarray,
    split: Split,
    model_name: str,
    specs: Optional[Sequence[ClassifierSpec]] = None,
) -> list[ScoreRecord]:
    """Tune each head on the train side, score on the test side.

    Returns one record per head plus the "best" record. Raises DataError if
    no task has both classes represented on the test side.
    """
    if features.shape[0] != dataset.n_molecules:
        raise DataError(
            f"{model_name}/{dataset.name}: representation has "
            f"{features.shape[0]} rows for {dataset.n_molecules} molecules"
        )
    specs = tuple(specs) if specs is not None else default_specs()
    train_idx = np.asarray(split.train_idx, dtype=np.int64)
    test_idx = np.asarray(split.test_idx, dtype=np.int64)
    labels = dataset.labels

    evaluable = []
    for task in range(labels.shape[1]):
        test_rows = _task_rows(labels, test_idx, task)
        train_rows = _task_rows(labels, train_idx, task)
        if (
            len(np.unique(labels[test_rows, task])) == 2
            and len(np.unique(labels[train_rows, task])) == 2
        ):
            evaluable.append(task)
    if not evaluable:
        raise DatasetSkipped(
            f"{model_name}/{dataset.name}: no task has both classes in both "
            "split sides; dataset skipped"
        )
    skipped = labels.shape[1] - len(evaluable)
    if skipped:
        logger.info(
            "%s/%s: %d task(s) excluded (single-class side)",
            model_name,
            dataset.name,
            skipped,
        )

    records = []
    for spec in specs:
        best_params = None
        best_cv = -np.inf
        for params in spec.grid:
            value = _cv_score(spec, params, features, labels, train_idx)
            if not np.isnan(value) and value > best_cv:
                best_cv = value
                best_params = params
        if best_params is None:
            best_params = spec.grid[0]

        task_scores = []
        for task in evaluable:
            fit_rows = _task_rows(labels, train_idx, task)
            eval_rows = _task_rows(labels, test_idx, task)
            value = _fit_score(
                spec,
                best_params,
                features[fit_rows],
                labels[fit_rows, task],
                features[eval_rows],
                labels[eval_rows, task],
            )
            if not np.isnan(value):
                task_scores.append(value)
        records.append(
            ScoreRecord(
                model_name, dataset.name, spec.head, float(np.mean(task_scores))
            )
        )

    best = max(records, key=lambda r: r.auroc)
    records.append(ScoreRecord(model_name, dataset.name, BEST_HEAD, best.auroc))
    return records
