"""Aggregate report tables derived from a completed score table.

Three views: mean rank / mean AUROC per model, the pairwise win-fraction
matrix with ties reported separately, and per-dataset / per-model
comparisons against a designated baseline representation.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np

from .errors import DataError
from .harness.metrics import average_ranks
from .harness.scores import BEST_HEAD, ScoreTable


def _score_matrix(scores: ScoreTable, head: str) -> tuple[list[str], list[str], np.ndarray]:
    models = scores.models()
    datasets = scores.datasets()
    matrix = np.full((len(models), len(datasets)), np.nan)
    missing = []
    for i, model in enumerate(models):
        for d, dataset in enumerate(datasets):
            value = scores.get(model, dataset, head)
            if value is None:
                missing.append((model, dataset))
            else:
                matrix[i, d] = value
    if missing:
        raise DataError(f"incomplete score table; missing cells: {missing}")
    return models, datasets, matrix


@dataclass(frozen=True)
class AggregateRow:
    model: str
    mean_rank: float
    mean_auroc: float


def aggregate_report(scores: ScoreTable, head: str = BEST_HEAD) -> list[AggregateRow]:
    """Mean rank (average ranks on exact ties) and mean AUROC per model."""
    models, _, matrix = _score_matrix(scores, head)
    # rank 1 = highest AUROC within each dataset
    ranks = np.stack(
        [average_ranks(-matrix[:, d]) for d in range(matrix.shape[1])], axis=1
    )
    rows = [
        AggregateRow(
            model=model,
            mean_rank=float(ranks[i].mean()),
            mean_auroc=float(matrix[i].mean()),
        )
        for i, model in enumerate(models)
    ]
    rows.sort(key=lambda r: (r.mean_rank, r.model))
    return rows


@dataclass(frozen=True)
class WinMatrixResult:
    models: tuple[str, ...]
    win_fraction: np.ndarray  # (i, j): share of datasets i beat j by > epsilon
    tie_fraction: np.ndarray

    def __post_init__(self):
        m = len(self.models)
        if self.win_fraction.shape != (m, m) or self.tie_fraction.shape != (m, m):
            raise ValueError("matrix shapes must match the model list")


def win_matrix(scores: ScoreTable, epsilon: float = 0.01, head: str = BEST_HEAD) -> WinMatrixResult:
    """Pairwise win fractions; differences within epsilon count as ties."""
    models, datasets, matrix = _score_matrix(scores, head)
    m = len(models)
    wins = np.zeros((m, m))
    ties = np.zeros((m, m))
    n = len(datasets)
    for i in range(m):
        for j in range(m):
            if i == j:
                continue
            diff = matrix[i] - matrix[j]
            wins[i, j] = float(np.sum(diff > epsilon)) / n
            ties[i, j] = float(np.sum(np.abs(diff) <= epsilon)) / n
    return WinMatrixResult(tuple(models), wins, ties)


@dataclass(frozen=True)
class BaselineComparison:
    baseline: str
    #: dataset -> (share of models strictly above baseline,
    #:             share above baseline + epsilon)
    per_dataset: dict[str, tuple[float, float]]
    #: model -> datasets where it won or was within near_win_epsilon of the top
    win_or_near_win: dict[str, int]


def baseline_comparison(
    scores: ScoreTable,
    baseline: str,
    near_win_epsilon: float = 0.01,
    epsilon: float = 0.01,
    head: str = BEST_HEAD,
) -> BaselineComparison:
    models, datasets, matrix = _score_matrix(scores, head)
    if baseline not in models:
        raise DataError(f"baseline {baseline!r} missing from the score table")
    base_row = matrix[models.index(baseline)]
    others = [i for i, m in enumerate(models) if m != baseline]

    per_dataset = {}
    for d, dataset in enumerate(datasets):
        if others:
            strict = float(np.mean(matrix[others, d] > base_row[d]))
            beyond = float(np.mean(matrix[others, d] > base_row[d] + epsilon))
        else:
            strict = beyond = 0.0
        per_dataset[dataset] = (strict, beyond)

    win_or_near = {model: 0 for model in models}
    for d in range(len(datasets)):
        top = float(matrix[:, d].max())
        for i, model in enumerate(models):
            if matrix[i, d] >= top - near_win_epsilon:
                win_or_near[model] += 1
    return BaselineComparison(
        baseline=baseline, per_dataset=per_dataset, win_or_near_win=win_or_near
    )


def write_aggregate_csv(path: Union[str, Path], rows: list[AggregateRow]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["model", "mean_rank", "mean_auroc"])
        for row in rows:
            writer.writerow([row.model, f"{row.mean_rank:.2f}", f"{row.mean_auroc:.6f}"])


def write_win_matrix_csv(path: Union[str, Path], result: WinMatrixResult) -> None:
    """Long format: one row per ordered model pair."""
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["model_i", "model_j", "win_fraction", "tie_fraction"])
        for i, model_i in enumerate(result.models):
            for j, model_j in enumerate(result.models):
                if i == j:
                    continue
                writer.writerow(
                    [
                        model_i,
                        model_j,
                        f"{result.win_fraction[i, j]:.6f}",
                        f"{result.tie_fraction[i, j]:.6f}",
                    ]
                )


def write_baseline_csv(path: Union[str, Path], result: BaselineComparison) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(
            ["dataset", "share_above_baseline_strict", "share_above_baseline_epsilon"]
        )
        for dataset in sorted(result.per_dataset):
            strict, beyond = result.per_dataset[dataset]
            writer.writerow([dataset, f"{strict:.6f}", f"{beyond:.6f}"])


def write_near_win_csv(path: Union[str, Path], result: BaselineComparison) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["model", "wins_or_near_wins"])
        ordered = sorted(result.win_or_near_win.items(), key=lambda kv: (-kv[1], kv[0]))
        for model, count in ordered:
            writer.writerow([model, count])
