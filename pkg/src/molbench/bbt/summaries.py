"""Posterior summaries, decisions, ranking and predictive checks."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from .model import AbilityPosterior, BBTConfig
from .wintable import WinTable


def hdi(draws, mass: float) -> tuple[float, float]:
    """Narrowest contiguous interval of sorted draws holding ceil(mass*S)."""
    draws = np.sort(np.asarray(draws, dtype=np.float64))
    n = len(draws)
    if n < 100:
        raise ValueError(f"need at least 100 draws for an HDI, got {n}")
    if not (0.0 < mass < 1.0):
        raise ValueError(f"mass must be in (0, 1), got {mass}")
    k = math.ceil(mass * n)
    widths = draws[k - 1 :] - draws[: n - k + 1]
    start = int(np.argmin(widths))
    return float(draws[start]), float(draws[start + k - 1])


@dataclass(frozen=True)
class PairSummary:
    """Posterior of the probability that the first model beats the second."""

    model_i: str
    model_j: str
    mean: float
    hdi_low: float
    hdi_high: float
    p_in_rope: float
    p_above_half: float


class Decision(str, Enum):
    BETTER = "better"
    WORSE = "worse"
    EQUIVALENT = "equivalent"
    INCONCLUSIVE = "inconclusive"


def pair_win_draws(posterior: AbilityPosterior, i: int, j: int) -> np.ndarray:
    """Per-draw win probability: inverse logit of the ability difference."""
    delta = posterior.beta_draws[:, i] - posterior.beta_draws[:, j]
    return 1.0 / (1.0 + np.exp(-delta))


def pair_summary(
    posterior: AbilityPosterior, i: int, j: int, config: Optional[BBTConfig] = None
) -> PairSummary:
    if i == j:
        raise ValueError("pair summary needs two distinct models")
    config = config or posterior.config
    pi = pair_win_draws(posterior, i, j)
    low, high = hdi(pi, config.hdi_mass)
    rope_low, rope_high = config.rope
    return PairSummary(
        model_i=posterior.models[i],
        model_j=posterior.models[j],
        mean=float(pi.mean()),
        hdi_low=low,
        hdi_high=high,
        p_in_rope=float(np.mean((pi >= rope_low) & (pi <= rope_high))),
        p_above_half=float(np.mean(pi > 0.5)),
    )


def decide(summary: PairSummary, config: BBTConfig) -> Decision:
    """Equivalence is tested first, then the mean against the ROPE bounds."""
    if summary.p_in_rope >= config.equivalence_mass:
        return Decision.EQUIVALENT
    if summary.mean > config.rope[1]:
        return Decision.BETTER
    if summary.mean < config.rope[0]:
        return Decision.WORSE
    return Decision.INCONCLUSIVE


@dataclass(frozen=True)
class RankingResult:
    """Models by descending posterior mean ability (exact ties: name order)."""

    order: tuple[str, ...]
    posterior_mean: dict[str, float]
    posterior_sd: dict[str, float]
    indistinguishable: bool


def rank_models(
    posterior: AbilityPosterior, config: Optional[BBTConfig] = None
) -> RankingResult:
    config = config or posterior.config
    means = posterior.beta_draws.mean(axis=0)
    sds = posterior.beta_draws.std(axis=0, ddof=1)
    order = tuple(
        posterior.models[i]
        for i in sorted(
            range(len(posterior.models)),
            key=lambda i: (-means[i], posterior.models[i]),
        )
    )
    indistinguishable = True
    for i in range(len(posterior.models)):
        for j in range(i + 1, len(posterior.models)):
            low, high = hdi(pair_win_draws(posterior, i, j), config.hdi_mass)
            if not (low <= 0.5 <= high):
                indistinguishable = False
                break
        if not indistinguishable:
            break
    return RankingResult(
        order=order,
        posterior_mean={m: float(v) for m, v in zip(posterior.models, means)},
        posterior_sd={m: float(v) for m, v in zip(posterior.models, sds)},
        indistinguishable=indistinguishable,
    )


@dataclass(frozen=True)
class PpcResult:
    """Bayesian p-values per pair; extreme values flag model misfit."""

    pairs: tuple[tuple[str, str], ...]
    p_values: np.ndarray
    flagged: np.ndarray

    @property
    def n_flagged(self) -> int:
        return int(self.flagged.sum())


def _round_half_up(value: float) -> int:
    return int(math.floor(value + 0.5))


def posterior_predictive_check(
    posterior: AbilityPosterior,
    table: WinTable,
    seed: int = 0,
    flag_below: float = 0.05,
    flag_above: float = 0.95,
) -> PpcResult:
    """Simulate replicate win counts per draw and compare with observations.

    Fractional tie-spread counts are rounded half-up to integers for the
    binomial replicates; the p-value is the fraction of replicates at or
    above the observed count.
    """
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    pairs = []
    p_values = []
    m = table.n_models
    for i in range(m):
        for j in range(i + 1, m):
            n_ij = _round_half_up(float(table.totals[i, j]))
            if n_ij == 0:
                continue
            observed = _round_half_up(float(table.wins[i, j]))
            pi = pair_win_draws(posterior, i, j)
            replicates = rng.binomial(n_ij, pi)
            pairs.append((table.models[i], table.models[j]))
            p_values.append(float(np.mean(replicates >= observed)))
    p_values = np.asarray(p_values, dtype=np.float64)
    flagged = (p_values < flag_below) | (p_values > flag_above)
    return PpcResult(pairs=tuple(pairs), p_values=p_values, flagged=flagged)
