"""Hierarchical pairwise-ability model and its adaptive MCMC sampler.

Win counts follow a binomial likelihood whose success probability is the
logistic of an ability difference; abilities get a shared-scale Gaussian
prior (scale itself LogNormal(0, 0.5^2)) under a sum-to-zero constraint.
Sampling is adaptive Metropolis over the M-1 free abilities and log sigma:
component-wise random-walk updates with per-coordinate scales tuned during
warmup toward a 0.44 acceptance rate, plus one joint rescaling move per
sweep that travels along the ability/scale funnel axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..errors import ConvergenceError, DataError
from .diagnostics import effective_sample_size, split_rhat
from .wintable import WinTable

_LOG_2PI = math.log(2.0 * math.pi)
_SIGMA_PRIOR_SCALE = 0.5  # LogNormal(0, 0.5^2) on the shared ability scale
_TARGET_ACCEPT = 0.44  # per-coordinate updates tolerate a higher rate
_RHAT_LIMIT = 1.01
_ESS_FLOOR = 400.0


@dataclass(frozen=True)
class BBTConfig:
    epsilon_tie: float = 0.01
    rope: tuple[float, float] = (0.25, 0.75)
    equivalence_mass: float = 0.95
    hdi_mass: float = 0.89
    chains: int = 4
    draws_per_chain: int = 5_000
    warmup: int = 5_000
    seed: int = 0

    def __post_init__(self):
        low, high = self.rope
        if not (0.0 <= low < 0.5 < high <= 1.0):
            raise ValueError(f"rope must satisfy 0 <= low < 0.5 < high <= 1, got {self.rope}")
        if not (0.0 < self.hdi_mass < 1.0):
            raise ValueError(f"hdi_mass must be in (0, 1), got {self.hdi_mass}")
        if not (0.0 < self.equivalence_mass <= 1.0):
            raise ValueError(
                f"equivalence_mass must be in (0, 1], got {self.equivalence_mass}"
            )
        if self.chains < 2:
            raise ValueError(f"need at least 2 chains, got {self.chains}")
        if self.draws_per_chain < 1 or self.warmup < 0:
            raise ValueError("draws_per_chain must be >= 1 and warmup >= 0")
        if self.epsilon_tie < 0:
            raise ValueError(f"epsilon_tie must be >= 0, got {self.epsilon_tie}")


@dataclass
class AbilityPosterior:
    """Pooled post-warmup draws plus per-parameter convergence diagnostics."""

    models: tuple[str, ...]
    beta_draws: np.ndarray  # (S, M); each row sums to zero exactly
    sigma_draws: np.ndarray  # (S,)
    r_hat: dict[str, float]
    ess: dict[str, float]
    config: BBTConfig = field(default_factory=BBTConfig)

    @property
    def n_draws(self) -> int:
        return self.beta_draws.shape[0]

    def index(self, model: str) -> int:
        return self.models.index(model)


def log_posterior(beta: np.ndarray, sigma: float, table: WinTable) -> float:
    """Joint log density at a full ability vector and scale.

    ``beta`` is the complete M-vector (the sampler itself works on the M-1
    free coordinates with the last ability fixed by the zero-sum constraint).
    """
    beta = np.asarray(beta, dtype=np.float64)
    if beta.shape != (table.n_models,):
        raise ValueError(f"beta must have shape ({table.n_models},)")
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    i_idx, j_idx = np.triu_indices(table.n_models, k=1)
    delta = beta[i_idx] - beta[j_idx]
    w_upper = table.wins[i_idx, j_idx]
    w_lower = table.wins[j_idx, i_idx]
    log_pi = -np.logaddexp(0.0, -delta)
    log_one_minus = -np.logaddexp(0.0, delta)
    loglik = float(np.sum(w_upper * log_pi + w_lower * log_one_minus))

    m = table.n_models
    log_prior_beta = float(
        -0.5 * np.sum((beta / sigma) ** 2) - m * math.log(sigma) - 0.5 * m * _LOG_2PI
    )
    t = math.log(sigma)
    log_prior_sigma = (
        -0.5 * (t / _SIGMA_PRIOR_SCALE) ** 2
        - math.log(_SIGMA_PRIOR_SCALE)
        - 0.5 * _LOG_2PI
        - t  # density of sigma itself, not of log sigma
    )
    return loglik + log_prior_beta + log_prior_sigma


class _FreeDensity:
    """Vectorized log density over (M-1 free abilities, log sigma) rows."""

    def __init__(self, table: WinTable):
        self.m = table.n_models
        self.i_idx, self.j_idx = np.triu_indices(self.m, k=1)
        self.w_upper = table.wins[self.i_idx, self.j_idx]
        self.w_lower = table.wins[self.j_idx, self.i_idx]

    def full_beta(self, free: np.ndarray) -> np.ndarray:
        last = -np.sum(free, axis=-1, keepdims=True)
        return np.concatenate((free, last), axis=-1)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        free, t = x[:, : self.m - 1], x[:, self.m - 1]
        beta = self.full_beta(free)
        sigma = np.exp(t)
        delta = beta[:, self.i_idx] - beta[:, self.j_idx]
        loglik = np.sum(
            self.w_upper * -np.logaddexp(0.0, -delta)
            + self.w_lower * -np.logaddexp(0.0, delta),
            axis=1,
        )
        log_prior_beta = (
            -0.5 * np.sum((beta / sigma[:, None]) ** 2, axis=1)
            - self.m * t
            - 0.5 * self.m * _LOG_2PI
        )
        # LogNormal(0, s^2) on sigma plus the log-sigma Jacobian is a plain
        # Normal(0, s^2) on t
        log_prior_t = (
            -0.5 * (t / _SIGMA_PRIOR_SCALE) ** 2
            - math.log(_SIGMA_PRIOR_SCALE)
            - 0.5 * _LOG_2PI
        )
        return loglik + log_prior_beta + log_prior_t


def sample_posterior(table: WinTable, config: Optional[BBTConfig] = None) -> AbilityPosterior:
    """Adaptive random-walk Metropolis over independent chains.

    Fails loudly (ConvergenceError) if any parameter's split R-hat exceeds
    1.01 or its effective sample size falls below 400.
    """
    config = config or BBTConfig()
    if table.n_models < 2:
        raise DataError("need at least two models to rank")
    if float(table.totals.sum()) == 0.0:
        raise DataError("degenerate win table: no comparisons recorded")

    density = _FreeDensity(table)
    m = table.n_models
    dim = m  # (m - 1) abilities + log sigma
    chains = config.chains
    rngs = [
        np.random.default_rng(s)
        for s in np.random.SeedSequence(config.seed).spawn(chains)
    ]

    x = np.stack([rng.normal(0.0, 0.3, size=dim) for rng in rngs])
    lp = density(x)
    # one adapted proposal scale per coordinate (component-wise updates),
    # plus one scale for a joint rescaling move along the ability/sigma
    # funnel axis: (beta, sigma) -> (c*beta, c*sigma)
    log_scale = np.full((chains, dim + 1), math.log(0.5))

    draws = np.empty((chains, config.draws_per_chain, dim))

    # per-chain adaptation for the first half of warmup, then a pooled
    # kernel shared by every chain so mixing speed is chain-independent
    pool_at = config.warmup // 2
    block = 256
    total = config.warmup + config.draws_per_chain
    it = 0
    while it < total:
        span = min(block, total - it)
        normals = np.stack([rng.standard_normal((span, dim + 1)) for rng in rngs])
        log_u = np.log(np.stack([rng.random((span, dim + 1)) for rng in rngs]))
        for b in range(span):
            k = it + b
            warming = k < config.warmup
            gamma = (1.0 + 0.1 * k) ** -0.6 if warming else 0.0
            for coord in range(dim):
                proposal = x.copy()
                proposal[:, coord] += (
                    np.exp(log_scale[:, coord]) * normals[:, b, coord]
                )
                lp_prop = density(proposal)
                log_alpha = lp_prop - lp
                accept = log_u[:, b, coord] < log_alpha
                x[accept] = proposal[accept]
                lp = np.where(accept, lp_prop, lp)
                if warming:
                    accept_prob = np.exp(np.minimum(0.0, log_alpha))
                    if k < pool_at:
                        log_scale[:, coord] += gamma * (accept_prob - _TARGET_ACCEPT)
                    else:
                        log_scale[:, coord] += gamma * float(
                            np.mean(accept_prob) - _TARGET_ACCEPT
                        )

            # joint rescale: multiply free abilities by e^u, shift log sigma
            # by u; Metropolis-Hastings with scaling Jacobian e^{u (dim-1)}
            u = np.exp(log_scale[:, dim]) * normals[:, b, dim]
            proposal = x.copy()
            proposal[:, : dim - 1] *= np.exp(u)[:, None]
            proposal[:, dim - 1] += u
            lp_prop = density(proposal)
            log_alpha = lp_prop - lp + (dim - 1) * u
            accept = log_u[:, b, dim] < log_alpha
            x[accept] = proposal[accept]
            lp = np.where(accept, lp_prop, lp)
            if warming:
                accept_prob = np.exp(np.minimum(0.0, log_alpha))
                if k < pool_at:
                    log_scale[:, dim] += gamma * (accept_prob - _TARGET_ACCEPT)
                else:
                    log_scale[:, dim] += gamma * float(
                        np.mean(accept_prob) - _TARGET_ACCEPT
                    )

            if warming and k + 1 == pool_at:
                log_scale[:] = log_scale.mean(axis=0)
            if not warming:
                draws[:, k - config.warmup, :] = x
        it += span

    free = draws[:, :, : m - 1]
    t_draws = draws[:, :, m - 1]
    last = -np.sum(free, axis=2, keepdims=True)
    beta = np.concatenate((free, last), axis=2)  # (chains, draws, m)
    sigma = np.exp(t_draws)

    r_hat: dict[str, float] = {}
    ess: dict[str, float] = {}
    for p in range(m):
        r_hat[table.models[p]] = split_rhat(beta[:, :, p])
        ess[table.models[p]] = effective_sample_size(beta[:, :, p])
    r_hat["sigma"] = split_rhat(sigma)
    ess["sigma"] = effective_sample_size(sigma)

    failures = [
        name
        for name in r_hat
        if not (r_hat[name] < _RHAT_LIMIT) or not (ess[name] > _ESS_FLOOR)
    ]
    if failures:
        details = ", ".join(
            f"{name}: rhat={r_hat[name]:.4f} ess={ess[name]:.0f}" for name in failures
        )
        raise ConvergenceError(f"sampling diagnostics failed for {details}")

    pooled_beta = np.ascontiguousarray(beta.reshape(-1, m))
    # nudge the constrained coordinate (at most a few ulp) until each row
    # sums to exactly zero under numpy's own reduction order
    for _ in range(5):
        residual = pooled_beta.sum(axis=1)
        if not residual.any():
            break
        pooled_beta[:, -1] -= residual
    pooled_sigma = sigma.reshape(-1)
    return AbilityPosterior(
        models=table.models,
        beta_draws=pooled_beta,
        sigma_draws=pooled_sigma,
        r_hat=r_hat,
        ess=ess,
        config=config,
    )
