"""Split-chain R-hat and effective sample size for MCMC output.

Both operate on a (chains, draws) array, splitting each chain in half so
that within-chain trends count against convergence. ESS uses FFT
autocorrelations combined across chains with Geyer's initial monotone
positive sequence truncation.
"""

from __future__ import annotations

import numpy as np


def _split_chains(draws: np.ndarray) -> np.ndarray:
    draws = np.asarray(draws, dtype=np.float64)
    if draws.ndim != 2:
        raise ValueError(f"draws must be (chains, draws), got shape {draws.shape}")
    chains, n = draws.shape
    half = n // 2
    if half < 2:
        raise ValueError(f"need at least 4 draws per chain, got {n}")
    return np.concatenate((draws[:, :half], draws[:, n - half :]), axis=0)


def split_rhat(draws: np.ndarray) -> float:
    """Potential scale reduction on half-chains; 1.0 at convergence."""
    seqs = _split_chains(draws)
    n = seqs.shape[1]
    means = seqs.mean(axis=1)
    variances = seqs.var(axis=1, ddof=1)
    w = float(variances.mean())
    b = n * float(means.var(ddof=1))
    if w == 0.0:
        return 1.0 if b == 0.0 else np.inf
    var_plus = (n - 1) / n * w + b / n
    return float(np.sqrt(var_plus / w))


def _autocovariance(x: np.ndarray) -> np.ndarray:
    """Biased (1/n) autocovariance of one sequence via FFT."""
    n = len(x)
    centered = x - x.mean()
    size = 1
    while size < 2 * n:
        size *= 2
    spectrum = np.fft.rfft(centered, size)
    acov = np.fft.irfft(spectrum * np.conj(spectrum), size)[:n].real
    return acov / n


def effective_sample_size(draws: np.ndarray) -> float:
    """Combined-chain ESS with Geyer initial monotone positive truncation."""
    seqs = _split_chains(draws)
    m, n = seqs.shape
    acov = np.stack([_autocovariance(seq) for seq in seqs])
    chain_var = acov[:, 0] * n / (n - 1)
    w = float(chain_var.mean())
    means = seqs.mean(axis=1)
    var_plus = (n - 1) / n * w + float(means.var(ddof=1))
    if var_plus == 0.0:
        return float(m * n)

    rho = 1.0 - (w - acov.mean(axis=0)) / var_plus
    rho[0] = 1.0

    # Geyer: sum consecutive-lag pairs while positive, forced non-increasing;
    # tau = -1 + 2 * sum(pairs)
    tau = -1.0
    prev_pair = np.inf
    t = 0
    while t + 1 < len(rho):
        pair = rho[t] + rho[t + 1]
        if pair <= 0.0:
            break
        pair = min(pair, prev_pair)
        prev_pair = pair
        tau += 2.0 * pair
        t += 2
    tau = max(tau, 1.0 / np.log10(m * n + 10.0))  # cap of antithetic chains
    return float(m * n / tau)
