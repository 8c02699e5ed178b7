"""Goodness-of-fit statistics and bootstrap confidence intervals."""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np
from scipy.stats import chi2 as _chi2

__all__ = [
    "ks_distance",
    "ks_two_sample",
    "chi_square",
    "bootstrap_ci",
    "dequantize",
]


def ks_distance(samples: Sequence[float], cdf: Callable[[float], float]) -> float:
    """One-sample Kolmogorov-Smirnov sup distance |F_emp - F|.

    Exact sup over the sorted sample: max of F(x_(i)) - (i-1)/n and
    i/n - F(x_(i)).
    """
    xs = np.sort(np.asarray(samples, dtype=float))
    if xs.size == 0:
        raise ValueError("empty sample")
    n = xs.size
    F = np.array([cdf(x) for x in xs])
    i = np.arange(1, n + 1)
    return float(max((i / n - F).max(), (F - (i - 1) / n).max()))


def ks_two_sample(a: Sequence[float], b: Sequence[float]) -> float:
    """Two-sample KS statistic (no p-value)."""
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    if a.size == 0 or b.size == 0:
        raise ValueError("empty sample")
    # sup over all jump points of either empirical CDF
    pts = np.concatenate([a, b])
    Fa = np.searchsorted(a, pts, side="right") / a.size
    Fb = np.searchsorted(b, pts, side="right") / b.size
    return float(np.abs(Fa - Fb).max())


def chi_square(observed: Sequence[float], expected: Sequence[float]) -> tuple[float, float]:
    """Pearson chi-square statistic and upper-tail p-value.

    dof = len(observed) - 1. Expected counts must be positive and the totals
    must agree (same sample size on both sides).
    """
    obs = np.asarray(observed, dtype=float)
    exp = np.asarray(expected, dtype=float)
    if obs.size == 0:
        raise ValueError("empty counts")
    if obs.shape != exp.shape:
        raise ValueError(f"shape mismatch {obs.shape} vs {exp.shape}")
    if (exp <= 0).any():
        raise ValueError("expected counts must be positive")
    if abs(obs.sum() - exp.sum()) > 1e-6 * max(obs.sum(), 1.0):
        raise ValueError(f"totals differ: observed {obs.sum()}, expected {exp.sum()}")
    stat = float(((obs - exp) ** 2 / exp).sum())
    p = float(_chi2.sf(stat, df=obs.size - 1))
    return stat, p


def bootstrap_ci(
    values: Sequence[float],
    statistic: Callable[[np.ndarray], float],
    rng: np.random.Generator,
    n_boot: int = 200,
    level: float = 0.95,
) -> tuple[float, float]:
    """Percentile bootstrap CI for statistic(values).

    Resamples along axis 0, so 2-D input keeps rows (per-sample records)
    intact.
    """
    vals = np.asarray(values)
    if len(vals) == 0:
        raise ValueError("empty sample")
    stats = np.empty(n_boot)
    for k in range(n_boot):
        idx = rng.integers(0, len(vals), size=len(vals))
        stats[k] = statistic(vals[idx])
    alpha = (1 - level) / 2
    lo, hi = np.quantile(stats, [alpha, 1 - alpha])
    return float(lo), float(hi)


def dequantize(values: Sequence[float], rng: np.random.Generator) -> np.ndarray:
    """Add U[0,1) jitter to integer-valued samples.

    Standard lattice-to-continuous correction before a KS comparison: the
    jittered variable X + U has the continuous CDF that interpolates the
    lattice CDF, removing the discreteness floor of the sup distance.
    """
    vals = np.asarray(values, dtype=float)
    return vals + rng.random(vals.size)
