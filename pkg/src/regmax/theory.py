"""Closed-form limit quantities: centring/scaling constants, local limit
formulas for common-neighbour counts, Gumbel limits, and tail references.

Everything probability-valued is evaluated in log space (log-gamma
binomials); the only exponentiation happens at the very end. Natural
logarithms throughout.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Iterable, Sequence

from scipy.stats import binom as _binom

from .graphs import DegreeSequence, RegularityParams

__all__ = [
    "ScalingConstants",
    "BinomMaxConstants",
    "BinomApprox",
    "scaling_constants",
    "binom_max_constants",
    "binom_approx_params",
    "local_limit_prob",
    "gumbel_cdf",
    "joint_limit_cdf",
    "tail_prob_asymptotic",
    "neighbourhood_prob_estimate",
    "deviation_threshold",
    "central_window",
    "binomial_tail",
    "hypergeom_tail_bound_check",
    "log_binom",
]


def log_binom(n: int | float, k: int | float) -> float:
    """log C(n,k) via log-gamma; -inf outside 0 <= k <= n."""
    if k < 0 or k > n:
        return -math.inf
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


@dataclass(frozen=True)
class ScalingConstants:
    """Centring a and scale b for the common-neighbour maximum."""

    a: float
    b: float


@dataclass(frozen=True)
class BinomMaxConstants:
    """Centring/scale for the max of m iid Bin(N,p) draws."""

    a_star: float
    b_star: float
    N: int
    m: int
    p: float


@dataclass(frozen=True)
class BinomApprox:
    """Binomial surrogate Bin(N, p) for a single pair count."""

    N: int
    p: float


def scaling_constants(params: RegularityParams) -> ScalingConstants:
    """Centring and scale for extremes of pair counts at density lam.

    a = lam^2 n + 2 lam(1-lam) sqrt(n log n) (1 - loglog n/(8 log n)
        - log(32 pi)/(8 log n)),  b = lam(1-lam)/2 * sqrt(n/log n).

    Needs n >= 3 so loglog n is defined.
    """
    n, lam = params.n, params.lam
    if n < 3:
        raise ValueError(f"need n >= 3, got {n}")
    ln = math.log(n)
    bracket = 1 - math.log(ln) / (8 * ln) - math.log(32 * math.pi) / (8 * ln)
    a = lam * lam * n + 2 * lam * (1 - lam) * math.sqrt(n * ln) * bracket
    b = 0.5 * lam * (1 - lam) * math.sqrt(n / ln)
    return ScalingConstants(a=a, b=b)


def binom_max_constants(N: int, m: int, p: float) -> BinomMaxConstants:
    """Gumbel centring/scale for the max of m iid Bin(N,p) variables.

    a* = pN + sqrt(2Np(1-p) log m) (1 - loglog m/(4 log m)
         - log(2 sqrt(pi))/(2 log m)),  b* = sqrt(Np(1-p)/(2 log m)).
    """
    if not 0 < p < 1:
        raise ValueError(f"need 0 < p < 1, got {p}")
    if N < 1 or m < 2:
        raise ValueError(f"need N >= 1 and m >= 2, got N={N}, m={m}")
    lm = math.log(m)
    var = N * p * (1 - p)
    bracket = 1 - math.log(lm) / (4 * lm) - math.log(2 * math.sqrt(math.pi)) / (2 * lm)
    a_star = p * N + math.sqrt(2 * var * lm) * bracket
    b_star = math.sqrt(var / (2 * lm))
    return BinomMaxConstants(a_star=a_star, b_star=b_star, N=N, m=m, p=p)


def binom_approx_params(params: RegularityParams) -> BinomApprox:
    """Surrogate Bin(N,p): N = floor(lam/(2-lam) n), p = lam(2-lam)."""
    lam = params.lam
    N = math.floor(lam / (2 - lam) * params.n)
    return BinomApprox(N=N, p=lam * (2 - lam))


_CONDITIONS = ("edge", "nonedge", "unconditional")


def local_limit_prob(params: RegularityParams, h: int, condition: str) -> float:
    """Pointwise formula for Pr(X_ij = h) under the given edge condition.

    nonedge:  C(d,h) C(n-d-2,d-h) / C(n-2,d)   * E
    edge:     C(d-1,h) C(n-d-1,d-h-1) / C(n-2,d-1) * E
    unconditional: C(d,h) C(n-1-d,d-h) / C(n-1,d)
    with E = exp(lam/(1-lam) - h/(lam(1-lam)n)).

    h beyond the support gives 0, not an error. The unconditional form is
    only meaningful near h = lam^2 n; a warning fires when |h - lam^2 n|
    exceeds n^0.6.
    """
    if condition not in _CONDITIONS:
        raise ValueError(f"unknown condition {condition!r}, want one of {_CONDITIONS}")
    n, d, lam = params.n, params.d, params.lam
    if h < 0 or h > d:
        return 0.0
    if condition == "unconditional":
        if abs(h - lam * lam * n) > n**0.6:
            warnings.warn(
                f"unconditional formula used at h={h}, far from lam^2 n={lam * lam * n:.1f}",
                stacklevel=2,
            )
        log_p = log_binom(d, h) + log_binom(n - 1 - d, d - h) - log_binom(n - 1, d)
        return math.exp(log_p) if log_p > -math.inf else 0.0
    exponent = lam / (1 - lam) - h / (lam * (1 - lam) * n)
    if condition == "nonedge":
        log_p = log_binom(d, h) + log_binom(n - d - 2, d - h) - log_binom(n - 2, d)
    else:
        log_p = log_binom(d - 1, h) + log_binom(n - d - 1, d - h - 1) - log_binom(n - 2, d - 1)
    return math.exp(log_p + exponent) if log_p > -math.inf else 0.0


def gumbel_cdf(x: float) -> float:
    """Standard Gumbel CDF e^(-e^(-x))."""
    return math.exp(-math.exp(-x))


def joint_limit_cdf(x: float, x_prime: float) -> float:
    """Joint limit e^(-e^(-x) - e^(x')) of the scaled (max, -min) pair.

    x' = -inf recovers gumbel_cdf(x).
    """
    return math.exp(-math.exp(-x) - math.exp(x_prime))


def tail_prob_asymptotic(params: RegularityParams, x: float, side: str = "upper") -> float:
    """Limit of the per-pair exceedance probability: e^(-x)/C(n,2).

    side="upper": Pr(X_ij > a + b x). side="lower": Pr(X_ij < 2 lam^2 n
    - a + b x'), by the reflection symmetry of the min; equals e^(x')/C(n,2).
    """
    if side not in ("upper", "lower"):
        raise ValueError(f"side must be 'upper' or 'lower', got {side!r}")
    pairs = params.pair_count
    return math.exp(-x) / pairs if side == "upper" else math.exp(x) / pairs


def neighbourhood_prob_estimate(
    ds: DegreeSequence | Sequence[int], i: int, neighbourhood: Iterable[int]
) -> float:
    """Analytic estimate of Pr(N(i) = A) for an almost-regular sequence:

    sqrt(2 pi lam(1-lam) n) * prod_{j in A} d_j/(n-1)
                            * prod_{j notin A+i} (1 - d_j/(n-1))

    with lam = mean degree/(n-1). Log space; the exact counterpart lives in
    the enumeration module.
    """
    degrees = ds.degrees if isinstance(ds, DegreeSequence) else tuple(ds)
    n = len(degrees)
    A = set(neighbourhood)
    if i in A or not A <= set(range(n)):
        raise ValueError(f"neighbourhood {sorted(A)} invalid for vertex {i} on [{n}]")
    if len(A) != degrees[i]:
        raise ValueError(f"|A|={len(A)} != d_i={degrees[i]}")
    lam = sum(degrees) / n / (n - 1)
    if not 0 < lam < 1:
        raise ValueError("degenerate density")
    log_p = 0.5 * math.log(2 * math.pi * lam * (1 - lam) * n)
    for j, d_j in enumerate(degrees):
        if j == i:
            continue
        mu = d_j / (n - 1)
        if not 0 < mu < 1:
            raise ValueError(f"degenerate degree {d_j} at vertex {j}")
        log_p += math.log(mu) if j in A else math.log(1 - mu)
    return math.exp(log_p)


def deviation_threshold(n: int) -> float:
    """Concentration radius sqrt(n) log n for pair counts (natural log)."""
    return math.sqrt(n) * math.log(n)


def central_window(params: RegularityParams, half_width_frac: float = 0.25) -> list[int]:
    """Integers h with |h - lam^2 n| <= half_width_frac * lam^2 n.

    The window every formula-vs-exact comparison uses; quarter-width by
    default so it stays inside the bulk at the tiny n the exact oracle can
    reach.
    """
    centre = params.lam * params.lam * params.n
    radius = half_width_frac * centre
    lo = math.ceil(centre - radius)
    hi = math.floor(centre + radius)
    return [h for h in range(max(lo, 0), min(hi, params.d) + 1)]


def binomial_tail(N: int, p: float, t: float) -> float:
    """Exact Pr(Bin(N,p) > t)."""
    return float(_binom.sf(math.floor(t), N, p))


def hypergeom_tail_bound_check(
    params: RegularityParams, pair_samples: Iterable[int]
) -> dict:
    """Concentration report for |X_ij - lam^2 n| > sqrt(n) log n.

    Takes pooled pair counts from sampler output; returns the observed
    deviation frequency next to the exact Bin(N,p) tail mass beyond the same
    threshold as the analytic reference.
    """
    samples = list(pair_samples)
    if not samples:
        raise ValueError("no pair samples supplied")
    n, lam = params.n, params.lam
    centre = lam * lam * n
    radius = deviation_threshold(n)
    deviations = sum(1 for x in samples if abs(x - centre) > radius)
    approx = binom_approx_params(params)
    ref = binomial_tail(approx.N, approx.p, centre + radius) + float(
        _binom.cdf(math.ceil(centre - radius) - 1, approx.N, approx.p)
    )
    return {
        "n": n,
        "lam": lam,
        "threshold": radius,
        "n_samples": len(samples),
        "deviations": deviations,
        "observed_freq": deviations / len(samples),
        "binomial_reference": ref,
    }
