"""Dependent event systems over vertex pairs and extremal-independence bounds.

Events are indexed 0..m-1 in a fixed order; for pair systems that order is
lexicographic over (i, j), i < j. The mixing coefficient phi compares each
event against the union of earlier events outside its dependency
neighbourhood; delta1/delta2 accumulate joint, respectively product, masses
over dependency edges. The headline bound is

    (1 - prod(1 - p_i)) * phi + max(delta1, delta2)

which dominates |Pr(no event fires) - prod(1 - p_i)|.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.stats import binom as _binom

from .graphs import LabelledGraph, RegularityParams, common_neighbours, pair_count_matrix
from .theory import binom_approx_params, deviation_threshold, scaling_constants

__all__ = [
    "pair_index",
    "pair_endpoints",
    "DependencyDigraph",
    "ExplicitDigraph",
    "PairOverlapDigraph",
    "overlap_dependency_graph",
    "EventSystem",
    "event_system_common_neighbours",
    "common_neighbour_intervals",
    "event_marginal_binomial",
    "delta2_binomial_proxy",
    "evaluate_events",
    "PhiEstimate",
    "estimate_phi",
    "DeltaEstimate",
    "estimate_deltas",
    "Coefficients",
    "extremal_bound",
    "SyntheticEventSystem",
    "FDiffReport",
    "empirical_F_vs_Fhat",
    "RatioEstimate",
    "joint_ratio_estimate",
]


# --- pair indexing ------------------------------------------------------------


@lru_cache(maxsize=8)
def _triu(n: int) -> tuple[np.ndarray, np.ndarray]:
    rows, cols = np.triu_indices(n, k=1)
    return rows.astype(np.int64), cols.astype(np.int64)


def pair_index(n: int, i: int, j: int) -> int:
    """Lexicographic index of the pair (i, j), 0 <= i < j < n."""
    if not 0 <= i < j < n:
        raise ValueError(f"need 0 <= i < j < n, got ({i},{j}) at n={n}")
    return i * (2 * n - i - 1) // 2 + (j - i - 1)


def pair_endpoints(n: int, k: int) -> tuple[int, int]:
    """Inverse of pair_index."""
    rows, cols = _triu(n)
    if not 0 <= k < len(rows):
        raise ValueError(f"pair index {k} out of range for n={n}")
    return int(rows[k]), int(cols[k])


# --- dependency digraphs --------------------------------------------------------


class DependencyDigraph:
    """Closed neighbourhoods D_i over events 0..m-1, membership O(1)."""

    m: int

    def contains(self, i: int, j: int) -> bool:
        """j in D_i."""
        raise NotImplementedError

    def neighbours(self, i: int) -> frozenset[int]:
        raise NotImplementedError

    def directed_edge_count(self) -> int:
        return sum(len(self.neighbours(i)) - 1 for i in range(self.m))


class ExplicitDigraph(DependencyDigraph):
    """Dependency digraph from explicit neighbour sets."""

    def __init__(self, neighbourhoods: Sequence[Iterable[int]]):
        self._sets = tuple(frozenset(s) | {i} for i, s in enumerate(neighbourhoods))
        self.m = len(self._sets)
        for i, s in enumerate(self._sets):
            bad = [j for j in s if not 0 <= j < self.m]
            if bad:
                raise ValueError(f"D_{i} contains out-of-range indices {bad}")

    def contains(self, i: int, j: int) -> bool:
        return j in self._sets[i]

    def neighbours(self, i: int) -> frozenset[int]:
        return self._sets[i]


class PairOverlapDigraph(DependencyDigraph):
    """Events = vertex pairs; D_ij = pairs sharing exactly one endpoint, plus ij.

    Stored implicitly (m = C(n,2) events have 2(n-2) neighbours each; explicit
    sets would be O(n^3) memory).
    """

    def __init__(self, n: int):
        if n < 3:
            raise ValueError(f"need n >= 3, got {n}")
        self.n = n
        self.m = n * (n - 1) // 2

    def contains(self, i: int, j: int) -> bool:
        if i == j:
            return True
        a, b = pair_endpoints(self.n, i)
        c, d = pair_endpoints(self.n, j)
        return len({a, b} & {c, d}) == 1

    def neighbours(self, i: int) -> frozenset[int]:
        a, b = pair_endpoints(self.n, i)
        out = {i}
        for v in range(self.n):
            if v in (a, b):
                continue
            out.add(pair_index(self.n, min(a, v), max(a, v)))
            out.add(pair_index(self.n, min(b, v), max(b, v)))
        return frozenset(out)

    def directed_edge_count(self) -> int:
        return self.m * 2 * (self.n - 2)


def overlap_dependency_graph(n: int) -> PairOverlapDigraph:
    """Dependency digraph of the pair events of an n-vertex graph."""
    return PairOverlapDigraph(n)


# --- event systems --------------------------------------------------------------


@dataclass(frozen=True)
class EventSystem:
    """m events with a deterministic per-sample evaluator.

    evaluator(sample) returns the sorted indices of the events that occurred;
    indicators() expands to the full 0/1 vector.
    """

    m: int
    evaluator: Callable[[object], np.ndarray]
    description: str = ""

    def __post_init__(self) -> None:
        if self.m < 1:
            raise ValueError(f"need m >= 1, got {self.m}")

    def fired(self, sample: object) -> np.ndarray:
        return np.asarray(self.evaluator(sample), dtype=np.int64)

    def indicators(self, sample: object) -> np.ndarray:
        out = np.zeros(self.m, dtype=bool)
        out[self.fired(sample)] = True
        return out


def common_neighbour_intervals(
    params: RegularityParams, x: float, x_prime: float
) -> tuple[tuple[float, float], tuple[float, float]]:
    """Open intervals (upper-tail, lower-tail) whose union defines A_ij.

    upper: (a + b x,      lam^2 n + sqrt(n) log n)
    lower: (lam^2 n - sqrt(n) log n,  2 lam^2 n - a + b x')

    Either may be empty (x -> +inf empties the upper one, x' -> -inf the
    lower one); empty means that tail never fires. NaN arguments raise.
    """
    if math.isnan(x) or math.isnan(x_prime):
        raise ValueError("x and x' must not be NaN")
    c = scaling_constants(params)
    centre = params.lam * params.lam * params.n
    dev = deviation_threshold(params.n)
    upper = (c.a + c.b * x, centre + dev)
    lower = (centre - dev, 2 * centre - c.a + c.b * x_prime)
    return upper, lower


def event_system_common_neighbours(
    x: float, x_prime: float, params: RegularityParams
) -> EventSystem:
    """Pair events A_ij = {X_ij in upper tail interval or lower tail interval}.

    The evaluator accepts a graph or a precomputed length-C(n,2) vector of
    pair counts in lexicographic order.
    """
    upper, lower = common_neighbour_intervals(params, x, x_prime)
    n = params.n
    m = n * (n - 1) // 2

    def evaluator(sample: object) -> np.ndarray:
        values = _pair_values(sample, n)
        mask = (values > upper[0]) & (values < upper[1])
        mask |= (values > lower[0]) & (values < lower[1])
        return np.flatnonzero(mask)

    return EventSystem(
        m=m,
        evaluator=evaluator,
        description=f"common-neighbour tails n={n} d={params.d} x={x} x'={x_prime}",
    )


def _pair_values(sample: object, n: int) -> np.ndarray:
    if isinstance(sample, LabelledGraph):
        if sample.n != n:
            raise ValueError(f"graph has {sample.n} vertices, system expects {n}")
        rows, cols = _triu(n)
        return pair_count_matrix(sample)[rows, cols]
    values = np.asarray(sample)
    if values.shape != (n * (n - 1) // 2,):
        raise ValueError(
            f"expected a graph or {n * (n - 1) // 2} pair values, got shape {values.shape}"
        )
    return values


def _open_interval_mass(N: int, p: float, interval: tuple[float, float]) -> float:
    lo, hi = interval
    if lo >= hi:  # covers lo = +inf and hi = -inf
        return 0.0
    a = math.floor(lo) + 1 if math.isfinite(lo) else 0
    b = math.ceil(hi) - 1 if math.isfinite(hi) else N
    a, b = max(a, 0), min(b, N)
    if a > b:
        return 0.0
    return float(_binom.cdf(b, N, p) - _binom.cdf(a - 1, N, p))


def event_marginal_binomial(params: RegularityParams, x: float, x_prime: float) -> float:
    """Exact Bin(N,p)-surrogate probability of a single event A_ij."""
    upper, lower = common_neighbour_intervals(params, x, x_prime)
    ap = binom_approx_params(params)
    both = (max(upper[0], lower[0]), min(upper[1], lower[1]))
    return (
        _open_interval_mass(ap.N, ap.p, upper)
        + _open_interval_mass(ap.N, ap.p, lower)
        - _open_interval_mass(ap.N, ap.p, both)
    )


def delta2_binomial_proxy(params: RegularityParams, x: float, x_prime: float) -> float:
    """delta2 under equal binomial marginals: (# dependent pairs) * q^2.

    The overlap digraph has n(n-1)(n-2)/2 unordered dependent pairs.
    """
    q = event_marginal_binomial(params, x, x_prime)
    n = params.n
    return n * (n - 1) * (n - 2) / 2 * q * q


# --- coefficient estimators ------------------------------------------------------


def evaluate_events(sys: EventSystem, samples: Iterable[object]) -> list[np.ndarray]:
    """Fired-index arrays for each sample; reusable across estimators."""
    return [sys.fired(s) for s in samples]


def _as_fired(
    sys: EventSystem, samples: Iterable[object], prefired: bool
) -> list[np.ndarray]:
    if prefired:
        return [np.asarray(f, dtype=np.int64) for f in samples]
    return evaluate_events(sys, samples)


@dataclass(frozen=True)
class PhiEstimate:
    phi: float
    ci: tuple[float, float]
    per_event: dict[int, float]
    skipped: tuple[int, ...]
    n_never_fired: int
    n_samples: int


def estimate_phi(
    sys: EventSystem,
    D: DependencyDigraph,
    samples: Iterable[object],
    *,
    min_hits: int = 50,
    n_boot: int = 200,
    level: float = 0.95,
    rng: np.random.Generator | None = None,
    prefired: bool = False,
) -> PhiEstimate:
    """Mixing coefficient: max_i |P(U_i | A_i) - P(U_i)| over well-hit events.

    U_i is the union of events j < i outside D_i. Events with fewer than
    min_hits occurrences are excluded from the max and reported in
    `skipped` (never-fired events are only counted); phi is NaN when nothing
    survives the filter. No event firing at all raises.
    """
    if rng is None:
        rng = np.random.default_rng(0)
    fired = _as_fired(sys, samples, prefired)
    N = len(fired)
    if N == 0:
        raise ValueError("no samples")
    counts = np.zeros(sys.m, dtype=np.int64)
    for f in fired:
        counts[f] += 1
    if counts.sum() == 0:
        raise ValueError("no event ever fires: phi is undefined")

    eligible = [int(i) for i in np.flatnonzero(counts >= min_hits)]
    skipped = tuple(int(i) for i in np.flatnonzero((0 < counts) & (counts < min_hits)))
    n_never = int(np.sum(counts == 0))
    if not eligible:
        return PhiEstimate(
            phi=float("nan"),
            ci=(float("nan"), float("nan")),
            per_event={},
            skipped=skipped,
            n_never_fired=n_never,
            n_samples=N,
        )

    # per-sample indicators for A_i and U_i, eligible i only
    A = np.zeros((len(eligible), N), dtype=bool)
    U = np.zeros((len(eligible), N), dtype=bool)
    for s, f in enumerate(fired):
        if len(f) == 0:
            continue
        fset = f.tolist()
        for row, i in enumerate(eligible):
            pos = np.searchsorted(f, i)
            if pos < len(f) and f[pos] == i:
                A[row, s] = True
            U[row, s] = any(j < i and not D.contains(i, j) for j in fset)

    def _phi(idx: np.ndarray) -> float:
        best = -1.0
        for row in range(len(eligible)):
            a = A[row, idx]
            na = a.sum()
            if na == 0:
                continue
            pu = U[row, idx].mean()
            pua = U[row, idx][a].mean()
            best = max(best, abs(pua - pu))
        return best

    per_event = {}
    for row, i in enumerate(eligible):
        pu = U[row].mean()
        pua = U[row][A[row]].mean()
        per_event[i] = abs(pua - pu)
    phi = max(per_event.values())

    boots = []
    for _ in range(n_boot):
        idx = rng.integers(0, N, size=N)
        b = _phi(idx)
        if b >= 0:
            boots.append(b)
    alpha = (1 - level) / 2
    if boots:
        lo, hi = np.quantile(boots, [alpha, 1 - alpha])
        ci = (float(lo), float(hi))
    else:
        ci = (float("nan"), float("nan"))
    return PhiEstimate(
        phi=float(phi),
        ci=ci,
        per_event=per_event,
        skipped=skipped,
        n_never_fired=n_never,
        n_samples=N,
    )


@dataclass(frozen=True)
class DeltaEstimate:
    delta1: float
    delta2: float
    ci1: tuple[float, float]
    ci2: tuple[float, float]
    n_samples: int


def _overlap_joint_count(f: np.ndarray, n: int) -> int:
    # fired pairs sharing a vertex: sum_v C(f_v, 2); distinct pairs share <= 1
    if len(f) < 2:
        return 0
    rows, cols = _triu(n)
    fv = np.bincount(np.concatenate([rows[f], cols[f]]), minlength=n)
    return int(np.sum(fv * (fv - 1) // 2))


def _overlap_delta2(counts: np.ndarray, n: int, n_samples: int) -> float:
    nz = np.flatnonzero(counts)
    if len(nz) == 0:
        return 0.0
    p = counts[nz] / n_samples
    rows, cols = _triu(n)
    S = np.zeros(n)
    Q = np.zeros(n)
    for ends in (rows[nz], cols[nz]):
        np.add.at(S, ends, p)
        np.add.at(Q, ends, p * p)
    return float(np.sum(S * S - Q) / 2)


def estimate_deltas(
    sys: EventSystem,
    D: DependencyDigraph,
    samples: Iterable[object],
    *,
    n_boot: int = 200,
    level: float = 0.95,
    rng: np.random.Generator | None = None,
    prefired: bool = False,
) -> DeltaEstimate:
    """Declustering coefficients over dependency edges.

    delta1 sums empirical joint probabilities P(A_i and A_j), delta2 the
    products of the marginals, both over unordered dependent event pairs.
    The pair-overlap digraph gets an O(n) per-sample aggregation (each
    dependent pair shares exactly one vertex); other digraphs fall back to
    the generic edge iteration.
    """
    if rng is None:
        rng = np.random.default_rng(0)
    fired = _as_fired(sys, samples, prefired)
    N = len(fired)
    if N == 0:
        raise ValueError("no samples")
    counts = np.zeros(sys.m, dtype=np.int64)
    for f in fired:
        counts[f] += 1

    overlap = isinstance(D, PairOverlapDigraph)
    if overlap:
        joint = np.array([_overlap_joint_count(f, D.n) for f in fired], dtype=np.int64)

        def _delta2(cnt: np.ndarray) -> float:
            return _overlap_delta2(cnt, D.n, N)

    else:
        edges = [
            (i, j) for i in range(sys.m) for j in D.neighbours(i) if j < i
        ]

        def _joint_count(f: np.ndarray) -> int:
            fset = set(f.tolist())
            return sum(1 for i, j in edges if i in fset and j in fset)

        joint = np.array([_joint_count(f) for f in fired], dtype=np.int64)

        def _delta2(cnt: np.ndarray) -> float:
            p = cnt / N
            return float(sum(p[i] * p[j] for i, j in edges))

    delta1 = float(joint.mean())
    delta2 = _delta2(counts)

    boots1 = np.empty(n_boot)
    boots2 = np.empty(n_boot)
    for k in range(n_boot):
        idx = rng.integers(0, N, size=N)
        boots1[k] = joint[idx].mean()
        cnt = np.zeros(sys.m, dtype=np.int64)
        for s in idx:
            cnt[fired[s]] += 1
        boots2[k] = _delta2(cnt)
    alpha = (1 - level) / 2
    lo1, hi1 = np.quantile(boots1, [alpha, 1 - alpha])
    lo2, hi2 = np.quantile(boots2, [alpha, 1 - alpha])
    return DeltaEstimate(
        delta1=delta1,
        delta2=delta2,
        ci1=(float(lo1), float(hi1)),
        ci2=(float(lo2), float(hi2)),
        n_samples=N,
    )


@dataclass(frozen=True)
class Coefficients:
    """phi, delta1, delta2 with standard errors."""

    phi: float
    delta1: float
    delta2: float
    phi_se: float = 0.0
    delta1_se: float = 0.0
    delta2_se: float = 0.0

    def __post_init__(self) -> None:
        for name in ("phi", "delta1", "delta2", "phi_se", "delta1_se", "delta2_se"):
            v = getattr(self, name)
            if math.isfinite(v) and v < 0:
                raise ValueError(f"{name} must be >= 0, got {v}")
        if math.isfinite(self.phi) and self.phi > 1:
            raise ValueError(f"phi must be <= 1, got {self.phi}")


def extremal_bound(coeffs: Coefficients, marginal_probs: Sequence[float]) -> float:
    """(1 - prod(1 - p_i)) * phi + max(delta1, delta2)."""
    p = np.asarray(marginal_probs, dtype=float)
    if p.size and (p.min() < -1e-12 or p.max() > 1 + 1e-12):
        raise ValueError("marginals must lie in [0, 1]")
    p = np.clip(p, 0.0, 1.0)
    with np.errstate(divide="ignore"):
        log_none = np.sum(np.log1p(-p))
    none_prob = float(np.exp(log_none)) if np.isfinite(log_none) else 0.0
    return (1 - none_prob) * coeffs.phi + max(coeffs.delta1, coeffs.delta2)


# --- exactly solvable synthetic systems ------------------------------------------


@dataclass(frozen=True)
class SyntheticEventSystem:
    """Finite joint law over m binary events, everything computable exactly.

    outcomes[k] is a 0/1 vector, probs[k] its probability. Ground truth for
    the Monte Carlo estimators and for checking that extremal_bound really
    dominates |Pr(no event) - prod(1 - p_i)|.
    """

    outcomes: tuple[tuple[int, ...], ...]
    probs: tuple[float, ...]

    def __post_init__(self) -> None:
        if not self.outcomes:
            raise ValueError("need at least one outcome")
        if len(self.outcomes) != len(self.probs):
            raise ValueError("outcomes and probs must align")
        m = len(self.outcomes[0])
        if any(len(o) != m for o in self.outcomes):
            raise ValueError("outcomes must share a length")
        if any(v not in (0, 1) for o in self.outcomes for v in o):
            raise ValueError("outcomes must be 0/1 vectors")
        if any(w < 0 for w in self.probs) or abs(sum(self.probs) - 1) > 1e-9:
            raise ValueError("probs must be a distribution")

    @property
    def m(self) -> int:
        return len(self.outcomes[0])

    def to_event_system(self) -> EventSystem:
        def evaluator(sample: object) -> np.ndarray:
            v = np.asarray(sample)
            if v.shape != (self.m,):
                raise ValueError(f"expected a length-{self.m} 0/1 vector")
            return np.flatnonzero(v)

        return EventSystem(m=self.m, evaluator=evaluator, description="synthetic")

    def sample(self, rng: np.random.Generator, size: int) -> list[np.ndarray]:
        picks = rng.choice(len(self.outcomes), size=size, p=self.probs)
        table = np.asarray(self.outcomes, dtype=np.int8)
        return [table[k] for k in picks]

    def marginals(self) -> np.ndarray:
        table = np.asarray(self.outcomes, dtype=float)
        w = np.asarray(self.probs)
        return w @ table

    def exact_phi(self, D: DependencyDigraph) -> float:
        table = np.asarray(self.outcomes, dtype=bool)
        w = np.asarray(self.probs)
        best = -1.0
        for i in range(self.m):
            pa = w[table[:, i]].sum()
            if pa == 0:
                continue
            free = [j for j in range(i) if not D.contains(i, j)]
            u = table[:, free].any(axis=1) if free else np.zeros(len(w), dtype=bool)
            pu = w[u].sum()
            pua = w[u & table[:, i]].sum() / pa
            best = max(best, abs(pua - pu))
        if best < 0:
            raise ValueError("no event has positive probability")
        return best

    def exact_deltas(self, D: DependencyDigraph) -> tuple[float, float]:
        table = np.asarray(self.outcomes, dtype=bool)
        w = np.asarray(self.probs)
        p = self.marginals()
        d1 = d2 = 0.0
        for i in range(self.m):
            for j in D.neighbours(i):
                if j >= i:
                    continue
                d1 += w[table[:, i] & table[:, j]].sum()
                d2 += p[i] * p[j]
        return d1, d2

    def none_fire_gap(self) -> float:
        """|Pr(no event fires) - prod(1 - p_i)|, the quantity the bound caps."""
        table = np.asarray(self.outcomes, dtype=bool)
        w = np.asarray(self.probs)
        p_none = w[~table.any(axis=1)].sum()
        return abs(p_none - float(np.prod(1 - self.marginals())))


# --- joint-law comparisons --------------------------------------------------------


@dataclass(frozen=True)
class FDiffReport:
    f_graph: float
    f_surrogate: float
    diff: float
    ci: tuple[float, float]
    max_threshold: float
    min_threshold: float
    n_graph: int
    n_surrogate: int


def _max_min_array(samples: object, n: int) -> np.ndarray:
    if isinstance(samples, np.ndarray):
        if samples.ndim != 2 or samples.shape[1] != 2:
            raise ValueError(f"expected shape (N, 2), got {samples.shape}")
        return samples.astype(float)
    out = []
    for g in samples:  # type: ignore[union-attr]
        if isinstance(g, LabelledGraph):
            if g.n != n:
                raise ValueError(f"graph has {g.n} vertices, expected {n}")
            rows, cols = _triu(n)
            vals = pair_count_matrix(g)[rows, cols]
            out.append((vals.max(), vals.min()))
        else:
            mx, mn = g
            out.append((float(mx), float(mn)))
    return np.asarray(out, dtype=float)


def empirical_F_vs_Fhat(
    graph_samples: object,
    surrogate_samples: object,
    x: float,
    x_prime: float,
    params: RegularityParams,
    *,
    rng: np.random.Generator | None = None,
    n_boot: int = 200,
    level: float = 0.95,
) -> FDiffReport:
    """Joint CDF of (X_max, X_min) from graphs minus the independent surrogate.

    Both sample sets reduce to indicators of {max <= a + b x, min >= 2 lam^2 n
    - a + b x'}; the difference of means is reported with a bootstrap CI
    (independent resampling on the two sets).
    """
    if rng is None:
        rng = np.random.default_rng(0)
    c = scaling_constants(params)
    t_max = c.a + c.b * x
    t_min = 2 * params.lam * params.lam * params.n - c.a + c.b * x_prime
    gm = _max_min_array(graph_samples, params.n)
    sm = _max_min_array(surrogate_samples, params.n)
    ga = (gm[:, 0] <= t_max) & (gm[:, 1] >= t_min)
    sa = (sm[:, 0] <= t_max) & (sm[:, 1] >= t_min)
    f_graph = float(ga.mean())
    f_surr = float(sa.mean())

    boots = np.empty(n_boot)
    for k in range(n_boot):
        bg = ga[rng.integers(0, len(ga), size=len(ga))].mean()
        bs = sa[rng.integers(0, len(sa), size=len(sa))].mean()
        boots[k] = bg - bs
    alpha = (1 - level) / 2
    lo, hi = np.quantile(boots, [alpha, 1 - alpha])
    return FDiffReport(
        f_graph=f_graph,
        f_surrogate=f_surr,
        diff=f_graph - f_surr,
        ci=(float(lo), float(hi)),
        max_threshold=t_max,
        min_threshold=t_min,
        n_graph=len(ga),
        n_surrogate=len(sa),
    )


@dataclass(frozen=True)
class RatioEstimate:
    ratio: float
    ci: tuple[float, float]
    p_first: float
    p_second: float
    p_both: float
    n_samples: int


def joint_ratio_estimate(
    graph_samples: Iterable[LabelledGraph],
    i: int,
    j: int,
    j2: int,
    Y: Iterable[int],
    Y2: Iterable[int],
    *,
    rng: np.random.Generator | None = None,
    n_boot: int = 200,
    level: float = 0.95,
) -> RatioEstimate:
    """P(X_ij in Y and X_ij2 in Y2) / (P(X_ij in Y) P(X_ij2 in Y2)).

    The two pairs share the vertex i. Callers are responsible for keeping Y,
    Y2 inside the central window where the bounded-ratio guarantee applies.
    Zero denominator raises.
    """
    if len({i, j, j2}) != 3:
        raise ValueError(f"need three distinct vertices, got i={i} j={j} j2={j2}")
    if rng is None:
        rng = np.random.default_rng(0)
    y1 = frozenset(Y)
    y2 = frozenset(Y2)
    ind = []
    for g in graph_samples:
        a = common_neighbours(g, i, j) in y1
        b = common_neighbours(g, i, j2) in y2
        ind.append((a, b))
    arr = np.asarray(ind, dtype=bool)
    if len(arr) == 0:
        raise ValueError("no samples")
    p1 = float(arr[:, 0].mean())
    p2 = float(arr[:, 1].mean())
    p12 = float((arr[:, 0] & arr[:, 1]).mean())
    if p1 == 0 or p2 == 0:
        raise ValueError(f"undefined estimate: marginal hits p1={p1}, p2={p2}")

    boots = []
    for _ in range(n_boot):
        b = arr[rng.integers(0, len(arr), size=len(arr))]
        b1, b2 = b[:, 0].mean(), b[:, 1].mean()
        if b1 == 0 or b2 == 0:
            continue
        boots.append((b[:, 0] & b[:, 1]).mean() / (b1 * b2))
    alpha = (1 - level) / 2
    if boots:
        lo, hi = np.quantile(boots, [alpha, 1 - alpha])
        ci = (float(lo), float(hi))
    else:
        ci = (float("nan"), float("nan"))
    return RatioEstimate(
        ratio=p12 / (p1 * p2),
        ci=ci,
        p_first=p1,
        p_second=p2,
        p_both=p12,
        n_samples=len(arr),
    )
