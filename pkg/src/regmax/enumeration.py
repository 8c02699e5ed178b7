"""Exact ground truth for small labelled graphs with a given degree sequence.

Two independent routes to the same counts:

* ``enumerate_graphs`` materializes every graph by recursive neighbourhood
  assignment (usable up to n = 10 by default);
* ``count_graphs`` runs a memoized dynamic program over degree multisets and
  never touches individual graphs (usable up to n = 12 by default).

Everything downstream that needs certainty (formula validation, sampler
uniformity, conditional distributions) is checked against these.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Callable, Iterable, Sequence

from .graphs import DegreeSequence, LabelledGraph, _erdos_gallai

__all__ = [
    "EnumerationResult",
    "ExactDistribution",
    "enumerate_graphs",
    "count_graphs",
    "mckay_log_count",
    "mckay_asymptotic_count",
    "exact_common_neighbour_dist",
    "exact_neighbourhood_prob",
    "exact_edge_prob",
]

ENUMERATE_CAP = 10
COUNT_CAP = 12


def _as_degrees(ds: DegreeSequence | Sequence[int]) -> tuple[int, ...]:
    if isinstance(ds, DegreeSequence):
        return ds.degrees
    return DegreeSequence(tuple(ds)).degrees  # validates bounds


@dataclass(frozen=True)
class EnumerationResult:
    count: int
    n: int
    degrees: tuple[int, ...]


def enumerate_graphs(
    ds: DegreeSequence | Sequence[int],
    visitor: Callable[[LabelledGraph], None] | None = None,
    cap: int = ENUMERATE_CAP,
) -> EnumerationResult:
    """Visit every labelled simple graph realizing ``ds`` exactly once.

    Non-graphical sequences (including odd total degree) give count 0, not an
    error. n beyond ``cap`` refuses up front: the state space is super
    exponential and a silent week-long loop helps nobody.
    """
    degrees = _as_degrees(ds)
    n = len(degrees)
    if n > cap:
        raise ValueError(f"n={n} exceeds enumeration cap {cap}; raise cap explicitly if you mean it")

    g = LabelledGraph(n)
    remaining = list(degrees)
    count = 0

    def assign(v: int) -> None:
        nonlocal count
        # Edges at vertices < v are fully decided; v's remaining stubs must
        # go to later vertices.
        while v < n and remaining[v] == 0:
            v += 1
        if v == n:
            count += 1
            if visitor is not None:
                visitor(g.copy())
            return
        later = range(v + 1, n)
        need = remaining[v]
        candidates = [u for u in later if remaining[u] > 0]
        if len(candidates) < need:
            return
        for chosen in combinations(candidates, need):
            for u in chosen:
                remaining[u] -= 1
                g.add_edge(v, u)
            remaining[v] = 0
            if _erdos_gallai(sorted(remaining[v + 1 :], reverse=True)):
                assign(v + 1)
            remaining[v] = need
            for u in chosen:
                remaining[u] += 1
                g.remove_edge(v, u)

    if sum(degrees) % 2 == 0:
        assign(0)
    return EnumerationResult(count=count, n=n, degrees=degrees)


@lru_cache(maxsize=None)
def _count_sorted(desc: tuple[int, ...]) -> int:
    """Graphs realizing a non-increasing degree sequence, by multiset DP.

    Pivot on the max-degree vertex; choose how many of its neighbours fall in
    each remaining degree class (multiplicities give binomial factors), then
    recurse on the reduced multiset. Sorting collapses permutations of equal
    degrees into one memo entry.
    """
    if desc and desc[-1] < 0:
        return 0
    if not desc or desc[0] == 0:
        return 1
    if desc[0] > len(desc) - 1 or sum(desc) % 2:
        return 0
    k = desc[0]
    rest = desc[1:]
    # degree classes of the remaining vertices: list of (value, multiplicity)
    classes: list[tuple[int, int]] = []
    for deg in rest:
        if classes and classes[-1][0] == deg:
            classes[-1] = (deg, classes[-1][1] + 1)
        else:
            classes.append((deg, 1))

    total = 0

    def pick(ci: int, left: int, ways: int, reduced: list[int]) -> None:
        nonlocal total
        if left == 0:
            tail = [deg for deg, cnt in classes[ci:] for _ in range(cnt)]
            nxt = tuple(sorted(reduced + tail, reverse=True))
            total += ways * _count_sorted(nxt)
            return
        if ci == len(classes):
            return
        deg, cnt = classes[ci]
        hi = min(cnt, left)
        # zero-degree vertices cannot absorb a pivot edge
        if deg == 0:
            hi = 0
        for take in range(hi + 1):
            pick(
                ci + 1,
                left - take,
                ways * math.comb(cnt, take),
                reduced + [deg - 1] * take + [deg] * (cnt - take),
            )

    pick(0, k, 1, [])
    return total


def count_graphs(ds: DegreeSequence | Sequence[int], cap: int = COUNT_CAP) -> int:
    """Exact number of labelled graphs with degree sequence ``ds``.

    Independent of :func:`enumerate_graphs`; the two are cross-checked in
    tests. Returns 0 for non-graphical sequences.
    """
    degrees = _as_degrees(ds)
    if len(degrees) > cap:
        raise ValueError(f"n={len(degrees)} exceeds counting cap {cap}; raise cap explicitly if you mean it")
    return _count_sorted(tuple(sorted(degrees, reverse=True)))


def mckay_log_count(ds: DegreeSequence | Sequence[int]) -> float:
    """log of the asymptotic count for dense almost-regular sequences.

    sqrt(2) * e^{1/4} * (mu^mu (1-mu)^(1-mu))^C(n,2) * prod_j C(n-1, d_j)
    with mu = dbar/(n-1). Log space; degenerate degrees 0 or n-1 are outside
    the dense regime and rejected.
    """
    degrees = _as_degrees(ds)
    n = len(degrees)
    if n < 3:
        raise ValueError(f"need n >= 3, got {n}")
    if any(deg in (0, n - 1) for deg in degrees):
        raise ValueError("degenerate degree (0 or n-1): outside the dense regime")
    mu = sum(degrees) / n / (n - 1)
    pairs = n * (n - 1) / 2
    out = 0.5 * math.log(2) + 0.25
    out += pairs * (mu * math.log(mu) + (1 - mu) * math.log(1 - mu))
    for deg in degrees:
        out += math.lgamma(n) - math.lgamma(deg + 1) - math.lgamma(n - deg)
    return out


def mckay_asymptotic_count(ds: DegreeSequence | Sequence[int]) -> float:
    """exp of :func:`mckay_log_count`; overflows to inf for large n by design."""
    return math.exp(mckay_log_count(ds))


@dataclass(frozen=True)
class ExactDistribution:
    """PMF on a finite integer support with exact integer weights behind it."""

    support: tuple[int, ...]
    counts: tuple[int, ...]
    total: int

    @property
    def mass(self) -> tuple[float, ...]:
        return tuple(c / self.total for c in self.counts)

    def prob(self, h: int) -> float:
        try:
            return self.counts[self.support.index(h)] / self.total
        except ValueError:
            return 0.0

    def exact_prob(self, h: int) -> Fraction:
        try:
            return Fraction(self.counts[self.support.index(h)], self.total)
        except ValueError:
            return Fraction(0)

    def mean(self) -> float:
        return sum(h * c for h, c in zip(self.support, self.counts)) / self.total

    def tv_distance(self, other: dict[int, float]) -> float:
        """Total variation against an arbitrary integer pmf given as a dict."""
        keys = set(self.support) | set(other)
        return 0.5 * sum(abs(self.prob(h) - other.get(h, 0.0)) for h in keys)


def _conditional_counts(n: int, d: int, condition: str) -> dict[int, int]:
    """#(d-regular graphs on [n] with X_01 = h), split by the 01-edge condition.

    Counts neighbourhood pairs (A, B) for vertices 0 and 1 with |A & B| = h
    combinatorially, then multiplies by completions of the remaining degree
    sequence via the DP. No graph is ever materialized.
    """
    # k = stubs of 0 and 1 that go into {2..n-1}
    k = d - 1 if condition == "edge" else d
    rest = n - 2
    out: dict[int, int] = {}
    for h in range(0, k + 1):
        if 2 * k - h > rest:
            continue
        ways = (
            math.comb(rest, h)
            * math.comb(rest - h, k - h)
            * math.comb(rest - k, k - h)
        )
        if ways == 0:
            continue
        # reduced degrees on {2..n-1}: common neighbours lose 2, exclusive lose 1
        reduced = [d - 2] * h + [d - 1] * (2 * (k - h)) + [d] * (rest - 2 * k + h)
        completions = _count_sorted(tuple(sorted(reduced, reverse=True)))
        if completions:
            out[h] = ways * completions
    return out


def exact_common_neighbour_dist(
    n: int, d: int, condition: str = "unconditional", cap: int = COUNT_CAP
) -> ExactDistribution:
    """Exact distribution of the common-neighbour count of vertices 0 and 1.

    condition: "edge" (01 present), "nonedge" (01 absent) or "unconditional".
    Exchangeability makes the pair choice irrelevant. Conditioning on an
    event no graph satisfies is an error.
    """
    if condition not in ("edge", "nonedge", "unconditional"):
        raise ValueError(f"unknown condition {condition!r}")
    if n > cap:
        raise ValueError(f"n={n} exceeds counting cap {cap}")
    DegreeSequence.regular(n, d)  # bounds check
    if condition == "unconditional":
        parts = [_conditional_counts(n, d, c) for c in ("edge", "nonedge")]
        counts: dict[int, int] = {}
        for part in parts:
            for h, c in part.items():
                counts[h] = counts.get(h, 0) + c
    else:
        counts = _conditional_counts(n, d, condition)
    total = sum(counts.values())
    if total == 0:
        raise ValueError(f"no {d}-regular graph on {n} vertices satisfies condition {condition!r}")
    support = tuple(sorted(counts))
    return ExactDistribution(
        support=support, counts=tuple(counts[h] for h in support), total=total
    )


def exact_neighbourhood_prob(
    ds: DegreeSequence | Sequence[int], i: int, neighbourhood: Iterable[int]
) -> Fraction:
    """Pr(N(i) = A) under the uniform graph with degree sequence ``ds``.

    |A| must equal d_i. Computed as (#completions)/(#graphs): delete i, lower
    each a in A by one, count both sides exactly.
    """
    degrees = _as_degrees(ds)
    n = len(degrees)
    A = set(neighbourhood)
    if i in A or not A <= set(range(n)):
        raise ValueError(f"neighbourhood {sorted(A)} invalid for vertex {i} on [{n}]")
    if len(A) != degrees[i]:
        raise ValueError(f"|A|={len(A)} != d_i={degrees[i]}")
    total = count_graphs(degrees)
    if total == 0:
        raise ValueError("degree sequence is not graphical")
    reduced = [deg - (v in A) for v, deg in enumerate(degrees) if v != i]
    if min(reduced) < 0:
        return Fraction(0)
    return Fraction(_count_sorted(tuple(sorted(reduced, reverse=True))), total)


def exact_edge_prob(ds: DegreeSequence | Sequence[int], i: int, j: int) -> Fraction:
    """Pr(ij is an edge) under the uniform graph with degree sequence ``ds``.

    Inclusion-exclusion on forcing the edge t times:
    #(graphs containing ij) = sum_{t>=1} (-1)^(t-1) N(ds - t*(e_i + e_j)).
    """
    degrees = _as_degrees(ds)
    n = len(degrees)
    if i == j or not (0 <= i < n and 0 <= j < n):
        raise ValueError(f"bad vertex pair ({i},{j}) on [{n}]")
    total = count_graphs(degrees)
    if total == 0:
        raise ValueError("degree sequence is not graphical")
    with_edge = 0
    sign = 1
    reduced = list(degrees)
    for _ in range(min(degrees[i], degrees[j])):
        reduced[i] -= 1
        reduced[j] -= 1
        if reduced[i] < 0 or reduced[j] < 0:
            break
        with_edge += sign * _count_sorted(tuple(sorted(reduced, reverse=True)))
        sign = -sign
    return Fraction(with_edge, total)
