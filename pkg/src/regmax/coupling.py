"""Couplings between conditioned graph levels.

Two layers:

* the generic bipartite coupling procedure (steps 1-7) run exactly on an
  explicit meta-graph, used for validation at desk scale;
* the switching moves between graphs whose pinned pair (i, j) has h and h+1
  common neighbours, chained into an executable surrogate of the level
  coupling with bounded per-vertex neighbourhood differences.

A switching triple (u, v, w) moving up (X_ij -> X_ij + 1): u a neighbour of
i but not j, v a neighbour of j but not i, w adjacent to u but not v; the
move removes edges {j,v}, {u,w} and inserts {j,u}, {v,w}. Down is the exact
mirror; applying up then down with the same triple restores the graph.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np

from .graphs import LabelledGraph, RegularityParams, common_neighbours
from .sampling import ChainConfig, sample_conditional

__all__ = [
    "SwitchingTriple",
    "BipartiteMetaGraph",
    "CouplingOutcome",
    "CoupleReport",
    "good_sets",
    "couple",
    "complete_meta_graph",
    "example_meta_graph",
    "h_switchings",
    "count_h_switchings",
    "sample_h_switching",
    "apply_switching",
    "mean_switching_degree",
    "couple_step",
    "couple_to_h",
]


# --- generic bipartite coupling ----------------------------------------------


@dataclass(frozen=True)
class BipartiteMetaGraph:
    """Explicit bipartite graph on index sets S = 0..s-1, T = 0..t-1.

    Edges may carry labels (the switching's w); labels are opaque here.
    """

    s_size: int
    t_size: int
    edges: tuple[tuple[int, int], ...]
    labels: tuple[object, ...] | None = None

    def __post_init__(self) -> None:
        if self.s_size < 1 or self.t_size < 1:
            raise ValueError("both sides must be nonempty")
        for x, y in self.edges:
            if not (0 <= x < self.s_size and 0 <= y < self.t_size):
                raise ValueError(f"edge ({x},{y}) outside S x T")
        if len(set(self.edges)) != len(self.edges):
            raise ValueError("duplicate edges")
        if self.labels is not None and len(self.labels) != len(self.edges):
            raise ValueError("labels must align with edges")

    @property
    def size(self) -> int:
        return len(self.edges)

    @cached_property
    def edge_set(self) -> frozenset[tuple[int, int]]:
        return frozenset(self.edges)

    def degrees(self) -> tuple[np.ndarray, np.ndarray]:
        ds = np.zeros(self.s_size, dtype=np.int64)
        dt = np.zeros(self.t_size, dtype=np.int64)
        for x, y in self.edges:
            ds[x] += 1
            dt[y] += 1
        return ds, dt


@dataclass(frozen=True)
class CouplingOutcome:
    x: int
    y: int
    in_D: bool
    label: object | None = None


def good_sets(D: BipartiteMetaGraph, eps: float) -> tuple[set[int], set[int]]:
    """States with degree at least (1-eps) * |D| / (side size)."""
    if D.size == 0:
        raise ValueError("empty meta-graph")
    ds, dt = D.degrees()
    s_good = {x for x in range(D.s_size) if ds[x] >= (1 - eps) * D.size / D.s_size}
    t_good = {y for y in range(D.t_size) if dt[y] >= (1 - eps) * D.size / D.t_size}
    return s_good, t_good


def couple(
    D: BipartiteMetaGraph, eps: float, delta: float, rng: np.random.Generator
) -> CouplingOutcome:
    """One draw of the seven-step coupling; X, Y exactly uniform on S, T.

    Requires |S_good| >= (1-delta)|S| and likewise for T (the regime where
    Pr(XY not in D) <= 2 eps + 4 delta holds); the raised error carries the
    measured deficits otherwise.
    """
    s_good, t_good = good_sets(D, eps)
    if len(s_good) < (1 - delta) * D.s_size or len(t_good) < (1 - delta) * D.t_size:
        raise ValueError(
            "good-set precondition failed: "
            f"|S_good|/|S| = {len(s_good) / D.s_size:.4f}, "
            f"|T_good|/|T| = {len(t_good) / D.t_size:.4f}, need >= {1 - delta:.4f}"
        )
    ds, dt = D.degrees()
    s_good_list = sorted(s_good)
    t_good_list = sorted(t_good)
    s_bad = sorted(set(range(D.s_size)) - s_good)
    t_bad = sorted(set(range(D.t_size)) - t_good)

    # 1. uniform meta-edge
    k = int(rng.integers(D.size))
    x_hat, y_hat = D.edges[k]
    # 2. uniform draws from the good sets
    x_prime = s_good_list[int(rng.integers(len(s_good_list)))]
    y_prime = t_good_list[int(rng.integers(len(t_good_list)))]
    # 3-7. Bernoulli corrections make X-tilde, Y-tilde uniform on the good sets
    if x_hat in s_good:
        p = (1 - eps) * D.size / (D.s_size * ds[x_hat])
        assert p <= 1 + 1e-12, f"Bernoulli parameter {p} > 1 for a good state"
        x_tilde = x_hat if rng.random() < p else x_prime
    else:
        x_tilde = x_prime
    if y_hat in t_good:
        p = (1 - eps) * D.size / (D.t_size * dt[y_hat])
        assert p <= 1 + 1e-12, f"Bernoulli parameter {p} > 1 for a good state"
        y_tilde = y_hat if rng.random() < p else y_prime
    else:
        y_tilde = y_prime
    # extension to uniform on all of S, T
    if s_bad and rng.random() >= len(s_good) / D.s_size:
        x = s_bad[int(rng.integers(len(s_bad)))]
    else:
        x = x_tilde
    if t_bad and rng.random() >= len(t_good) / D.t_size:
        y = t_bad[int(rng.integers(len(t_bad)))]
    else:
        y = y_tilde

    in_D = (x, y) in D.edge_set
    label = None
    if D.labels is not None and (x, y) == (x_hat, y_hat):
        label = D.labels[k]
    return CouplingOutcome(x=x, y=y, in_D=in_D, label=label)


def complete_meta_graph(s_size: int, t_size: int) -> BipartiteMetaGraph:
    """K_{s,t}; with eps = 0 every Bernoulli parameter is exactly 1."""
    edges = tuple((x, y) for x in range(s_size) for y in range(t_size))
    return BipartiteMetaGraph(s_size=s_size, t_size=t_size, edges=edges)


def example_meta_graph() -> BipartiteMetaGraph:
    """Fixed 4x4 validation instance: S-degrees (4, 3, 3, 2), T-degrees all 3.

    State 3 on the S side drops out of the good set for any eps < 1/3, so the
    extension branch and the bad-state path are both exercised. Needs
    delta >= 1/4.
    """
    edges = (
        (0, 0), (0, 1), (0, 2), (0, 3),
        (1, 0), (1, 1), (1, 2),
        (2, 1), (2, 2), (2, 3),
        (3, 0), (3, 3),
    )
    return BipartiteMetaGraph(
        s_size=4, t_size=4, edges=edges, labels=tuple(range(len(edges)))
    )


# --- h <-> h+1 switchings ----------------------------------------------------


@dataclass(frozen=True)
class SwitchingTriple:
    u: int
    v: int
    w: int


def _uv_candidates(g: LabelledGraph, i: int, j: int, direction: str):
    """Bitset rows for the u-range and v-range of the requested direction."""
    ri, rj = g.rows[i], g.rows[j]
    excl = (1 << i) | (1 << j)
    full = (1 << g.n) - 1
    if direction == "up":
        u_row = ri & ~rj & ~excl
        v_row = rj & ~ri & ~excl
    elif direction == "down":
        u_row = ri & rj & ~excl
        v_row = full & ~ri & ~rj & ~excl
    else:
        raise ValueError(f"direction must be 'up' or 'down', got {direction!r}")
    return u_row, v_row, excl


def _w_mask(g: LabelledGraph, u: int, v: int, excl: int, direction: str) -> int:
    # up: w adjacent to u, not to v; down: adjacent to v, not to u
    if direction == "up":
        base = g.rows[u] & ~g.rows[v]
    else:
        base = g.rows[v] & ~g.rows[u]
    return base & ~excl & ~(1 << u) & ~(1 << v)


def _iter_bits(x: int):
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


def apply_switching(
    g: LabelledGraph, i: int, j: int, triple: SwitchingTriple, direction: str
) -> LabelledGraph:
    """New graph after the switching; X_ij changes by exactly +-1."""
    u, v, w = triple.u, triple.v, triple.w
    out = g.copy()
    if direction == "up":
        out.remove_edge(j, v)
        out.remove_edge(u, w)
        out.add_edge(j, u)
        out.add_edge(v, w)
    elif direction == "down":
        out.remove_edge(j, u)
        out.remove_edge(v, w)
        out.add_edge(j, v)
        out.add_edge(u, w)
    else:
        raise ValueError(f"direction must be 'up' or 'down', got {direction!r}")
    return out


def h_switchings(
    g: LabelledGraph, i: int, j: int, direction: str
) -> list[tuple[SwitchingTriple, LabelledGraph]]:
    """All switchings available at g for the pinned pair, with their results.

    Empty list when none exist (e.g. direction up at X_ij = d).
    """
    out = []
    u_row, v_row, excl = _uv_candidates(g, i, j, direction)
    for u in _iter_bits(u_row):
        for v in _iter_bits(v_row):
            for w in _iter_bits(_w_mask(g, u, v, excl, direction)):
                triple = SwitchingTriple(u, v, w)
                out.append((triple, apply_switching(g, i, j, triple, direction)))
    return out


def count_h_switchings(g: LabelledGraph, i: int, j: int, direction: str) -> int:
    """|h_switchings(g, i, j, direction)| without materializing graphs."""
    total = 0
    u_row, v_row, excl = _uv_candidates(g, i, j, direction)
    for u in _iter_bits(u_row):
        for v in _iter_bits(v_row):
            total += _w_mask(g, u, v, excl, direction).bit_count()
    return total


def sample_h_switching(
    g: LabelledGraph, i: int, j: int, direction: str, rng: np.random.Generator
) -> SwitchingTriple | None:
    """Uniform draw from the available switchings; None when there are none.

    Weighted (u, v) selection by w-count, then the k-th admissible w: exactly
    uniform over triples without building the list.
    """
    u_row, v_row, excl = _uv_candidates(g, i, j, direction)
    pairs: list[tuple[int, int, int]] = []
    total = 0
    for u in _iter_bits(u_row):
        for v in _iter_bits(v_row):
            c = _w_mask(g, u, v, excl, direction).bit_count()
            if c:
                pairs.append((u, v, c))
                total += c
    if total == 0:
        return None
    k = int(rng.integers(total))
    for u, v, c in pairs:
        if k >= c:
            k -= c
            continue
        for w in _iter_bits(_w_mask(g, u, v, excl, direction)):
            if k == 0:
                return SwitchingTriple(u, v, w)
            k -= 1
    raise AssertionError("unreachable: weighted selection fell through")


def mean_switching_degree(params: RegularityParams, h: int, direction: str) -> float:
    """Population-level estimate of the switching count at level h.

    up (from a graph with X_ij = h):   (d-h)^2 * (d - lam^2 n)
    down (from a graph with X_ij = h): h * (n - 2 - 2d + h) * (d - lam^2 n)

    Both reduce to lam^3 (1-lam)^3 n^3 at h = lam^2 n up to O(n^2) terms.
    """
    n, d, lam = params.n, params.d, params.lam
    wbar = d - lam * lam * n
    if direction == "up":
        return (d - h) ** 2 * wbar
    if direction == "down":
        return h * (n - 2 - 2 * d + h) * wbar
    raise ValueError(f"direction must be 'up' or 'down', got {direction!r}")


# --- chained level coupling ---------------------------------------------------

DEFAULT_EPS = 1e-3
# deg_D concentrates within a few percent of its mean but the mean estimate
# itself is ~2% off at finite n; the margin keeps rejection a tail event
DBAR_MARGIN = 0.25


def couple_step(
    g: LabelledGraph,
    i: int,
    j: int,
    direction: str,
    rng: np.random.Generator,
    eps: float = DEFAULT_EPS,
    cfg: ChainConfig | None = None,
) -> tuple[LabelledGraph, int | None, bool]:
    """One level move h -> h+-1 through the switching meta-graph.

    Draws a uniform switching, then accepts the partner with a Bernoulli
    correction min(1, (1-eps) * Dbar / deg_rev(partner)) where deg_rev is the
    partner's switching count in the reverse direction and Dbar its
    population estimate (inflated by DBAR_MARGIN so the parameter is
    typically 1). Rejection or an empty switching list falls back to an
    independent conditional sample of the target level; the flag reports
    whether the meta-edge path was used.
    """
    x = common_neighbours(g, i, j)
    target = x + 1 if direction == "up" else x - 1
    params = RegularityParams.from_degree(g.n, g.degree(0))
    if not 0 <= target <= params.d:
        raise ValueError(f"target level {target} outside [0, {params.d}]")

    triple = sample_h_switching(g, i, j, direction, rng)
    if triple is not None:
        partner = apply_switching(g, i, j, triple, direction)
        reverse = "down" if direction == "up" else "up"
        deg_rev = count_h_switchings(partner, i, j, reverse)
        dbar = (1 + DBAR_MARGIN) * mean_switching_degree(params, target, reverse)
        p_accept = min(1.0, (1 - eps) * dbar / deg_rev) if deg_rev else 0.0
        if rng.random() < p_accept:
            return partner, triple.w, True

    # fallback: independent uniform draw from the target level; fresh seed per
    # call so repeated fallbacks under one cfg stay independent
    seed = int(rng.integers(2**63))
    fb = ChainConfig(seed=seed) if cfg is None else replace(cfg, seed=seed)
    fresh = sample_conditional(params, i, j, target, fb)
    return fresh, None, False


@dataclass
class CoupleReport:
    """Bookkeeping of one chained coupling run."""

    steps: int = 0
    fallbacks: int = 0
    independent: bool = False
    max_vertex_diff: int = 0
    vertex_diffs: dict[int, int] = field(default_factory=dict)
    w_labels: list[int] = field(default_factory=list)
    uv_reuse_violations: int = 0
    degree_ok: bool = True


def _diff_by_vertex(g0: LabelledGraph, g1: LabelledGraph, i: int, j: int) -> dict[int, int]:
    """Symmetric-difference sizes of per-vertex neighbourhoods, k not in {i,j}."""
    out = {}
    for k in range(g0.n):
        if k in (i, j):
            continue
        diff = (g0.rows[k] ^ g1.rows[k]).bit_count()
        if diff:
            out[k] = diff
    return out


def couple_to_h(
    g: LabelledGraph,
    i: int,
    j: int,
    h_target: int,
    rng: np.random.Generator,
    eps: float = DEFAULT_EPS,
    cfg: ChainConfig | None = None,
) -> tuple[LabelledGraph, CoupleReport]:
    """Drive X_ij to h_target through chained couple_steps.

    Start levels farther than sqrt(n) log n from the target skip the chain
    entirely: the output is an independent conditional sample (reported).
    The report carries per-vertex neighbourhood differences between input
    and output, fallback counts, w labels and u/v reuse violations.
    """
    report = CoupleReport()
    x0 = common_neighbours(g, i, j)
    params = RegularityParams.from_degree(g.n, g.degree(0))
    if not 0 <= h_target <= params.d:
        raise ValueError(f"h_target={h_target} outside [0, {params.d}]")

    if abs(x0 - h_target) > math.sqrt(g.n) * math.log(g.n):
        seed = int(rng.integers(2**63))
        fb = ChainConfig(seed=seed) if cfg is None else replace(cfg, seed=seed)
        out = sample_conditional(params, i, j, h_target, fb)
        report.independent = True
    else:
        out = g
        used_uv: set[int] = set()
        direction = "up" if h_target > x0 else "down"
        for _ in range(abs(h_target - x0)):
            before = out
            out, w, via_meta = couple_step(out, i, j, direction, rng, eps=eps, cfg=cfg)
            report.steps += 1
            if via_meta:
                report.w_labels.append(w)
                # reconstruct u, v from the changed rows for reuse accounting
                changed = [
                    k
                    for k in range(out.n)
                    if k not in (i, j) and before.rows[k] != out.rows[k]
                ]
                for k in changed:
                    delta_j = (before.rows[k] ^ out.rows[k]) >> j & 1
                    if delta_j and k != w:  # u and v both toggle their j-edge
                        if k in used_uv:
                            report.uv_reuse_violations += 1
                        used_uv.add(k)
            else:
                report.fallbacks += 1

    diffs = _diff_by_vertex(g, out, i, j)
    report.vertex_diffs = diffs
    report.max_vertex_diff = max(diffs.values()) if diffs else 0
    report.degree_ok = set(out.degrees().degrees) == {params.d}
    return out, report
