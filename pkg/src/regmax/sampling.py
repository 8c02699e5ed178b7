"""Markov-chain samplers for dense regular graphs plus the independent
binomial surrogate.

The workhorse is a double-edge-switch chain. Proposals are pre-generated in
fixed-size blocks from a PCG64 stream, so a chain's trajectory is a pure
function of (params, config, start graph) regardless of how advance() calls
are chunked, and the compiled and pure-Python engines consume identical
proposal arrays (tests assert bit-identical trajectories).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .graphs import LabelledGraph, RegularityParams
from .theory import BinomApprox

try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    _HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        return wrap


__all__ = [
    "ChainConfig",
    "SampleBatch",
    "SwitchChain",
    "initial_regular_graph",
    "sample_uniform",
    "conditional_chain",
    "sample_conditional",
    "sample_binomial_max",
    "surrogate_max_min_batch",
    "default_burn_in",
    "default_thinning",
]

_BLOCK = 1 << 16  # proposals per RNG call; fixed so trajectories never depend on call chunking


def default_burn_in(params: RegularityParams) -> int:
    """20 * m * ln(m) proposals, m = edge count. Empirical, not a theorem."""
    m = params.edge_count
    return int(20 * m * math.log(m))


def default_thinning(params: RegularityParams) -> int:
    """2 * m proposals between retained samples."""
    return 2 * params.edge_count


@dataclass(frozen=True)
class ChainConfig:
    """Switch-chain parameters. burn_in/thinning None = size-derived defaults."""

    seed: int = 0
    burn_in: int | None = None
    thinning: int | None = None
    engine: str = "auto"  # auto | numba | python

    def __post_init__(self) -> None:
        if self.burn_in is not None and self.burn_in < 0:
            raise ValueError(f"burn_in must be >= 0, got {self.burn_in}")
        if self.thinning is not None and self.thinning < 1:
            raise ValueError(f"thinning must be >= 1, got {self.thinning}")
        if self.engine not in ("auto", "numba", "python"):
            raise ValueError(f"unknown engine {self.engine!r}")


@dataclass(frozen=True)
class SampleBatch:
    """Retained samples plus chain diagnostics."""

    params: RegularityParams
    graphs: list[LabelledGraph]
    proposals: int
    accepted: int

    @property
    def acceptance_rate(self) -> float:
        return self.accepted / self.proposals if self.proposals else 0.0


def initial_regular_graph(params: RegularityParams) -> LabelledGraph:
    """Deterministic circulant start: offsets +-1..floor(d/2), plus the
    antipodal offset n/2 when d is odd (parity forces n even then)."""
    n, d = params.n, params.d
    g = LabelledGraph(n)
    for off in range(1, d // 2 + 1):
        for v in range(n):
            u = (v + off) % n
            if not g.has_edge(v, u):
                g.add_edge(v, u)
    if d % 2:
        if n % 2:
            raise ValueError(f"odd d={d} needs even n, got n={n}")
        half = n // 2
        for v in range(half):
            g.add_edge(v, v + half)
    return g


# --- chain kernels -----------------------------------------------------------
#
# Both engines share one contract: given the adjacency matrix, the edge slot
# array and a block of proposals (raw e1 index, raw e2 index in [0, m-1)
# shifted past e1, orientation bit), apply each proposal in order, counting
# rejections as steps. The restricted variant additionally rolls back any
# switch that changes the common-neighbour count of a pinned pair (i, j).


def _python_run(adj, edges, e1s, e2s, orients, lo, hi):
    accepted = 0
    for t in range(lo, hi):
        e1 = e1s[t]
        e2 = e2s[t]
        if e2 >= e1:
            e2 += 1
        a, b = edges[e1, 0], edges[e1, 1]
        c, d = edges[e2, 0], edges[e2, 1]
        if orients[t] == 1:
            c, d = d, c
        if a == c or a == d or b == c or b == d:
            continue
        if adj[a, c] or adj[b, d]:
            continue
        adj[a, b] = adj[b, a] = 0
        adj[c, d] = adj[d, c] = 0
        adj[a, c] = adj[c, a] = 1
        adj[b, d] = adj[d, b] = 1
        edges[e1, 0], edges[e1, 1] = a, c
        edges[e2, 0], edges[e2, 1] = b, d
        accepted += 1
    return accepted


def _python_run_restricted(adj, edges, e1s, e2s, orients, lo, hi, i, j, h):
    n = adj.shape[0]
    accepted = 0
    for t in range(lo, hi):
        e1 = e1s[t]
        e2 = e2s[t]
        if e2 >= e1:
            e2 += 1
        oa, ob = edges[e1, 0], edges[e1, 1]
        oc, od = edges[e2, 0], edges[e2, 1]
        a, b, c, d = oa, ob, oc, od
        if orients[t] == 1:
            c, d = d, c
        if a == c or a == d or b == c or b == d:
            continue
        if adj[a, c] or adj[b, d]:
            continue
        adj[a, b] = adj[b, a] = 0
        adj[c, d] = adj[d, c] = 0
        adj[a, c] = adj[c, a] = 1
        adj[b, d] = adj[d, b] = 1
        if a == i or a == j or b == i or b == j or c == i or c == j or d == i or d == j:
            x = 0
            for w in range(n):
                x += int(adj[i, w]) & int(adj[j, w])
            if x != h:
                adj[a, c] = adj[c, a] = 0
                adj[b, d] = adj[d, b] = 0
                adj[oa, ob] = adj[ob, oa] = 1
                adj[oc, od] = adj[od, oc] = 1
                continue
        edges[e1, 0], edges[e1, 1] = a, c
        edges[e2, 0], edges[e2, 1] = b, d
        accepted += 1
    return accepted


@njit(cache=True)
def _numba_run(adj, edges, e1s, e2s, orients, lo, hi):  # pragma: no cover - compiled
    accepted = 0
    for t in range(lo, hi):
        e1 = e1s[t]
        e2 = e2s[t]
        if e2 >= e1:
            e2 += 1
        a = edges[e1, 0]
        b = edges[e1, 1]
        c = edges[e2, 0]
        d = edges[e2, 1]
        if orients[t] == 1:
            c, d = d, c
        if a == c or a == d or b == c or b == d:
            continue
        if adj[a, c] or adj[b, d]:
            continue
        adj[a, b] = 0
        adj[b, a] = 0
        adj[c, d] = 0
        adj[d, c] = 0
        adj[a, c] = 1
        adj[c, a] = 1
        adj[b, d] = 1
        adj[d, b] = 1
        edges[e1, 0] = a
        edges[e1, 1] = c
        edges[e2, 0] = b
        edges[e2, 1] = d
        accepted += 1
    return accepted


@njit(cache=True)
def _numba_run_restricted(adj, edges, e1s, e2s, orients, lo, hi, i, j, h):  # pragma: no cover
    n = adj.shape[0]
    accepted = 0
    for t in range(lo, hi):
        e1 = e1s[t]
        e2 = e2s[t]
        if e2 >= e1:
            e2 += 1
        oa = edges[e1, 0]
        ob = edges[e1, 1]
        oc = edges[e2, 0]
        od = edges[e2, 1]
        a = oa
        b = ob
        c = oc
        d = od
        if orients[t] == 1:
            c, d = d, c
        if a == c or a == d or b == c or b == d:
            continue
        if adj[a, c] or adj[b, d]:
            continue
        adj[a, b] = 0
        adj[b, a] = 0
        adj[c, d] = 0
        adj[d, c] = 0
        adj[a, c] = 1
        adj[c, a] = 1
        adj[b, d] = 1
        adj[d, b] = 1
        if a == i or a == j or b == i or b == j or c == i or c == j or d == i or d == j:
            x = 0
            for w in range(n):
                x += adj[i, w] & adj[j, w]
            if x != h:
                adj[a, c] = 0
                adj[c, a] = 0
                adj[b, d] = 0
                adj[d, b] = 0
                adj[oa, ob] = 1
                adj[ob, oa] = 1
                adj[oc, od] = 1
                adj[od, oc] = 1
                continue
        edges[e1, 0] = a
        edges[e1, 1] = c
        edges[e2, 0] = b
        edges[e2, 1] = d
        accepted += 1
    return accepted


class SwitchChain:
    """Double-edge-switch chain over d-regular graphs on [n].

    Unrestricted: stationary distribution uniform over all d-regular graphs
    (symmetric proposal, rejections counted as steps). With restrict=(i,j,h)
    it is the same chain Metropolis-restricted to graphs with X_ij = h.
    """

    def __init__(
        self,
        params: RegularityParams,
        cfg: ChainConfig,
        start: LabelledGraph | None = None,
        restrict: tuple[int, int, int] | None = None,
    ):
        self.params = params
        self.cfg = cfg
        g = start if start is not None else initial_regular_graph(params)
        degs = set(g.degrees().degrees)
        if degs != {params.d}:
            raise ValueError(f"start graph degrees {sorted(degs)} != {params.d}")
        self.adj = g.to_numpy()
        self.edge_slots = np.array(list(g.edges()), dtype=np.int64)
        self.restrict = restrict
        if restrict is not None:
            i, j, h = restrict
            x = int((self.adj[i] & self.adj[j]).sum())
            if x != h:
                raise ValueError(f"start graph has X_{i}{j}={x}, restriction wants {h}")
        self.proposals = 0
        self.accepted = 0
        self._rng = np.random.Generator(np.random.PCG64(cfg.seed))
        self._buf_pos = _BLOCK  # force refill on first use
        self._e1 = np.empty(0, dtype=np.int64)
        use_numba = cfg.engine == "numba" or (cfg.engine == "auto" and _HAVE_NUMBA)
        if cfg.engine == "numba" and not _HAVE_NUMBA:
            raise RuntimeError("numba engine requested but numba is not importable")
        if use_numba:
            self._run, self._run_restricted = _numba_run, _numba_run_restricted
        else:
            self._run, self._run_restricted = _python_run, _python_run_restricted

    def _refill(self) -> None:
        m = self.edge_slots.shape[0]
        self._e1 = self._rng.integers(0, m, size=_BLOCK, dtype=np.int64)
        self._e2 = self._rng.integers(0, m - 1, size=_BLOCK, dtype=np.int64)
        self._orient = self._rng.integers(0, 2, size=_BLOCK, dtype=np.int64)
        self._buf_pos = 0

    def advance(self, steps: int) -> None:
        """Run the chain for `steps` proposals (rejections included)."""
        left = steps
        while left > 0:
            if self._buf_pos >= _BLOCK:
                self._refill()
            take = min(left, _BLOCK - self._buf_pos)
            lo, hi = self._buf_pos, self._buf_pos + take
            if self.restrict is None:
                acc = self._run(self.adj, self.edge_slots, self._e1, self._e2, self._orient, lo, hi)
            else:
                i, j, h = self.restrict
                acc = self._run_restricted(
                    self.adj, self.edge_slots, self._e1, self._e2, self._orient, lo, hi, i, j, h
                )
            self.accepted += int(acc)
            self.proposals += take
            self._buf_pos = hi
            left -= take

    def state(self) -> LabelledGraph:
        return LabelledGraph.from_numpy(self.adj)

    def adjacency(self) -> np.ndarray:
        """Copy of the current adjacency matrix (uint8)."""
        return self.adj.copy()

    def run_burn_in(self) -> None:
        burn = self.cfg.burn_in if self.cfg.burn_in is not None else default_burn_in(self.params)
        self.advance(burn)

    def samples(self, count: int) -> Iterator[LabelledGraph]:
        """Burn in, then yield `count` thinned states."""
        self.run_burn_in()
        thin = self.cfg.thinning if self.cfg.thinning is not None else default_thinning(self.params)
        for _ in range(count):
            self.advance(thin)
            yield self.state()


def sample_uniform(params: RegularityParams, cfg: ChainConfig) -> LabelledGraph:
    """One approximately uniform d-regular graph (fresh chain, full burn-in)."""
    chain = SwitchChain(params, cfg)
    chain.run_burn_in()
    return chain.state()


def _drive_to_h(
    g: LabelledGraph, i: int, j: int, h: int, rng: np.random.Generator
) -> LabelledGraph:
    """Greedily push X_ij to h, one switching (exactly +-1) at a time."""
    # imported here: coupling's fallback path needs sample_conditional back
    from .coupling import apply_switching, sample_h_switching
    from .graphs import common_neighbours

    x = common_neighbours(g, i, j)
    while x != h:
        direction = "up" if x < h else "down"
        triple = sample_h_switching(g, i, j, direction, rng)
        if triple is None:
            raise RuntimeError(
                f"no {direction} switching available at X_{i},{j}={x}; cannot reach h={h} greedily"
            )
        g = apply_switching(g, i, j, triple, direction)
        x += 1 if direction == "up" else -1
    return g


def conditional_chain(
    params: RegularityParams,
    i: int,
    j: int,
    h: int,
    cfg: ChainConfig,
    start: LabelledGraph | None = None,
) -> SwitchChain:
    """Restricted chain targeting uniform on {g : X_ij(g) = h}, not yet burned in.

    The start graph is driven to X_ij = h by greedy switchings first; an
    unreachable h raises.
    """
    if not 0 <= h <= params.d:
        raise ValueError(f"h={h} outside [0, d={params.d}]")
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([cfg.seed, 0xD21E])))
    g = start if start is not None else initial_regular_graph(params)
    g = _drive_to_h(g, i, j, h, rng)
    return SwitchChain(params, cfg, start=g, restrict=(i, j, h))


def sample_conditional(
    params: RegularityParams,
    i: int,
    j: int,
    h: int,
    cfg: ChainConfig,
    start: LabelledGraph | None = None,
) -> LabelledGraph:
    """One sample from the uniform distribution on {g : X_ij(g) = h}."""
    chain = conditional_chain(params, i, j, h, cfg, start=start)
    chain.run_burn_in()
    return chain.state()


def sample_binomial_max(
    n: int, approx: BinomApprox, rng: np.random.Generator
) -> tuple[int, int]:
    """(max, min) of C(n,2) iid Bin(N,p) draws: the independent surrogate."""
    assert 0 < approx.p < 1, "surrogate p must be interior"
    m = n * (n - 1) // 2
    vals = rng.binomial(approx.N, approx.p, size=m)
    return int(vals.max()), int(vals.min())


def surrogate_max_min_batch(
    n: int, approx: BinomApprox, rng: np.random.Generator, count: int
) -> np.ndarray:
    """(count, 2) array of surrogate (max, min) pairs; row-chunked."""
    out = np.empty((count, 2), dtype=np.int64)
    m = n * (n - 1) // 2
    # keep peak memory near 10^7 draws
    rows = max(1, min(count, 10_000_000 // max(m, 1)))
    done = 0
    while done < count:
        k = min(rows, count - done)
        vals = rng.binomial(approx.N, approx.p, size=(k, m))
        out[done : done + k, 0] = vals.max(axis=1)
        out[done : done + k, 1] = vals.min(axis=1)
        done += k
    return out
