"""Labelled simple graphs on {0..n-1} with bitset adjacency rows.

Rows are Python ints used as bitsets, so common-neighbour counts are
single popcounts and symmetric-difference bookkeeping is cheap XOR.
Dense numeric paths (pair_count_matrix) go through numpy instead.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence, TextIO

import numpy as np

__all__ = [
    "RegularityParams",
    "DegreeSequence",
    "LabelledGraph",
    "CommonNeighbourProfile",
    "common_neighbours",
    "common_neighbour_profile",
    "pair_count_matrix",
    "double_edge_switch",
    "write_edge_list",
    "read_edge_list",
]


@dataclass(frozen=True)
class RegularityParams:
    """Degree-regularity triple (n, d, lam) with d = lam*(n-1) exactly.

    Construct via ``RegularityParams.from_degree(n, d)`` unless you already
    hold a consistent triple. dn must be even for d-regular graphs on n
    vertices to exist at all.
    """

    n: int
    d: int
    lam: float

    def __post_init__(self) -> None:
        if self.n < 3:
            raise ValueError(f"need n >= 3, got n={self.n}")
        if not 0 < self.d < self.n - 1:
            raise ValueError(f"need 0 < d < n-1 (interior density), got d={self.d}, n={self.n}")
        if self.n * self.d % 2:
            raise ValueError(f"dn must be even, got n={self.n}, d={self.d}")
        if abs(self.lam * (self.n - 1) - self.d) > 1e-9:
            raise ValueError(
                f"inconsistent density: lam*(n-1)={self.lam * (self.n - 1)!r} != d={self.d}"
            )

    @classmethod
    def from_degree(cls, n: int, d: int) -> "RegularityParams":
        return cls(n=n, d=d, lam=d / (n - 1))

    @classmethod
    def from_density(cls, n: int, lam: float) -> "RegularityParams":
        """Round lam*(n-1) to the nearest integer degree; it must land exactly."""
        d = round(lam * (n - 1))
        if abs(lam * (n - 1) - d) > 1e-9:
            raise ValueError(f"lam={lam} gives non-integer degree at n={n}")
        return cls(n=n, d=d, lam=d / (n - 1))

    @property
    def edge_count(self) -> int:
        return self.n * self.d // 2

    @property
    def pair_count(self) -> int:
        return self.n * (self.n - 1) // 2


@dataclass(frozen=True)
class DegreeSequence:
    """Degree sequence on n = len(degrees) labelled vertices.

    Only per-vertex bounds are validated here; parity and graphicality are
    separate queries because counting routines must be able to answer 0 for
    non-graphical input rather than refuse it.
    """

    degrees: tuple[int, ...]

    def __post_init__(self) -> None:
        n = len(self.degrees)
        if n < 1:
            raise ValueError("empty degree sequence")
        for i, deg in enumerate(self.degrees):
            if not 0 <= deg <= n - 1:
                raise ValueError(f"degree {deg} at vertex {i} outside [0, {n - 1}]")

    @classmethod
    def regular(cls, n: int, d: int) -> "DegreeSequence":
        return cls(degrees=(d,) * n)

    @property
    def n(self) -> int:
        return len(self.degrees)

    def sum_is_even(self) -> bool:
        return sum(self.degrees) % 2 == 0

    def is_graphical(self) -> bool:
        """Erdos-Gallai test: realizable by some simple graph."""
        return _erdos_gallai(sorted(self.degrees, reverse=True))

    def almost_regular(self, c: int, d: int) -> bool:
        """max_i |d_i - d| <= c."""
        return all(abs(deg - d) <= c for deg in self.degrees)


def _erdos_gallai(desc: Sequence[int]) -> bool:
    """Graphicality of a non-increasing degree sequence."""
    if sum(desc) % 2:
        return False
    n = len(desc)
    prefix = 0
    for k in range(1, n + 1):
        prefix += desc[k - 1]
        tail = sum(min(deg, k) for deg in desc[k:])
        if prefix > k * (k - 1) + tail:
            return False
    return True


class LabelledGraph:
    """Simple undirected graph; ``rows[v]`` is the neighbour bitset of v."""

    __slots__ = ("n", "rows")

    def __init__(self, n: int, rows: list[int] | None = None):
        if n < 1:
            raise ValueError(f"need n >= 1, got {n}")
        self.n = n
        self.rows: list[int] = rows if rows is not None else [0] * n

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "LabelledGraph":
        g = cls(n)
        for u, v in edges:
            g.add_edge(u, v)
        return g

    @classmethod
    def from_numpy(cls, adj: np.ndarray) -> "LabelledGraph":
        adj = np.asarray(adj)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
            raise ValueError(f"adjacency must be square, got shape {adj.shape}")
        if (adj != adj.T).any() or adj.diagonal().any():
            raise ValueError("adjacency must be symmetric with zero diagonal")
        n = adj.shape[0]
        g = cls(n)
        for u in range(n):
            row = 0
            for v in np.flatnonzero(adj[u]):
                row |= 1 << int(v)
            g.rows[u] = row
        return g

    def copy(self) -> "LabelledGraph":
        return LabelledGraph(self.n, list(self.rows))

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.rows[u] >> v & 1)

    def add_edge(self, u: int, v: int) -> None:
        if u == v:
            raise ValueError(f"loop at vertex {u}")
        if not (0 <= u < self.n and 0 <= v < self.n):
            raise ValueError(f"edge ({u},{v}) outside vertex range [0,{self.n})")
        if self.has_edge(u, v):
            raise ValueError(f"edge ({u},{v}) already present")
        self.rows[u] |= 1 << v
        self.rows[v] |= 1 << u

    def remove_edge(self, u: int, v: int) -> None:
        if not self.has_edge(u, v):
            raise ValueError(f"edge ({u},{v}) not present")
        self.rows[u] &= ~(1 << v)
        self.rows[v] &= ~(1 << u)

    def degree(self, v: int) -> int:
        return self.rows[v].bit_count()

    def degrees(self) -> DegreeSequence:
        return DegreeSequence(tuple(row.bit_count() for row in self.rows))

    def neighbours(self, v: int) -> Iterator[int]:
        row = self.rows[v]
        while row:
            low = row & -row
            yield low.bit_length() - 1
            row ^= low

    @property
    def edge_count(self) -> int:
        return sum(row.bit_count() for row in self.rows) // 2

    def edges(self) -> Iterator[tuple[int, int]]:
        for u in range(self.n):
            row = self.rows[u] >> (u + 1) << (u + 1)  # only v > u
            while row:
                low = row & -row
                yield u, low.bit_length() - 1
                row ^= low

    def adjacency_key(self) -> tuple[int, ...]:
        """Hashable canonical snapshot (labelled, not up to isomorphism)."""
        return tuple(self.rows)

    def to_numpy(self) -> np.ndarray:
        adj = np.zeros((self.n, self.n), dtype=np.uint8)
        for u, v in self.edges():
            adj[u, v] = adj[v, u] = 1
        return adj

    def validate(self) -> None:
        """Check symmetry and absence of loops; raises on corruption."""
        for u in range(self.n):
            if self.rows[u] >> self.n:
                raise ValueError(f"row {u} has bits beyond vertex range")
            if self.rows[u] >> u & 1:
                raise ValueError(f"loop at vertex {u}")
            row = self.rows[u]
            while row:
                low = row & -row
                v = low.bit_length() - 1
                if not self.rows[v] >> u & 1:
                    raise ValueError(f"asymmetric edge ({u},{v})")
                row ^= low

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LabelledGraph):
            return NotImplemented
        return self.n == other.n and self.rows == other.rows

    def __hash__(self) -> int:
        return hash((self.n, tuple(self.rows)))

    def __repr__(self) -> str:
        return f"LabelledGraph(n={self.n}, m={self.edge_count})"


def common_neighbours(g: LabelledGraph, i: int, j: int) -> int:
    """Number of common neighbours X_ij = |N(i) & N(j)|; i=j is an error."""
    if i == j:
        raise ValueError(f"need distinct vertices, got i=j={i}")
    if not (0 <= i < g.n and 0 <= j < g.n):
        raise ValueError(f"vertices ({i},{j}) outside range [0,{g.n})")
    return (g.rows[i] & g.rows[j]).bit_count()


@dataclass(frozen=True)
class CommonNeighbourProfile:
    """All pair counts of a graph plus their extremes."""

    values: dict[tuple[int, int], int]
    x_max: int
    x_min: int

    def argmax(self) -> tuple[int, int]:
        return max(self.values, key=lambda p: (self.values[p], (-p[0], -p[1])))


def common_neighbour_profile(g: LabelledGraph) -> CommonNeighbourProfile:
    """Exact X_ij for every pair i<j. n >= 2 required for extremes to exist."""
    if g.n < 2:
        raise ValueError("profile needs at least two vertices")
    values: dict[tuple[int, int], int] = {}
    rows = g.rows
    for i in range(g.n):
        ri = rows[i]
        for j in range(i + 1, g.n):
            values[(i, j)] = (ri & rows[j]).bit_count()
    counts = values.values()
    return CommonNeighbourProfile(values=values, x_max=max(counts), x_min=min(counts))


def pair_count_matrix(g: LabelledGraph) -> np.ndarray:
    """(n,n) int matrix M with M[i,j] = X_ij off-diagonal, degrees on the diagonal.

    Computed as A @ A in float64, exact for counts up to 2^53; fast path for
    bulk statistics, cross-checked against the bitset route in tests.
    """
    adj = g.to_numpy().astype(np.float64)
    return (adj @ adj).astype(np.int64)


def double_edge_switch(
    g: LabelledGraph, e1: tuple[int, int], e2: tuple[int, int]
) -> tuple[LabelledGraph, bool]:
    """Replace edges {a,b},{c,d} by {a,c},{b,d} when both replacements are absent.

    Returns (graph, applied). The input graph is never mutated; on rejection
    the same object comes back with applied=False. Rejection cases: either
    replacement edge already present, or the two edges share a vertex (the
    chain treats both as a null move). Passing a non-edge is an error.
    """
    a, b = e1
    c, d = e2
    for u, v in (e1, e2):
        if not g.has_edge(u, v):
            raise ValueError(f"({u},{v}) is not an edge")
    if len({a, b, c, d}) < 4:
        return g, False
    if g.has_edge(a, c) or g.has_edge(b, d):
        return g, False
    out = g.copy()
    out.remove_edge(a, b)
    out.remove_edge(c, d)
    out.add_edge(a, c)
    out.add_edge(b, d)
    return out, True


def write_edge_list(g: LabelledGraph, fh: TextIO) -> None:
    """Header line "n d" then one "u v" line per edge (u < v), ascending.

    Only regular graphs are serialized; d is taken from vertex 0 and checked.
    """
    degs = g.degrees().degrees
    d = degs[0]
    if any(deg != d for deg in degs):
        raise ValueError("edge-list format requires a regular graph")
    fh.write(f"{g.n} {d}\n")
    for u, v in g.edges():
        fh.write(f"{u} {v}\n")


def read_edge_list(fh: TextIO) -> LabelledGraph:
    """Inverse of write_edge_list; validates the degree header."""
    header = fh.readline().split()
    if len(header) != 2:
        raise ValueError(f"bad header {header!r}, expected 'n d'")
    n, d = int(header[0]), int(header[1])
    g = LabelledGraph(n)
    for line in fh:
        if not line.strip():
            continue
        u, v = map(int, line.split())
        g.add_edge(u, v)
    degs = g.degrees().degrees
    if any(deg != d for deg in degs):
        raise ValueError(f"degrees {sorted(set(degs))} do not match header d={d}")
    return g
