"""Immutable host graph and bitmask edge sets.

The host graph fixes a canonical edge indexing (edges sorted by
(min endpoint, max endpoint)); every other module speaks edge indices.
An EdgeSet is a bitmask over those indices and doubles as a Markov chain
state, a flat of the support lattice, or an edit support.

Enumeration APIs elsewhere require m <= ENUM_EDGE_CAP so that all 2^m
states are addressable; EdgeSet itself places no limit on m (Python ints
are arbitrary precision), so simulation works on hosts of any size.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator

from .errors import (
    DuplicateEdge,
    EdgeOutOfRange,
    HostMismatch,
    SelfLoop,
    ValidationError,
    VertexOutOfRange,
)

# Hard cap for APIs that index all 2^m states densely.
ENUM_EDGE_CAP = 63


@dataclass(frozen=True)
class EdgeSet:
    """Subset of host edges, stored as a bitmask over edge indices."""

    m: int
    mask: int = 0

    def __post_init__(self) -> None:
        if self.m < 0:
            raise ValidationError(f"edge count must be non-negative, got {self.m}")
        if self.mask < 0 or self.mask >> self.m:
            raise EdgeOutOfRange(
                f"mask {self.mask:#x} sets bits outside the {self.m} host edges"
            )

    @classmethod
    def empty(cls, m: int) -> "EdgeSet":
        return cls(m, 0)

    @classmethod
    def full(cls, m: int) -> "EdgeSet":
        return cls(m, (1 << m) - 1)

    @classmethod
    def from_indices(cls, m: int, indices: Iterable[int]) -> "EdgeSet":
        mask = 0
        for e in indices:
            if not 0 <= e < m:
                raise EdgeOutOfRange(f"edge index {e} not in [0, {m})")
            mask |= 1 << e
        return cls(m, mask)

    def _check_host(self, other: "EdgeSet") -> None:
        if self.m != other.m:
            raise HostMismatch(f"edge counts differ: {self.m} != {other.m}")

    def union(self, other: "EdgeSet") -> "EdgeSet":
        self._check_host(other)
        return EdgeSet(self.m, self.mask | other.mask)

    def intersection(self, other: "EdgeSet") -> "EdgeSet":
        self._check_host(other)
        return EdgeSet(self.m, self.mask & other.mask)

    def difference(self, other: "EdgeSet") -> "EdgeSet":
        self._check_host(other)
        return EdgeSet(self.m, self.mask & ~other.mask)

    def symmetric_difference(self, other: "EdgeSet") -> "EdgeSet":
        self._check_host(other)
        return EdgeSet(self.m, self.mask ^ other.mask)

    def complement(self) -> "EdgeSet":
        return EdgeSet(self.m, ((1 << self.m) - 1) & ~self.mask)

    __or__ = union
    __and__ = intersection
    __sub__ = difference
    __xor__ = symmetric_difference
    __invert__ = complement

    def issubset(self, other: "EdgeSet") -> bool:
        self._check_host(other)
        return self.mask & ~other.mask == 0

    def __contains__(self, e: int) -> bool:
        return 0 <= e < self.m and bool(self.mask >> e & 1)

    def __iter__(self) -> Iterator[int]:
        return iter(self.indices())

    def __len__(self) -> int:
        return self.mask.bit_count()

    def __bool__(self) -> bool:
        return self.mask != 0

    def indices(self) -> tuple[int, ...]:
        return tuple(e for e in range(self.m) if self.mask >> e & 1)

    def hex(self) -> str:
        return format(self.mask, "#x")

    def __repr__(self) -> str:
        return f"EdgeSet(m={self.m}, {{{', '.join(map(str, self.indices()))}}})"


@dataclass(frozen=True)
class HostGraph:
    """Fixed host graph with canonical lexicographic edge indexing."""

    n: int
    edges: tuple[tuple[int, int], ...]

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def edge_index(self) -> dict[tuple[int, int], int]:
        return {e: i for i, e in enumerate(self.edges)}

    def index_of(self, u: int, v: int) -> int:
        key = (u, v) if u < v else (v, u)
        try:
            return self.edge_index[key]
        except KeyError:
            raise EdgeOutOfRange(f"{{{u}, {v}}} is not a host edge") from None

    def degree(self, v: int) -> int:
        if not 0 <= v < self.n:
            raise VertexOutOfRange(f"vertex {v} not in [0, {self.n})")
        return sum(1 for e in self.edges if v in e)

    def empty_set(self) -> EdgeSet:
        return EdgeSet.empty(self.m)

    def full_set(self) -> EdgeSet:
        return EdgeSet.full(self.m)

    def __repr__(self) -> str:
        return f"HostGraph(n={self.n}, m={self.m})"


def from_edge_list(n: int, pairs: Iterable[Iterable[int]]) -> HostGraph:
    """Build a host graph from vertex pairs, canonicalizing edge order.

    Rejects self-loops, endpoints outside [0, n), and duplicate pairs.
    """
    if n < 1:
        raise VertexOutOfRange(f"vertex count must be positive, got {n}")
    normalized: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    for pair in pairs:
        u, v = sorted(pair)
        if u == v:
            raise SelfLoop(f"self-loop at vertex {u}")
        if u < 0 or v >= n:
            raise VertexOutOfRange(f"edge {{{u}, {v}}} has endpoint outside [0, {n})")
        if (u, v) in seen:
            raise DuplicateEdge(f"edge {{{u}, {v}}} appears more than once")
        seen.add((u, v))
        normalized.append((u, v))
    normalized.sort()
    return HostGraph(n, tuple(normalized))


def complete_graph(n: int) -> HostGraph:
    """K_n: all n(n-1)/2 vertex pairs."""
    if n < 1:
        raise VertexOutOfRange(f"vertex count must be positive, got {n}")
    return HostGraph(n, tuple((u, v) for u in range(n) for v in range(u + 1, n)))


def complete_bipartite(a: int, b: int) -> HostGraph:
    """K_{a,b}: left vertices 0..a-1, right vertices a..a+b-1, all a*b edges."""
    if a < 1 or b < 1:
        raise VertexOutOfRange(f"both sides must be non-empty, got ({a}, {b})")
    return HostGraph(a + b, tuple((u, a + v) for u in range(a) for v in range(b)))


def neighborhood_edges(g: HostGraph, v: int) -> EdgeSet:
    """All host edges incident to v; its size is the degree of v."""
    if not 0 <= v < g.n:
        raise VertexOutOfRange(f"vertex {v} not in [0, {g.n})")
    return EdgeSet.from_indices(g.m, (i for i, e in enumerate(g.edges) if v in e))


def is_acyclic(g: HostGraph, state: EdgeSet) -> bool:
    """True when the subgraph selected by `state` contains no cycle."""
    if state.m != g.m:
        raise HostMismatch(f"edge counts differ: {state.m} != {g.m}")
    parent = list(range(g.n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in state.indices():
        u, v = g.edges[e]
        ru, rv = find(u), find(v)
        if ru == rv:
            return False
        parent[ru] = rv
    return True


def host_from_json(obj: dict) -> HostGraph:
    """Parse the CLI host schema.

    Either {"n": int, "edges": [[u, v], ...]} or
    {"preset": "complete" | "bipartite", "params": [...]}.
    """
    if not isinstance(obj, dict):
        raise ValidationError("host spec must be a JSON object")
    if "preset" in obj:
        preset = obj["preset"]
        params = obj.get("params", [])
        if preset == "complete":
            if len(params) != 1:
                raise ValidationError('host.preset "complete" takes params [n]')
            return complete_graph(int(params[0]))
        if preset == "bipartite":
            if len(params) != 2:
                raise ValidationError('host.preset "bipartite" takes params [a, b]')
            return complete_bipartite(int(params[0]), int(params[1]))
        raise ValidationError(f"unknown host preset {preset!r}")
    if "n" not in obj or "edges" not in obj:
        raise ValidationError('host spec needs "n" and "edges" (or a "preset")')
    return from_edge_list(int(obj["n"]), obj["edges"])


def host_to_json(g: HostGraph) -> dict:
    return {"n": g.n, "edges": [list(e) for e in g.edges]}
