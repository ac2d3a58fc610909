"""k-uniform hypergraphs on dense vertex sets, colex edge ranks and text formats."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from math import comb
from typing import Iterable, Sequence

Edge = tuple[int, ...]


class FormatError(ValueError):
    """Raised for malformed graph6/hyperlist input."""


def colex_rank(edge: Sequence[int]) -> int:
    """Colex rank of a strictly increasing k-subset."""
    return sum(comb(v, i + 1) for i, v in enumerate(edge))


def colex_unrank(rank: int, k: int) -> Edge:
    out = []
    for i in range(k, 0, -1):
        v = i - 1
        while comb(v + 1, i) <= rank:
            v += 1
        out.append(v)
        rank -= comb(v, i)
    return tuple(reversed(out))


def _normalize_edge(edge: Iterable[int], n: int, k: int) -> Edge:
    e = tuple(sorted(int(v) for v in edge))
    if len(e) != k:
        raise ValueError(f"edge {e} has arity {len(e)}, expected {k}")
    if len(set(e)) != k:
        raise ValueError(f"edge {e} repeats a vertex")
    if e and (e[0] < 0 or e[-1] >= n):
        raise ValueError(f"edge {e} has a vertex outside 0..{n - 1}")
    return e


@dataclass(frozen=True)
class KGraph:
    """A k-graph on vertices 0..n-1. Edges are stored as sorted k-tuples."""

    n: int
    k: int
    edges: frozenset[Edge] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError("uniformity must be positive")
        if self.n < 0:
            raise ValueError("vertex count must be non-negative")
        norm = frozenset(_normalize_edge(e, self.n, self.k) for e in self.edges)
        object.__setattr__(self, "edges", norm)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Iterable[int]], k: int = 2) -> KGraph:
        return cls(n, k, frozenset(tuple(e) for e in edges))

    @classmethod
    def from_mask(cls, n: int, k: int, mask: int) -> KGraph:
        edges = []
        r = 0
        while mask:
            if mask & 1:
                edges.append(colex_unrank(r, k))
            mask >>= 1
            r += 1
        return cls(n, k, frozenset(edges))

    @classmethod
    def complete(cls, n: int, k: int = 2) -> KGraph:
        return cls(n, k, frozenset(combinations(range(n), k)))

    @classmethod
    def empty(cls, n: int, k: int = 2) -> KGraph:
        return cls(n, k, frozenset())

    @classmethod
    def cycle(cls, n: int) -> KGraph:
        return cls.from_edges(n, [(i, (i + 1) % n) for i in range(n)])

    @classmethod
    def path(cls, n: int) -> KGraph:
        return cls.from_edges(n, [(i, i + 1) for i in range(n - 1)])

    def __len__(self) -> int:
        return len(self.edges)

    def __contains__(self, edge: object) -> bool:
        return edge in self.edges

    @cached_property
    def sorted_edges(self) -> list[Edge]:
        """Edges in colex order."""
        return sorted(self.edges, key=colex_rank)

    @cached_property
    def mask(self) -> int:
        """Bitset over colex ranks."""
        m = 0
        for e in self.edges:
            m |= 1 << colex_rank(e)
        return m

    @cached_property
    def adjacency(self) -> list[int]:
        """Per-vertex bitmask of vertices sharing an edge (the 2-section)."""
        adj = [0] * self.n
        for e in self.edges:
            bits = 0
            for v in e:
                bits |= 1 << v
            for v in e:
                adj[v] |= bits & ~(1 << v)
        return adj

    @cached_property
    def degrees(self) -> list[int]:
        deg = [0] * self.n
        for e in self.edges:
            for v in e:
                deg[v] += 1
        return deg

    def max_edges(self) -> int:
        return comb(self.n, self.k)

    def non_edges(self) -> list[Edge]:
        return [e for e in combinations(range(self.n), self.k) if e not in self.edges]

    def with_edges(self, extra: Iterable[Edge]) -> KGraph:
        return KGraph(self.n, self.k, self.edges | frozenset(extra))

    def without_edges(self, gone: Iterable[Edge]) -> KGraph:
        return KGraph(self.n, self.k, self.edges - frozenset(gone))

    def relabel(self, perm: Sequence[int]) -> KGraph:
        """Image under the vertex map v -> perm[v]."""
        return KGraph(self.n, self.k, frozenset(tuple(sorted(perm[v] for v in e)) for e in self.edges))

    def isolated_vertices(self) -> list[int]:
        return [v for v, d in enumerate(self.degrees) if d == 0]

    def __repr__(self) -> str:
        return f"KGraph(n={self.n}, k={self.k}, edges={self.sorted_edges})"


# graph6 --------------------------------------------------------------------


def _g6_size(n: int) -> str:
    if n <= 62:
        return chr(n + 63)
    if n <= 258047:
        return "~" + "".join(chr(((n >> s) & 63) + 63) for s in (12, 6, 0))
    return "~~" + "".join(chr(((n >> s) & 63) + 63) for s in (30, 24, 18, 12, 6, 0))


def to_graph6(H: KGraph) -> str:
    if H.k != 2:
        raise ValueError("graph6 only encodes 2-graphs")
    bits = [1 if (i, j) in H.edges else 0 for j in range(1, H.n) for i in range(j)]
    bits += [0] * (-len(bits) % 6)
    body = "".join(
        chr(63 + int("".join(map(str, bits[p : p + 6])), 2)) for p in range(0, len(bits), 6)
    )
    return _g6_size(H.n) + body


def from_graph6(text: str) -> KGraph:
    s = text.strip()
    if s.startswith(">>graph6<<"):
        s = s[len(">>graph6<<") :]
    if not s:
        raise FormatError("empty graph6 string")
    data = [ord(c) - 63 for c in s]
    if any(not 0 <= x <= 63 for x in data):
        raise FormatError("graph6 byte outside the printable range 63..126")
    if data[0] != 63:
        n, pos = data[0], 1
    elif len(data) > 1 and data[1] == 63:
        if len(data) < 8:
            raise FormatError("truncated graph6 size field")
        n, pos = 0, 8
        for x in data[2:8]:
            n = (n << 6) | x
    else:
        if len(data) < 4:
            raise FormatError("truncated graph6 size field")
        n, pos = 0, 4
        for x in data[1:4]:
            n = (n << 6) | x
    nbits = n * (n - 1) // 2
    body = data[pos:]
    if len(body) != (nbits + 5) // 6:
        raise FormatError(f"graph6 body has {len(body)} bytes, expected {(nbits + 5) // 6}")
    bits = [(x >> (5 - b)) & 1 for x in body for b in range(6)]
    edges = []
    idx = 0
    for j in range(1, n):
        for i in range(j):
            if bits[idx]:
                edges.append((i, j))
            idx += 1
    return KGraph.from_edges(n, edges)


# hyperlist -----------------------------------------------------------------


def to_hyperlist(H: KGraph) -> str:
    lines = [f"{H.n} {H.k}"]
    lines += [" ".join(map(str, e)) for e in sorted(H.edges)]
    return "\n".join(lines)


def from_hyperlist(text: str) -> KGraph:
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise FormatError("missing 'n k' header")
    head = lines[0].split()
    try:
        n, k = (int(x) for x in head)
    except ValueError:
        raise FormatError(f"malformed header {lines[0]!r}, expected 'n k'") from None
    if n < 0 or k < 1:
        raise FormatError(f"malformed header {lines[0]!r}")
    edges = set()
    for lineno, ln in enumerate(lines[1:], start=2):
        try:
            verts = [int(x) for x in ln.split()]
        except ValueError:
            raise FormatError(f"line {lineno}: non-integer vertex") from None
        if len(verts) != k:
            raise FormatError(f"line {lineno}: edge arity {len(verts)} != {k}")
        if len(set(verts)) != k:
            raise FormatError(f"line {lineno}: duplicate vertex within an edge")
        if any(v < 0 or v >= n for v in verts):
            raise FormatError(f"line {lineno}: vertex index out of range 0..{n - 1}")
        edges.add(tuple(sorted(verts)))
    return KGraph(n, k, frozenset(edges))


def parse_kgraph(text: str, format: str = "hyperlist") -> KGraph:
    if format == "graph6":
        return from_graph6(text)
    if format == "hyperlist":
        return from_hyperlist(text)
    raise ValueError(f"unknown format {format!r}")


def serialize_kgraph(H: KGraph, format: str = "hyperlist") -> str:
    if format == "graph6":
        return to_graph6(H)
    if format == "hyperlist":
        return to_hyperlist(H)
    raise ValueError(f"unknown format {format!r}")


def sniff_format(text: str) -> str:
    """Guess graph6 vs hyperlist: a hyperlist header has two integer fields."""
    first = text.strip().split("\n", 1)[0].strip()
    return "hyperlist" if len(first.split()) == 2 and all(p.isdigit() for p in first.split()) else "graph6"
