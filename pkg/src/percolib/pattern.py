"""Pattern k-graphs and (non-induced) copy detection in a host.

A copy is a subhypergraph of the host isomorphic to the pattern, identified
by its vertex set and edge set. Embeddings are found by backtracking over
pattern vertices; candidate images come from bitmask "links": for every
(k-1)-set S of the host, link[S] is the set of vertices w with S+w an edge.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import combinations, permutations
from typing import Iterator, Sequence

from .hypergraph import Edge, KGraph


class PatternError(ValueError):
    pass


class CopyCapExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class Pattern:
    graph: KGraph
    removed_edge: Edge | None = None
    name: str | None = None

    def __post_init__(self) -> None:
        if not self.graph.edges:
            raise PatternError("pattern must have at least one edge")
        if self.graph.isolated_vertices():
            raise PatternError(f"pattern has isolated vertices {self.graph.isolated_vertices()}")
        if self.removed_edge is not None:
            e = tuple(sorted(self.removed_edge))
            if e not in self.graph.edges:
                raise PatternError(f"removed edge {e} is not an edge of the pattern")
            object.__setattr__(self, "removed_edge", e)

    @property
    def k(self) -> int:
        return self.graph.k

    @property
    def label(self) -> str:
        return self.name or f"custom(n={self.graph.n},k={self.graph.k},m={len(self.graph)})"

    def with_removed_edge(self, edge: Edge | None = None) -> Pattern:
        """Designate e; defaults to the lexicographically smallest edge."""
        e = min(self.graph.edges) if edge is None else tuple(sorted(edge))
        return Pattern(self.graph, e, self.name)

    def minus_edge(self) -> KGraph:
        """F - e on the full vertex set of F (may contain isolated vertices)."""
        if self.removed_edge is None:
            raise PatternError("pattern has no designated removed edge")
        return self.graph.without_edges([self.removed_edge])

    def is_clique(self) -> bool:
        return self.graph.k == 2 and len(self.graph) == self.graph.n * (self.graph.n - 1) // 2


_BUILTIN = re.compile(r"^(K|C)(\d+)(?:\^(\d+))?$")


def is_builtin(name: str) -> bool:
    return _BUILTIN.match(name.strip()) is not None


def builtin_pattern(name: str) -> Pattern:
    """'K5' (graph clique), 'K4^3' (3-uniform clique), 'C5' (cycle)."""
    m = _BUILTIN.match(name.strip())
    if not m:
        raise PatternError(f"unknown builtin pattern {name!r}")
    kind, t, k = m.group(1), int(m.group(2)), int(m.group(3) or 2)
    if kind == "K":
        if t < k or k < 2:
            raise PatternError(f"{name}: need t >= k >= 2")
        return Pattern(KGraph.complete(t, k), name=name.strip())
    if k != 2 or t < 3:
        raise PatternError(f"{name}: cycles need length >= 3 and k = 2")
    return Pattern(KGraph.cycle(t), name=name.strip())


@dataclass(frozen=True)
class Copy:
    vertices: frozenset[int]
    edges: frozenset[Edge]

    def sort_key(self) -> tuple:
        return (sorted(self.edges), sorted(self.vertices))


def _as_graph(F: Pattern | KGraph) -> KGraph:
    return F.graph if isinstance(F, Pattern) else F


def _check_uniformity(P: KGraph, H: KGraph) -> None:
    if P.k != H.k:
        raise ValueError(f"uniformity mismatch: pattern k={P.k}, host k={H.k}")


class Host:
    """Mutable link-mask view of a host k-graph, for fast repeated queries."""

    def __init__(self, H: KGraph):
        self.n = H.n
        self.k = H.k
        self.full = (1 << H.n) - 1
        self.edges: set[Edge] = set(H.edges)
        self.link: dict[tuple[int, ...], int] = {}
        self.deg = [0] * H.n
        for e in H.edges:
            self._touch(e, True)

    def _touch(self, e: Edge, add: bool) -> None:
        link = self.link
        for i, w in enumerate(e):
            rest = e[:i] + e[i + 1 :]
            if add:
                link[rest] = link.get(rest, 0) | (1 << w)
                self.deg[w] += 1
            else:
                link[rest] &= ~(1 << w)
                self.deg[w] -= 1

    def add(self, e: Edge) -> None:
        self.edges.add(e)
        self._touch(e, True)

    def remove(self, e: Edge) -> None:
        self.edges.discard(e)
        self._touch(e, False)

    def deg_mask(self, d: int) -> int:
        m = 0
        for v, dv in enumerate(self.deg):
            if dv >= d:
                m |= 1 << v
        return m


class Matcher:
    """Backtracking embedder for one pattern; reusable across hosts."""

    def __init__(self, P: KGraph):
        self.P = P
        self.k = P.k
        self.deg = P.degrees
        self.inc: list[list[Edge]] = [[] for _ in range(P.n)]
        for e in P.edges:
            for v in e:
                self.inc[v].append(e)
        self._orders: dict[Edge | None, tuple[list[int], list[list[tuple[int, ...]]]]] = {}

    def _plan(self, anchor: Edge | None):
        """Vertex order plus, per position, the (k-1)-tuples of earlier vertices
        whose edge with the current vertex must exist."""
        if anchor in self._orders:
            return self._orders[anchor]
        P = self.P
        order = list(anchor) if anchor else []
        placed = set(order)
        while len(order) < P.n:
            best = None
            for v in range(P.n):
                if v in placed:
                    continue
                closed = sum(1 for e in self.inc[v] if all(u in placed or u == v for u in e))
                touching = sum(1 for e in self.inc[v] if any(u in placed for u in e))
                key = (closed, touching, self.deg[v], -v)
                if best is None or key > best[0]:
                    best = (key, v)
            order.append(best[1])
            placed.add(best[1])
        pos = {v: i for i, v in enumerate(order)}
        checks: list[list[tuple[int, ...]]] = [[] for _ in order]
        for e in P.edges:
            last = max(e, key=lambda u: pos[u])
            checks[pos[last]].append(tuple(u for u in e if u != last))
        self._orders[anchor] = (order, checks)
        return order, checks

    def embeddings(self, host: Host, anchor: Edge | None = None, image: Edge | None = None) -> Iterator[list[int]]:
        """Yield phi (pattern vertex -> host vertex) as a list.

        With anchor/image, only embeddings mapping the pattern edge `anchor`
        onto the host edge `image` (in any vertex correspondence) are produced.
        """
        order, checks = self._plan(anchor)
        P = self.P
        phi = [-1] * P.n
        link = host.link
        deg_masks: dict[int, int] = {}
        isolated_ok = host.full

        def cand_base(x: int) -> int:
            d = self.deg[x]
            if d == 0:
                return isolated_ok
            if d not in deg_masks:
                deg_masks[d] = host.deg_mask(d)
            return deg_masks[d]

        start = 0
        if anchor is not None:
            start = len(anchor)

        def rec(i: int, used: int) -> Iterator[list[int]]:
            if i == len(order):
                yield phi
                return
            x = order[i]
            cand = cand_base(x) & ~used
            for others in checks[i]:
                key = tuple(sorted(phi[u] for u in others))
                cand &= link.get(key, 0)
                if not cand:
                    return
            while cand:
                low = cand & -cand
                w = low.bit_length() - 1
                cand ^= low
                phi[x] = w
                yield from rec(i + 1, used | low)
            phi[x] = -1

        if anchor is None:
            yield from rec(0, 0)
            return
        for img in permutations(image):
            ok = True
            used = 0
            for u, w in zip(order[:start], img):
                if host.deg[w] < self.deg[u]:
                    ok = False
                    break
                phi[u] = w
                used |= 1 << w
            if not ok:
                continue
            # edges among anchor vertices other than the anchor itself
            if all(_closed(link, phi, c, order[j]) for j in range(start) for c in checks[j]):
                yield from rec(start, used)
        for u in order[:start]:
            phi[u] = -1

    def copy_of(self, phi: Sequence[int]) -> Copy:
        return Copy(
            frozenset(phi),
            frozenset(tuple(sorted(phi[u] for u in e)) for e in self.P.edges),
        )

    def anchor_edges(self) -> list[Edge]:
        return sorted(self.P.edges)


def _closed(link, phi, others, x) -> bool:
    key = tuple(sorted(phi[u] for u in others))
    return bool(link.get(key, 0) >> phi[x] & 1)


_matchers: dict[KGraph, Matcher] = {}


def matcher_for(P: KGraph) -> Matcher:
    m = _matchers.get(P)
    if m is None:
        m = _matchers[P] = Matcher(P)
    return m


def iter_copies(P: KGraph, host: Host, cap: int | None) -> Iterator[Copy]:
    seen: set[Copy] = set()
    m = matcher_for(P)
    for phi in m.embeddings(host):
        c = m.copy_of(phi)
        if c not in seen:
            seen.add(c)
            yield c
            if cap is not None and len(seen) >= cap:
                return


def count_copies(F: Pattern | KGraph, H: KGraph, cap: int | None = None) -> int:
    """c(F, H): number of distinct subhypergraphs of H isomorphic to F,
    truncated at cap when given."""
    P = _as_graph(F)
    _check_uniformity(P, H)
    return sum(1 for _ in iter_copies(P, Host(H), cap))


def enumerate_copies(F: Pattern | KGraph, H: KGraph, cap: int = 100_000) -> list[Copy]:
    P = _as_graph(F)
    _check_uniformity(P, H)
    out = list(iter_copies(P, Host(H), cap + 1))
    if len(out) > cap:
        raise CopyCapExceeded(f"more than {cap} copies")
    out.sort(key=Copy.sort_key)
    return out


def _clique_in(mask: int, size: int, adj: Sequence[int]) -> bool:
    if size == 0:
        return True
    if mask.bit_count() < size:
        return False
    while mask:
        low = mask & -mask
        w = low.bit_length() - 1
        mask ^= low
        if _clique_in(mask & adj[w], size - 1, adj):
            return True
    return False


def host_adjacency(host: Host) -> list[int]:
    """Neighbourhood bitmasks of a 2-graph host (its 1-element links)."""
    return [host.link.get((v,), 0) for v in range(host.n)]


def completes_clique(adj: Sequence[int], e: Edge, r: int) -> bool:
    """K_r fast path: e=uv completes a K_r iff N(u) & N(v) holds a K_{r-2}."""
    u, v = e
    return _clique_in(adj[u] & adj[v], r - 2, adj)


def completes_copy(P: KGraph, host: Host, e: Edge) -> bool:
    """Whether host + e contains a copy of P using e. host must not contain e;
    it is left unchanged on return."""
    m = matcher_for(P)
    host.add(e)
    try:
        for f in m.anchor_edges():
            for _ in m.embeddings(host, anchor=f, image=e):
                return True
        return False
    finally:
        host.remove(e)


def exists_copy_containing(F: Pattern | KGraph, H: KGraph, e: Edge) -> bool:
    P = _as_graph(F)
    _check_uniformity(P, H)
    e = tuple(sorted(e))
    if e in H.edges:
        raise ValueError(f"edge {e} is already present in the host")
    if len(e) != H.k or len(set(e)) != H.k or not all(0 <= v < H.n for v in e):
        raise ValueError(f"{e} is not a {H.k}-subset of the host vertex set")
    if P.k == 2 and len(P) == P.n * (P.n - 1) // 2:
        return completes_clique(H.adjacency, e, P.n)
    return completes_copy(P, Host(H), e)


def automorphism_count(P: KGraph) -> int:
    return sum(1 for _ in matcher_for(P).embeddings(Host(P)))


def all_k_subsets(n: int, k: int) -> list[Edge]:
    return list(combinations(range(n), k))
