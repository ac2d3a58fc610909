"""Exact canonical labelling of small k-graphs.

Individualisation-refinement search: the vertex partition is refined by
edge-colour signatures until equitable, the first non-singleton cell is
split by individualising each of its vertices, and the leaf with the
largest colex edge mask wins. Automorphisms found at equivalent leaves
prune sibling branches (orbit pruning) and trigger backjumps.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

from .hypergraph import KGraph, colex_rank

DEFAULT_LIMIT = 16


class CanonLimitError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class CanonicalForm:
    data: bytes

    def hex(self) -> str:
        return self.data.hex()

    @classmethod
    def fromhex(cls, s: str) -> CanonicalForm:
        return cls(bytes.fromhex(s))


class _Backjump(Exception):
    def __init__(self, level: int):
        self.level = level


class _Search:
    def __init__(self, H: KGraph):
        self.H = H
        self.n = H.n
        self.edges = list(H.edges)
        inc: list[list[tuple[int, ...]]] = [[] for _ in range(H.n)]
        for e in self.edges:
            for v in e:
                inc[v].append(tuple(u for u in e if u != v))
        self.incident = inc
        self.gens: list[list[int]] = []
        self.first: tuple[int, list[int], list[int]] | None = None
        self.best: tuple[int, list[int], list[int]] | None = None

    def refine(self, cells: list[list[int]]) -> list[list[int]]:
        inc = self.incident
        while True:
            colour = [0] * self.n
            for ci, cell in enumerate(cells):
                for v in cell:
                    colour[v] = ci
            out: list[list[int]] = []
            changed = False
            for cell in cells:
                if len(cell) == 1:
                    out.append(cell)
                    continue
                groups: dict[tuple, list[int]] = {}
                for v in cell:
                    sig = tuple(sorted(tuple(sorted(colour[u] for u in rest)) for rest in inc[v]))
                    groups.setdefault(sig, []).append(v)
                if len(groups) == 1:
                    out.append(cell)
                    continue
                changed = True
                for sig in sorted(groups):
                    out.append(groups[sig])
            cells = out
            if not changed:
                return cells

    def leaf_code(self, order: list[int]) -> int:
        pos = [0] * self.n
        for p, v in enumerate(order):
            pos[v] = p
        mask = 0
        for e in self.edges:
            mask |= 1 << colex_rank(sorted(pos[v] for v in e))
        return mask

    def orbit_root(self, prefix: list[int]):
        parent = list(range(self.n))

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for g in self.gens:
            if all(g[v] == v for v in prefix):
                for v in range(self.n):
                    a, b = find(v), find(g[v])
                    if a != b:
                        parent[a] = b
        return find

    def automorphism(self, order: list[int], other: list[int]) -> list[int]:
        g = [0] * self.n
        for u, w in zip(order, other):
            g[u] = w
        return g

    def leaf(self, order: list[int], path: list[int]) -> None:
        code = self.leaf_code(order)
        if self.first is None:
            self.first = self.best = (code, order, path)
            return
        for ref in (self.first, self.best):
            if code == ref[0]:
                self.gens.append(self.automorphism(order, ref[1]))
                common = 0
                for a, b in zip(path, ref[2]):
                    if a != b:
                        break
                    common += 1
                raise _Backjump(common)
        if code > self.best[0]:
            self.best = (code, order, path)

    def run(self, cells: list[list[int]], path: list[int]) -> None:
        cells = self.refine(cells)
        target = next((i for i, c in enumerate(cells) if len(c) > 1), None)
        if target is None:
            self.leaf([c[0] for c in cells], path)
            return
        depth = len(path)
        tried: list[int] = []
        for v in sorted(cells[target]):
            if tried:
                find = self.orbit_root(path)
                if any(find(v) == find(u) for u in tried):
                    continue
            tried.append(v)
            rest = [u for u in cells[target] if u != v]
            child = cells[:target] + [[v], rest] + cells[target + 1 :]
            try:
                self.run(child, path + [v])
            except _Backjump as jump:
                if jump.level < depth:
                    raise


def canonical_labeling(H: KGraph, limit: int = DEFAULT_LIMIT) -> list[int]:
    """Return perm with perm[v] = canonical label of v."""
    if H.n > limit:
        raise CanonLimitError(f"canonical form limited to n <= {limit}, got n={H.n}")
    if H.n == 0:
        return []
    s = _Search(H)
    deg = H.degrees
    by_deg: dict[int, list[int]] = {}
    for v in range(H.n):
        by_deg.setdefault(deg[v], []).append(v)
    try:
        s.run([by_deg[d] for d in sorted(by_deg)], [])
    except _Backjump:
        pass
    assert s.best is not None
    perm = [0] * H.n
    for p, v in enumerate(s.best[1]):
        perm[v] = p
    return perm


def canonical_graph(H: KGraph, limit: int = DEFAULT_LIMIT) -> KGraph:
    return H.relabel(canonical_labeling(H, limit))


def encode_mask(n: int, k: int, mask: int) -> CanonicalForm:
    width = (comb(n, k) + 7) // 8
    return CanonicalForm(bytes([n, k]) + mask.to_bytes(width, "big"))


def canonical_form(H: KGraph, limit: int = DEFAULT_LIMIT) -> CanonicalForm:
    return encode_mask(H.n, H.k, canonical_graph(H, limit).mask)
