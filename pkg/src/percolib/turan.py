"""Chromatic numbers, Turán numbers and densities, and running-time bound
leading terms."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .hypergraph import KGraph
from .pattern import Pattern, exists_copy_containing
from .search import iter_classes

CHROMATIC_LIMIT = 12
TURAN_LIMITS = {2: 8, 3: 6}
LEADING_TERM_NOTE = "asymptotic leading term; the o(1) correction is not computable"


class TuranLimitError(ValueError):
    pass


class DensitySourceError(ValueError):
    pass


def _graph(F: Pattern | KGraph) -> KGraph:
    return F.graph if isinstance(F, Pattern) else F


def chromatic_number(F: Pattern | KGraph) -> int:
    """Exact chromatic number of a graph by backtracking, vertices taken in
    DSATUR order, trying c = 1, 2, ... colours."""
    G = _graph(F)
    if G.k != 2:
        raise ValueError("chromatic number is defined here for graphs (k = 2) only")
    if G.n > CHROMATIC_LIMIT:
        raise TuranLimitError(f"chromatic_number limited to {CHROMATIC_LIMIT} vertices")
    n = G.n
    if n == 0:
        return 0
    adj = G.adjacency
    nbrs = [[u for u in range(n) if adj[v] >> u & 1] for v in range(n)]

    def colourable(c: int) -> bool:
        colour = [-1] * n

        def rec(done: int) -> bool:
            if done == n:
                return True
            best, key = -1, None
            for v in range(n):
                if colour[v] < 0:
                    sat = len({colour[u] for u in nbrs[v] if colour[u] >= 0})
                    kv = (sat, len(nbrs[v]))
                    if key is None or kv > key:
                        best, key = v, kv
            v = best
            taken = {colour[u] for u in nbrs[v]}
            # first unused colour stands in for all unused ones (symmetry)
            top = max(colour) + 1
            for col in range(min(c, top + 1)):
                if col not in taken:
                    colour[v] = col
                    if rec(done + 1):
                        return True
            colour[v] = -1
            return False

        return rec(0)

    c = 1
    while not colourable(c):
        c += 1
    return c


def turan_density_graph(F: Pattern | KGraph) -> Fraction:
    """(chi - 2)/(chi - 1), the Erdős–Stone–Simonovits density."""
    G = _graph(F)
    if G.k != 2:
        raise ValueError("turan_density_graph needs a graph (k = 2)")
    if not G.edges:
        raise ValueError("density undefined for an edgeless pattern")
    chi = chromatic_number(G)
    return Fraction(chi - 2, chi - 1)


def exact_turan_number(n: int, F: Pattern | KGraph, limits: dict[int, int] | None = None) -> int:
    """ex(n, F): largest edge count over F-free k-graphs on n vertices.

    F-freeness is closed under deleting edges, so every F-free class is
    reached by adding edges one at a time to smaller F-free classes.
    """
    P = _graph(F)
    limits = TURAN_LIMITS if limits is None else limits
    if n > limits.get(P.k, -1):
        raise TuranLimitError(f"exact_turan_number for k={P.k} limited to n <= {limits.get(P.k)}")
    if not P.edges:
        raise ValueError("pattern must have an edge")
    if P.n > n:
        return comb(n, P.k)
    best = 0
    for G in iter_classes(n, P.k, keep=lambda G, e: not exists_copy_containing(P, G, e)):
        best = max(best, len(G))
    return best


@dataclass(frozen=True)
class DensityEstimate:
    value: Fraction
    kind: str
    m: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("exact_erdos_stone", "finite_n_upper_proxy", "user_supplied"):
            raise ValueError(f"unknown density kind {self.kind!r}")
        if not 0 <= self.value <= 1:
            raise ValueError("density must lie in [0, 1]")

    def document(self) -> dict:
        v = self.value
        out = {"value": f"{v.numerator}/{v.denominator}", "kind": self.kind}
        if self.m is not None:
            out["m"] = self.m
        return out


def erdos_stone_density(F: Pattern | KGraph) -> DensityEstimate:
    return DensityEstimate(turan_density_graph(F), "exact_erdos_stone")


def finite_n_upper_proxy(F: Pattern | KGraph, m: int) -> DensityEstimate:
    """ex(m, F)/C(m, k); an upper bound on the Turán density because the
    ratio is non-increasing in m."""
    P = _graph(F)
    return DensityEstimate(Fraction(exact_turan_number(m, P), comb(m, P.k)), "finite_n_upper_proxy", m)


def user_density(value: Fraction | str | float) -> DensityEstimate:
    return DensityEstimate(Fraction(value), "user_supplied")


def default_density(F: Pattern) -> DensityEstimate:
    if F.removed_edge is None:
        raise ValueError("pattern needs a designated removed edge")
    if F.k != 2:
        raise DensitySourceError(
            f"no exact density for k={F.k}; supply a finite-n proxy or a user value"
        )
    return erdos_stone_density(F.minus_edge())


def running_time_bound(F: Pattern, n: int, source: DensityEstimate | None = None) -> Fraction:
    """Leading term density(F - e) * C(n, k) of the upper bound on M_F(n)."""
    if F.removed_edge is None:
        raise ValueError("pattern needs a designated removed edge")
    if source is None:
        source = default_density(F)
    return source.value * comb(n, F.k)


def bound_document(F: Pattern, n: int, source: DensityEstimate | None = None) -> dict:
    if source is None:
        source = default_density(F)
    lead = running_time_bound(F, n, source)
    return {
        "schema_version": 1,
        "pattern": F.label,
        "removed_edge": list(F.removed_edge),
        "n": n,
        "k": F.k,
        "density": source.document(),
        "leading_term": f"{lead.numerator}/{lead.denominator}" if lead.denominator != 1 else str(lead.numerator),
        "note": LEADING_TERM_NOTE,
    }
