import itertools
import random
from math import comb, factorial

import pytest

from percolib.hypergraph import KGraph
from percolib.pattern import (
    CopyCapExceeded,
    Pattern,
    PatternError,
    automorphism_count,
    builtin_pattern,
    count_copies,
    enumerate_copies,
    exists_copy_containing,
)

import oracles
from oracles import random_kgraph


def test_builtin_patterns():
    assert builtin_pattern("K5").graph == KGraph.complete(5)
    assert builtin_pattern("K4^3").graph == KGraph.complete(4, 3)
    assert builtin_pattern("C5").graph == KGraph.cycle(5)
    with pytest.raises(PatternError):
        builtin_pattern("Q7")


def test_pattern_validation():
    with pytest.raises(PatternError):
        Pattern(KGraph.from_edges(4, [(0, 1), (1, 2)]))  # isolated vertex 3
    with pytest.raises(PatternError):
        Pattern(KGraph.empty(3))
    with pytest.raises(PatternError):
        Pattern(KGraph.complete(3), removed_edge=(0, 3))


def test_minus_edge_keeps_vertices():
    F = builtin_pattern("K4").with_removed_edge((0, 1))
    P = F.minus_edge()
    assert P.n == 4 and len(P) == 5 and (0, 1) not in P.edges


@pytest.mark.parametrize("t", [3, 4, 5, 6])
def test_clique_count_in_complete_graph(t):
    # the number of K_t in K_n is C(n, t)
    for n in range(t, 9):
        assert count_copies(KGraph.complete(t), KGraph.complete(n)) == comb(n, t)


def test_cycle_count_in_complete_graph():
    # (n)_5 / 10 five-cycles in K_n
    for n in range(5, 9):
        assert count_copies(KGraph.cycle(5), KGraph.complete(n)) == factorial(n) // factorial(n - 5) // 10


def test_automorphisms():
    assert automorphism_count(KGraph.complete(5)) == 120
    assert automorphism_count(KGraph.cycle(5)) == 10
    assert automorphism_count(KGraph.complete(4, 3)) == 24


PATTERNS = [
    KGraph.complete(3),
    KGraph.complete(4),
    KGraph.cycle(4),
    KGraph.cycle(5),
    KGraph.path(4),
    KGraph.from_edges(4, [(0, 1), (0, 2), (0, 3)]),
    KGraph.from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2), (2, 3)]),
]


def test_copy_count_matches_brute_force():
    rng = random.Random(8)
    for trial in range(300):
        P = PATTERNS[trial % len(PATTERNS)]
        H = random_kgraph(rng, rng.randint(P.n, 8), 2)
        assert count_copies(P, H) == oracles.count(P, H), (P, H)


def test_copy_count_three_graphs():
    rng = random.Random(9)
    pats = [
        KGraph.complete(4, 3),
        KGraph.complete(4, 3).without_edges([(0, 1, 2)]),
        KGraph.from_edges(5, [(0, 1, 2), (2, 3, 4)], 3),
    ]
    for trial in range(60):
        P = pats[trial % len(pats)]
        H = random_kgraph(rng, rng.randint(P.n, 7), 3)
        assert count_copies(P, H) == oracles.count(P, H)


def test_enumerate_copies_sets():
    rng = random.Random(4)
    for _ in range(40):
        P = rng.choice(PATTERNS)
        H = random_kgraph(rng, 7, 2)
        got = {(c.vertices, c.edges) for c in enumerate_copies(P, H)}
        assert got == oracles.copies(P, H)


def test_enumerate_cap():
    with pytest.raises(CopyCapExceeded):
        enumerate_copies(KGraph.complete(3), KGraph.complete(10), cap=10)


def test_exists_copy_containing_matches_counting():
    rng = random.Random(12)
    for trial in range(200):
        P = PATTERNS[trial % len(PATTERNS)]
        H = random_kgraph(rng, rng.randint(P.n, 7), 2)
        for e in H.non_edges():
            expected = oracles.count(P, H.with_edges([e])) > oracles.count(P, H)
            assert exists_copy_containing(P, H, e) == expected


def test_exists_copy_containing_rejects_present_edge():
    with pytest.raises(ValueError):
        exists_copy_containing(KGraph.complete(3), KGraph.complete(3), (0, 1))


def test_uniformity_mismatch():
    with pytest.raises(ValueError):
        count_copies(KGraph.complete(4, 3), KGraph.complete(5))
