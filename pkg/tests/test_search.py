import itertools
import json

import pytest

from percolib.canon import canonical_form
from percolib.hypergraph import KGraph
from percolib.pattern import builtin_pattern
from percolib.process import running_time
from percolib.search import (
    SearchLimitError,
    TauCache,
    exhaustive_max_time,
    heuristic_max_time,
    iter_classes,
)

K3 = builtin_pattern("K3")
K4 = builtin_pattern("K4")


def labelled_max(F, n):
    """Maximum running time over every labelled start, no isomorphism rejection."""
    slots = list(itertools.combinations(range(n), F.k))
    return max(
        running_time(F, KGraph(n, F.k, frozenset(s for i, s in enumerate(slots) if m >> i & 1)))
        for m in range(1 << len(slots))
    )


@pytest.mark.parametrize("n, expected", [(4, 11), (5, 34), (6, 156)])
def test_iter_classes_counts(n, expected):
    assert sum(1 for _ in iter_classes(n, 2)) == expected


def test_iter_classes_three_graphs():
    assert sum(1 for _ in iter_classes(5, 3)) == 34


def test_triangle_n3():
    rep = exhaustive_max_time(K3, 3)
    assert rep.best_tau == 1 and rep.examined == 4 and rep.exhaustive_certificate
    assert canonical_form(rep.best_start) == canonical_form(KGraph.path(3))


@pytest.mark.parametrize("F, n", [(K3, 4), (K3, 5), (K4, 4), (K4, 5), (builtin_pattern("C4"), 5)])
def test_exhaustive_matches_labelled_brute_force(F, n):
    rep = exhaustive_max_time(F, n)
    assert rep.best_tau == labelled_max(F, n)
    assert running_time(F, rep.best_start) == rep.best_tau


@pytest.mark.parametrize("n", [4, 5, 6])
def test_k4_known_values(n):
    assert exhaustive_max_time(K4, n).best_tau == n - 3


def test_exhaustive_limit():
    with pytest.raises(SearchLimitError):
        exhaustive_max_time(K4, 9)
    with pytest.raises(SearchLimitError):
        exhaustive_max_time(builtin_pattern("K4^3"), 7)


def test_heuristic_budget_one():
    rep = heuristic_max_time(K4, 7, budget=1, seed=3)
    assert rep.examined == 1
    assert running_time(K4, rep.best_start) == rep.best_tau


def test_heuristic_deterministic_and_sound():
    a = heuristic_max_time(K4, 6, budget=2000, seed=7)
    b = heuristic_max_time(K4, 6, budget=2000, seed=7)
    assert a.document() == b.document()
    assert a.best_tau <= exhaustive_max_time(K4, 6).best_tau
    assert running_time(K4, a.best_start) == a.best_tau
    assert not a.exhaustive_certificate


def test_heuristic_reaches_k4_n7():
    rep = heuristic_max_time(K4, 7, budget=10_000, seed=0)
    assert rep.best_tau == 4


def test_cache_persistence_and_warm_rerun(tmp_path):
    path = tmp_path / "tau.jsonl"
    cold = exhaustive_max_time(K4, 5, cache=TauCache(path))
    lines = path.read_text().splitlines()
    assert len(lines) == cold.evaluations == cold.examined
    assert {"form", "pattern", "tau"} == set(json.loads(lines[0]))
    warm = exhaustive_max_time(K4, 5, cache=TauCache(path))
    assert warm.document() == cold.document()
    assert warm.evaluations == 0 and warm.cache_hits == warm.examined


def test_heuristic_warm_cache(tmp_path):
    path = tmp_path / "tau.jsonl"
    cold = heuristic_max_time(K4, 6, budget=500, seed=1, cache=TauCache(path))
    warm = heuristic_max_time(K4, 6, budget=500, seed=1, cache=TauCache(path))
    assert warm.document() == cold.document()
    assert warm.evaluations < cold.evaluations


def test_cache_coherence():
    cache = TauCache()
    cache.put("ab", "p", 3)
    assert cache.get("ab", "p") == 3
    with pytest.raises(RuntimeError):
        cache.put("ab", "p", 4)
    assert cache.get("cd", "p") is None
