"""Maximum running time M_F(n): exhaustive over isomorphism classes, or
randomised hill climbing over single-edge toggles."""

from __future__ import annotations

import json
import logging
import os
import random
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Iterator

from filelock import FileLock

from .canon import canonical_form, canonical_graph, encode_mask
from .hypergraph import KGraph
from .pattern import Pattern
from .process import running_time

log = logging.getLogger(__name__)

SEARCH_SCHEMA = 1
EXHAUSTIVE_LIMITS = {2: 8, 3: 6}


class SearchLimitError(ValueError):
    pass


def pattern_id(F: Pattern) -> str:
    """Isomorphism-invariant key for the pattern graph (tau ignores e)."""
    return f"k{F.k}:{canonical_form(F.graph).hex()}"


def iter_classes(
    n: int, k: int, keep: Callable[[KGraph, tuple[int, ...]], bool] | None = None
) -> Iterator[KGraph]:
    """One canonical representative per isomorphism class of k-graphs on n
    vertices, by increasing edge count. Classes are generated by adding one
    edge to each class of the previous level and rejecting repeats by
    canonical form.

    keep(G, e) may veto adding e to G; it must describe a property closed
    under edge deletion, otherwise classes above a vetoed level are missed.
    """
    level = {0: KGraph.empty(n, k)}
    while level:
        yield from level.values()
        nxt: dict[int, KGraph] = {}
        for G in level.values():
            for e in combinations(range(n), k):
                if e in G.edges or (keep is not None and not keep(G, e)):
                    continue
                C = canonical_graph(G.with_edges([e]))
                nxt.setdefault(C.mask, C)
        level = nxt


class TauCache:
    """tau keyed by (canonical form, pattern id); optionally persisted as
    append-only JSON lines. One writer per run, guarded by an advisory lock."""

    def __init__(self, path: str | os.PathLike | None = None):
        self.path = os.fspath(path) if path is not None else None
        self.table: dict[tuple[str, str], int] = {}
        self.hits = 0
        self.misses = 0
        self._pending: list[dict] = []
        if self.path and os.path.exists(self.path):
            with open(self.path) as fh:
                for line in fh:
                    line = line.strip()
                    if not line:
                        continue
                    rec = json.loads(line)
                    self.table[(rec["form"], rec["pattern"])] = rec["tau"]

    def get(self, form: str, pid: str) -> int | None:
        t = self.table.get((form, pid))
        if t is None:
            self.misses += 1
        else:
            self.hits += 1
        return t

    def put(self, form: str, pid: str, tau: int) -> None:
        old = self.table.get((form, pid))
        if old is not None:
            if old != tau:
                raise RuntimeError(f"cache incoherence for {form}: {old} != {tau}")
            return
        self.table[(form, pid)] = tau
        self._pending.append({"form": form, "pattern": pid, "tau": tau})

    def flush(self) -> None:
        if not self.path or not self._pending:
            self._pending.clear()
            return
        os.makedirs(os.path.dirname(os.path.abspath(self.path)), exist_ok=True)
        with FileLock(self.path + ".lock"):
            with open(self.path, "a") as fh:
                for rec in self._pending:
                    fh.write(json.dumps(rec, sort_keys=True) + "\n")
        self._pending.clear()


@dataclass
class SearchReport:
    n: int
    pattern: Pattern
    best_start: KGraph
    best_tau: int
    method: str
    examined: int
    exhaustive_certificate: bool
    seed: int | None = None
    evaluations: int = 0
    cache_hits: int = 0
    extra: dict = field(default_factory=dict)

    def document(self) -> dict:
        return {
            "schema_version": SEARCH_SCHEMA,
            "n": self.n,
            "pattern": self.pattern.label,
            "k": self.pattern.k,
            "method": self.method,
            "best_tau": self.best_tau,
            "best_start_edges": [list(e) for e in sorted(self.best_start.edges)],
            "examined": self.examined,
            "exhaustive_certificate": self.exhaustive_certificate,
            "seed": self.seed,
        }


def _better(tau: int, G: KGraph, best: tuple[int, KGraph] | None) -> bool:
    """Higher tau, then fewer edges, then smaller canonical form."""
    if best is None:
        return True
    btau, B = best
    if tau != btau:
        return tau > btau
    if len(G) != len(B):
        return len(G) < len(B)
    return canonical_form(G) < canonical_form(B)


def exhaustive_max_time(
    F: Pattern, n: int, cache: TauCache | None = None, limits: dict[int, int] | None = None
) -> SearchReport:
    limits = EXHAUSTIVE_LIMITS if limits is None else limits
    if n > limits.get(F.k, -1):
        raise SearchLimitError(f"exhaustive search for k={F.k} limited to n <= {limits.get(F.k)}")
    cache = TauCache() if cache is None else cache
    pid = pattern_id(F)
    best: tuple[int, KGraph] | None = None
    examined = evaluations = 0
    for G in iter_classes(n, F.k):
        examined += 1
        form = encode_mask(n, F.k, G.mask).hex()
        tau = cache.get(form, pid)
        if tau is None:
            tau = running_time(F, G)
            evaluations += 1
            cache.put(form, pid, tau)
        if _better(tau, G, best):
            best = (tau, G)
    cache.flush()
    assert best is not None
    return SearchReport(
        n, F, best[1], best[0], "exhaustive", examined, True,
        evaluations=evaluations, cache_hits=examined - evaluations,
    )


def _random_start(n: int, slots: list, rng: random.Random) -> int:
    p = min(1.0, max(0.0, 0.5 + rng.uniform(-0.25, 0.25)))
    mask = 0
    for i in range(len(slots)):
        if rng.random() < p:
            mask |= 1 << i
    return mask


def heuristic_max_time(
    F: Pattern, n: int, budget: int, seed: int = 0, patience: int | None = None,
    target: int | None = None, cache: TauCache | None = None,
) -> SearchReport:
    """Random restarts plus hill climbing over single-edge toggles.

    Every objective query counts against the budget. Equal-tau moves are
    accepted; a restart happens after `patience` consecutive queries without
    strict improvement. Stops early once `target` is reached. With a cache,
    unseen candidates are looked up by canonical form before simulating.
    """
    if budget < 1:
        raise ValueError("budget must be at least 1")
    rng = random.Random(seed)
    slots = list(combinations(range(n), F.k))
    patience = patience if patience is not None else max(4 * len(slots), 50)
    memo: dict[int, int] = {}
    used = simulated = 0
    pid = pattern_id(F) if cache is not None else None

    def graph(mask: int) -> KGraph:
        return KGraph(n, F.k, frozenset(slots[i] for i in range(len(slots)) if mask >> i & 1))

    def simulate(mask: int) -> int:
        nonlocal simulated
        G = graph(mask)
        if cache is None:
            simulated += 1
            return running_time(F, G)
        form = canonical_form(G).hex()
        t = cache.get(form, pid)
        if t is None:
            simulated += 1
            t = running_time(F, G)
            cache.put(form, pid, t)
        return t

    def tau_of(mask: int) -> int:
        nonlocal used
        used += 1
        t = memo.get(mask)
        if t is None:
            t = memo[mask] = simulate(mask)
        return t

    best: tuple[int, KGraph] | None = None
    restarts = 0
    while used < budget:
        cur = _random_start(n, slots, rng)
        restarts += 1
        cur_tau = tau_of(cur)
        stale = 0
        while True:
            if best is None or cur_tau >= best[0]:
                G = graph(cur)
                if _better(cur_tau, G, best):
                    best = (cur_tau, G)
            if used >= budget or (target is not None and best[0] >= target) or stale >= patience:
                break
            cand = cur ^ (1 << rng.randrange(len(slots)))
            t = tau_of(cand)
            if t > cur_tau:
                cur, cur_tau, stale = cand, t, 0
            else:
                stale += 1
                if t == cur_tau:
                    cur = cand
        if target is not None and best is not None and best[0] >= target:
            break
    if cache is not None:
        cache.flush()
    assert best is not None
    return SearchReport(
        n, F, best[1], best[0], "heuristic", used, False, seed=seed,
        evaluations=simulated, cache_hits=used - simulated, extra={"restarts": restarts},
    )
