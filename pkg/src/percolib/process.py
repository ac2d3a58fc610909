"""The F-bootstrap percolation process with synchronous rounds."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

from .hypergraph import Edge, KGraph, colex_rank
from .pattern import Host, Pattern, completes_clique, completes_copy, host_adjacency

TRACE_SCHEMA = 1


class RoundCapExceeded(RuntimeError):
    """The process did not stabilise within C(n,k)+1 rounds (an engine bug)."""


class TraceError(ValueError):
    pass


@dataclass(frozen=True)
class ProcessTrace:
    pattern: Pattern
    start: KGraph
    rounds: tuple[frozenset[Edge], ...]

    @property
    def tau(self) -> int:
        return len(self.rounds)

    @property
    def final(self) -> KGraph:
        return self.start.with_edges(e for r in self.rounds for e in r)

    def stage(self) -> dict[Edge, int]:
        """Edge -> round in which it entered (0 for start edges); first
        occurrence wins if a corrupted trace repeats an edge."""
        s = {e: 0 for e in self.start.edges}
        for i, r in enumerate(self.rounds, start=1):
            for e in r:
                s.setdefault(e, i)
        return s

    def graph_at(self, i: int) -> KGraph:
        return self.start.with_edges(e for r in self.rounds[:i] for e in r)

    def to_json(self) -> str:
        return json.dumps(trace_document(self), indent=2)


def pattern_document(F: Pattern) -> dict:
    return {
        "name": F.name,
        "n": F.graph.n,
        "k": F.graph.k,
        "edges": [list(e) for e in sorted(F.graph.edges)],
        "removed_edge": list(F.removed_edge) if F.removed_edge else None,
    }


def pattern_from_document(doc: dict) -> Pattern:
    G = KGraph.from_edges(doc["n"], doc["edges"], doc["k"])
    rem = tuple(doc["removed_edge"]) if doc.get("removed_edge") else None
    return Pattern(G, rem, doc.get("name"))


def trace_document(trace: ProcessTrace) -> dict:
    return {
        "schema_version": TRACE_SCHEMA,
        "n": trace.start.n,
        "k": trace.start.k,
        "pattern": pattern_document(trace.pattern),
        "start_edges": [list(e) for e in sorted(trace.start.edges)],
        "rounds": [[list(e) for e in sorted(r)] for r in trace.rounds],
        "tau": trace.tau,
    }


def trace_from_document(doc: dict, validate: bool = True) -> ProcessTrace:
    try:
        F = pattern_from_document(doc["pattern"])
        start = KGraph.from_edges(doc["n"], doc["start_edges"], doc["k"])
        rounds = tuple(frozenset(tuple(sorted(e)) for e in r) for r in doc["rounds"])
    except (KeyError, TypeError) as exc:
        raise TraceError(f"malformed trace document: {exc}") from exc
    trace = ProcessTrace(F, start, rounds)
    if doc.get("tau", trace.tau) != trace.tau:
        raise TraceError(f"tau field {doc['tau']} disagrees with {trace.tau} rounds")
    if validate:
        problems = trace_problems(trace)
        if problems:
            raise TraceError("; ".join(problems))
    return trace


def trace_problems(trace: ProcessTrace) -> list[str]:
    """Structural invariants only (no re-simulation)."""
    out = []
    n, k = trace.start.n, trace.start.k
    seen = set(trace.start.edges)
    for i, r in enumerate(trace.rounds, start=1):
        if not r:
            out.append(f"round {i} is empty")
        for e in r:
            if len(e) != k or len(set(e)) != k or not all(0 <= v < n for v in e):
                out.append(f"round {i}: {e} is not a {k}-subset of 0..{n - 1}")
            if e in seen:
                out.append(f"round {i}: edge {e} already present")
        seen |= r
    return out


# frontier ------------------------------------------------------------------


def _section_dist(G: KGraph, src: set[int], dst: set[int]) -> float:
    adj = G.adjacency
    reach = 0
    for v in src:
        reach |= 1 << v
    target = sum(1 << v for v in dst)
    d = 0
    while not reach & target:
        nxt = reach
        r = reach
        while r:
            low = r & -r
            nxt |= adj[low.bit_length() - 1]
            r ^= low
        if nxt == reach:
            return float("inf")
        reach = nxt
        d += 1
    return d


@lru_cache(maxsize=None)
def frontier_radius(P: KGraph) -> float:
    """Max over edge pairs (e, f) of P of the 2-section distance between the
    vertex sets of e and f inside P - e. A non-edge completable in H_i but not
    in H_{i-1} lies within this distance of some edge added in round i."""
    worst = 0.0
    for e in P.edges:
        rest = P.without_edges([e])
        for f in P.edges:
            if f != e:
                worst = max(worst, _section_dist(rest, set(e), set(f)))
    return worst


def _ball(adj: list[int], seeds: int, radius: int) -> int:
    reach = seeds
    for _ in range(radius):
        nxt = reach
        r = reach
        while r:
            low = r & -r
            nxt |= adj[low.bit_length() - 1]
            r ^= low
        if nxt == reach:
            break
        reach = nxt
    return reach


# engines -------------------------------------------------------------------


def _completable_naive(P: KGraph, H: KGraph) -> frozenset[Edge]:
    host = Host(H)
    return frozenset(e for e in H.non_edges() if completes_copy(P, host, e))


def percolation_step(F: Pattern, H: KGraph) -> tuple[KGraph, frozenset[Edge]]:
    """One synchronous round: every non-edge completing a new copy of F in H."""
    if F.k != H.k:
        raise ValueError(f"uniformity mismatch: pattern k={F.k}, host k={H.k}")
    added = _completable_naive(F.graph, H)
    return H.with_edges(added), added


def _run_naive(F: Pattern, H: KGraph) -> list[frozenset[Edge]]:
    rounds = []
    cap = H.max_edges() + 1
    while True:
        H, added = percolation_step(F, H)
        if not added:
            return rounds
        rounds.append(added)
        if len(rounds) > cap:
            raise RoundCapExceeded(f"no fixpoint after {cap} rounds")


def _run_incremental(F: Pattern, H: KGraph) -> list[frozenset[Edge]]:
    P = F.graph
    n, k = H.n, H.k
    host = Host(H)
    clique = F.is_clique()
    radius = frontier_radius(P)
    all_sets = list(combinations(range(n), k))
    candidates = [e for e in all_sets if e not in host.edges]
    rounds: list[frozenset[Edge]] = []
    cap = H.max_edges() + 1
    while candidates:
        if clique:
            adj = host_adjacency(host)
            added = frozenset(e for e in candidates if completes_clique(adj, e, P.n))
        else:
            added = frozenset(e for e in candidates if completes_copy(P, host, e))
        if not added:
            break
        rounds.append(added)
        if len(rounds) > cap:
            raise RoundCapExceeded(f"no fixpoint after {cap} rounds")
        for e in added:
            host.add(e)
        if radius == float("inf"):
            candidates = [e for e in all_sets if e not in host.edges]
            continue
        adj = [0] * n
        for e in host.edges:
            bits = sum(1 << v for v in e)
            for v in e:
                adj[v] |= bits
        seeds = 0
        for e in added:
            for v in e:
                seeds |= 1 << v
        near = _ball(adj, seeds, int(radius))
        candidates = [
            e for e in all_sets
            if e not in host.edges and any(near >> v & 1 for v in e)
        ]
    return rounds


ENGINES = {"naive": _run_naive, "incremental": _run_incremental}


def run_process(F: Pattern, H: KGraph, engine: str = "incremental") -> ProcessTrace:
    if F.k != H.k:
        raise ValueError(f"uniformity mismatch: pattern k={F.k}, host k={H.k}")
    try:
        run = ENGINES[engine]
    except KeyError:
        raise ValueError(f"unknown engine {engine!r}") from None
    return ProcessTrace(F, H, tuple(run(F, H)))


def running_time(F: Pattern, H: KGraph) -> int:
    return len(_run_incremental(F, H))


# witnesses -----------------------------------------------------------------


@dataclass(frozen=True)
class WitnessSequence:
    edges: tuple[Edge, ...]

    def index(self) -> dict[Edge, int]:
        """Edge -> i such that it is e_i (1-based)."""
        return {e: i for i, e in enumerate(self.edges, start=1)}


def witness_sequence(trace: ProcessTrace, policy: str = "lex_min", seed: int = 0) -> WitnessSequence:
    """Pick e_i from round i: smallest colex rank, or uniformly with a seeded RNG."""
    if policy == "lex_min":
        return WitnessSequence(tuple(min(r, key=colex_rank) for r in trace.rounds))
    if policy == "seeded":
        rng = random.Random(seed)
        return WitnessSequence(tuple(rng.choice(sorted(r, key=colex_rank)) for r in trace.rounds))
    raise ValueError(f"unknown witness policy {policy!r}")
