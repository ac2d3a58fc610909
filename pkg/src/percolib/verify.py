"""Replay the counting argument behind the running-time bound on a concrete
process and check its structural facts copy by copy.

Given a trace and one witness edge e_i per round, G is the k-graph with edge
set {e_i}. Each copy D of F - e in G gets

* i(D): largest witness index among its edges, j(D): the next largest,
* a completion e_D (D + e_D is a copy of F) and the round s(e_D) in which
  e_D entered the process (0 for start edges),
* a type: 1 if s <= j, 2 if j < s < i, 3 if s > i, 4 if s == i.

Claims checked (all are theorems for genuine traces):

C1  type 1  =>  j(D) = i(D) - 1
C2  type 2  =>  s(e_D) = i(D) - 1
C3  type 3  =>  s(e_D) = i(D) + 1
C4  type 4  =>  e_D and e_{i(D)} entered in the same round
C5  every copy D of F itself in G contains e_{i(D)-1}
C6  no copy of F - e in G has all its edges in place after round 1
DJ  for types 2-4, the e_D sets of copies with different i(D) are disjoint

Indices are read off the trace (the round each edge of D entered), which on a
genuine trace equals the witness position. C4 and C6 additionally compare
against the witness positions, so they catch a witness that disagrees with
the trace.
"""

from __future__ import annotations

import random
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from itertools import combinations

from .hypergraph import Edge, KGraph
from .pattern import Copy, Host, Pattern, completes_copy, iter_copies
from .process import ProcessTrace, WitnessSequence, witness_sequence

CLAIMS = ("C1", "C2", "C3", "C4", "C5", "C6", "DJ")
REPORT_SCHEMA = 1


class StructuralFailure(RuntimeError):
    """No completion exists for a copy, or a completion lies outside H_tau."""


class WitnessMismatch(ValueError):
    pass


def build_trace_graph(trace: ProcessTrace, witness: WitnessSequence, strict: bool = True) -> KGraph:
    if len(witness.edges) != trace.tau:
        raise WitnessMismatch(f"witness has {len(witness.edges)} edges for tau={trace.tau}")
    if strict:
        for i, (e, r) in enumerate(zip(witness.edges, trace.rounds), start=1):
            if e not in r:
                raise WitnessMismatch(f"witness edge e_{i}={e} was not added in round {i}")
    return KGraph(trace.start.n, trace.start.k, frozenset(witness.edges))


@dataclass(frozen=True)
class CopyClassification:
    copy: Copy
    i_D: int
    j_D: int
    e_D: Edge
    s_eD: int
    type: int

    def document(self) -> dict:
        return {
            "copy_edges": [list(e) for e in sorted(self.copy.edges)],
            "copy_vertices": sorted(self.copy.vertices),
            "i_D": self.i_D,
            "j_D": self.j_D,
            "e_D": list(self.e_D),
            "s_eD": self.s_eD,
            "type": self.type,
        }


def copy_type(s: int, j: int, i: int) -> int:
    if s <= j:
        return 1
    if s < i:
        return 2
    if s > i:
        return 3
    return 4


def completions(F: Pattern, D: Copy, n: int) -> list[Edge]:
    """All k-sets f inside V(D), f not an edge of D, with D + f a copy of F."""
    k = F.k
    host = Host(KGraph(n, k, D.edges))
    return [
        f for f in combinations(sorted(D.vertices), k)
        if f not in D.edges and completes_copy(F.graph, host, f)
    ]


class _Replay:
    def __init__(self, trace: ProcessTrace, witness: WitnessSequence, F: Pattern, strict: bool):
        self.trace = trace
        self.F = F
        self.G = build_trace_graph(trace, witness, strict)
        self.witness = witness
        self.position = witness.index()
        self.stage = trace.stage()
        missing = [e for e in witness.edges if e not in self.stage]
        if missing:
            raise WitnessMismatch(f"witness edges {missing} never enter the process")

    def indices(self, D: Copy) -> tuple[int, int, Edge]:
        """(i(D), j(D), e_{i(D)}) from the rounds in which D's edges entered.
        On a genuine trace the round of e_i is i, so these are the witness
        indices; on a corrupted one j may tie with i."""
        ranked = sorted(((self.stage[e], e) for e in D.edges), reverse=True)
        if len(ranked) < 2:
            raise ValueError("j(D) is undefined for a copy with fewer than two edges")
        return ranked[0][0], ranked[1][0], ranked[0][1]

    def classify(self, D: Copy, rng: random.Random | None = None) -> CopyClassification:
        i, j, _ = self.indices(D)
        options = completions(self.F, D, self.G.n)
        if not options:
            raise StructuralFailure(f"no completion of copy {sorted(D.edges)} to F")
        e_D = options[0] if rng is None else rng.choice(options)
        if e_D not in self.stage:
            raise StructuralFailure(f"completion {e_D} is missing from the final graph")
        s = self.stage[e_D]
        return CopyClassification(D, i, j, e_D, s, copy_type(s, j, i))


def classify_copy(
    D: Copy, trace: ProcessTrace, witness: WitnessSequence, F: Pattern,
    rng: random.Random | None = None,
) -> CopyClassification:
    """Classify one copy of F - e in G; e_D is the lexicographically smallest
    completion unless an rng is given."""
    if F.removed_edge is None:
        raise ValueError("pattern needs a designated removed edge")
    return _Replay(trace, witness, F, strict=True).classify(D, rng)


@dataclass
class ClaimReport:
    pattern: str
    tau: int
    checked: dict[str, int] = field(default_factory=lambda: dict.fromkeys(CLAIMS, 0))
    failed: dict[str, int] = field(default_factory=lambda: dict.fromkeys(CLAIMS, 0))
    counterexamples: list[dict] = field(default_factory=list)
    types: Counter = field(default_factory=Counter)
    skipped_single_edge: int = 0
    truncated: bool = False
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> dict[str, int]:
        return {c: self.checked[c] - self.failed[c] for c in CLAIMS}

    @property
    def ok(self) -> bool:
        return not self.counterexamples

    def fail(self, claim: str, **detail) -> None:
        self.failed[claim] += 1
        self.counterexamples.append({"claim": claim, **detail})

    def merge(self, other: ClaimReport) -> None:
        for c in CLAIMS:
            self.checked[c] += other.checked[c]
            self.failed[c] += other.failed[c]
        self.counterexamples += other.counterexamples
        self.types.update(other.types)
        self.skipped_single_edge += other.skipped_single_edge
        self.truncated |= other.truncated

    def document(self) -> dict:
        return {
            "schema_version": REPORT_SCHEMA,
            "pattern": self.pattern,
            "claims": {
                c: {"checked": self.checked[c], "passed": self.passed[c], "failed": self.failed[c]}
                for c in CLAIMS
            },
            "types": {str(t): self.types.get(t, 0) for t in (1, 2, 3, 4)},
            "skipped_single_edge": self.skipped_single_edge,
            "truncated": self.truncated,
            "notes": self.notes,
            "counterexamples": self.counterexamples,
        }


def _copies(P: KGraph, G: KGraph, cap: int, report: ClaimReport) -> list[Copy]:
    found = list(iter_copies(P, Host(G), cap + 1))
    if len(found) > cap:
        report.truncated = True
        found = found[:cap]
    return sorted(found, key=Copy.sort_key)


def verify_structural_claims(
    trace: ProcessTrace,
    F: Pattern | None = None,
    witness_policy: str = "lex_min",
    seed: int = 0,
    copy_cap: int = 200_000,
    completion_policy: str = "lex_min",
    witness: WitnessSequence | None = None,
    strict: bool = True,
) -> ClaimReport:
    F = F if F is not None else trace.pattern
    if F.removed_edge is None:
        F = F.with_removed_edge()
    if witness is None:
        witness = witness_sequence(trace, witness_policy, seed)
    rep = _Replay(trace, witness, F, strict)
    report = ClaimReport(F.label, trace.tau)
    G = rep.G
    m = len(F.graph)
    wit = witness.edges

    def round_dump(i: int) -> list:
        if 1 <= i <= trace.tau:
            return [list(e) for e in sorted(trace.rounds[i - 1])]
        return []

    if m >= 2:
        for D in _copies(F.graph, G, copy_cap, report):
            i = max(rep.stage[e] for e in D.edges)
            report.checked["C5"] += 1
            if not 2 <= i <= len(wit) + 1 or wit[i - 2] not in D.edges:
                report.fail("C5", copy_edges=[list(e) for e in sorted(D.edges)], i_D=i,
                            round=round_dump(i))
    else:
        report.notes.append("C5 needs a pattern with at least two edges")

    if m < 3:
        report.notes.append("C1-C4, C6 and DJ need a pattern with at least three edges")
        return report

    rng = random.Random(seed) if completion_policy == "seeded" else None
    if completion_policy not in ("lex_min", "seeded"):
        raise ValueError(f"unknown completion policy {completion_policy!r}")
    completions_by: dict[int, dict[int, set[Edge]]] = defaultdict(lambda: defaultdict(set))
    for D in _copies(F.minus_edge(), G, copy_cap, report):
        if len(D.edges) < 2:
            report.skipped_single_edge += 1
            continue
        report.checked["C6"] += 1
        c = rep.classify(D, rng)
        e_top = rep.indices(D)[2]
        if c.i_D <= 1 or max(rep.position[e] for e in D.edges) <= 1:
            report.fail("C6", **c.document(), round=round_dump(c.i_D))
        report.types[c.type] += 1
        claim, ok = {
            1: ("C1", c.j_D == c.i_D - 1),
            2: ("C2", c.s_eD == c.i_D - 1),
            3: ("C3", c.s_eD == c.i_D + 1),
            4: ("C4", c.s_eD == c.i_D and rep.position[e_top] == c.s_eD),
        }[c.type]
        report.checked[claim] += 1
        if not ok:
            report.fail(claim, **c.document(), round=round_dump(c.i_D))
        if c.type != 1:
            completions_by[c.type][c.i_D].add(c.e_D)

    for t in (2, 3, 4):
        by_i = completions_by.get(t, {})
        owner: dict[Edge, int] = {}
        for i in sorted(by_i):
            for e in sorted(by_i[i]):
                report.checked["DJ"] += 1
                if e in owner:
                    report.fail("DJ", type=t, e_D=list(e), i_first=owner[e], i_second=i)
                else:
                    owner[e] = i
    return report


def corrupt_trace(trace: ProcessTrace, edge: Edge, to_round: int | None = None) -> ProcessTrace:
    """Relocate `edge` to round `to_round` (default: one round earlier; 0 means
    the start graph, tau+1 a new final round). A round left empty is dropped,
    shifting later rounds."""
    rounds = [set(r) for r in trace.rounds]
    src = next(i for i, r in enumerate(rounds, start=1) if edge in r)
    dst = src - 1 if to_round is None else to_round
    if not 0 <= dst <= len(rounds) + 1 or dst == src:
        raise ValueError(f"cannot move an edge of round {src} to round {dst}")
    rounds[src - 1].discard(edge)
    start = trace.start
    if dst == len(rounds) + 1:
        rounds.append(set())
    if dst == 0:
        start = start.with_edges([edge])
    else:
        rounds[dst - 1].add(edge)
    return ProcessTrace(trace.pattern, start, tuple(frozenset(r) for r in rounds if r))


def swap_rounds(trace: ProcessTrace, i: int) -> ProcessTrace:
    """Exchange the added sets of rounds i and i+1 (1-based)."""
    rounds = list(trace.rounds)
    rounds[i - 1], rounds[i] = rounds[i], rounds[i - 1]
    return ProcessTrace(trace.pattern, trace.start, tuple(rounds))
