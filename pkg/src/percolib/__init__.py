"""F-bootstrap percolation on graphs and k-uniform hypergraphs."""

from __future__ import annotations

from .canon import canonical_form, canonical_graph
from .hypergraph import FormatError, KGraph, parse_kgraph, serialize_kgraph
from .pattern import Pattern, builtin_pattern, count_copies, enumerate_copies, exists_copy_containing
from .process import ProcessTrace, run_process, running_time, witness_sequence
from .search import SearchReport, TauCache, exhaustive_max_time, heuristic_max_time
from .turan import (
    chromatic_number,
    exact_turan_number,
    running_time_bound,
    turan_density_graph,
)
from .verify import ClaimReport, verify_structural_claims

__version__ = "0.1.0"

__all__ = [
    "ClaimReport",
    "FormatError",
    "KGraph",
    "Pattern",
    "ProcessTrace",
    "SearchReport",
    "TauCache",
    "builtin_pattern",
    "canonical_form",
    "canonical_graph",
    "chromatic_number",
    "count_copies",
    "enumerate_copies",
    "exact_turan_number",
    "exhaustive_max_time",
    "exists_copy_containing",
    "heuristic_max_time",
    "parse_kgraph",
    "run_process",
    "running_time",
    "running_time_bound",
    "serialize_kgraph",
    "turan_density_graph",
    "verify_structural_claims",
    "witness_sequence",
]
