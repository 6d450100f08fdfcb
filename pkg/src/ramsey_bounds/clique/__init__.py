"""Colorings, candidates and the combinatorial descents that find cliques."""

from .books import BookPreconditionError, BookShortfall, blue_book_extract
from .coloring import RED, Candidate, Coloring, Witness, bits, to_mask, witness_validate
from .descent import (
    HypothesisError,
    InequalityReport,
    InternalContradiction,
    PartitionShortfall,
    SizePreconditionError,
    descend,
    excess_fp,
    inequality_suite,
    lemma_threshold,
    rational_x,
    recurse_good,
)
from .ramsey import RamseyBudgetError, RamseyResult, canonical_key, ramsey_exact
from .search import SearchBudgetExceeded, find_clique, greedy_clique

__all__ = [
    "RED", "BookPreconditionError", "BookShortfall", "Candidate", "Coloring", "HypothesisError",
    "InequalityReport", "InternalContradiction", "PartitionShortfall", "RamseyBudgetError",
    "RamseyResult", "SearchBudgetExceeded", "SizePreconditionError", "Witness", "bits",
    "blue_book_extract", "canonical_key", "descend", "excess_fp", "find_clique", "greedy_clique",
    "inequality_suite", "lemma_threshold", "ramsey_exact", "rational_x", "recurse_good",
    "to_mask", "witness_validate",
]
