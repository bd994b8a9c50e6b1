"""Worst-case, one-shot distributed function computation with bit-serial queries."""

from .ambiguity import BitAddress, KnowledgeState, SupportSet, bits_needed
from .functions import BUILTIN_NAMES, FunctionSpec, Problem, evaluate
from .oracle import Oracle, SearchBudget, min_worst_cost
from .protocol import TieRule, offline_query_sequence, run_online, run_worst_case
from .rates import audit_claims, classify, loose_bounds, rate_region, tight_bounds
from .simulation import batch_simulate, simulate

__all__ = [
    "BUILTIN_NAMES",
    "BitAddress",
    "FunctionSpec",
    "KnowledgeState",
    "Oracle",
    "Problem",
    "SearchBudget",
    "SupportSet",
    "TieRule",
    "audit_claims",
    "batch_simulate",
    "bits_needed",
    "classify",
    "evaluate",
    "loose_bounds",
    "min_worst_cost",
    "offline_query_sequence",
    "rate_region",
    "run_online",
    "run_worst_case",
    "simulate",
    "tight_bounds",
]
