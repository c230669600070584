"""Probabilistic constraint satisfaction: decisions under parameter uncertainty."""

from .classical import MixedAssignmentResult, solve_classical, solve_mixed
from .conditional import replay_conditional, solve_conditional
from .decomposition import DecompositionResult, covered_environment, dec
from .io import load_problem, parse_problem, serialize_problem
from .model import (
    ConditionalDecision,
    Constraint,
    DecisionVariable,
    Environment,
    Parameter,
    ProblemError,
    ProblemSpec,
    PropertyFError,
    covers,
    environment_probability,
    reduce,
    validate,
    world_probability,
)
from .pure import SearchOutcome, search_optimal_pure

__all__ = [
    "ConditionalDecision",
    "Constraint",
    "DecisionVariable",
    "DecompositionResult",
    "Environment",
    "MixedAssignmentResult",
    "Parameter",
    "ProblemError",
    "ProblemSpec",
    "PropertyFError",
    "SearchOutcome",
    "covered_environment",
    "covers",
    "dec",
    "environment_probability",
    "load_problem",
    "parse_problem",
    "reduce",
    "replay_conditional",
    "search_optimal_pure",
    "serialize_problem",
    "solve_classical",
    "solve_conditional",
    "solve_mixed",
    "validate",
    "world_probability",
]
