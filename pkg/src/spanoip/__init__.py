"""Span programs from guessing decision trees, applied to oracle identification."""

from .bound import BoundResult, closed_form, enumerate_oracle, optimal_profile, ratio_scan
from .decision_tree import (
    BLACK,
    RED,
    DecisionTree,
    GColoring,
    PathStats,
    b_values,
    evaluate,
    tree_bounds,
    validate,
)
from .estimator import OracleIdentifier
from .exceptions import (
    BoundViolationError,
    InvalidInputError,
    PromiseViolationError,
    ScaleLimitError,
    SpanOipError,
    WitnessError,
)
from .hegedus import HegedusOrdering, exhaustive_ordering, greedy_ordering, verify_ordering
from .nbsp import SpanProgram, WeightTable, complexity, default_weights, membership_check
from .oip import build_instance, build_tree, identify, profile

__all__ = [
    "BLACK",
    "RED",
    "BoundResult",
    "BoundViolationError",
    "DecisionTree",
    "GColoring",
    "HegedusOrdering",
    "InvalidInputError",
    "OracleIdentifier",
    "PathStats",
    "PromiseViolationError",
    "ScaleLimitError",
    "SpanOipError",
    "SpanProgram",
    "WeightTable",
    "WitnessError",
    "b_values",
    "build_instance",
    "build_tree",
    "closed_form",
    "complexity",
    "default_weights",
    "enumerate_oracle",
    "evaluate",
    "exhaustive_ordering",
    "greedy_ordering",
    "identify",
    "membership_check",
    "optimal_profile",
    "profile",
    "ratio_scan",
    "tree_bounds",
    "validate",
    "verify_ordering",
]

__version__ = "0.1.0"
