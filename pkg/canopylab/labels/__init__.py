"""Rule-based noisy labelling."""

from .evaluator import evaluate_rule
from .rules import (
    And,
    Comparison,
    Not,
    Or,
    RuleExpr,
    default_tree_rule,
    format_rule,
    layers_of,
    load_rule_file,
    parse_rule,
)

__all__ = [
    "And",
    "Comparison",
    "Not",
    "Or",
    "RuleExpr",
    "default_tree_rule",
    "evaluate_rule",
    "format_rule",
    "layers_of",
    "load_rule_file",
    "parse_rule",
]
