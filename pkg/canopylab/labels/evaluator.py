"""
Rule evaluation over a statistics stack.

A cell's label is the truth value of the rule under that cell's layer values.
Cells that are nodata in any layer the rule reads become invalid in the
output mask; they are never labelled false.
"""

import logging
import operator
from typing import Callable

import numpy as np

from ..lidar.stats_rasterizer import StatsStack
from ..raster.layers import BinaryMask
from .rules import And, Comparison, Not, Or, RuleExpr, format_rule, layers_of

logger = logging.getLogger(__name__)

_COMPARE: dict[str, Callable[[np.ndarray, float], np.ndarray]] = {
    "<": operator.lt,
    "<=": operator.le,
    ">": operator.gt,
    ">=": operator.ge,
    "==": operator.eq,
    "!=": operator.ne,
}


def _truth(expr: RuleExpr, stack: StatsStack) -> np.ndarray:
    if isinstance(expr, Comparison):
        return _COMPARE[expr.op](stack.band(expr.layer).values, expr.value)
    if isinstance(expr, Not):
        return ~_truth(expr.operand, stack)
    if isinstance(expr, And):
        return _truth(expr.left, stack) & _truth(expr.right, stack)
    return _truth(expr.left, stack) | _truth(expr.right, stack)


def evaluate_rule(expr: RuleExpr, stack: StatsStack) -> BinaryMask:
    """
    Label every cell of a stack with a rule.

    Args:
        expr: Parsed rule
        stack: Statistics stack the rule reads

    Returns:
        Noisy tree mask on the stack's grid

    Raises:
        BandMismatchError: If the rule reads a band the stack lacks
    """
    valid = np.ones(stack.spec.shape, dtype=bool)
    for layer in sorted(layers_of(expr)):
        valid &= stack.band(layer).valid
    mask = BinaryMask(stack.spec, _truth(expr, stack), valid)
    logger.info(
        f"Rule '{format_rule(expr)}' labelled {mask.tree_count()} of "
        f"{int(valid.sum())} valid cells as tree"
    )
    return mask
