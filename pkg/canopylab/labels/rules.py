"""
Threshold rule language.

Grammar (standard precedence, ``!`` over ``&&`` over ``||``, binary
operators left-associative)::

    expr       := or
    or         := and ("||" and)*
    and        := unary ("&&" unary)*
    unary      := "!" unary | "(" expr ")" | comparison
    comparison := layer op number
    layer      := quantity "." statistic | "count"
    op         := "<" | "<=" | ">" | ">=" | "==" | "!="

Layers are the bands of the statistics stack, e.g. ``elevation.std`` or
``num_returns.max``. Constants are plain reals in the layer's own units.
"""

import logging
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, NamedTuple, Union

from ..lidar.stats_rasterizer import STATS_BAND_NAMES
from ..utils import config
from ..utils.errors import InputError, ParameterError, RuleSyntaxError, UnknownLayerError

logger = logging.getLogger(__name__)

COMPARISON_OPERATORS: tuple[str, ...] = ("<", "<=", ">", ">=", "==", "!=")


# ============================================================================
# SYNTAX TREE
# ============================================================================
@dataclass(frozen=True)
class Comparison:
    """``layer op value``."""

    layer: str
    op: str
    value: float

    def __post_init__(self) -> None:
        if self.op not in COMPARISON_OPERATORS:
            raise ParameterError(f"unknown comparison operator '{self.op}'")
        object.__setattr__(self, "value", float(self.value))


@dataclass(frozen=True)
class And:
    left: "RuleExpr"
    right: "RuleExpr"


@dataclass(frozen=True)
class Or:
    left: "RuleExpr"
    right: "RuleExpr"


@dataclass(frozen=True)
class Not:
    operand: "RuleExpr"


RuleExpr = Union[Comparison, And, Or, Not]


# ============================================================================
# TOKENIZER
# ============================================================================
class Token(NamedTuple):
    kind: str
    text: str
    position: int


_TOKEN_PATTERNS = [
    ("number", r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"),
    ("name", r"[A-Za-z_][A-Za-z0-9_]*(?:\.[A-Za-z_][A-Za-z0-9_]*)*"),
    ("op", r"<=|>=|==|!=|<|>"),
    ("and", r"&&"),
    ("or", r"\|\|"),
    ("not", r"!"),
    ("lparen", r"\("),
    ("rparen", r"\)"),
    ("space", r"\s+"),
]
_TOKEN_RE = re.compile("|".join(f"(?P<{kind}>{pattern})" for kind, pattern in _TOKEN_PATTERNS))


def tokenize(text: str) -> Iterator[Token]:
    """
    Split rule text into tokens, ending with an "end" token.

    Raises:
        RuleSyntaxError: At the first character no token starts with
    """
    position = 0
    while position < len(text):
        match = _TOKEN_RE.match(text, position)
        if match is None:
            raise RuleSyntaxError(f"unexpected character '{text[position]}'", position)
        if match.lastgroup != "space":
            yield Token(match.lastgroup, match.group(), position)
        position = match.end()
    yield Token("end", "", len(text))


# ============================================================================
# PARSER
# ============================================================================
class _Parser:
    """Recursive descent parser over a token list."""

    def __init__(self, text: str) -> None:
        self.tokens = list(tokenize(text))
        self.index = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.index]

    def advance(self) -> Token:
        token = self.tokens[self.index]
        self.index += 1
        return token

    def expect(self, kind: str, description: str) -> Token:
        token = self.current
        if token.kind != kind:
            found = "end of rule" if token.kind == "end" else f"'{token.text}'"
            raise RuleSyntaxError(f"expected {description}, found {found}", token.position)
        return self.advance()

    def parse(self) -> RuleExpr:
        expr = self.parse_or()
        self.expect("end", "'&&', '||' or end of rule")
        return expr

    def parse_or(self) -> RuleExpr:
        expr = self.parse_and()
        while self.current.kind == "or":
            self.advance()
            expr = Or(expr, self.parse_and())
        return expr

    def parse_and(self) -> RuleExpr:
        expr = self.parse_unary()
        while self.current.kind == "and":
            self.advance()
            expr = And(expr, self.parse_unary())
        return expr

    def parse_unary(self) -> RuleExpr:
        token = self.current
        if token.kind == "not":
            self.advance()
            return Not(self.parse_unary())
        if token.kind == "lparen":
            self.advance()
            expr = self.parse_or()
            self.expect("rparen", "')'")
            return expr
        return self.parse_comparison()

    def parse_comparison(self) -> Comparison:
        token = self.expect("name", "a layer name, '!' or '('")
        if token.text not in STATS_BAND_NAMES:
            raise UnknownLayerError(token.text, token.position)
        op = self.expect("op", "a comparison operator")
        value = self.expect("number", "a number")
        return Comparison(token.text, op.text, float(value.text))


def parse_rule(text: str) -> RuleExpr:
    """
    Parse rule text.

    Args:
        text: Rule such as "num_returns.max >= 2 && elevation.std >= 1.0"

    Returns:
        The syntax tree

    Raises:
        RuleSyntaxError: Text does not match the grammar (with position)
        UnknownLayerError: A layer is not a statistics band (with token)
    """
    expr = _Parser(text).parse()
    logger.debug(f"Parsed rule {format_rule(expr)}")
    return expr


def default_tree_rule() -> RuleExpr:
    """The default noisy tree rule: multiple returns and meter-scale elevation spread."""
    return parse_rule(config.DEFAULT_TREE_RULE)


def load_rule_file(path: Union[str, Path]) -> RuleExpr:
    """
    Read a rule from a text file.

    Blank lines and lines starting with ``#`` are ignored; the remaining lines
    are joined with spaces and parsed as one rule.

    Raises:
        InputError: If the file cannot be read or holds no rule
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        raise InputError(f"cannot read rule file {path}: {e}") from e
    lines = [
        line.strip()
        for line in text.splitlines()
        if line.strip() and not line.strip().startswith(config.TEXT_COMMENT_PREFIX)
    ]
    if not lines:
        raise InputError(f"rule file {path} holds no rule")
    return parse_rule(" ".join(lines))


# ============================================================================
# PRINTER
# ============================================================================
_PRECEDENCE = {Or: 1, And: 2, Not: 3, Comparison: 4}


def _format_value(value: float) -> str:
    return repr(float(value))


def format_rule(expr: RuleExpr, fully_parenthesized: bool = False) -> str:
    """
    Print a syntax tree as rule text.

    parse_rule(format_rule(expr)) == expr for every tree.

    Args:
        expr: Syntax tree
        fully_parenthesized: Wrap every operator application in parentheses

    Returns:
        Rule text
    """
    if isinstance(expr, Comparison):
        return f"{expr.layer} {expr.op} {_format_value(expr.value)}"
    if isinstance(expr, Not):
        inner = format_rule(expr.operand, fully_parenthesized)
        if fully_parenthesized or not isinstance(expr.operand, Not):
            return f"!({inner})"
        return f"!{inner}"
    if not isinstance(expr, (And, Or)):
        raise ParameterError(f"not a rule expression: {expr!r}")

    symbol = "&&" if isinstance(expr, And) else "||"
    left = format_rule(expr.left, fully_parenthesized)
    right = format_rule(expr.right, fully_parenthesized)
    if fully_parenthesized:
        return f"({left} {symbol} {right})"
    precedence = _PRECEDENCE[type(expr)]
    if _PRECEDENCE[type(expr.left)] < precedence:
        left = f"({left})"
    # left-associative: an equal-precedence right child needs parentheses
    if _PRECEDENCE[type(expr.right)] <= precedence:
        right = f"({right})"
    return f"{left} {symbol} {right}"


def layers_of(expr: RuleExpr) -> set[str]:
    """Every layer name a rule reads."""
    if isinstance(expr, Comparison):
        return {expr.layer}
    if isinstance(expr, Not):
        return layers_of(expr.operand)
    return layers_of(expr.left) | layers_of(expr.right)
