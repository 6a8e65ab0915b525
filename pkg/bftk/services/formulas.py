"""
Read-once De Morgan formulas.

Grammar (whitespace-insensitive):

    formula := var | '~' formula | '(' formula (op formula)+ ')'
    op      := '&' | '|'          (one operator per parenthesised group)
    var     := 'x' digits

Every variable may occur only once.  ``normalize`` renumbers variables
1..n in left-to-right leaf order; tables are always built from the
normalised tree.
"""

from dataclasses import dataclass
import logging
import math
import re
from typing import Dict, List, Optional, Tuple, Union

import numpy as np

from ..core.errors import ArityCapError, FormulaSyntaxError, RepeatedVariableError
from ..core.polynomial import degree
from ..core.truth_table import MAX_ARITY, TruthTable
from .approx import ADEG_MAX_ARITY, DEFAULT_EPSILON, approx_degree

logger = logging.getLogger(__name__)

READONCE_DEGREE_MAX_ARITY = 12

LPAREN = re.compile(r"\(")
RPAREN = re.compile(r"\)")
NOT = re.compile(r"~")
OP = re.compile(r"[&|]")
VAR = re.compile(r"x(\d+)")
SPACES = re.compile(r"\s*")


@dataclass(frozen=True)
class Var:
    index: int


@dataclass(frozen=True)
class Not:
    child: "Node"


@dataclass(frozen=True)
class And:
    children: Tuple["Node", ...]


@dataclass(frozen=True)
class Or:
    children: Tuple["Node", ...]


Node = Union[Var, Not, And, Or]


@dataclass(frozen=True)
class FormulaAst:
    root: Node
    variables: Tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.variables)

    @property
    def leaf_count(self) -> int:
        return len(self.variables)


class Tracker:
    def __init__(self, text: str, pos: int = 0):
        self.text = text
        self.pos = pos
        self.seen: Dict[int, int] = {}
        self.order: List[int] = []

    def match(self, pattern: re.Pattern) -> Optional[re.Match]:
        self.pos = SPACES.match(self.text, self.pos).end()
        m = pattern.match(self.text, self.pos)
        if m:
            self.pos = m.end()
        return m

    def at_end(self) -> bool:
        self.pos = SPACES.match(self.text, self.pos).end()
        return self.pos >= len(self.text)


def _parse_node(t: Tracker) -> Node:
    if t.at_end():
        raise FormulaSyntaxError("unexpected end of formula", t.pos)
    start = t.pos
    m = t.match(VAR)
    if m:
        index = int(m.group(1))
        if index in t.seen:
            raise RepeatedVariableError(f"x{index}", start)
        t.seen[index] = start
        t.order.append(index)
        return Var(index)
    if t.match(NOT):
        return Not(_parse_node(t))
    if t.match(LPAREN):
        children = [_parse_node(t)]
        operator = None
        while True:
            if t.match(RPAREN):
                break
            op_pos = t.pos
            op = t.match(OP)
            if not op:
                if t.at_end():
                    raise FormulaSyntaxError("missing ')'", t.pos)
                raise FormulaSyntaxError(f"expected '&', '|' or ')' but found '{t.text[t.pos]}'", t.pos)
            if operator is None:
                operator = op.group(0)
            elif op.group(0) != operator:
                raise FormulaSyntaxError("mixed operators in one group; add parentheses", op_pos)
            children.append(_parse_node(t))
        if operator is None:
            raise FormulaSyntaxError("a parenthesised group needs at least two operands", start)
        return And(tuple(children)) if operator == "&" else Or(tuple(children))
    raise FormulaSyntaxError(f"unexpected character '{t.text[t.pos]}'", t.pos)


def parse_formula(text: str) -> FormulaAst:
    """Parse and validate a read-once formula (variable names kept as written)."""
    t = Tracker(text)
    if t.at_end():
        raise FormulaSyntaxError("empty formula", 0)
    root = _parse_node(t)
    if not t.at_end():
        raise FormulaSyntaxError(f"unexpected trailing input '{t.text[t.pos:]}'", t.pos)
    return FormulaAst(root, tuple(t.order))


def _renumber(node: Node, mapping: Dict[int, int]) -> Node:
    if isinstance(node, Var):
        return Var(mapping[node.index])
    if isinstance(node, Not):
        return Not(_renumber(node.child, mapping))
    children = tuple(_renumber(c, mapping) for c in node.children)
    return And(children) if isinstance(node, And) else Or(children)


def normalize(ast: FormulaAst) -> FormulaAst:
    mapping = {old: new for new, old in enumerate(ast.variables, start=1)}
    return FormulaAst(_renumber(ast.root, mapping), tuple(range(1, ast.n + 1)))


def _format(node: Node) -> str:
    if isinstance(node, Var):
        return f"x{node.index}"
    if isinstance(node, Not):
        return "~" + _format(node.child)
    op = " & " if isinstance(node, And) else " | "
    return "(" + op.join(_format(c) for c in node.children) + ")"


def format_formula(ast: FormulaAst) -> str:
    return _format(ast.root)


def _evaluate(node: Node, idx: np.ndarray) -> np.ndarray:
    if isinstance(node, Var):
        return ((idx >> (node.index - 1)) & 1).astype(np.uint8)
    if isinstance(node, Not):
        return 1 - _evaluate(node.child, idx)
    parts = [_evaluate(c, idx) for c in node.children]
    if isinstance(node, And):
        return np.minimum.reduce(parts)
    return np.maximum.reduce(parts)


def formula_to_table(ast: FormulaAst) -> TruthTable:
    ast = normalize(ast)
    if ast.n > MAX_ARITY:
        raise ArityCapError("formula table", ast.n, MAX_ARITY)
    idx = np.arange(1 << ast.n, dtype=np.int64)
    return TruthTable.from_values(_evaluate(ast.root, idx))


@dataclass(frozen=True)
class ReadOnceDegreeCheck:
    formula: str
    n: int
    degree: int

    @property
    def holds(self) -> bool:
        return self.degree == self.n


def readonce_degree_check(ast: FormulaAst) -> ReadOnceDegreeCheck:
    """deg(f) = n for a read-once formula on n variables."""
    if ast.n > READONCE_DEGREE_MAX_ARITY:
        raise ArityCapError("read-once degree", ast.n, READONCE_DEGREE_MAX_ARITY)
    result = ReadOnceDegreeCheck(format_formula(normalize(ast)), ast.n, degree(formula_to_table(ast)))
    if not result.holds:
        logger.error(f"Read-once formula {result.formula} has degree {result.degree} != {result.n}")
    return result


@dataclass(frozen=True)
class AdegWindow:
    formula: str
    n: int
    epsilon: float
    adeg: int
    lower_bound: float

    @property
    def sqrt_n(self) -> float:
        return math.sqrt(self.n)

    @property
    def holds(self) -> bool:
        return self.lower_bound - 1e-9 <= self.adeg <= self.n


def readonce_adeg_window(ast: FormulaAst, epsilon: float = DEFAULT_EPSILON) -> AdegWindow:
    """adeg_eps against the bracket (sqrt(n), n) and the derived floor (1 - 2 eps) sqrt(n).

    The floor combines deg <= lambda^2 with lambda <= adeg / (1 - 2 eps)
    and deg = n; at eps = 1/3 it is sqrt(n) / 3.
    """
    if ast.n > ADEG_MAX_ARITY:
        raise ArityCapError("read-once adeg", ast.n, ADEG_MAX_ARITY)
    table = formula_to_table(ast)
    adeg = approx_degree(table, epsilon).degree
    window = AdegWindow(format_formula(normalize(ast)), ast.n, epsilon, adeg, (1 - 2 * epsilon) * math.sqrt(ast.n))
    logger.info(f"adeg_{epsilon:.3g}({window.formula}) = {adeg}; bracket ({window.sqrt_n:.3f}, {ast.n})")
    return window


def random_read_once(n: int, rng: np.random.Generator, negation_rate: float = 0.3) -> FormulaAst:
    """A random read-once formula on x1..xn with random gate types and fan-in 2 or 3."""
    order = [int(v) for v in rng.permutation(n) + 1]

    def build(variables: List[int]) -> Node:
        if len(variables) == 1:
            node: Node = Var(variables[0])
        else:
            parts = int(rng.integers(2, min(3, len(variables)) + 1))
            cuts = sorted(int(c) for c in rng.choice(np.arange(1, len(variables)), size=parts - 1, replace=False))
            groups = [variables[a:b] for a, b in zip([0] + cuts, cuts + [len(variables)])]
            children = tuple(build(g) for g in groups)
            node = And(children) if rng.random() < 0.5 else Or(children)
        if rng.random() < negation_rate:
            node = Not(node)
        return node

    root = build(order)
    leaves: List[int] = []

    def collect(node: Node) -> None:
        if isinstance(node, Var):
            leaves.append(node.index)
        elif isinstance(node, Not):
            collect(node.child)
        else:
            for child in node.children:
                collect(child)

    collect(root)
    return FormulaAst(root, tuple(leaves))
