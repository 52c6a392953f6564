"""Parse, evaluate and differentiate expressions in x and y.

Grammar, lowest to highest precedence::

    expr    := term (("+" | "-") term)*
    term    := unary (("*" | "/") unary)*
    unary   := "-" unary | power
    power   := primary ("^" unary)?          # right associative
    primary := NUMBER | "x" | "y" | "pi" | "e" | FUNC "(" expr ")" | "(" expr ")"

so ``-x^2`` is ``-(x^2)`` and ``2^3^2`` is ``2^(3^2)``. Functions are
sin, cos, exp, log, sqrt and abs.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from . import _backend
from ._program import BINARY_OPS, ERROR_MESSAGES, OP_CONST, OP_X, OP_Y, UNARY_OPS
from .core import BivariateFn, Provenance
from .errors import EvalDomainError, ParseError, UnsupportedDerivative

FUNCTIONS = ("sin", "cos", "exp", "log", "sqrt", "abs")
CONSTANTS = {"pi": math.pi, "e": math.e}
VARIABLES = ("x", "y")
MAX_DEPTH = 100


@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Unary:
    op: str
    child: "ExprNode"


@dataclass(frozen=True)
class Binary:
    op: str
    left: "ExprNode"
    right: "ExprNode"


ExprNode = Union[Const, Var, Unary, Binary]


# --------------------------------------------------------------------------
# parsing

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()])
    """,
    re.VERBOSE,
)

_PRIMARY_START = frozenset({"number", "identifier", "(", "-"})
_AFTER_OPERAND = frozenset({"+", "-", "*", "/", "^"})


@dataclass(frozen=True)
class _Tok:
    kind: str  # "number", "ident", "op", "end"
    text: str
    offset: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos = 0
    # byte offsets differ from str indices only for non-ASCII input
    def byte_off(i):
        return len(text[:i].encode("utf-8"))

    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", byte_off(pos), _PRIMARY_START | _AFTER_OPERAND)
        kind = m.lastgroup
        if kind != "ws":
            toks.append(_Tok(kind, m.group(), byte_off(pos)))
        pos = m.end()
    toks.append(_Tok("end", "", byte_off(len(text))))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0
        self.nesting = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def at_op(self, *ops) -> bool:
        return self.tok.kind == "op" and self.tok.text in ops

    def fail(self, expected):
        tok = self.tok
        what = "end of input" if tok.kind == "end" else f"token {tok.text!r}"
        raise ParseError(f"unexpected {what}", tok.offset, expected)

    def nest(self):
        self.nesting += 1
        if self.nesting > MAX_DEPTH:
            raise ParseError("expression nested too deeply", self.tok.offset)

    def parse(self) -> ExprNode:
        node = self.expr()
        if self.tok.kind != "end":
            self.fail(_AFTER_OPERAND | ({")"} if self.nesting else {"end of input"}))
        return node

    def expr(self) -> ExprNode:
        node = self.term()
        while self.at_op("+", "-"):
            op = "add" if self.tok.text == "+" else "sub"
            self.i += 1
            node = Binary(op, node, self.term())
        return node

    def term(self) -> ExprNode:
        node = self.unary()
        while self.at_op("*", "/"):
            op = "mul" if self.tok.text == "*" else "div"
            self.i += 1
            node = Binary(op, node, self.unary())
        return node

    def unary(self) -> ExprNode:
        if self.at_op("-"):
            self.i += 1
            self.nest()
            node = Unary("neg", self.unary())
            self.nesting -= 1
            return node
        return self.power()

    def power(self) -> ExprNode:
        base = self.primary()
        if self.at_op("^"):
            self.i += 1
            self.nest()
            node = Binary("pow", base, self.unary())
            self.nesting -= 1
            return node
        return base

    def primary(self) -> ExprNode:
        tok = self.tok
        if tok.kind == "number":
            self.i += 1
            return Const(float(tok.text))
        if tok.kind == "ident":
            name = tok.text
            if name in VARIABLES:
                self.i += 1
                return Var(name)
            if name in CONSTANTS:
                self.i += 1
                return Const(CONSTANTS[name])
            if name in FUNCTIONS:
                self.i += 1
                if not self.at_op("("):
                    self.fail({"("})
                self.i += 1
                self.nest()
                arg = self.expr()
                if not self.at_op(")"):
                    self.fail(_AFTER_OPERAND | {")"})
                self.i += 1
                self.nesting -= 1
                return Unary(name, arg)
            raise ParseError(
                f"unknown identifier {name!r}",
                tok.offset,
                set(VARIABLES) | set(CONSTANTS) | set(FUNCTIONS),
            )
        if self.at_op("("):
            self.i += 1
            self.nest()
            node = self.expr()
            if not self.at_op(")"):
                self.fail(_AFTER_OPERAND | {")"})
            self.i += 1
            self.nesting -= 1
            return node
        self.fail(_PRIMARY_START)


def _tree_depth(node: ExprNode) -> int:
    depth, stack = 0, [(node, 1)]
    while stack:
        n, d = stack.pop()
        depth = max(depth, d)
        if isinstance(n, Unary):
            stack.append((n.child, d + 1))
        elif isinstance(n, Binary):
            stack.append((n.left, d + 1))
            stack.append((n.right, d + 1))
    return depth


def parse(text: str) -> ExprNode:
    """Parse ``text`` into an expression tree; raises ParseError with a byte offset."""
    if not isinstance(text, str):
        raise TypeError(f"expected str, got {type(text).__name__}")
    if not text.strip():
        raise ParseError("empty expression", 0, _PRIMARY_START)
    try:
        node = _Parser(text).parse()
    except RecursionError:
        raise ParseError("expression nested too deeply", 0) from None
    # long operator chains build deep left spines without nesting
    if _tree_depth(node) > 4 * MAX_DEPTH:
        raise ParseError("expression too long to evaluate safely", 0)
    return node


# --------------------------------------------------------------------------
# scalar evaluation (reference path, pure Python math)


def _domain(code: int, x: float, y: float):
    raise EvalDomainError(f"{ERROR_MESSAGES[code]} at (x={x!r}, y={y!r})")


def _pow(u: float, v: float, x: float, y: float) -> float:
    if u == 0 and v < 0:
        _domain(3, x, y)
    if u < 0 and v != math.floor(v):
        _domain(5, x, y)
    try:
        return math.pow(u, v)
    except OverflowError:
        odd = u < 0 and v % 2 == 1
        return -math.inf if odd else math.inf


def _exp(u: float) -> float:
    try:
        return math.exp(u)
    except OverflowError:
        return math.inf


def eval(node: ExprNode, x: float, y: float) -> float:  # noqa: A001 - mirrors the public name
    """Evaluate ``node`` at (x, y) with IEEE semantics; domain errors raise."""
    if isinstance(node, Const):
        return node.value
    if isinstance(node, Var):
        return x if node.name == "x" else y
    if isinstance(node, Unary):
        u = eval(node.child, x, y)
        op = node.op
        if op == "neg":
            return -u
        if op == "sin":
            return math.sin(u)
        if op == "cos":
            return math.cos(u)
        if op == "exp":
            return _exp(u)
        if op == "log":
            if not u > 0:
                _domain(1, x, y)
            return math.log(u)
        if op == "sqrt":
            if u < 0:
                _domain(4, x, y)
            return math.sqrt(u)
        if op == "abs":
            return abs(u)
        raise ValueError(f"unknown unary op {op!r}")
    u = eval(node.left, x, y)
    v = eval(node.right, x, y)
    op = node.op
    if op == "add":
        return u + v
    if op == "sub":
        return u - v
    if op == "mul":
        return u * v
    if op == "div":
        if v == 0:
            _domain(2, x, y)
        return u / v
    if op == "pow":
        return _pow(u, v, x, y)
    raise ValueError(f"unknown binary op {op!r}")


# --------------------------------------------------------------------------
# differentiation


def _has_var(node: ExprNode, var: Optional[str] = None) -> bool:
    if isinstance(node, Var):
        return var is None or node.name == var
    if isinstance(node, Unary):
        return _has_var(node.child, var)
    if isinstance(node, Binary):
        return _has_var(node.left, var) or _has_var(node.right, var)
    return False


def _fold(node: ExprNode) -> ExprNode:
    """Fold an all-constant node unless folding would hide a domain error."""
    try:
        value = eval(node, 0.0, 0.0)
    except EvalDomainError:
        return node
    return Const(value) if math.isfinite(value) else node


def _is(node, value) -> bool:
    return isinstance(node, Const) and node.value == value


def _neg(u):
    if isinstance(u, Const):
        return Const(-u.value)
    if isinstance(u, Unary) and u.op == "neg":
        return u.child
    return Unary("neg", u)


def _add(u, v):
    if _is(u, 0):
        return v
    if _is(v, 0):
        return u
    node = Binary("add", u, v)
    return _fold(node) if isinstance(u, Const) and isinstance(v, Const) else node


def _sub(u, v):
    if _is(v, 0):
        return u
    if _is(u, 0):
        return _neg(v)
    node = Binary("sub", u, v)
    return _fold(node) if isinstance(u, Const) and isinstance(v, Const) else node


def _mul(u, v):
    if _is(u, 0) or _is(v, 0):
        return Const(0.0)
    if _is(u, 1):
        return v
    if _is(v, 1):
        return u
    node = Binary("mul", u, v)
    return _fold(node) if isinstance(u, Const) and isinstance(v, Const) else node


def _div(u, v):
    if _is(u, 0) and not _is(v, 0):
        return Const(0.0)
    if _is(v, 1):
        return u
    node = Binary("div", u, v)
    return _fold(node) if isinstance(u, Const) and isinstance(v, Const) else node


def _pow_node(u, v):
    if _is(v, 1):
        return u
    if _is(v, 0):
        return Const(1.0)
    node = Binary("pow", u, v)
    return _fold(node) if isinstance(u, Const) and isinstance(v, Const) else node


def _diff(node: ExprNode, var: str) -> ExprNode:
    if not _has_var(node, var):
        return Const(0.0)
    if isinstance(node, Var):
        return Const(1.0)
    if isinstance(node, Unary):
        u = node.child
        du = _diff(u, var)
        op = node.op
        if op == "neg":
            return _neg(du)
        if op == "sin":
            return _mul(Unary("cos", u), du)
        if op == "cos":
            return _mul(_neg(Unary("sin", u)), du)
        if op == "exp":
            return _mul(node, du)
        if op == "log":
            return _div(du, u)
        if op == "sqrt":
            return _div(du, _mul(Const(2.0), node))
        raise UnsupportedDerivative(f"cannot differentiate {op}(...)")
    u, v = node.left, node.right
    op = node.op
    if op == "pow":
        if _has_var(v):
            raise UnsupportedDerivative("exponent must be constant to differentiate a power")
        k = _fold(v)
        return _mul(_mul(k, _pow_node(u, _fold(_sub(k, Const(1.0))))), _diff(u, var))
    du, dv = _diff(u, var), _diff(v, var)
    if op == "add":
        return _add(du, dv)
    if op == "sub":
        return _sub(du, dv)
    if op == "mul":
        return _add(_mul(du, v), _mul(u, dv))
    if op == "div":
        return _div(_sub(_mul(du, v), _mul(u, dv)), _pow_node(v, Const(2.0)))
    raise ValueError(f"unknown binary op {op!r}")


def differentiate(node: ExprNode, var: str) -> ExprNode:
    """Symbolic partial derivative with respect to ``var`` ("x" or "y")."""
    if var not in VARIABLES:
        raise ValueError(f"var must be 'x' or 'y', got {var!r}")
    try:
        out = _diff(node, var)
    except RecursionError:
        out = None
    # the chain rule deepens trees; refuse results that later passes cannot walk
    if out is None or _tree_depth(out) > 4 * MAX_DEPTH:
        raise UnsupportedDerivative("derivative tree too deep to evaluate safely")
    return out


def mixed_partial(node: ExprNode) -> ExprNode:
    return differentiate(differentiate(node, "x"), "y")


# --------------------------------------------------------------------------
# printing


_PREC = {"add": 1, "sub": 1, "mul": 2, "div": 2, "neg": 3, "pow": 4}
_SYM = {"add": "+", "sub": "-", "mul": "*", "div": "/", "pow": "^"}


def to_string(node: ExprNode) -> str:
    """Render a tree back to parseable text with minimal parentheses."""
    if isinstance(node, Const):
        for name, val in CONSTANTS.items():
            if node.value == val:
                return name
        text = repr(node.value)
        return f"({text})" if node.value < 0 else text
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Unary):
        if node.op == "neg":
            inner = to_string(node.child)
            if isinstance(node.child, Binary) and _PREC[node.child.op] < _PREC["pow"]:
                inner = f"({inner})"
            return f"-{inner}"
        return f"{node.op}({to_string(node.child)})"
    p = _PREC[node.op]
    left, right = to_string(node.left), to_string(node.right)
    lp = _node_prec(node.left)
    rp = _node_prec(node.right)
    if node.op == "pow":
        if lp <= p:
            left = f"({left})"
        if rp < _PREC["neg"]:
            right = f"({right})"
    else:
        if lp < p:
            left = f"({left})"
        if rp <= p:
            right = f"({right})"
    return f"{left}{_SYM[node.op]}{right}"


def _node_prec(node) -> int:
    if isinstance(node, Binary):
        return _PREC[node.op]
    if isinstance(node, Unary) and node.op == "neg":
        return _PREC["neg"]
    return 5


# --------------------------------------------------------------------------
# compiled, vectorized evaluation


def _emit(node: ExprNode, code: list, consts: list) -> tuple[int, int]:
    """Append postfix code for ``node``; return (stack depth needed, stack effect)."""
    if isinstance(node, Const):
        code += [OP_CONST, len(consts)]
        consts.append(node.value)
        return 1, 1
    if isinstance(node, Var):
        code += [OP_X if node.name == "x" else OP_Y, 0]
        return 1, 1
    if isinstance(node, Unary):
        depth, _ = _emit(node.child, code, consts)
        code += [UNARY_OPS[node.op], 0]
        return depth, 1
    dl, _ = _emit(node.left, code, consts)
    dr, _ = _emit(node.right, code, consts)
    code += [BINARY_OPS[node.op], 0]
    return max(dl, dr + 1), 1


class CompiledExpr:
    """Vectorized evaluator for a parsed expression.

    Calling it with arrays (broadcast together) runs the postfix program on
    the selected backend and raises EvalDomainError at the first bad point.
    """

    def __init__(self, node: ExprNode):
        self.node = node
        code, consts = [], []
        self.depth, _ = _emit(node, code, consts)
        self.code = np.asarray(code, dtype=np.int64)
        self.consts = np.asarray(consts, dtype=np.float64)

    def __call__(self, x, y):
        xb, yb = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        xs = np.ascontiguousarray(xb.ravel())
        ys = np.ascontiguousarray(yb.ravel())
        if not self.consts.size:
            consts = np.zeros(1)
        else:
            consts = self.consts
        out, err, where = _backend.eval_program(self.code, consts, self.depth, xs, ys)
        if err:
            raise EvalDomainError(f"{ERROR_MESSAGES[err]} at (x={xs[where]!r}, y={ys[where]!r})")
        out = np.asarray(out)
        return out.reshape(xb.shape) if xb.shape else float(out[0])


def to_bivariate(
    text: str,
    supnorm: Optional[float] = None,
    provenance: Provenance = Provenance.USER_CERTIFIED,
) -> BivariateFn:
    """Build a vectorized integrand from expression text.

    The mixed partial is attached when the expression is differentiable;
    otherwise it is left out and callers fall back to finite differences.
    """
    node = parse(text)
    try:
        mixed = CompiledExpr(mixed_partial(node))
    except UnsupportedDerivative:
        mixed = None
    return BivariateFn(
        CompiledExpr(node),
        mixed,
        supnorm,
        Provenance(provenance),
        vectorized=True,
        name=text,
    )
