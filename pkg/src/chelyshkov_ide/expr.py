"""A small arithmetic expression language for problem definitions.

Grammar (lowest to highest precedence)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | '+' unary | power
    power  := atom ('^' unary)?          # right-associative, binds tighter than unary minus
    atom   := number | name | name '(' expr ')' | '(' expr ')'

So ``-x^2`` is ``-(x^2)`` and ``2^-1`` is ``2^(-1)``.
"""
from dataclasses import dataclass
import math
import re

import numpy as np
from scipy import special

from .exceptions import ChelyshkovError

VARIABLES = frozenset({"x", "t", "y"})
CONSTANTS = {"pi": math.pi}
FUNCTIONS = {
    "sqrt": np.sqrt,
    "sin": np.sin,
    "cos": np.cos,
    "exp": np.exp,
    "ln": np.log,
    "abs": np.abs,
    "gamma": special.gamma,
}


class ExpressionSyntaxError(ChelyshkovError, SyntaxError):
    """Malformed expression; carries 1-based ``line`` and ``column``."""

    def __init__(self, message, line, column, source=""):
        super().__init__(f"{message} at line {line}, column {column}")
        self.line = line
        self.column = column
        self.source = source


class UnknownIdentifier(ExpressionSyntaxError):
    pass


@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Pi:
    pass


@dataclass(frozen=True)
class Neg:
    operand: object


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class Call:
    func: str
    arg: object


_TOKEN = re.compile(
    r"(?P<ws>[ \t\r\n]+)"
    r"|(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>\*\*|[-+*/^()])"
)


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    pos: int


def _tokenize(src):
    out = []
    i = 0
    while i < len(src):
        m = _TOKEN.match(src, i)
        if m is None:
            line, col = _line_col(src, i)
            raise ExpressionSyntaxError(f"unexpected character {src[i]!r}", line, col, src)
        if m.lastgroup != "ws":
            text = "^" if m.group() == "**" else m.group()
            out.append(_Tok(m.lastgroup, text, i))
        i = m.end()
    out.append(_Tok("end", "", len(src)))
    return out


def _line_col(src, pos):
    line = src.count("\n", 0, pos) + 1
    col = pos - (src.rfind("\n", 0, pos) + 1) + 1
    return line, col


class _Parser:
    def __init__(self, src):
        self.src = src
        self.toks = _tokenize(src)
        self.i = 0

    @property
    def cur(self):
        return self.toks[self.i]

    def fail(self, msg, tok=None, cls=ExpressionSyntaxError):
        tok = tok or self.cur
        line, col = _line_col(self.src, tok.pos)
        raise cls(msg, line, col, self.src)

    def take(self, text=None):
        tok = self.cur
        if text is not None and tok.text != text:
            self.fail(f"expected {text!r}, found {tok.text or 'end of input'!r}")
        self.i += 1
        return tok

    def parse(self):
        if self.cur.kind == "end":
            self.fail("empty expression")
        node = self.expr()
        if self.cur.kind != "end":
            self.fail(f"unexpected {self.cur.text!r}")
        return node

    def expr(self):
        node = self.term()
        while self.cur.text in ("+", "-"):
            op = self.take().text
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.cur.text in ("*", "/"):
            op = self.take().text
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        if self.cur.text == "-":
            self.take()
            return Neg(self.unary())
        if self.cur.text == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.cur.text == "^":
            self.take()
            return BinOp("^", base, self.unary())
        return base

    def atom(self):
        tok = self.cur
        if tok.kind == "num":
            self.take()
            return Const(float(tok.text))
        if tok.kind == "name":
            self.take()
            if self.cur.text == "(":
                if tok.text not in FUNCTIONS:
                    self.fail(f"unknown function {tok.text!r}", tok, UnknownIdentifier)
                self.take("(")
                arg = self.expr()
                self.take(")")
                return Call(tok.text, arg)
            if tok.text in VARIABLES:
                return Var(tok.text)
            if tok.text in CONSTANTS:
                return Pi()
            self.fail(f"unknown identifier {tok.text!r}", tok, UnknownIdentifier)
        if tok.text == "(":
            self.take()
            node = self.expr()
            self.take(")")
            return node
        self.fail(f"unexpected {tok.text or 'end of input'!r}")


def parse_expression(src):
    """Parse ``src`` into an expression tree.

    >>> evaluate(parse_expression("x^(3/2)+x"), x=0.5)
    0.8535533905932737
    """
    if not isinstance(src, str):
        raise TypeError("expression source must be text")
    return _Parser(src).parse()


_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "^": 4}


def _fmt_const(v):
    if v == int(v) and abs(v) < 1e16:
        return str(int(v))
    return repr(float(v))


def to_source(node):
    """Fully determined source text; parsing it gives back an equal tree."""
    return _show(node, 0)


def _show(node, ctx):
    # ctx is the minimum precedence this position accepts without parentheses
    if isinstance(node, Const):
        s, prec = _fmt_const(node.value), 5
    elif isinstance(node, Var):
        s, prec = node.name, 5
    elif isinstance(node, Pi):
        s, prec = "pi", 5
    elif isinstance(node, Call):
        s, prec = f"{node.func}({_show(node.arg, 0)})", 5
    elif isinstance(node, Neg):
        s, prec = "-" + _show(node.operand, 3), 3
    elif isinstance(node, BinOp):
        p = _PREC[node.op]
        if node.op == "^":
            # base must be an atom; exponent may be unary or another power
            s = f"{_show(node.left, 5)}^{_show(node.right, 3)}"
        else:
            sep = f" {node.op} " if p == 1 else node.op
            s = f"{_show(node.left, p)}{sep}{_show(node.right, p + 1)}"
        prec = p
    else:
        raise TypeError(f"not an expression node: {node!r}")
    return f"({s})" if prec < ctx else s


def free_variables(node):
    if isinstance(node, Var):
        return {node.name}
    if isinstance(node, (Const, Pi)):
        return set()
    if isinstance(node, Neg):
        return free_variables(node.operand)
    if isinstance(node, Call):
        return free_variables(node.arg)
    return free_variables(node.left) | free_variables(node.right)


def evaluate(node, **env):
    """Evaluate elementwise over numpy-broadcast variable values."""
    out = _eval(node, {k: np.asarray(v, dtype=float) for k, v in env.items()})
    out = np.asarray(out, dtype=float)
    return float(out) if out.ndim == 0 else out


def _eval(node, env):
    if isinstance(node, Const):
        return np.float64(node.value)
    if isinstance(node, Pi):
        return np.float64(math.pi)
    if isinstance(node, Var):
        try:
            return env[node.name]
        except KeyError:
            raise NameError(f"variable {node.name!r} has no value") from None
    if isinstance(node, Neg):
        return -_eval(node.operand, env)
    if isinstance(node, Call):
        return FUNCTIONS[node.func](_eval(node.arg, env))
    a = _eval(node.left, env)
    b = _eval(node.right, env)
    with np.errstate(divide="ignore", invalid="ignore"):
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if node.op == "/":
            return a / b
        return np.power(a, b)


def compile_expression(node, variables):
    """Turn a tree into a callable taking ``variables`` positionally.

    Results always broadcast to the shape of the arguments, so constants
    such as ``k = 1`` become arrays.
    """
    names = tuple(variables)

    def fn(*args):
        env = dict(zip(names, args))
        val = _eval(node, {k: np.asarray(v, dtype=float) for k, v in env.items()})
        shape = np.broadcast(*[np.asarray(a) for a in args]).shape if args else ()
        out = np.broadcast_to(np.asarray(val, dtype=float), shape)
        return float(out) if out.ndim == 0 else np.array(out)

    fn.__name__ = f"expr({to_source(node)})"
    return fn
