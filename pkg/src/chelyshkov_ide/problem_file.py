"""Problem definitions stored as flat ``key = expression`` text files.

Example::

    # D^(1/2) y = g(x) + int_0^1 k(x,t) f(t, y(t)) dt
    alpha = 1/2
    c = 0
    g = sqrt(pi)/2 - 1/4
    k = 1
    f = y^2/2
    f_y = y
    exact = sqrt(x)
"""
from dataclasses import dataclass
from pathlib import Path

from ._validation import check_exponent, check_order
from .exceptions import ChelyshkovError, DomainError
from .expr import ExpressionSyntaxError, compile_expression, evaluate, free_variables, parse_expression
from .solver import ProblemSpec

#: variables each field may reference
SCOPES = {
    "alpha": (),
    "c": (),
    "nu": (),
    "g": ("x",),
    "k": ("x", "t"),
    "f": ("t", "y"),
    "f_y": ("t", "y"),
    "exact": ("x",),
}
REQUIRED = ("alpha", "c", "g", "k", "f")


class ParseError(ChelyshkovError, ValueError):
    def __init__(self, message, line=None, column=None):
        where = f"line {line}" + (f", column {column}" if column else "") if line else ""
        super().__init__(f"{where}: {message}" if where else message)
        self.line = line
        self.column = column


class MissingField(ChelyshkovError, KeyError):
    def __str__(self):
        return self.args[0]


class VariableScopeViolation(ChelyshkovError, ValueError):
    pass


@dataclass
class LoadedProblem:
    problem: ProblemSpec
    nu: float = None
    sources: dict = None


def parse_problem_text(text, name=""):
    """Parse problem-file text into a :class:`LoadedProblem`."""
    trees = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError("expected 'key = expression'", lineno)
        key, src = (s.strip() for s in line.split("=", 1))
        if key not in SCOPES:
            raise ParseError(f"unknown key {key!r}; allowed: {', '.join(SCOPES)}", lineno)
        if key in trees:
            raise ParseError(f"duplicate key {key!r}", lineno)
        offset = raw.index(src) if src else 0
        try:
            tree = parse_expression(src)
        except ExpressionSyntaxError as exc:
            raise ParseError(str(exc).rsplit(" at line", 1)[0], lineno, offset + exc.column) from exc
        bad = free_variables(tree) - set(SCOPES[key])
        if bad:
            allowed = ", ".join(SCOPES[key]) or "no variables"
            raise VariableScopeViolation(
                f"line {lineno}: {key} may use {allowed} but references {', '.join(sorted(bad))}"
            )
        trees[key] = (tree, src)
    for key in REQUIRED:
        if key not in trees:
            raise MissingField(f"required field {key!r} is missing")

    def number(key):
        return float(evaluate(trees[key][0]))

    try:
        alpha = check_order(number("alpha"))
        nu = check_exponent(number("nu")) if "nu" in trees else None
    except DomainError as exc:
        raise DomainError(f"out of range: {exc}") from exc
    c = number("c")

    def fn(key):
        return compile_expression(trees[key][0], SCOPES[key]) if key in trees else None

    problem = ProblemSpec(
        alpha=alpha, c=c, g=fn("g"), k=fn("k"), f=fn("f"), f_y=fn("f_y"),
        exact=fn("exact"), name=name,
    )
    return LoadedProblem(problem=problem, nu=nu, sources={k: v[1] for k, v in trees.items()})


def load_problem(path):
    """Read and validate a problem file.

    Raises
    ------
    ParseError, MissingField, VariableScopeViolation, DomainError
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError(f"{path} is not UTF-8 text") from exc
    return parse_problem_text(text, name=path.stem)
