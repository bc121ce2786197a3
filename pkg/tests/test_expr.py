import math
import random

import numpy as np
import pytest

from chelyshkov_ide.benchmarks import BENCHMARKS
from chelyshkov_ide.expr import (
    BinOp, Call, Const, ExpressionSyntaxError, FUNCTIONS, Neg, Pi, UnknownIdentifier, Var, compile_expression,
    evaluate, free_variables, parse_expression, to_source,
)
from chelyshkov_ide.problem_file import SCOPES


def test_spec_examples():
    assert evaluate(parse_expression("x^(3/2)+x"), x=0.5) == 0.8535533905932737
    assert evaluate(parse_expression("sin(x+t)"), x=0.0, t=0.0) == 0.0
    assert evaluate(parse_expression("2*sqrt(x)/sqrt(pi)"), x=1.0) == pytest.approx(1.1283791670955126, abs=1e-16)


@pytest.mark.parametrize(
    "src, tree",
    [
        ("-x^2", Neg(BinOp("^", Var("x"), Const(2.0)))),
        ("2^-1", BinOp("^", Const(2.0), Neg(Const(1.0)))),
        ("2^3^2", BinOp("^", Const(2.0), BinOp("^", Const(3.0), Const(2.0)))),
        ("1-2-3", BinOp("-", BinOp("-", Const(1.0), Const(2.0)), Const(3.0))),
        ("8/4/2", BinOp("/", BinOp("/", Const(8.0), Const(4.0)), Const(2.0))),
        ("x + t*y", BinOp("+", Var("x"), BinOp("*", Var("t"), Var("y")))),
        ("-x*y", BinOp("*", Neg(Var("x")), Var("y"))),
        ("gamma(1/2)", Call("gamma", BinOp("/", Const(1.0), Const(2.0)))),
        ("x**2", BinOp("^", Var("x"), Const(2.0))),
        ("+pi", Pi()),
        ("1.5e-3", Const(1.5e-3)),
    ],
)
def test_precedence_and_associativity(src, tree):
    assert parse_expression(src) == tree


def test_values():
    assert evaluate(parse_expression("2^3^2")) == 512.0
    assert evaluate(parse_expression("-2^2")) == -4.0
    assert evaluate(parse_expression("gamma(1/2)^2")) == pytest.approx(math.pi, rel=1e-15)
    assert evaluate(parse_expression("ln(exp(abs(-3)))")) == pytest.approx(3.0, rel=1e-15)


def test_vectorised_evaluation():
    f = compile_expression(parse_expression("x*t"), ("x", "t"))
    out = f(np.array([[1.0], [2.0]]), np.array([1.0, 3.0]))
    np.testing.assert_array_equal(out, [[1.0, 3.0], [2.0, 6.0]])
    one = compile_expression(parse_expression("1"), ("x", "t"))
    assert one(np.zeros((2, 3)), 0.5).shape == (2, 3)
    assert one(0.1, 0.2) == 1.0


@pytest.mark.parametrize(
    "src, line, col",
    [("", 1, 1), ("x +", 1, 4), ("(x", 1, 3), ("x $ 2", 1, 3), ("2 3", 1, 3), ("x\n  * * 2", 2, 5)],
)
def test_syntax_errors_carry_position(src, line, col):
    with pytest.raises(ExpressionSyntaxError) as info:
        parse_expression(src)
    assert (info.value.line, info.value.column) == (line, col)


@pytest.mark.parametrize("src", ["z + 1", "foo(x)", "e"])
def test_unknown_identifiers(src):
    with pytest.raises(UnknownIdentifier):
        parse_expression(src)


def test_free_variables():
    assert free_variables(parse_expression("sin(x+t)*y^2 + pi")) == {"x", "t", "y"}


def _random_tree(rng, depth):
    if depth == 0 or rng.random() < 0.25:
        r = rng.random()
        if r < 0.4:
            return Var(rng.choice("xty"))
        if r < 0.5:
            return Pi()
        return Const(rng.choice([0.0, 1.0, 2.0, 3.5, 0.125, 1e-3, 12345.0, 2.5e20, rng.random()]))
    r = rng.random()
    if r < 0.15:
        return Neg(_random_tree(rng, depth - 1))
    if r < 0.3:
        return Call(rng.choice(sorted(FUNCTIONS)), _random_tree(rng, depth - 1))
    return BinOp(rng.choice("+-*/^"), _random_tree(rng, depth - 1), _random_tree(rng, depth - 1))


def test_round_trip_corpus():
    rng = random.Random(20240601)
    for _ in range(1000):
        tree = _random_tree(rng, 6)
        text = to_source(tree)
        again = parse_expression(text)
        assert again == tree, text
        assert to_source(again) == text
        # parse -> print -> parse on a spacing-perturbed variant
        messy = text.replace("(", " ( ").replace(")", " ) ").replace("*", " * ")
        assert parse_expression(to_source(parse_expression(messy))) == parse_expression(messy)


@pytest.mark.parametrize("eid", sorted(BENCHMARKS))
def test_benchmark_expressions_match_native(eid):
    e = BENCHMARKS[eid]
    rng = np.random.default_rng(eid)
    x = rng.random(100)
    t = rng.random(100)
    y = rng.uniform(-2, 2, 100)
    native = {"g": (e.g, (x,)), "k": (e.k, (x, t)), "f": (e.f, (t, y)), "f_y": (e.f_y, (t, y)), "exact": (e.exact, (x,))}
    for key, src in e.expressions.items():
        fn, args = native[key]
        parsed = compile_expression(parse_expression(src), SCOPES[key])
        a = np.broadcast_to(np.asarray(fn(*args), dtype=float), x.shape)
        b = parsed(*args)
        assert np.abs(a - b).max() <= 1e-15 * max(1.0, np.abs(a).max()), key
