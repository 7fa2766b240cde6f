import random

import pytest

from invcnx import Expr, ParamSpace, format_field, parse_expr, parse_field
from invcnx.errors import ParseError
from invcnx.grammar import infer_space, split_field

from conftest import TRIALS, random_expr

S = ParamSpace()
A = ParamSpace(["alpha"], "alpha")


def test_round_trip_random():
    rng = random.Random(11)
    for _ in range(TRIALS):
        space = rng.choice((S, A, ParamSpace(["a", "b"]), ParamSpace([], 1)))
        e = random_expr(rng, space)
        assert parse_expr(str(e), space) == e


@pytest.mark.parametrize("text", ["-2/(x-y)", "x^2 - y^2", "exp(alpha*x)^-1 + alpha^2*y^3",
                                  "-2*x*(1+x^2+y^2)^-1", "(alpha^2+1)/(alpha-1)*y"])
def test_round_trip_examples(text):
    space = infer_space([text])
    e = parse_expr(text, space)
    assert parse_expr(str(e), space) == e


def test_printing_is_canonical():
    assert str(parse_expr("y + x")) == "x + y"
    assert str(parse_expr("-2/(x-y)")) == "-2*(x-y)^-1"
    assert str(parse_expr("(x+1)/(x-y)^2")) == "(x + 1)*(x-y)^-2"


def test_exp_rate_inference_and_multiples():
    space = infer_space(["exp(alpha*x)*y"])
    assert space.exp_rate == "alpha"
    assert parse_expr("exp(2*alpha*x)", space) == Expr.exp(space, 2)
    with pytest.raises(ParseError):
        parse_expr("exp(x/2)", ParamSpace([], 1))
    with pytest.raises(ParseError):
        parse_expr("exp(y)", ParamSpace([], 1))


@pytest.mark.parametrize("bad", ["x +", "(x", "x ** ", "2 $ x", "x^y", "1/x+"])
def test_parse_errors(bad):
    with pytest.raises(ParseError):
        parse_expr(bad, S)


def test_fields():
    f = parse_field("(x^2 - y^2) dx + (2*x*y) dy", S)
    assert parse_field(format_field(f), S) == f
    assert split_field("(y) dx") == ("y", "0")
    assert split_field("-(x) dy") == ("0", "-(x)")
    for bad in ["x dx", "(x) dz", "(x) dx (y) dy", "(x) dx + (y) dx"]:
        with pytest.raises(ParseError):
            split_field(bad)
