from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from invcnx import ParamSpace
from invcnx.errors import ParamSingular, ParamSpaceError
from invcnx.scalars import parse_rational

SPACE = ParamSpace(["a", "b"])
SA, SB = sp.symbols("a b")

small = st.fractions(min_value=-5, max_value=5, max_denominator=4)


@st.composite
def poly_pair(draw):
    """(ParamScalar, sympy expression) built by the same random recipe."""
    ours, ref = SPACE.zero, sp.Integer(0)
    for _ in range(draw(st.integers(1, 3))):
        c = draw(small)
        i, j = draw(st.integers(0, 2)), draw(st.integers(0, 2))
        ours = ours + SPACE.param("a") ** i * SPACE.param("b") ** j * c
        ref = ref + sp.Rational(c.numerator, c.denominator) * SA ** i * SB ** j
    return ours, ref


def same(ours, ref):
    return sp.simplify(sp.sympify(str(ours).replace("^", "**"), locals={"a": SA, "b": SB}) - ref) == 0


@settings(max_examples=150, deadline=None)
@given(poly_pair(), poly_pair(), poly_pair())
def test_field_operations_match_sympy(p, q, r):
    (x, X), (y, Y), (z, Z) = p, q, r
    assert same(x + y * z, X + Y * Z)
    assert same(x - y, X - Y)
    if Y != 0:
        assert same(x / y, sp.cancel(X / Y))
        assert same((x / y) * y, X)


@settings(max_examples=150, deadline=None)
@given(poly_pair(), poly_pair(), small, small)
def test_evaluate_matches_sympy(p, q, va, vb):
    (x, X), (y, Y) = p, q
    val_y = Y.subs({SA: va, SB: vb})
    if val_y == 0:
        return
    got = (x / y).evaluate({"a": va, "b": vb})
    want = sp.Rational(X.subs({SA: va, SB: vb})) / val_y
    assert got == Fraction(int(want.p), int(want.q))


def test_canonical_equality():
    a, b = SPACE.param("a"), SPACE.param("b")
    assert (a * a - b * b) / (a - b) == a + b
    assert (a / (2 * a)) == Fraction(1, 2)
    assert hash((a * a - b * b) / (a - b)) == hash(a + b)
    assert -(a / b) == (-a) / b == a / (-b)


def test_param_singular():
    a = SPACE.param("a")
    with pytest.raises(ParamSingular):
        (1 / a).evaluate({"a": 0, "b": 1})


def test_space_errors():
    with pytest.raises(ParamSpaceError):
        ParamSpace(["x"])
    with pytest.raises(ParamSpaceError):
        ParamSpace(["a", "a"])
    with pytest.raises(ParamSpaceError):
        SPACE.param("c")
    with pytest.raises(ParamSpaceError):
        SPACE.param("a") + ParamSpace(["c"]).param("c")


def test_subs_and_bind():
    a, b = SPACE.param("a"), SPACE.param("b")
    target = SPACE.bind({"a": 2})
    assert target.params == ("b",)
    assert ((a + b) / a).subs({"a": Fraction(2)}, target) == (2 + target.param("b")) / 2


def test_parse_rational():
    assert parse_rational("-3/4") == Fraction(-3, 4)
    assert parse_rational(" 5 ") == 5
