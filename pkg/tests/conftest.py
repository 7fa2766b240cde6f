import random
import sys
from fractions import Fraction

import pytest
import sympy as sp

from invcnx import Christoffel, Expr, ParamSpace, VectorField
from invcnx.geometry import INDICES

TRIALS = 500

SX, SY, SALPHA = sp.symbols("x y alpha")


def rand_q(rng, lo=-4, hi=4, den=3):
    return Fraction(rng.randint(lo, hi), rng.randint(1, den))


def random_expr(rng, space, terms=3, poles=True, laurent=True, exp=True):
    """A random element of the expression class built through the public arithmetic."""
    x, y = Expr.x(space), Expr.y(space)
    out = Expr.zero(space)
    for _ in range(rng.randint(1, terms)):
        lo = -2 if laurent else 0
        t = x ** rng.randint(lo, 2) * y ** rng.randint(lo, 2) * rand_q(rng)
        if poles and rng.random() < 0.3:
            t = t * (x - y) ** -rng.randint(1, 2)
        if poles and rng.random() < 0.15:
            t = t * (1 + x * x + y * y) ** -1
        if exp and space.exp_rate is not None and rng.random() < 0.4:
            t = t * Expr.exp(space, rng.choice((-1, 1, 2)))
        if space.params and rng.random() < 0.4:
            t = t * space.param(rng.choice(space.params))
        out = out + t
    return out


def random_poly(rng, space, degree=2, coeffs=(-3, 3)):
    x, y = Expr.x(space), Expr.y(space)
    out = Expr.zero(space)
    for a in range(degree + 1):
        for b in range(degree + 1 - a):
            out = out + x ** a * y ** b * rng.randint(*coeffs)
    return out


def random_field(rng, space, degree=2):
    return VectorField(random_poly(rng, space, degree), random_poly(rng, space, degree))


def random_christoffel(rng, space, degree=2):
    return Christoffel({idx: random_poly(rng, space, degree) for idx in INDICES})


def random_point(rng):
    """Rational point away from x = 0, y = 0 and x = y."""
    while True:
        p = (rand_q(rng, -5, 5, 4), rand_q(rng, -5, 5, 4))
        if p[0] and p[1] and p[0] != p[1]:
            return p


def to_sympy(e: Expr):
    """Independent reading of the printed form as a sympy expression."""
    text = str(e).replace("^", "**")
    return sp.sympify(text, locals={"x": SX, "y": SY, "alpha": SALPHA, "exp": sp.exp})


@pytest.fixture
def rng():
    return random.Random(20260416)


@pytest.fixture
def plain():
    return ParamSpace()


@pytest.fixture
def alpha_space():
    return ParamSpace(["alpha"], "alpha")


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
