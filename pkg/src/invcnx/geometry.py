"""Vector fields, connections in coordinates, and Lie derivatives on the plane.

Index convention: ``gamma[i][j][k]`` is the d_k-component of nabla_{d_i} d_j,
with indices 0, 1 standing for x, y.  Printed labels are one-based,
``G[1][2][1]`` being the d_x-component of nabla_{d_x} d_y.

Expanding the Leibniz rule

    (L_X nabla)(Y, Z) = [X, nabla_Y Z] - nabla_{[X,Y]} Z - nabla_Y [X, Z]

with Y = d_i, Z = d_j, nabla_{d_i} d_j = G_ij^k d_k and [X, d_i] = -(d_i X^l) d_l:

    [X, G_ij^k d_k]      = X(G_ij^k) d_k - G_ij^l (d_l X^k) d_k
    -nabla_{[X,d_i]} d_j = (d_i X^l) G_lj^k d_k
    -nabla_{d_i}[X, d_j] = d_i((d_j X^l) d_l) = (d_i d_j X^k + (d_j X^l) G_il^k) d_k

so that

    (L_X nabla)_ij^k = X^l d_l G_ij^k - G_ij^l d_l X^k + G_lj^k d_i X^l
                       + G_il^k d_j X^l + d_i d_j X^k.

The tensor Lie derivative of an End(TM)-valued 1-form is the same expression
without the second-derivative term.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from itertools import product

from .errors import ClosureError, EvalSingular, JetSingular, OracleSingular, ParamSpaceError, ParseError
from .expr import Expr
from .scalars import ParamScalar, ParamSpace

VARS = ("x", "y")
INDICES = tuple(product((0, 1), repeat=3))


def common_space(*spaces: ParamSpace) -> ParamSpace:
    result = spaces[0]
    for s in spaces[1:]:
        if s != result:
            result = result.union(s)
    return result


@dataclass(frozen=True)
class VectorField:
    comp_x: Expr
    comp_y: Expr

    def __post_init__(self):
        if self.comp_x.space != self.comp_y.space:
            space = common_space(self.comp_x.space, self.comp_y.space)
            object.__setattr__(self, "comp_x", self.comp_x.lift(space))
            object.__setattr__(self, "comp_y", self.comp_y.lift(space))

    @classmethod
    def zero(cls, space):
        return cls(Expr.zero(space), Expr.zero(space))

    @property
    def space(self) -> ParamSpace:
        return self.comp_x.space

    @property
    def comps(self) -> tuple[Expr, Expr]:
        return (self.comp_x, self.comp_y)

    def __getitem__(self, k):
        return self.comps[k]

    def __add__(self, other: VectorField):
        return VectorField(self.comp_x + other.comp_x, self.comp_y + other.comp_y)

    def __sub__(self, other: VectorField):
        return VectorField(self.comp_x - other.comp_x, self.comp_y - other.comp_y)

    def __neg__(self):
        return VectorField(-self.comp_x, -self.comp_y)

    def scale(self, c) -> VectorField:
        return VectorField(self.comp_x * c, self.comp_y * c)

    def is_zero(self) -> bool:
        return self.comp_x.is_zero() and self.comp_y.is_zero()

    def lift(self, space) -> VectorField:
        return VectorField(self.comp_x.lift(space), self.comp_y.lift(space))

    def subs(self, bindings) -> VectorField:
        return VectorField(self.comp_x.subs(bindings), self.comp_y.subs(bindings))

    def apply(self, f: Expr) -> Expr:
        """Directional derivative X(f)."""
        return self.comp_x * f.diff("x") + self.comp_y * f.diff("y")

    def jacobian(self) -> list[list[Expr]]:
        """``J[k][l] = d_l X^k``."""
        return [[c.diff(v) for v in VARS] for c in self.comps]

    def value_at(self, point) -> tuple[ParamScalar, ParamScalar]:
        return (self.comp_x.value_at(point), self.comp_y.value_at(point))

    def __str__(self):
        from .grammar import format_field
        return format_field(self)


def lie_bracket(X: VectorField, Y: VectorField) -> VectorField:
    """[X, Y]^k = X(Y^k) - Y(X^k)."""
    space = common_space(X.space, Y.space)
    X, Y = X.lift(space), Y.lift(space)
    return VectorField(*(X.apply(Y[k]) - Y.apply(X[k]) for k in (0, 1)))


class Tensor12:
    """Eight expressions indexed ``[i][j][k]`` in the convention of the module docstring."""

    __slots__ = ("t",)

    def __init__(self, entries):
        if isinstance(entries, dict):
            t = [[[entries[(i, j, k)] for k in (0, 1)] for j in (0, 1)] for i in (0, 1)]
        else:
            t = [[[entries[i][j][k] for k in (0, 1)] for j in (0, 1)] for i in (0, 1)]
        spaces = [t[i][j][k].space for i, j, k in INDICES]
        space = common_space(*spaces)
        self.t = tuple(tuple(tuple(t[i][j][k].lift(space) for k in (0, 1)) for j in (0, 1)) for i in (0, 1))

    @classmethod
    def zero(cls, space):
        return cls({idx: Expr.zero(space) for idx in INDICES})

    @property
    def space(self) -> ParamSpace:
        return self.t[0][0][0].space

    def __getitem__(self, i):
        return self.t[i]

    def entry(self, idx) -> Expr:
        i, j, k = idx
        return self.t[i][j][k]

    def items(self):
        for idx in INDICES:
            yield idx, self.entry(idx)

    def map(self, fn):
        return type(self)({idx: fn(e) for idx, e in self.items()})

    def is_zero(self) -> bool:
        return all(e.is_zero() for _, e in self.items())

    def lift(self, space):
        return self.map(lambda e: e.lift(space))

    def subs(self, bindings):
        return self.map(lambda e: e.subs(bindings))

    def scale(self, c):
        return self.map(lambda e: e * c)

    def nonzero(self) -> dict:
        return {idx: e for idx, e in self.items() if not e.is_zero()}

    def __eq__(self, other):
        return type(self) is type(other) and all(self.entry(i) == other.entry(i) for i in INDICES)

    def __hash__(self):
        return hash(tuple(self.entry(i) for i in INDICES))

    def as_strings(self) -> dict[str, str]:
        return {label(idx): str(e) for idx, e in self.items()}

    def __repr__(self):
        body = ", ".join(f"{k}={v}" for k, v in self.as_strings().items())
        return f"{type(self).__name__}({body})"


def label(idx) -> str:
    i, j, k = idx
    return f"G[{i + 1}][{j + 1}][{k + 1}]"


_LABEL = re.compile(r"\s*G\[([12])\]\[([12])\]\[([12])\]\s*")


def parse_label(text: str) -> tuple[int, int, int]:
    m = _LABEL.fullmatch(text)
    if not m:
        raise ParseError(f"bad component label {text!r}; expected G[i][j][k] with i, j, k in 1..2")
    return tuple(int(v) - 1 for v in m.groups())


def _binary(a: Tensor12, b: Tensor12, op, cls):
    space = common_space(a.space, b.space)
    return cls({idx: op(a.entry(idx).lift(space), b.entry(idx).lift(space)) for idx in INDICES})


class EndValuedOneForm(Tensor12):
    """A (1,2)-tensor; the difference of two connections."""

    def __add__(self, other):
        if isinstance(other, Christoffel):
            return _binary(self, other, lambda u, v: u + v, Christoffel)
        return _binary(self, other, lambda u, v: u + v, EndValuedOneForm)

    def __sub__(self, other):
        return _binary(self, other, lambda u, v: u - v, EndValuedOneForm)

    def __neg__(self):
        return self.map(lambda e: -e)


class Christoffel(Tensor12):
    """Coordinate symbols of an affine connection."""

    def __sub__(self, other):
        if isinstance(other, Christoffel):
            return _binary(self, other, lambda u, v: u - v, EndValuedOneForm)
        return _binary(self, other, lambda u, v: u - v, Christoffel)

    def __add__(self, other):
        if isinstance(other, Christoffel):
            raise TypeError("the sum of two connections is not a connection")
        return _binary(self, other, lambda u, v: u + v, Christoffel)


def _lie_linear(X: VectorField, T: Tensor12, with_hessian: bool) -> EndValuedOneForm:
    space = common_space(X.space, T.space)
    X, T = X.lift(space), T.lift(space)
    J = X.jacobian()
    out = {}
    for i, j, k in INDICES:
        e = X.apply(T[i][j][k])
        for l in (0, 1):
            e = e - T[i][j][l] * J[k][l] + T[l][j][k] * J[l][i] + T[i][l][k] * J[l][j]
        if with_hessian:
            e = e + J[k][j].diff(VARS[i])
        out[(i, j, k)] = e
    return EndValuedOneForm(out)


def lie_derivative_connection(X: VectorField, gamma: Christoffel) -> EndValuedOneForm:
    """Coordinate Lie derivative of a connection (see the module docstring)."""
    return _lie_linear(X, gamma, True)


def lie_derivative_tensor(X: VectorField, T: Tensor12) -> EndValuedOneForm:
    """Lie derivative of a (1,2)-tensor."""
    return _lie_linear(X, T, False)


@dataclass(frozen=True)
class LieAlgebraAction:
    generators: tuple[VectorField, ...]
    params: tuple[str, ...] = ()
    constraints: tuple[str, ...] = ()
    labels: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        gens = tuple(self.generators)
        if gens:
            space = common_space(*(g.space for g in gens))
            gens = tuple(g.lift(space) for g in gens)
        object.__setattr__(self, "generators", gens)
        if not self.labels:
            object.__setattr__(self, "labels", tuple(str(g) for g in gens))

    @property
    def space(self) -> ParamSpace:
        return self.generators[0].space

    def __len__(self):
        return len(self.generators)

    def structure_constants(self):
        """``c[i][j]`` with [A_i, A_j] = sum_k c[i][j][k] A_k, exact over Q(params).

        Raises ClosureError if some bracket leaves the span.
        """
        from .linalg import express_in_span

        n = len(self.generators)
        c = [[None] * n for _ in range(n)]
        for i in range(n):
            c[i][i] = [self.space.zero] * n
            for j in range(i + 1, n):
                br = lie_bracket(self.generators[i], self.generators[j])
                coeffs = express_in_span(self.generators, br)
                if coeffs is None:
                    raise ClosureError(f"[A{i + 1}, A{j + 1}] = {br} is not in the span of the generators")
                c[i][j] = coeffs
                c[j][i] = [-v for v in coeffs]
        return c


@dataclass
class InvarianceReport:
    ok: bool
    residuals: list  # (generator index, generator label, {label: expr string})

    def __bool__(self):
        return self.ok


def verify_invariance(g: LieAlgebraAction, gamma: Christoffel) -> InvarianceReport:
    residuals = []
    for n, A in enumerate(g.generators):
        res = lie_derivative_connection(A, gamma).nonzero()
        if res:
            residuals.append((n, g.labels[n], {label(idx): str(e) for idx, e in res.items()}))
    return InvarianceReport(not residuals, residuals)


@dataclass(frozen=True)
class Jet2:
    """Value, jacobian ``J[k][l] = d_l X^k`` and hessians ``H[k][i][j] = d_i d_j X^k`` at a point."""

    point: tuple
    value: tuple
    jacobian: tuple
    hessians: tuple


def jet2_at(X: VectorField, point) -> Jet2:
    try:
        J = X.jacobian()
        value = tuple(c.value_at(point) for c in X.comps)
        jac = tuple(tuple(J[k][l].value_at(point) for l in (0, 1)) for k in (0, 1))
        hess = tuple(tuple(tuple(J[k][j].diff(VARS[i]).value_at(point) for j in (0, 1)) for i in (0, 1))
                     for k in (0, 1))
    except (EvalSingular, ClosureError) as exc:
        raise JetSingular(f"{X} has no exact 2-jet at {point}: {exc}") from exc
    return Jet2(tuple(point), value, jac, hess)


# --- numeric flow oracle -----------------------------------------------------
#
# Test-only cross-check of the coordinate formula.  The flow sigma_t of X is
# integrated together with A = D sigma_t and B^k_ij = d_i d_j sigma_t^k; the
# pulled-back connection at p is
#
#     (sigma_t^* G)^k_ij(p) = (A^-1)^k_m [G^m_ab(sigma_t p) A^a_i A^b_j + B^m_ij]
#
# and its t-derivative at 0 is (L_X nabla)(p).

def _compile_all(exprs, params):
    try:
        return [e.compile(params) for e in exprs]
    except (ParamSpaceError, KeyError) as exc:
        raise OracleSingular(f"cannot evaluate numerically: {exc}") from exc


class _FlowField:
    """Right-hand side of the flow with its first and second variations.

    State layout: point (2), A[k][i] at 2 + 2k + i, B[k][i][j] at 6 + 4k + 2i + j.
    """

    def __init__(self, X: VectorField, params):
        J = X.jacobian()
        self.value = _compile_all(X.comps, params)
        self.jac = [_compile_all(row, params) for row in J]
        self.hess = [[_compile_all([J[k][j].diff(VARS[i]) for j in (0, 1)], params) for i in (0, 1)]
                     for k in (0, 1)]

    def __call__(self, s):
        x, y = s[0], s[1]
        J = [[f(x, y) for f in row] for row in self.jac]
        H = [[[f(x, y) for f in row] for row in block] for block in self.hess]
        A = [[s[2 + 2 * k + i] for i in (0, 1)] for k in (0, 1)]
        out = [f(x, y) for f in self.value]
        out += [J[k][0] * A[0][i] + J[k][1] * A[1][i] for k in (0, 1) for i in (0, 1)]
        out += [sum(J[k][l] * s[6 + 4 * l + 2 * i + j] for l in (0, 1))
                + sum(H[k][l][m] * A[l][i] * A[m][j] for l in (0, 1) for m in (0, 1))
                for k in (0, 1) for i in (0, 1) for j in (0, 1)]
        return out


def _rk4(f, s, t: float, step: float):
    n = max(1, math.ceil(abs(t) / step - 1e-12))
    h = t / n
    for _ in range(n):
        k1 = f(s)
        k2 = f([a + h / 2 * b for a, b in zip(s, k1)])
        k3 = f([a + h / 2 * b for a, b in zip(s, k2)])
        k4 = f([a + h * b for a, b in zip(s, k3)])
        s = [a + h / 6 * (b1 + 2 * b2 + 2 * b3 + b4) for a, b1, b2, b3, b4 in zip(s, k1, k2, k3, k4)]
    return s


def _pulled_back(gamma_f, s):
    x, y = s[0], s[1]
    A = [[s[2 + 2 * k + i] for i in (0, 1)] for k in (0, 1)]
    det = A[0][0] * A[1][1] - A[0][1] * A[1][0]
    if det == 0:
        raise OracleSingular("degenerate flow jacobian")
    inv = [[A[1][1] / det, -A[0][1] / det], [-A[1][0] / det, A[0][0] / det]]
    G = {idx: f(x, y) for idx, f in gamma_f.items()}
    out = {}
    for i, j, k in INDICES:
        out[(i, j, k)] = sum(
            inv[k][m] * (sum(G[(a, b, m)] * A[a][i] * A[b][j] for a in (0, 1) for b in (0, 1))
                         + s[6 + 4 * m + 2 * i + j])
            for m in (0, 1))
    return out


def numeric_flow_oracle(X: VectorField, gamma: Christoffel, p, t_step: float = 1e-3,
                        h: float = 1e-4, params=None) -> list[float]:
    """Finite-difference approximation of (L_X nabla)(p), in ``INDICES`` order.

    Every parameter of ``X`` and ``gamma`` must be bound through ``params``.
    """
    start = [float(p[0]), float(p[1]), 1.0, 0.0, 0.0, 1.0] + [0.0] * 8
    field_ = _FlowField(X, params)
    gamma_f = {idx: f for idx, f in zip(INDICES, _compile_all([gamma.entry(i) for i in INDICES], params))}
    try:
        at = {n: _pulled_back(gamma_f, _rk4(field_, start, n * h, t_step)) for n in (-2, -1, 1, 2)}
    except (ZeroDivisionError, OverflowError, ValueError) as exc:
        raise OracleSingular(f"flow evaluation failed near {p}: {exc}") from exc
    # five-point central stencil
    return [(8 * (at[1][idx] - at[-1][idx]) - (at[2][idx] - at[-2][idx])) / (12 * h) for idx in INDICES]
