"""Fiberwise fixed points: invariant connections as isotropy-fixed values at one point.

For a transitive action an invariant connection is determined by its value
at a point p, and that value must be fixed by the affine action of the
isotropy algebra g_p on the 8-dimensional fiber.  For X in g_p the term
X^l d_l G of the Lie derivative vanishes at p because X(p) = 0, so the
fixed-point equations are exact conditions on the value G(p) alone:

    -G^l_ij J^k_l + G^k_lj J^l_i + G^k_il J^l_j + H^k_ij = 0.

As a cross-check the module also solves the order-zero invariance equations
for every generator with the 1-jet (G(p), dG(p)) as unknowns.  Transitivity
makes the derivative part uniquely determined, so both systems have the
same dimension; a disagreement would point at a bug in either.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ClosureError, EvalSingular, NotTransitive
from .geometry import INDICES, Jet2, LieAlgebraAction, VectorField, jet2_at, label
from .linalg import RHS, clear_denominators, eliminate, nullspace, rank
from .scalars import ParamScalar, ParamSpace


def _values(g: LieAlgebraAction, p) -> list[tuple[ParamScalar, ParamScalar]]:
    try:
        return [A.value_at(p) for A in g.generators]
    except ClosureError as exc:
        raise EvalSingular(f"no exact generator value at {p}: {exc}") from exc


def is_transitive_at(g: LieAlgebraAction, p) -> bool:
    """Whether the generator values at ``p`` span the tangent plane (generic rank over Q(params))."""
    vals = _values(g, p)
    return rank([[v[0] for v in vals], [v[1] for v in vals]], g.space) == 2


def _isotropy_coefficients(g: LieAlgebraAction, p) -> list[list[ParamScalar]]:
    vals = _values(g, p)
    matrix = [[v[0] for v in vals], [v[1] for v in vals]]
    return nullspace(matrix, len(vals), g.space)


def _combine(g: LieAlgebraAction, coeffs) -> VectorField:
    out = VectorField.zero(g.space)
    for c, A in zip(coeffs, g.generators):
        if c:
            out = out + A.scale(c)
    return out


def isotropy_basis(g: LieAlgebraAction, p) -> list[VectorField]:
    """Combinations of the generators vanishing at ``p``, one per nullspace vector."""
    return [_combine(g, c) for c in _isotropy_coefficients(g, p)]


@dataclass(frozen=True)
class FiberPoint:
    """Exact values G^k_ij(p), keyed by ``(i, j, k)``."""

    values: tuple

    @classmethod
    def from_vector(cls, vec) -> FiberPoint:
        return cls(tuple(vec[:8]))

    def __getitem__(self, idx):
        return self.values[INDICES.index(idx)]

    def as_strings(self) -> dict[str, str]:
        return {label(idx): str(v) for idx, v in zip(INDICES, self.values)}


@dataclass
class IsotropyAction:
    """Affine maps G -> M G + t on the fiber, one per isotropy generator."""

    point: tuple
    generators: list
    jets: list
    matrices: list = field(default_factory=list)
    translations: list = field(default_factory=list)


def _combined_jet(jets: list[Jet2], coeffs, space: ParamSpace) -> Jet2:
    zero = space.zero

    def mix(get):
        total = zero
        for c, jet in zip(coeffs, jets):
            if c:
                total = total + c * get(jet)
        return total

    value = tuple(mix(lambda j, k=k: j.value[k]) for k in (0, 1))
    jac = tuple(tuple(mix(lambda j, k=k, l=l: j.jacobian[k][l]) for l in (0, 1)) for k in (0, 1))
    hess = tuple(tuple(tuple(mix(lambda j, k=k, a=a, b=b: j.hessians[k][a][b]) for b in (0, 1))
                       for a in (0, 1)) for k in (0, 1))
    return Jet2(jets[0].point, value, jac, hess)


def _linear_rows(jet: Jet2, space: ParamSpace):
    """``(M, t)`` with (L_X G)(p) = M G(p) + t for a field vanishing at p."""
    J, H = jet.jacobian, jet.hessians
    M = []
    t = []
    for i, j, k in INDICES:
        row = [space.zero] * 8
        for l in (0, 1):
            row[INDICES.index((i, j, l))] -= J[k][l]
            row[INDICES.index((l, j, k))] += J[l][i]
            row[INDICES.index((i, l, k))] += J[l][j]
        M.append(row)
        t.append(H[k][i][j])
    return M, t


def isotropy_action(g: LieAlgebraAction, p) -> IsotropyAction:
    space = g.space
    jets = [jet2_at(A, p) for A in g.generators]
    coeffs = _isotropy_coefficients(g, p)
    action = IsotropyAction(tuple(p), [_combine(g, c) for c in coeffs], [])
    for c in coeffs:
        jet = _combined_jet(jets, c, space)
        action.jets.append(jet)
        M, t = _linear_rows(jet, space)
        action.matrices.append(M)
        action.translations.append(t)
    return action


@dataclass
class FiberSpace:
    status: str                       # "empty" | "nonempty"
    dimension: int
    point: tuple
    particular: FiberPoint | None = None
    basis: list = field(default_factory=list)
    isotropy: list = field(default_factory=list)
    jet_dimension: int | None = None
    linear_dimension: int | None = None
    certificate: str | None = None

    @property
    def empty(self) -> bool:
        return self.status == "empty"

    @property
    def consistent_with_jets(self) -> bool:
        return self.jet_dimension == (None if self.empty else self.dimension)


def _solve(rows, labels, ncols, space):
    rows = [clear_denominators(space, {c: v for c, v in r.items() if v}) for r in rows]
    return eliminate(rows, ncols, space, labels)


def _affine_rows(action: IsotropyAction, homogeneous=False):
    rows, labels = [], []
    for n, (M, t) in enumerate(zip(action.matrices, action.translations)):
        for r, idx in enumerate(INDICES):
            row = {c: v for c, v in enumerate(M[r]) if v}
            if t[r] and not homogeneous:
                row[RHS] = -t[r]
            rows.append(row)
            labels.append((n, idx))
    return rows, labels


def _jet_system(g: LieAlgebraAction, p):
    """Order-zero invariance rows with unknowns G(p) (cols 0..7) and d_l G(p) (cols 8 + 8l + n)."""
    space = g.space
    rows = []
    for A in g.generators:
        jet = jet2_at(A, p)
        M, t = _linear_rows(jet, space)
        for r in range(8):
            row = {c: v for c, v in enumerate(M[r]) if v}
            for l in (0, 1):
                if jet.value[l]:
                    row[8 + 8 * l + r] = jet.value[l]
            if t[r]:
                row[RHS] = -t[r]
            rows.append(row)
    return rows


def fiber_fixed_space(g: LieAlgebraAction, p) -> FiberSpace:
    """Affine space of isotropy-fixed connection values at ``p``."""
    if not is_transitive_at(g, p):
        raise NotTransitive(f"the action is not transitive at {tuple(str(c) for c in p)}")
    space = g.space
    action = isotropy_action(g, p)
    rows, labels = _affine_rows(action)
    result = _solve(rows, labels, 8, space)

    jet = _solve(_jet_system(g, p), None, 24, space)
    jet_dim = len(jet.basis) if jet.consistent else None
    lin = _solve(*_affine_rows(action, homogeneous=True), 8, space)
    iso = [str(X) for X in action.generators]
    point = tuple(p)
    if not result.consistent:
        (n, idx), value = result.certificate
        cert = f"isotropy generator {n + 1}, component {label(idx)}: 0 = {value}"
        return FiberSpace("empty", 0, point, isotropy=iso, jet_dimension=jet_dim,
                          linear_dimension=len(lin.basis), certificate=cert)
    return FiberSpace("nonempty", len(result.basis), point,
                      FiberPoint.from_vector(result.particular),
                      [FiberPoint.from_vector(v) for v in result.basis], iso, jet_dim, len(lin.basis))


def fiber_contains(g: LieAlgebraAction, p, values, homogeneous: bool = False) -> bool:
    """Exact membership of a fiber value (8 scalars in ``INDICES`` order) in the fixed space.

    With ``homogeneous`` the test is against the linear part, as for the value
    of an invariant (1,2)-tensor.
    """
    action = isotropy_action(g, p)
    for M, t in zip(action.matrices, action.translations):
        for r in range(8):
            total = sum((M[r][c] * values[c] for c in range(8) if M[r][c]), g.space.zero)
            if not homogeneous:
                total = total + t[r]
            if total:
                return False
    return True
