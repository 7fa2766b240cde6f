"""Invariant connections as solutions of an affine linear system.

The unknown Christoffel symbols are written as combinations of finitely many
basis functions (the ansatz).  Since the Lie derivative of a connection is
affine in the connection, each unknown contributes a fixed expression to every
component of every L_A(nabla); collecting the coefficients of the numerator
monomials yields an affine system over Q(params), solved exactly.

Ansatz rules.  If d_x lies in the algebra the symbols do not depend on x, and
likewise for d_y; with both, they are constants.  With only d_x they are
Laurent polynomials in y, with only d_y Laurent polynomials in x (times powers
of exp(rate*x) when the generators involve it), and with neither they are
polynomials in x, y over powers of a pole atom (x - y or 1 + x^2 + y^2).
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache

from sympy import factor_list
from sympy.polys.matrices import DomainMatrix

from .errors import (ClosureError, ParamDegenerate, ParamSpaceError,
                     ProfileUnsupported)
from .expr import Expr, Monomial
from .geometry import (INDICES, Christoffel, EndValuedOneForm, LieAlgebraAction, VectorField,
                       label, parse_label, verify_invariance)
from .linalg import (RHS, Elimination, clear_denominators, eliminate, express_in_span,
                     independent_subset, rows_from_exprs)
from .scalars import ParamScalar, ParamSpace

DEFAULT_WINDOW = 4


@dataclass(frozen=True)
class AnsatzProfile:
    """Which basis functions the ansatz may use.

    ``window`` is the Laurent half-width k (powers -k..k).  For the pole
    ansatz, ``pole`` names the atom; x - y uses numerator degree ``degree``
    (default 2) and pole orders 0..k, the sphere atom uses numerator degree
    k // 2 and pole orders 0..1.  ``exp_window`` bounds the powers of
    exp(rate*x).
    """

    window: int = DEFAULT_WINDOW
    pole: str = "x-y"
    degree: int | None = None
    pole_order: int | None = None
    exp_window: int = 1
    atoms: frozenset = frozenset({"x", "y", "x-y", "1+x^2+y^2", "exp"})

    def with_window(self, k: int) -> AnsatzProfile:
        return replace(self, window=k)


@dataclass(frozen=True)
class Ansatz:
    kind: str                      # constant | laurent_y | laurent_x | poles
    space: ParamSpace
    functions: tuple               # basis Expr, shared by all eight entries
    unknowns: tuple                # names, entry-major
    entries: tuple                 # per unknown: (index, function number)
    description: str

    def __len__(self):
        return len(self.unknowns)

    @property
    def template(self) -> Christoffel:
        """The ansatz as a Christoffel tensor whose coefficients are the unknowns."""
        space = self.space.with_params(self.unknowns)
        out = {idx: Expr.zero(space) for idx in INDICES}
        for name, (idx, f) in zip(self.unknowns, self.entries):
            out[idx] = out[idx] + self.functions[f].lift(space) * space.param(name)
        return Christoffel(out)

    def combine(self, values, cls=Christoffel):
        out = {idx: Expr.zero(self.space) for idx in INDICES}
        for v, (idx, f) in zip(values, self.entries):
            if v:
                out[idx] = out[idx] + self.functions[f] * v
        return cls(out)


def _mono_name(mono) -> str:
    parts = []
    for atom, e in zip(("x", "y", "xmy", "sph", "E"), mono):
        if e:
            parts.append(f"{atom}{e}" if e > 0 else f"{atom}m{-e}")
    return "_".join(parts) or "1"


def has_translation(g: LieAlgebraAction, var: str) -> bool:
    space = g.space
    one, zero = Expr.const(space, 1), Expr.zero(space)
    target = VectorField(one, zero) if var == "x" else VectorField(zero, one)
    return express_in_span(g.generators, target) is not None


def build_ansatz(g: LieAlgebraAction, profile: AnsatzProfile | None = None) -> Ansatz:
    profile = profile or AnsatzProfile()
    space = g.space
    used = set()
    for A in g.generators:
        for c in A.comps:
            if c.has_exp():
                used.add("exp")
            used.update(a for a in c.negative_atoms())
    if not used <= profile.atoms:
        raise ProfileUnsupported(f"generators use {sorted(used - profile.atoms)} outside the profile")
    tx, ty = has_translation(g, "x"), has_translation(g, "y")
    k = profile.window
    if tx and ty:
        kind, monos = "constant", [Monomial()]
        desc = "constants"
    elif tx:
        kind, monos = "laurent_y", [Monomial(y=b) for b in range(-k, k + 1)]
        desc = f"y^b, b in {-k}..{k}"
    elif ty:
        kind = "laurent_x"
        exps = [0]
        if "exp" in used and "exp" in profile.atoms:
            exps = list(range(-profile.exp_window, profile.exp_window + 1))
        monos = [Monomial(x=a, exp=m) for m in exps for a in range(-k, k + 1)]
        desc = f"x^a, a in {-k}..{k}" + (f", times exp(rate*x)^m, m in {exps[0]}..{exps[-1]}"
                                          if len(exps) > 1 else "")
    else:
        kind = "poles"
        if profile.pole not in profile.atoms:
            raise ProfileUnsupported(f"pole atom {profile.pole} is not allowed by the profile")
        if profile.pole == "x-y":
            d = 2 if profile.degree is None else profile.degree
            c_max = k if profile.pole_order is None else profile.pole_order
            monos = [Monomial(x=a, y=b, xmy=-c) for c in range(c_max + 1)
                     for a in range(d + 1) for b in range(d + 1)]
        elif profile.pole == "1+x^2+y^2":
            d = k // 2 if profile.degree is None else profile.degree
            c_max = 1 if profile.pole_order is None else profile.pole_order
            monos = [Monomial(x=a, y=b, sph=-c) for c in range(c_max + 1)
                     for a in range(d + 1) for b in range(d + 1)]
        else:
            raise ProfileUnsupported(f"unknown pole atom {profile.pole!r}")
        desc = f"x^a y^b ({profile.pole})^-c, a, b in 0..{d}, c in 0..{c_max}"
    if kind == "poles":
        plain = ParamSpace()
        keep = independent_subset([Expr.monomial(plain, m) for m in monos])
        if len(keep) < len(monos):
            desc += f" ({len(monos) - len(keep)} dependent functions dropped)"
        monos = [monos[i] for i in keep]
    functions = tuple(Expr.monomial(space, m) for m in monos)
    unknowns, entries = [], []
    for idx in INDICES:
        tag = "".join(str(i + 1) for i in idx)
        for f, m in enumerate(monos):
            unknowns.append(f"u{tag}_{_mono_name(m)}")
            entries.append((idx, f))
    return Ansatz(kind, space, functions, tuple(unknowns), tuple(entries), desc)


@dataclass
class AffineSystem:
    """Rows indexed by (generator, component, monomial); columns by the unknowns."""

    space: ParamSpace
    ncols: int
    rows: list                      # dict column -> ParamScalar, rhs under linalg.RHS
    labels: list                    # (generator index, (i, j, k), numerator monomial)
    ansatz: Ansatz | None = None

    def matrix(self):
        """Dense matrix and rhs column (for display and small systems)."""
        zero = self.space.zero
        mat = [[row.get(c, zero) for c in range(self.ncols)] for row in self.rows]
        rhs = [row.get(RHS, zero) for row in self.rows]
        return mat, rhs


def assemble_system(g: LieAlgebraAction, ansatz: Ansatz) -> AffineSystem:
    space = g.space
    if ansatz.space != space:
        raise ParamSpaceError("ansatz and algebra live in different parameter spaces")
    rows, labels = [], []
    for n, A in enumerate(g.generators):
        J = A.jacobian()
        # per basis function: A(f) and f * d_l A^k
        applied = [A.apply(f) for f in ansatz.functions]
        scaled = [[[f * J[k][l] for l in (0, 1)] for k in (0, 1)] for f in ansatz.functions]
        contribs: dict = {idx: {} for idx in INDICES}

        def add(idx, u, e):
            if e.is_zero():
                return
            cur = contribs[idx].get(u)
            contribs[idx][u] = e if cur is None else cur + e

        for u, ((i0, j0, k0), f) in enumerate(ansatz.entries):
            add((i0, j0, k0), u, applied[f])
            fJ = scaled[f]
            for k in (0, 1):
                add((i0, j0, k), u, -fJ[k][k0])
            for i in (0, 1):
                add((i, j0, k0), u, fJ[i0][i])
            for j in (0, 1):
                add((i0, j, k0), u, fJ[j0][j])
        for idx in INDICES:
            i, j, k = idx
            rhs = -J[k][j].diff("xy"[i])
            block = rows_from_exprs({u: e for u, e in contribs[idx].items() if not e.is_zero()},
                                    None if rhs.is_zero() else rhs)
            for mono in sorted(block):
                row = {c: v for c, v in block[mono].items() if v}
                if row:
                    rows.append(clear_denominators(space, row))
                    labels.append((n, idx, mono))
    return AffineSystem(space, len(ansatz), rows, labels, ansatz)


@dataclass
class SolutionSpace:
    status: str                                  # "empty" | "nonempty"
    dimension: int = 0
    particular: Christoffel | None = None
    basis: list = field(default_factory=list)    # EndValuedOneForm
    domain_notes: list = field(default_factory=list)
    pivot_denominators: list = field(default_factory=list)
    certificate: str | None = None
    exceptional: list = field(default_factory=list)
    space: ParamSpace | None = None
    ansatz: str = ""
    case: int | None = None
    params: dict = field(default_factory=dict)
    pivot_polys: list = field(default_factory=list, repr=False)

    @property
    def empty(self) -> bool:
        return self.status == "empty"


def _factor_strings(polys, space) -> list[str]:
    out = []
    for p in polys:
        expr = p.sympy_numer().as_expr()
        for fac, _ in factor_list(expr)[1]:
            s = str(fac).replace("**", "^")
            if s not in out:
                out.append(s)
    return out


def _certificate_text(sys: AffineSystem, lab, value) -> str:
    n, idx, mono = lab
    mono_text = str(Expr(sys.space, {mono: sys.space.one}, (0, 0))) if mono != (0, 0, 0) else "1"
    return f"generator {n + 1}, component {label(idx)}, coefficient of {mono_text}: 0 = {value}"


def solve_affine(sys: AffineSystem) -> SolutionSpace:
    result: Elimination = eliminate(sys.rows, sys.ncols, sys.space, sys.labels)
    space = sys.space
    pivots = _factor_strings(result.pivot_polys + result.obstruction_polys, space)
    ansatz = sys.ansatz
    if not result.consistent:
        lab, value = result.certificate
        return SolutionSpace("empty", 0, pivot_denominators=pivots, space=space,
                             certificate=_certificate_text(sys, lab, value),
                             ansatz=ansatz.description if ansatz else "",
                             pivot_polys=result.pivot_polys + result.obstruction_polys)
    if ansatz is None:
        raise ValueError("solve_affine needs the ansatz to rebuild Christoffel symbols")
    particular = ansatz.combine(result.particular)
    basis = [ansatz.combine(vec, EndValuedOneForm) for vec in result.basis]
    notes = []
    for t in [particular] + basis:
        for _, e in t.items():
            for a in e.negative_atoms():
                if a not in notes:
                    notes.append(a)
    return SolutionSpace("nonempty", len(basis), particular, basis, notes, pivots, space=space,
                         ansatz=ansatz.description, pivot_polys=result.pivot_polys)


# --- parameter handling ------------------------------------------------------

def rational_roots(polys, name: str) -> list[Fraction]:
    """Rational zeros of univariate (in ``name``) polynomials."""
    roots = set()
    for p in polys:
        if p.free_params() != {name}:
            continue
        for fac, _ in factor_list(p.sympy_numer().as_expr())[1]:
            poly = fac.as_poly()
            if poly.degree() == 1:
                c1, c0 = poly.all_coeffs()
                roots.add(Fraction(str(-c0 / c1)))
    return sorted(roots)


def solve_action(g: LieAlgebraAction, profile: AnsatzProfile | None = None) -> SolutionSpace:
    ansatz = build_ansatz(g, profile)
    return solve_affine(assemble_system(g, ansatz))


def exceptional_values(g: LieAlgebraAction, generic: SolutionSpace, admissible,
                       profile: AnsatzProfile | None = None) -> list[dict]:
    """Re-solve at each admissible rational zero of a recorded pivot.

    A zero is "degenerate" when the status or dimension changes there and
    "spurious" otherwise.  Only single-parameter algebras are analysed.
    """
    if len(g.space.params) != 1:
        return []
    name = g.space.params[0]
    out = []
    for root in rational_roots(generic.pivot_polys, name):
        if not admissible({name: root}):
            continue
        sub = LieAlgebraAction(tuple(A.subs({name: root}) for A in g.generators), g.params,
                               g.constraints)
        special = solve_action(sub, profile)
        changed = (special.status, special.dimension) != (generic.status, generic.dimension)
        out.append({"param": name, "value": root, "kind": "degenerate" if changed else "spurious",
                    "status": special.status, "dimension": special.dimension})
    return out


@lru_cache(maxsize=512)
def _cached_space(case_id, params_key, r, window):
    from .catalog import get_case

    spec = get_case(case_id, dict(params_key), r=r)
    profile = spec.profile.with_window(window)
    g = spec.action
    result = solve_action(g, profile)
    result.case = case_id
    result.params = {k: ("symbolic" if v is None else v) for k, v in params_key}
    if g.space.params:
        result.exceptional = exceptional_values(g, result, spec.admissible, profile)
    return result


def invariant_connection_space(case_id: int, params=None, r: int | None = None, window=None,
                               strict: bool = False) -> SolutionSpace:
    """Solve a catalog case.  ``params`` maps names to rationals or "symbolic".

    With ``strict`` a degenerate exceptional parameter value inside the
    constraints raises ParamDegenerate instead of being reported.
    """
    from .catalog import get_case, normalize_params

    spec = get_case(case_id, params, r=r)
    key = normalize_params(spec, params)
    result = _cached_space(case_id, key, spec.r, window if window is not None else spec.profile.window)
    if strict:
        bad = [e for e in result.exceptional if e["kind"] == "degenerate"]
        if bad:
            raise ParamDegenerate(f"case {case_id}: solution changes at "
                                  + ", ".join(f"{e['param']} = {e['value']}" for e in bad))
    return result


def case1_determinant() -> ParamScalar:
    """Determinant of the 8x8 system of the rotation-dilation generator of case 1."""
    from .catalog import get_case

    g = get_case(1, {"alpha": "symbolic"}).action
    ansatz = build_ansatz(g)
    sys = assemble_system(LieAlgebraAction((g.generators[2],)), ansatz)
    if len(sys.rows) != 8:
        raise ClosureError(f"expected 8 equations, found {len(sys.rows)}")
    order = sorted(range(8), key=lambda n: sys.labels[n][1])
    R = g.space.sympy_ring()
    mat = [[R.from_dict(sys.rows[n].get(c, g.space.zero).num) for c in range(8)] for n in order]
    det = DomainMatrix(mat, (8, 8), R.to_domain()).det()
    return ParamScalar(g.space, dict(det), None)


# --- characterized (infinite-dimensional) cases -----------------------------

@dataclass
class CharacterizationResult:
    ok: bool
    violated: list
    invariant: bool
    residuals: list

    def __bool__(self):
        return self.ok


_CHARACTERIZATIONS = {
    9: {"vanish": [], "var": "y"},
    10: {"vanish": [(0, 0, 0), (0, 0, 1), (0, 1, 1), (1, 0, 1), (1, 1, 0)], "var": "y"},
    20: {"vanish": [(1, 1, 0), (1, 0, 0), (0, 1, 0), (1, 1, 1)], "var": "x", "trace": -1},
    21: {"vanish": [(1, 1, 0), (1, 0, 0), (0, 1, 0), (1, 1, 1), (0, 0, 1)], "var": "x", "trace": -1},
}


def verify_characterization(case_id: int, sample_functions: dict, r: int | None = None) -> CharacterizationResult:
    """Check the closed characterization of a non-transitive case and invariance.

    ``sample_functions`` maps ``(i, j, k)`` (zero-based) or ``"G[i][j][k]"``
    labels to Expr or strings; missing entries are zero.
    """
    from .catalog import get_case
    from .grammar import parse_expr

    if case_id not in _CHARACTERIZATIONS:
        raise ValueError(f"case {case_id} has no characterization")
    spec = get_case(case_id, {}, r=r)
    g = spec.action
    space = g.space
    entries = {idx: Expr.zero(space) for idx in INDICES}
    for key, value in sample_functions.items():
        idx = key if isinstance(key, tuple) else parse_label(key)
        entries[idx] = parse_expr(value, space) if isinstance(value, str) else value.lift(space)
    rule = _CHARACTERIZATIONS[case_id]
    violated = []
    other = "x" if rule["var"] == "y" else "y"
    for idx, e in entries.items():
        if not e.diff(other).is_zero():
            violated.append(f"{label(idx)} depends on {other}")
    for idx in rule["vanish"]:
        if not entries[idx].is_zero():
            violated.append(f"{label(idx)} = 0")
    if "trace" in rule:
        trace = entries[(0, 1, 1)] + entries[(1, 0, 1)] - entries[(0, 0, 0)]
        if trace != Expr.const(space, rule["trace"]):
            violated.append(f"G[1][2][2] + G[2][1][2] - G[1][1][1] = {rule['trace']} (found {trace})")
    report = verify_invariance(g, Christoffel(entries))
    return CharacterizationResult(not violated and report.ok, violated, report.ok, report.residuals)
