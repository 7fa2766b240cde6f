"""Sparse exact elimination over Q(params).

Rows are dicts ``column -> scalar`` with the right-hand side stored under
``RHS``.  Entries are kept polynomial in the parameters: a pivot with a
constant coefficient is used by ordinary row subtraction, a parametric pivot
by cross-multiplication (fraction-free), after which the row is divided by the
gcd of its entries.  Parametric pivots are only taken once no constant pivot
remains, and every one of them is recorded: its zeros are where the generic
answer may change.

Parameter-free systems run on bare ``gmpy2.mpq`` values.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce

from .expr import Expr, common_denominator
from .scalars import ParamScalar, ParamSpace

RHS = -1


class _Domain:
    def __init__(self, space: ParamSpace):
        self.space = space
        self.plain = not space.params

    def to_inner(self, s: ParamScalar):
        if self.plain:
            return s.constant()
        if s.den is not None:
            raise ValueError("row entries must be polynomial; clear denominators first")
        return s

    def to_outer(self, v) -> ParamScalar:
        return self.space.scalar(v) if self.plain else v

    def is_unit(self, v) -> bool:
        return self.plain or v.is_constant()

    def degree(self, v) -> int:
        if self.plain:
            return 0
        return max(sum(m) for m in v.num)

    def primitive(self, row: dict) -> dict:
        """Divide a polynomial row by the gcd of its entries."""
        if self.plain or not row:
            return row
        R = self.space.sympy_ring()
        polys = {c: R.from_dict(v.num) for c, v in row.items()}
        g = reduce(lambda a, b: a.gcd(b), polys.values())
        if g.is_ground:
            return row
        return {c: ParamScalar(self.space, dict(p.exquo(g)), None) for c, p in polys.items()}


def clear_denominators(space: ParamSpace, row: dict) -> dict:
    """Multiply a row of ParamScalars by the lcm of the entry denominators."""
    dens = [v.den for v in row.values() if v.den is not None]
    if not dens:
        return row
    R = space.sympy_ring()
    lcm = reduce(lambda a, b: a.lcm(b), (R.from_dict(d) for d in dens))
    m = ParamScalar(space, dict(lcm), None)
    return {c: v * m for c, v in row.items()}


@dataclass
class Elimination:
    consistent: bool
    ncols: int
    rank: int
    particular: list = field(default_factory=list)     # ParamScalar per column
    basis: list = field(default_factory=list)          # list of ParamScalar vectors
    free_cols: list = field(default_factory=list)
    pivot_cols: list = field(default_factory=list)
    pivot_polys: list = field(default_factory=list)    # non-constant pivot coefficients
    certificate: tuple | None = None                  # (row label, nonzero value)
    obstruction_polys: list = field(default_factory=list)


def _axpy(row, f, prow):
    """row - f * prow, dropping zeros (mutates row)."""
    for c, v in prow.items():
        cur = row.get(c)
        if cur is None:
            row[c] = -(f * v)
        else:
            s = cur - f * v
            if s:
                row[c] = s
            else:
                del row[c]


def _cross(row, c, prow, dom):
    """Eliminate column ``c`` from ``row`` using pivot row ``prow``."""
    p = prow[c]
    q = row[c]
    if dom.is_unit(p):
        _axpy(row, q / p, prow)
        return row
    new = {k: v * p for k, v in row.items()}
    _axpy(new, q, prow)
    return dom.primitive(new)


def eliminate(rows, ncols: int, space: ParamSpace, labels=None) -> Elimination:
    """Solve ``rows`` exactly; ``labels[n]`` names the n-th input row for certificates."""
    dom = _Domain(space)
    labels = list(labels) if labels is not None else list(range(len(rows)))
    pivots: dict[int, dict] = {}
    pending = []
    for row, lab in zip(rows, labels):
        inner = {c: dom.to_inner(v) for c, v in row.items() if v}
        if inner:
            pending.append((inner, lab))

    def reduce_row(row):
        for c in [c for c in row if c in pivots]:
            if c in row:
                row = _cross(row, c, pivots[c], dom)
        return row

    def install(row, c):
        p = row[c]
        if dom.is_unit(p):
            inv = 1 / p
            row = {k: v * inv for k, v in row.items()}
        for pc, prow in list(pivots.items()):
            if c in prow:
                pivots[pc] = _cross(dict(prow), c, row, dom)
        pivots[c] = row

    certificate = None
    obstructions = []
    allow_param = False
    while pending:
        deferred = []
        progress = False
        for row, lab in pending:
            row = reduce_row(dict(row))
            unknowns = [c for c in row if c != RHS]
            if not unknowns:
                if RHS in row:
                    value = dom.to_outer(row[RHS])
                    obstructions.append(value)
                    if certificate is None:
                        certificate = (lab, value)
                continue
            units = [c for c in unknowns if dom.is_unit(row[c])]
            if units:
                install(row, min(units))
                progress = True
            elif allow_param:
                c = min(unknowns, key=lambda c: (dom.degree(row[c]), len(row[c].num), c))
                install(row, c)
                progress = True
                allow_param = False
            else:
                deferred.append((row, lab))
        pending = deferred
        if not progress:
            allow_param = True

    pivot_cols = sorted(pivots)
    free_cols = [c for c in range(ncols) if c not in pivots]
    pivot_polys = [dom.to_outer(pivots[c][c]) for c in pivot_cols if not dom.is_unit(pivots[c][c])]
    if certificate is not None:
        return Elimination(False, ncols, len(pivots), free_cols=free_cols, pivot_cols=pivot_cols,
                           pivot_polys=pivot_polys, certificate=certificate,
                           obstruction_polys=[o for o in obstructions if not o.is_constant()])
    zero = space.zero
    particular = [zero] * ncols
    for c in pivot_cols:
        prow = pivots[c]
        if RHS in prow:
            particular[c] = dom.to_outer(prow[RHS]) / dom.to_outer(prow[c])
    basis = []
    for f in free_cols:
        vec = [zero] * ncols
        vec[f] = space.one
        for c in pivot_cols:
            prow = pivots[c]
            if f in prow:
                vec[c] = -dom.to_outer(prow[f]) / dom.to_outer(prow[c])
        basis.append(vec)
    return Elimination(True, ncols, len(pivots), particular, basis, free_cols, pivot_cols, pivot_polys)


# --- helpers on expressions -------------------------------------------------

def rows_from_exprs(contribs: dict, rhs: Expr | None = None) -> dict:
    """Coefficient rows of ``sum_u x_u * contribs[u] = rhs`` as an identity of functions.

    Returns ``{numerator monomial: {column: scalar}}`` after bringing every
    expression over the common denominator.
    """
    exprs = list(contribs.values()) + ([rhs] if rhs is not None else [])
    den = common_denominator(exprs)
    rows: dict = {}
    for u, e in contribs.items():
        for mono, c in e.coefficient_over(den).items():
            rows.setdefault(mono, {})[u] = c
    if rhs is not None:
        for mono, c in rhs.coefficient_over(den).items():
            rows.setdefault(mono, {})[RHS] = c
    return rows


def express_in_span(fields, target):
    """Constant coefficients ``c`` with sum c_k fields[k] = target, or None."""
    space = fields[0].space
    if target.space != space:
        space = space.union(target.space)
        fields = [f.lift(space) for f in fields]
        target = target.lift(space)
    rows, labels = [], []
    for comp in (0, 1):
        block = rows_from_exprs({k: f[comp] for k, f in enumerate(fields)}, target[comp])
        for mono in sorted(block):
            rows.append(clear_denominators(space, block[mono]))
            labels.append((comp, mono))
    result = eliminate(rows, len(fields), space, labels)
    if not result.consistent:
        return None
    return result.particular


def rank(matrix, space: ParamSpace) -> int:
    rows = [clear_denominators(space, {c: v for c, v in enumerate(r) if v}) for r in matrix]
    ncols = max((len(r) for r in matrix), default=0)
    return eliminate(rows, ncols, space).rank


def nullspace(matrix, ncols: int, space: ParamSpace) -> list:
    """Basis of {v : matrix v = 0} over Q(params)."""
    rows = [clear_denominators(space, {c: v for c, v in enumerate(r) if v}) for r in matrix]
    return eliminate(rows, ncols, space).basis


def independent_subset(exprs) -> list[int]:
    """Indices of a maximal linearly independent (over Q) prefix-greedy subset.

    The expressions must be parameter-free.
    """
    if not exprs:
        return []
    den = common_denominator(exprs)
    keys: dict = {}
    pivots: dict[int, dict] = {}
    kept = []
    for n, e in enumerate(exprs):
        row = {}
        for mono, c in e.coefficient_over(den).items():
            row[keys.setdefault(mono, len(keys))] = c.constant()
        for c in sorted(set(row) & set(pivots)):
            if c in row:
                _axpy(row, row[c], pivots[c])
        if row:
            c = min(row)
            inv = 1 / row[c]
            row = {k: v * inv for k, v in row.items()}
            for pc, prow in pivots.items():
                if c in prow:
                    _axpy(prow, prow[c], row)
            pivots[c] = row
            kept.append(n)
    return kept
