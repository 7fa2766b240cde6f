"""Exact expressions in the plane coordinates x, y.

An expression is kept in lowest terms as

    N(x, y, E) / ((x - y)^C * (1 + x^2 + y^2)^D),        E = exp(rate*x),

where N is a Laurent polynomial in x, y, E with coefficients in Q(params),
C, D >= 0, x - y does not divide N when C > 0 and 1 + x^2 + y^2 does not
divide N when D > 0.  Nonnegative powers of x - y are therefore always
expanded into x, y monomials; only negative powers survive as poles.

Why structural equality is a complete zero test: x, y and E are algebraically
independent over Q(params) when the rate is nonzero, so
S = Q(params)[x^+-1, y^+-1, E^+-1] is a UFD whose units are exactly the
nonzero monomials.  x - y and 1 + x^2 + y^2 are non-associate primes of S.  A
fraction whose denominator is a product of powers of these primes has a
unique lowest-terms representative, so two expressions denote the same
function iff their (N, C, D) agree.  Clearing denominators and grouping by the
power of E reduces any claimed linear relation to a polynomial identity.

The monomials of N are ordered by descending total degree in x, y, then
descending x-degree, then descending E-power.
"""
from __future__ import annotations

import math
from enum import Enum
from fractions import Fraction
from typing import NamedTuple

from .errors import ClosureError, EvalSingular, ParamSingular, ParamSpaceError
from .scalars import ParamScalar, ParamSpace, mpq_to_fraction, to_mpq


class Atom(Enum):
    X = "x"
    Y = "y"
    XMINUSY = "x-y"
    SPHERE = "1+x^2+y^2"
    EXP = "exp"


class Monomial(NamedTuple):
    """Signed exponents of every atom; the empty support is the identity."""

    x: int = 0
    y: int = 0
    xmy: int = 0
    sph: int = 0
    exp: int = 0

    def negative_atoms(self):
        return [atom for atom, e in zip(Atom, self) if e < 0]


# Pole polynomials, monic in x: {x_power: {y_power: int}}.
_POLES = (
    {1: {0: 1}, 0: {1: -1}},           # x - y
    {2: {0: 1}, 0: {0: 1, 2: 1}},      # 1 + x^2 + y^2
)
_POLE_ATOMS = (Atom.XMINUSY, Atom.SPHERE)
_pole_power_cache: dict = {}


def _pole_power(idx: int, k: int) -> dict:
    """Integer polynomial {(a, b): int} of pole ``idx`` raised to ``k``."""
    key = (idx, k)
    if key not in _pole_power_cache:
        base = {(a, b): c for a, ys in _POLES[idx].items() for b, c in ys.items()}
        result = {(0, 0): 1}
        for _ in range(k):
            nxt: dict = {}
            for (a1, b1), c1 in result.items():
                for (a2, b2), c2 in base.items():
                    kk = (a1 + a2, b1 + b2)
                    nxt[kk] = nxt.get(kk, 0) + c1 * c2
            result = {kk: v for kk, v in nxt.items() if v}
        _pole_power_cache[key] = result
    return _pole_power_cache[key]


def _add_into(acc: dict, key, value: ParamScalar):
    cur = acc.get(key)
    if cur is None:
        if value.num:
            acc[key] = value
    else:
        s = cur + value
        if s.num:
            acc[key] = s
        else:
            del acc[key]


def _scale_by_intpoly(terms: dict, poly: dict) -> dict:
    if poly == {(0, 0): 1}:
        return terms
    out: dict = {}
    for (a, b, m), c in terms.items():
        for (da, db), k in poly.items():
            _add_into(out, (a + da, b + db, m), c * k)
    return out


def _divide(terms: dict, idx: int):
    """Exact quotient of the numerator by pole ``idx``, or None if it does not divide."""
    divisor = _POLES[idx]
    deg = max(divisor)
    lower = [(da, ys) for da, ys in divisor.items() if da != deg]
    groups: dict = {}
    for (a, b, m), c in terms.items():
        groups.setdefault(m, {}).setdefault(a, {})[b] = c
    quotient: dict = {}
    for m, rows in groups.items():
        amin = min(rows)
        work = {a - amin: dict(ys) for a, ys in rows.items()}
        top = max(work)
        for a in range(top, deg - 1, -1):
            ys = work.pop(a, None)
            if not ys:
                continue
            qa = a - deg
            for b, c in ys.items():
                quotient[(qa + amin, b, m)] = c
            for da, dys in lower:
                target = work.setdefault(qa + da, {})
                for b, c in ys.items():
                    for db, k in dys.items():
                        cur = target.get(b + db)
                        val = c * (-k)
                        if cur is None:
                            target[b + db] = val
                        else:
                            s = cur + val
                            if s.num:
                                target[b + db] = s
                            else:
                                del target[b + db]
        if any(ys for ys in work.values()):
            return None
    return quotient


def _make(space, terms: dict, den) -> Expr:
    if not terms:
        return Expr(space, {}, (0, 0))
    den = list(den)
    for idx in (0, 1):
        while den[idx] > 0:
            q = _divide(terms, idx)
            if q is None:
                break
            terms = q
            den[idx] -= 1
    return Expr(space, terms, tuple(den))


class Expr:
    """Immutable exact expression; see the module docstring for the canonical form."""

    __slots__ = ("space", "terms", "den")

    def __init__(self, space: ParamSpace, terms: dict, den=(0, 0)):
        # callers must pass canonical data; use the constructors below otherwise
        self.space = space
        self.terms = terms
        self.den = den

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, space):
        return cls(space, {}, (0, 0))

    @classmethod
    def const(cls, space, value):
        s = space.scalar(value)
        return cls(space, {(0, 0, 0): s} if s.num else {}, (0, 0))

    @classmethod
    def x(cls, space):
        return cls(space, {(1, 0, 0): space.one}, (0, 0))

    @classmethod
    def y(cls, space):
        return cls(space, {(0, 1, 0): space.one}, (0, 0))

    @classmethod
    def exp(cls, space, power: int = 1):
        if space.exp_rate is None:
            raise ClosureError(f"{space!r} declares no exponential rate")
        return cls(space, {(0, 0, power): space.one}, (0, 0))

    @classmethod
    def monomial(cls, space, mono: Monomial, coeff=1) -> Expr:
        """``coeff * x^a y^b (x-y)^c (1+x^2+y^2)^d E^m`` for any signed exponents."""
        c = space.scalar(coeff)
        if mono.exp and space.exp_rate is None:
            raise ClosureError(f"{space!r} declares no exponential rate")
        e = cls(space, {(mono.x, mono.y, mono.exp): c} if c.num else {}, (0, 0))
        for idx, p in ((0, mono.xmy), (1, mono.sph)):
            if p > 0:
                e = e * cls(space, {(a, b, 0): space.scalar(k) for (a, b), k in _pole_power(idx, p).items()})
            elif p < 0:
                den = [0, 0]
                den[idx] = -p
                e = e * cls(space, {(0, 0, 0): space.one}, tuple(den))
        return e

    # -- structure ------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def items(self):
        """(Monomial, coefficient) pairs in canonical order."""
        C, D = self.den
        for key in sorted(self.terms, key=_order_key):
            a, b, m = key
            yield Monomial(a, b, -C, -D, m), self.terms[key]

    def __len__(self):
        return len(self.terms)

    def negative_atoms(self) -> list[str]:
        """Atoms that occur with a negative power (domain restrictions)."""
        out = []
        if any(a < 0 for a, _, _ in self.terms):
            out.append(Atom.X.value)
        if any(b < 0 for _, b, _ in self.terms):
            out.append(Atom.Y.value)
        for idx, atom in enumerate(_POLE_ATOMS):
            if self.den[idx]:
                out.append(atom.value)
        return out

    def has_exp(self) -> bool:
        return any(m for _, _, m in self.terms)

    def free_params(self) -> set[str]:
        used: set[str] = set()
        for c in self.terms.values():
            used |= c.free_params()
        if self.has_exp() and isinstance(self.space.exp_rate, str):
            used.add(self.space.exp_rate)
        return used

    def is_polynomial(self) -> bool:
        """No poles and no negative powers of x or y."""
        return self.den == (0, 0) and all(a >= 0 and b >= 0 for a, b, _ in self.terms)

    def constant_value(self) -> ParamScalar | None:
        """The coefficient when the expression is free of x and y, else None."""
        if not self.terms:
            return self.space.zero
        if self.den == (0, 0) and len(self.terms) == 1 and (0, 0, 0) in self.terms:
            return self.terms[(0, 0, 0)]
        return None

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other) -> Expr:
        if isinstance(other, Expr):
            if other.space is not self.space and other.space != self.space:
                raise ParamSpaceError(
                    f"cannot combine expressions from {self.space!r} and {other.space!r}")
            return other
        return Expr.const(self.space, other)

    def __add__(self, other):
        other = self._coerce(other)
        if not other.terms:
            return self
        if not self.terms:
            return other
        if self.den == other.den:
            terms = dict(self.terms)
            for k, v in other.terms.items():
                _add_into(terms, k, v)
            if self.den == (0, 0):
                return Expr(self.space, terms, (0, 0))
            return _make(self.space, terms, self.den)
        den = (max(self.den[0], other.den[0]), max(self.den[1], other.den[1]))
        terms = dict(self._lifted_numerator(den))
        for k, v in other._lifted_numerator(den).items():
            _add_into(terms, k, v)
        return _make(self.space, terms, den)

    __radd__ = __add__

    def _lifted_numerator(self, den) -> dict:
        """Numerator over the (larger) denominator ``den``."""
        terms = self.terms
        for idx in (0, 1):
            k = den[idx] - self.den[idx]
            if k < 0:
                raise ValueError("target denominator must dominate")
            if k:
                terms = _scale_by_intpoly(terms, _pole_power(idx, k))
        return terms

    def __neg__(self):
        return Expr(self.space, {k: -v for k, v in self.terms.items()}, self.den)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, ParamScalar) or not isinstance(other, Expr):
            s = self.space.scalar(other)
            if not s.num:
                return Expr.zero(self.space)
            return Expr(self.space, {k: v * s for k, v in self.terms.items()}, self.den)
        other = self._coerce(other)
        if not self.terms or not other.terms:
            return Expr.zero(self.space)
        terms: dict = {}
        for (a1, b1, m1), c1 in self.terms.items():
            for (a2, b2, m2), c2 in other.terms.items():
                _add_into(terms, (a1 + a2, b1 + b2, m1 + m2), c1 * c2)
        den = (self.den[0] + other.den[0], self.den[1] + other.den[1])
        if den == (0, 0):
            return Expr(self.space, terms, den)
        return _make(self.space, terms, den)

    __rmul__ = __mul__

    def inverse(self) -> Expr:
        """Inverse within the class: the numerator must be a unit times pole powers."""
        if not self.terms:
            raise ZeroDivisionError("inverse of zero expression")
        terms = self.terms
        powers = [0, 0]
        for idx in (0, 1):
            while len(terms) > 1:
                q = _divide(terms, idx)
                if q is None:
                    break
                terms = q
                powers[idx] += 1
        if len(terms) != 1:
            raise ClosureError(f"1/({self}) leaves the expression class")
        (a, b, m), c = next(iter(terms.items()))
        unit = Expr(self.space, {(-a, -b, -m): c.inverse()}, tuple(powers))
        # multiply back the original denominator
        num = Expr(self.space, {(0, 0, 0): self.space.one}, (0, 0))
        for idx in (0, 1):
            if self.den[idx]:
                num = num * Expr(self.space, {(a2, b2, 0): self.space.scalar(k)
                                              for (a2, b2), k in _pole_power(idx, self.den[idx]).items()})
        return unit * num

    def __truediv__(self, other):
        if isinstance(other, ParamScalar) or not isinstance(other, Expr):
            return self * self.space.scalar(other).inverse()
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            raise TypeError("only integer powers")
        if n < 0:
            return self.inverse() ** (-n)
        result = Expr.const(self.space, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if not isinstance(other, Expr):
            try:
                other = Expr.const(self.space, other)
            except TypeError:
                return NotImplemented
        return self.space == other.space and self.den == other.den and self.terms == other.terms

    def __hash__(self):
        return hash((self.den, frozenset(self.terms.items())))

    # -- calculus -----------------------------------------------------------

    def diff(self, var: str) -> Expr:
        if var not in ("x", "y"):
            raise ValueError(f"unknown variable {var!r}")
        rate = self.space.rate()
        dn: dict = {}
        for (a, b, m), c in self.terms.items():
            if var == "x":
                if a:
                    _add_into(dn, (a - 1, b, m), c * a)
                if m:
                    _add_into(dn, (a, b, m), c * rate * m)
            elif b:
                _add_into(dn, (a, b - 1, m), c * b)
        result = _make(self.space, dn, self.den)
        # quotient rule for each pole: -k * N * d(pole) / (pole^(k+1) * rest)
        for idx in (0, 1):
            k = self.den[idx]
            if not k:
                continue
            dpole = _pole_derivative(idx, var)
            den = list(self.den)
            den[idx] += 1
            terms = _scale_by_intpoly(self.terms, dpole)
            terms = {key: v * (-k) for key, v in terms.items()}
            result = result + _make(self.space, terms, tuple(den))
        return result

    # -- evaluation -----------------------------------------------------------

    def evaluate(self, point, params=None):
        """Value at a rational point with every parameter bound.

        Exact ``Fraction`` when the expression has no exponential terms, float
        otherwise.
        """
        params = dict(params or {})
        px, py = (Fraction(point[0]), Fraction(point[1]))
        missing = self.free_params() - set(params)
        if missing:
            raise ParamSpaceError(f"unbound parameters {sorted(missing)}")
        denom = Fraction(1)
        if self.den[0]:
            denom *= (px - py) ** self.den[0]
        if self.den[1]:
            denom *= (1 + px * px + py * py) ** self.den[1]
        if denom == 0:
            raise EvalSingular(f"pole of {self} at {point}")
        use_float = self.has_exp()
        if use_float:
            rate = self.space.exp_rate
            rate = float(Fraction(params[rate])) if isinstance(rate, str) else float(rate)
        total = 0.0 if use_float else Fraction(0)
        for (a, b, m), c in self.terms.items():
            try:
                coeff = c.evaluate(params)
            except ParamSingular:
                raise
            if (a < 0 and px == 0) or (b < 0 and py == 0):
                raise EvalSingular(f"negative power of a vanishing coordinate in {self} at {point}")
            val = coeff * px ** a * py ** b
            if use_float:
                total += float(val) * math.exp(rate * m * float(px))
            else:
                total += val
        if use_float:
            return total / float(denom)
        return total / denom

    def value_at(self, point) -> ParamScalar:
        """Exact value at a rational point, keeping the parameters symbolic."""
        px, py = (Fraction(point[0]), Fraction(point[1]))
        denom = Fraction(1)
        if self.den[0]:
            denom *= (px - py) ** self.den[0]
        if self.den[1]:
            denom *= (1 + px * px + py * py) ** self.den[1]
        if denom == 0:
            raise EvalSingular(f"pole of {self} at {point}")
        total = self.space.zero
        for (a, b, m), c in self.terms.items():
            if (a < 0 and px == 0) or (b < 0 and py == 0):
                raise EvalSingular(f"negative power of a vanishing coordinate in {self} at {point}")
            if m and px != 0:
                raise ClosureError("exp(rate*x) has no exact value at x != 0")
            total = total + c * (px ** a * py ** b)
        return total / denom

    def compile(self, params=None):
        """Float callable f(x, y) for numerical work."""
        params = dict(params or {})
        rate = self.space.exp_rate
        if isinstance(rate, str):
            rate = float(Fraction(params[rate])) if rate in params else None
        elif rate is not None:
            rate = float(rate)
        data = []
        for (a, b, m), c in self.terms.items():
            if m and rate is None:
                raise ParamSpaceError("exp rate must be bound for numerical evaluation")
            data.append((float(c.evaluate(params)), a, b, m))
        C, D = self.den

        def f(x, y):
            total = 0.0
            for c, a, b, m in data:
                term = c * x ** a * y ** b
                if m:
                    term *= math.exp(rate * m * x)
                total += term
            d = 1.0
            if C:
                d *= (x - y) ** C
            if D:
                d *= (1 + x * x + y * y) ** D
            return total / d

        return f

    # -- parameter handling -------------------------------------------------

    def subs(self, bindings) -> Expr:
        """Bind some parameters to rationals, moving into the reduced space."""
        bindings = {k: Fraction(v) for k, v in bindings.items()}
        target = self.space.bind(bindings)
        drop_exp = target.exp_rate is None and self.space.exp_rate is not None
        terms: dict = {}
        for (a, b, m), c in self.terms.items():
            key = (a, b, 0) if drop_exp else (a, b, m)
            _add_into(terms, key, c.subs(bindings, target))
        return _make(target, terms, self.den)

    def lift(self, target: ParamSpace) -> Expr:
        """Embed into a space declaring a superset of the parameters."""
        if target == self.space:
            return self
        missing = set(self.space.params) - set(target.params)
        if missing:
            raise ParamSpaceError(f"target space lacks parameters {sorted(missing)}")
        if self.has_exp() and target.exp_rate != self.space.exp_rate:
            raise ParamSpaceError("exp rate differs in target space")
        terms = {k: v.lift(target) for k, v in self.terms.items()}
        return Expr(target, terms, self.den)

    def coefficient_over(self, den) -> dict:
        """Numerator coefficients when written over the common denominator ``den``."""
        return self._lifted_numerator(den)

    def __str__(self):
        from .grammar import format_expr
        return format_expr(self)

    def __repr__(self):
        return f"Expr({self})"


def _pole_derivative(idx: int, var: str) -> dict:
    if idx == 0:
        return {(0, 0): 1 if var == "x" else -1}
    return {(1, 0): 2} if var == "x" else {(0, 1): 2}


def _order_key(key):
    a, b, m = key
    return (-(a + b), -a, -m)


def common_denominator(exprs) -> tuple[int, int]:
    den = [0, 0]
    for e in exprs:
        den[0] = max(den[0], e.den[0])
        den[1] = max(den[1], e.den[1])
    return tuple(den)


def rationals(values) -> list:
    return [mpq_to_fraction(to_mpq(v)) for v in values]
