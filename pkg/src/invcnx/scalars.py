"""Exact scalars: rational functions of a declared, fixed set of parameters.

Polynomials are plain dicts mapping exponent tuples to ``gmpy2.mpq``; they are
never mutated after construction.  Sympy is used only for gcd and
factorization, both of which are rare on the hot paths (denominators are
almost always 1).
"""
from __future__ import annotations

import re
from fractions import Fraction
from functools import lru_cache

from gmpy2 import mpq
from sympy import QQ
from sympy.polys.rings import ring

from .errors import ParamSingular, ParamSpaceError, ParseError

IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
RESERVED = frozenset({"x", "y", "exp"})


# --- dict polynomials -----------------------------------------------------

def padd(p, q):
    if not p:
        return q
    if not q:
        return p
    r = dict(p)
    for k, v in q.items():
        s = r.get(k)
        if s is None:
            r[k] = v
        else:
            s = s + v
            if s:
                r[k] = s
            else:
                del r[k]
    return r


def pneg(p):
    return {k: -v for k, v in p.items()}


def psub(p, q):
    return padd(p, pneg(q))


def pscale(p, c):
    if not c:
        return {}
    return {k: v * c for k, v in p.items()}


def pmul(p, q):
    if not p or not q:
        return {}
    if len(p) == 1 and len(q) == 1:
        (k1, v1), = p.items()
        (k2, v2), = q.items()
        return {tuple(a + b for a, b in zip(k1, k2)): v1 * v2}
    r = {}
    for k1, v1 in p.items():
        for k2, v2 in q.items():
            k = tuple(a + b for a, b in zip(k1, k2))
            s = r.get(k)
            if s is None:
                r[k] = v1 * v2
            else:
                s = s + v1 * v2
                if s:
                    r[k] = s
                else:
                    del r[k]
    return r


def pconst(p):
    """Return the constant value of ``p`` if it has no parameter dependence, else None."""
    if not p:
        return mpq(0)
    if len(p) == 1:
        (k, v), = p.items()
        if not any(k):
            return v
    return None


def to_mpq(value):
    if isinstance(value, bool):
        raise TypeError("bool is not a scalar")
    if isinstance(value, int):
        return mpq(value)
    if isinstance(value, Fraction):
        return mpq(value.numerator, value.denominator)
    if type(value) is type(mpq(0)):
        return value
    if isinstance(value, str):
        return mpq(Fraction(value).numerator, Fraction(value).denominator)
    raise TypeError(f"cannot convert {type(value).__name__} to an exact rational")


def mpq_to_fraction(q) -> Fraction:
    return Fraction(int(q.numerator), int(q.denominator))


def format_rational(q) -> str:
    if q.denominator == 1:
        return str(int(q.numerator))
    return f"{int(q.numerator)}/{int(q.denominator)}"


@lru_cache(maxsize=None)
def _sympy_ring(params):
    return ring(list(params), QQ)[0]


# --- parameter spaces -----------------------------------------------------

class ParamSpace:
    """A fixed, ordered set of formal parameters plus the rate of the exp atom.

    ``exp_rate`` is None (no exponential atom allowed), the name of one of the
    parameters, or a nonzero rational.
    """

    __slots__ = ("params", "exp_rate", "_index", "_key")

    def __init__(self, params=(), exp_rate=None):
        params = tuple(params)
        for name in params:
            if not IDENT.match(name) or name in RESERVED:
                raise ParamSpaceError(f"invalid parameter name {name!r}")
        if len(set(params)) != len(params):
            raise ParamSpaceError(f"duplicate parameter in {params}")
        if isinstance(exp_rate, str):
            if exp_rate not in params:
                raise ParamSpaceError(f"exp rate {exp_rate!r} is not a declared parameter")
        elif exp_rate is not None:
            exp_rate = Fraction(exp_rate)
            if exp_rate == 0:
                exp_rate = None
        self.params = params
        self.exp_rate = exp_rate
        self._index = {p: i for i, p in enumerate(params)}
        self._key = (params, exp_rate)

    def __eq__(self, other):
        return isinstance(other, ParamSpace) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return f"ParamSpace({list(self.params)!r}, exp_rate={self.exp_rate!r})"

    @property
    def ngens(self) -> int:
        return len(self.params)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise ParamSpaceError(f"undeclared parameter {name!r} (declared: {self.params})") from None

    def scalar(self, value) -> ParamScalar:
        if isinstance(value, ParamScalar):
            if value.space != self:
                raise ParamSpaceError("scalar belongs to a different parameter space")
            return value
        q = to_mpq(value)
        if not q:
            return ParamScalar(self, {}, None)
        return ParamScalar(self, {(0,) * self.ngens: q}, None)

    def param(self, name: str) -> ParamScalar:
        i = self.index(name)
        mono = tuple(1 if j == i else 0 for j in range(self.ngens))
        return ParamScalar(self, {mono: mpq(1)}, None)

    @property
    def zero(self) -> ParamScalar:
        return ParamScalar(self, {}, None)

    @property
    def one(self) -> ParamScalar:
        return self.scalar(1)

    def rate(self) -> ParamScalar | None:
        if self.exp_rate is None:
            return None
        if isinstance(self.exp_rate, str):
            return self.param(self.exp_rate)
        return self.scalar(self.exp_rate)

    def union(self, other: ParamSpace) -> ParamSpace:
        params = self.params + tuple(p for p in other.params if p not in self._index)
        rates = {r for r in (self.exp_rate, other.exp_rate) if r is not None}
        if len(rates) > 1:
            raise ParamSpaceError(f"incompatible exp rates {rates}")
        return ParamSpace(params, rates.pop() if rates else None)

    def with_params(self, extra) -> ParamSpace:
        return self.union(ParamSpace(tuple(extra)))

    def bind(self, bindings) -> ParamSpace:
        """The space left after substituting rationals for the named parameters."""
        for name in bindings:
            self.index(name)
        params = tuple(p for p in self.params if p not in bindings)
        rate = self.exp_rate
        if isinstance(rate, str) and rate in bindings:
            rate = Fraction(bindings[rate])
        return ParamSpace(params, rate)

    def sympy_ring(self):
        return _sympy_ring(self.params)


# --- scalars --------------------------------------------------------------

def _normalize(space, num, den):
    """Build a ParamScalar in lowest terms with a monic (lex) denominator."""
    if not num:
        return ParamScalar(space, {}, None)
    if den is None:
        return ParamScalar(space, num, None)
    c = pconst(den)
    if c is not None:
        if not c:
            raise ZeroDivisionError("zero denominator")
        return ParamScalar(space, pscale(num, 1 / c), None)
    R = space.sympy_ring()
    _, n, d = R.from_dict(num).cofactors(R.from_dict(den))
    lc = d.LC
    n = {k: v / lc for k, v in n.items()}
    d = {k: v / lc for k, v in d.items()}
    if pconst(d) is not None:
        return ParamScalar(space, n, None)
    return ParamScalar(space, n, d)


_NUMBERS = (int, Fraction, str, type(mpq(0)))


class ParamScalar:
    """An element of Q(params): numerator and monic denominator in lowest terms.

    ``den is None`` stands for the denominator 1.
    """

    __slots__ = ("space", "num", "den")

    def __init__(self, space, num, den):
        self.space = space
        self.num = num
        self.den = den

    def _coerce(self, other):
        if isinstance(other, ParamScalar):
            if other.space is not self.space and other.space != self.space:
                raise ParamSpaceError(
                    f"cannot combine scalars from {self.space!r} and {other.space!r}")
            return other
        return self.space.scalar(other)

    def __bool__(self):
        return bool(self.num)

    def is_zero(self) -> bool:
        return not self.num

    def is_one(self) -> bool:
        return self.den is None and pconst(self.num) == 1

    def __add__(self, other):
        if not isinstance(other, (ParamScalar, *_NUMBERS)):
            return NotImplemented
        other = self._coerce(other)
        if not other.num:
            return self
        if not self.num:
            return other
        if self.den is None and other.den is None:
            return ParamScalar(self.space, padd(self.num, other.num), None)
        if self.den == other.den:
            return _normalize(self.space, padd(self.num, other.num), self.den)
        d1 = self.den or {(0,) * self.space.ngens: mpq(1)}
        d2 = other.den or {(0,) * self.space.ngens: mpq(1)}
        return _normalize(self.space, padd(pmul(self.num, d2), pmul(other.num, d1)), pmul(d1, d2))

    __radd__ = __add__

    def __neg__(self):
        return ParamScalar(self.space, pneg(self.num), self.den)

    def __sub__(self, other):
        if not isinstance(other, (ParamScalar, *_NUMBERS)):
            return NotImplemented
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, (ParamScalar, *_NUMBERS)):
            return NotImplemented
        other = self._coerce(other)
        if not self.num or not other.num:
            return ParamScalar(self.space, {}, None)
        if self.den is None and other.den is None:
            return ParamScalar(self.space, pmul(self.num, other.num), None)
        if other.den is None and pconst(other.num) is not None:
            return ParamScalar(self.space, pscale(self.num, pconst(other.num)), self.den)
        if self.den is None and pconst(self.num) is not None:
            return ParamScalar(self.space, pscale(other.num, pconst(self.num)), other.den)
        d1 = self.den or {(0,) * self.space.ngens: mpq(1)}
        d2 = other.den or {(0,) * self.space.ngens: mpq(1)}
        return _normalize(self.space, pmul(self.num, other.num), pmul(d1, d2))

    __rmul__ = __mul__

    def inverse(self) -> ParamScalar:
        if not self.num:
            raise ZeroDivisionError("inverse of zero scalar")
        one = {(0,) * self.space.ngens: mpq(1)}
        return _normalize(self.space, self.den or one, self.num)

    def __truediv__(self, other):
        if not isinstance(other, (ParamScalar, *_NUMBERS)):
            return NotImplemented
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = self.space.one
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, ParamScalar):
            return self.space == other.space and self.num == other.num and self.den == other.den
        try:
            other = to_mpq(other)
        except TypeError:
            return NotImplemented
        return self.den is None and pconst(self.num) == other

    def __hash__(self):
        if self.den is None:
            c = pconst(self.num)
            if c is not None:
                return hash(c)
        return hash((frozenset(self.num.items()), frozenset(self.den.items()) if self.den else None))

    # -- queries ------------------------------------------------------------

    def is_constant(self) -> bool:
        return self.den is None and pconst(self.num) is not None

    def constant(self):
        """The value as ``mpq`` when parameter-free, else None."""
        if self.den is None:
            return pconst(self.num)
        return None

    def to_fraction(self) -> Fraction:
        c = self.constant()
        if c is None:
            raise ValueError(f"{self} depends on parameters")
        return mpq_to_fraction(c)

    def free_params(self) -> set[str]:
        used = set()
        for poly in (self.num, self.den or {}):
            for mono in poly:
                used.update(self.space.params[i] for i, e in enumerate(mono) if e)
        return used

    def evaluate(self, bindings) -> Fraction:
        """Exact value with every parameter bound to a rational."""
        vals = [to_mpq(bindings[p]) if p in bindings else None for p in self.space.params]
        missing = [p for p, v in zip(self.space.params, vals) if v is None and p in self.free_params()]
        if missing:
            raise ParamSpaceError(f"unbound parameters {missing}")
        num = _peval(self.num, vals)
        if self.den is not None:
            den = _peval(self.den, vals)
            if not den:
                raise ParamSingular(f"denominator of {self} vanishes at {dict(bindings)}")
            num = num / den
        return mpq_to_fraction(num)

    def subs(self, bindings, target: ParamSpace) -> ParamScalar:
        """Substitute rationals for some parameters and move into ``target``."""
        keep = [target.index(p) if p not in bindings else None for p in self.space.params]
        vals = [to_mpq(bindings[p]) if p in bindings else None for p in self.space.params]
        num = _psubs(self.num, vals, keep, target.ngens)
        if self.den is None:
            return ParamScalar(target, num, None)
        den = _psubs(self.den, vals, keep, target.ngens)
        if not den:
            raise ParamSingular(f"denominator of {self} vanishes at {dict(bindings)}")
        return _normalize(target, num, den)

    def lift(self, target: ParamSpace) -> ParamScalar:
        return self.subs({}, target)

    def sympy_numer(self):
        return self.space.sympy_ring().from_dict(self.num)

    def sympy_denom(self):
        R = self.space.sympy_ring()
        return R.from_dict(self.den) if self.den else R.one

    def __str__(self):
        n = format_poly(self.num, self.space.params)
        if self.den is None:
            return n
        d = format_poly(self.den, self.space.params)
        return f"({n})/({d})"

    def __repr__(self):
        return f"ParamScalar({self})"


def _peval(p, vals):
    total = mpq(0)
    for mono, c in p.items():
        term = c
        for v, e in zip(vals, mono):
            if e:
                term = term * v ** e
        total += term
    return total


def _psubs(p, vals, keep, n):
    out = {}
    for mono, c in p.items():
        new = [0] * n
        for i, e in enumerate(mono):
            if not e:
                continue
            if vals[i] is not None:
                c = c * vals[i] ** e
            else:
                new[keep[i]] = e
        if c:
            out = padd(out, {tuple(new): c})
    return out


def format_poly(p, names) -> str:
    if not p:
        return "0"
    parts = []
    for mono in sorted(p, reverse=True):
        c = p[mono]
        factors = []
        for name, e in zip(names, mono):
            if e == 1:
                factors.append(name)
            elif e:
                factors.append(f"{name}^{e}")
        sign = "-" if c < 0 else "+"
        a = abs(c)
        if not factors:
            body = format_rational(a)
        elif a == 1:
            body = "*".join(factors)
        else:
            body = format_rational(a) + "*" + "*".join(factors)
        parts.append((sign, body))
    first_sign, first = parts[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


def parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"not an exact rational: {text!r}") from exc
