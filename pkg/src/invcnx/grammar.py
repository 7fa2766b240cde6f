"""Plain-text grammar for expressions and vector fields.

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := ("-" | "+") unary | power
    power  := atom ("^" ["-" | "+"] INT)?
    atom   := INT | NAME | "x" | "y" | "exp(" expr ")" | "(" expr ")"

``exp(...)`` must enclose a multiple ``k*x`` of the space's exponential rate
with ``k`` an integer.  Printing and parsing round-trip exactly.
"""
from __future__ import annotations

import re
from fractions import Fraction

from .errors import ClosureError, ParseError
from .expr import Expr
from .scalars import RESERVED, ParamScalar, ParamSpace, format_poly, format_rational

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(\*\*|[-+*/^()]))")


def tokenize(text: str) -> list[tuple[str, str]]:
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos:].strip()[:1]!r} in {text!r}")
        num, name, op = m.groups()
        if num is not None:
            tokens.append(("num", num))
        elif name is not None:
            tokens.append(("name", name))
        else:
            tokens.append(("op", "^" if op == "**" else op))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, text: str, space: ParamSpace):
        self.text = text
        self.tokens = tokenize(text)
        self.pos = 0
        self.space = space

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else (None, None)

    def take(self):
        tok = self.peek()
        if tok[0] is None:
            raise ParseError(f"unexpected end of input in {self.text!r}")
        self.pos += 1
        return tok

    def expect(self, value):
        kind, tok = self.take()
        if tok != value:
            raise ParseError(f"expected {value!r}, found {tok!r} in {self.text!r}")

    def parse(self) -> Expr:
        if not self.tokens:
            raise ParseError("empty expression")
        e = self.expr()
        if self.pos != len(self.tokens):
            raise ParseError(f"trailing input {self.tokens[self.pos][1]!r} in {self.text!r}")
        return e

    def expr(self):
        e = self.term()
        while self.peek() in (("op", "+"), ("op", "-")):
            _, op = self.take()
            rhs = self.term()
            e = e + rhs if op == "+" else e - rhs
        return e

    def term(self):
        e = self.unary()
        while self.peek() in (("op", "*"), ("op", "/")):
            _, op = self.take()
            rhs = self.unary()
            if op == "*":
                e = e * rhs
            else:
                try:
                    e = e / rhs
                except ZeroDivisionError as exc:
                    raise ParseError(f"division by zero in {self.text!r}") from exc
        return e

    def unary(self):
        if self.peek() == ("op", "-"):
            self.take()
            return -self.unary()
        if self.peek() == ("op", "+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            sign = 1
            if self.peek() in (("op", "-"), ("op", "+")):
                sign = -1 if self.take()[1] == "-" else 1
            kind, tok = self.take()
            if kind != "num":
                raise ParseError(f"exponent must be an integer in {self.text!r}")
            try:
                return base ** (sign * int(tok))
            except ZeroDivisionError as exc:
                raise ParseError(f"negative power of zero in {self.text!r}") from exc
        return base

    def atom(self):
        kind, tok = self.take()
        if kind == "num":
            return Expr.const(self.space, int(tok))
        if kind == "name":
            if tok == "x":
                return Expr.x(self.space)
            if tok == "y":
                return Expr.y(self.space)
            if tok == "exp":
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return self._exp(arg)
            return Expr.const(self.space, self.space.param(tok))
        if tok == "(":
            e = self.expr()
            self.expect(")")
            return e
        raise ParseError(f"unexpected {tok!r} in {self.text!r}")

    def _exp(self, arg: Expr) -> Expr:
        rate = self.space.rate()
        if rate is None:
            raise ParseError(f"exp(...) used but no exponential rate is declared: {self.text!r}")
        if arg.den != (0, 0) or set(arg.terms) - {(1, 0, 0)}:
            raise ParseError(f"exp argument must be a multiple of x: {self.text!r}")
        coeff = arg.terms.get((1, 0, 0), self.space.zero)
        k = (coeff / rate).constant()
        if k is None or k.denominator != 1:
            raise ParseError(f"exp argument is not an integer multiple of the rate {self.space.exp_rate}: "
                             f"{self.text!r}")
        return Expr.exp(self.space, int(k))


def parse_expr(text: str, space: ParamSpace | None = None) -> Expr:
    """Parse ``text``; the space defaults to the one inferred from the text."""
    if space is None:
        space = infer_space([text])
    try:
        return _Parser(text, space).parse()
    except ClosureError as exc:
        raise ParseError(str(exc)) from exc


def infer_space(texts, exp_rate=None) -> ParamSpace:
    """Parameter names in order of first appearance; the exp rate from the first exp(...)."""
    names: list[str] = []
    for text in texts:
        for kind, tok in tokenize(text):
            if kind == "name" and tok not in RESERVED and tok not in names:
                names.append(tok)
    if exp_rate is None:
        for text in texts:
            m = re.search(r"exp\(\s*([^()]*)\)", text)
            if m:
                exp_rate = _rate_from_arg(m.group(1), names)
                break
    return ParamSpace(names, exp_rate)


def _rate_from_arg(arg: str, names) -> str | Fraction:
    arg = arg.replace(" ", "")
    if not arg.endswith("x"):
        raise ParseError(f"exp argument must be a multiple of x: {arg!r}")
    head = arg[:-1].rstrip("*")
    if head in names:
        return head
    if head in ("", "+"):
        return Fraction(1)
    if head == "-":
        return Fraction(-1)
    try:
        return Fraction(head)
    except ValueError:
        raise ParseError(f"cannot read exponential rate from {arg!r}") from None


# --- printing --------------------------------------------------------------

def _format_rate(space: ParamSpace) -> str:
    rate = space.exp_rate
    if isinstance(rate, str):
        return f"exp({rate}*x)"
    if rate == 1:
        return "exp(x)"
    if rate == -1:
        return "exp(-x)"
    return f"exp({format_rational(rate)}*x)"


def _power(base: str, e: int) -> str:
    return base if e == 1 else f"{base}^{e}"


def _format_term(space, key, coeff: ParamScalar) -> tuple[str, str]:
    a, b, m = key
    factors = []
    if a:
        factors.append(_power("x", a))
    if b:
        factors.append(_power("y", b))
    if m:
        factors.append(_power(_format_rate(space), m))
    body = "*".join(factors)
    sign = "+"
    c = coeff.constant()
    if c is not None:
        if c < 0:
            sign, c = "-", -c
        text = format_rational(c)
        if body:
            return sign, body if c == 1 else f"{text}*{body}"
        return sign, text
    if coeff.den is None and len(coeff.num) == 1:
        (mono, v), = coeff.num.items()
        if v < 0:
            sign = "-"
            coeff = -coeff
        text = format_poly(coeff.num, space.params)
    elif coeff.den is None:
        text = f"({format_poly(coeff.num, space.params)})"
    else:
        text = str(coeff)
    return sign, f"{text}*{body}" if body else text


def _join(parts) -> str:
    first_sign, first = parts[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, text in parts[1:]:
        out += f" {sign} {text}"
    return out


def format_expr(e: Expr) -> str:
    from .expr import _order_key

    if not e.terms:
        return "0"
    parts = [_format_term(e.space, k, e.terms[k]) for k in sorted(e.terms, key=_order_key)]
    C, D = e.den
    if (C, D) == (0, 0):
        return _join(parts)
    poles = []
    if C:
        poles.append(f"(x-y)^-{C}")
    if D:
        poles.append(f"(1+x^2+y^2)^-{D}")
    if len(parts) == 1:
        sign, text = parts[0]
        if text == "1":
            return ("-" if sign == "-" else "") + "*".join(poles)
        return ("-" if sign == "-" else "") + "*".join([text] + poles)
    return "*".join([f"({_join(parts)})"] + poles)


def format_field(field) -> str:
    return f"({field.comp_x}) dx + ({field.comp_y}) dy"


def split_field(text: str) -> tuple[str, str]:
    """Split ``(P) dx + (Q) dy`` into component strings; either part may be omitted."""
    parts: dict[str, str] = {}
    rest = text.strip()
    bad = ParseError(f"expected '(expr) dx + (expr) dy', got {text!r}")
    while rest:
        sign = ""
        if rest[0] in "+-":
            sign, rest = rest[0], rest[1:].lstrip()
        elif parts:
            raise bad
        if not rest.startswith("("):
            raise bad
        depth = 0
        for i, ch in enumerate(rest):
            depth += (ch == "(") - (ch == ")")
            if depth == 0:
                break
        else:
            raise bad
        inner, rest = rest[1:i], rest[i + 1:].lstrip()
        tag, rest = rest[:2], rest[2:].lstrip()
        if tag not in ("dx", "dy") or tag in parts:
            raise bad
        parts[tag] = f"-({inner})" if sign == "-" else inner
    if not parts:
        raise bad
    return parts.get("dx", "0"), parts.get("dy", "0")


def parse_field(text: str, space: ParamSpace):
    from .geometry import VectorField

    a, b = split_field(text)
    return VectorField(parse_expr(a, space), parse_expr(b, space))
