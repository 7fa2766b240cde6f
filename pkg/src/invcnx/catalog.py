"""The 28 local classes of finite-dimensional Lie algebras of vector fields on the plane.

Generators, parameters, constraints and expected outcomes live in
``data/catalog.json``; this module instantiates them.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources

from .errors import ConstraintViolated, ParamSpaceError, UnknownCase
from .geometry import Christoffel, LieAlgebraAction, parse_label
from .formats import christoffel_from_entries
from .grammar import parse_field
from .scalars import ParamSpace, parse_rational
from .solver import AnsatzProfile

CASE_IDS = tuple(range(1, 29))


@lru_cache(maxsize=1)
def load_catalog() -> dict:
    text = resources.files("invcnx").joinpath("data/catalog.json").read_text(encoding="utf-8")
    doc = json.loads(text)
    return {c["id"]: c for c in doc["cases"]}


def catalog_document() -> str:
    return resources.files("invcnx").joinpath("data/catalog.json").read_text(encoding="utf-8")


def _raw(case_id: int) -> dict:
    try:
        return load_catalog()[int(case_id)]
    except (KeyError, ValueError):
        raise UnknownCase(f"no catalog case {case_id!r} (valid: 1..28)") from None


def _satisfies(rule: dict, value: Fraction) -> bool:
    v = abs(value) if rule.get("abs") else value
    if rule.get("nonzero") and value == 0:
        return False
    if "lower" in rule:
        lo = Fraction(rule["lower"])
        if v < lo or (rule.get("lower_strict") and v == lo):
            return False
    if "upper" in rule:
        hi = Fraction(rule["upper"])
        if v > hi or (rule.get("upper_strict") and v == hi):
            return False
    return True


@dataclass(frozen=True)
class CaseSpec:
    id: int
    structure: str
    family: str
    transitive: bool
    primitive: bool
    params: tuple
    constraints: tuple
    r: int | None
    r_values: tuple | None
    generators: tuple               # strings
    bindings: tuple                 # ((name, Fraction | None), ...); None = symbolic
    action: LieAlgebraAction
    profile: AnsatzProfile
    base_points: tuple
    param_samples: dict
    surface: dict | None
    notes: tuple = field(default=())

    def admissible(self, bindings: dict) -> bool:
        for rule in self.constraints:
            name = rule["param"]
            if name in bindings and bindings[name] is not None:
                if not _satisfies(rule, Fraction(bindings[name])):
                    return False
        return True

    @property
    def constraint_text(self) -> list[str]:
        return [rule["text"] for rule in self.constraints]

    @property
    def symbolic(self) -> tuple:
        return tuple(n for n, v in self.bindings if v is None)


def normalize_params(spec_or_id, params) -> tuple:
    """``((name, Fraction or None), ...)`` in declaration order."""
    raw = _raw(spec_or_id.id if isinstance(spec_or_id, CaseSpec) else spec_or_id)
    params = dict(params or {})
    unknown = set(params) - set(raw["params"])
    if unknown:
        raise ParamSpaceError(f"case {raw['id']} has no parameter(s) {sorted(unknown)}; "
                              f"declared: {raw['params']}")
    out = []
    for name in raw["params"]:
        v = params.get(name, "symbolic")
        if v is None or (isinstance(v, str) and v.strip() == "symbolic"):
            out.append((name, None))
        else:
            out.append((name, parse_rational(v) if isinstance(v, str) else Fraction(v)))
    return tuple(out)


def _resolve_r(raw: dict, r) -> int | None:
    if raw["r_values"] is None:
        if r is not None:
            raise ConstraintViolated(f"case {raw['id']} has no r parameter")
        return None
    r = raw["r_values"][0] if r is None else int(r)
    if r not in raw["r_values"]:
        raise ConstraintViolated(f"case {raw['id']} is encoded for r in {raw['r_values']}, not r = {r}")
    return r


@lru_cache(maxsize=256)
def _instantiate(case_id: int, bindings: tuple, r) -> CaseSpec:
    raw = _raw(case_id)
    gens = raw["generators"][str(r)] if r is not None else raw["generators"]
    rate = raw["exp_rate"]
    rate = rate if rate in raw["params"] else (Fraction(rate) if rate is not None else None)
    full = ParamSpace(raw["params"], rate)
    fields = [parse_field(text, full) for text in gens]
    bound = {n: v for n, v in bindings if v is not None}
    if bound:
        fields = [f.subs(bound) for f in fields]
    constraints = tuple(raw["constraints"])
    action = LieAlgebraAction(tuple(fields), tuple(n for n, v in bindings if v is None),
                              tuple(c["text"] for c in constraints), tuple(gens))
    hints = raw.get("ansatz") or {}
    profile = AnsatzProfile(**hints)
    points = tuple(tuple(Fraction(v) for v in p) for p in raw["base_points"])
    samples = {k: [Fraction(v) for v in vs] for k, vs in raw["param_samples"].items()}
    return CaseSpec(raw["id"], raw["structure"], raw["family"], raw["transitive"], raw["primitive"],
                    tuple(raw["params"]), constraints, r, tuple(raw["r_values"] or ()) or None,
                    tuple(gens), bindings, action, profile, points, samples, raw["surface"],
                    tuple(raw["notes"]))


def get_case(case_id: int, params=None, r: int | None = None) -> CaseSpec:
    """Instantiate a case; unbound parameters stay symbolic."""
    raw = _raw(case_id)
    r = _resolve_r(raw, r)
    bindings = normalize_params(case_id, params)
    for rule in raw["constraints"]:
        value = dict(bindings).get(rule["param"])
        if value is not None and not _satisfies(rule, value):
            raise ConstraintViolated(f"case {case_id}: {rule['param']} = {value} violates {rule['text']}")
    return _instantiate(int(case_id), bindings, r)


@dataclass
class Expectation:
    status: str                               # unique | empty | dim | characterized | none
    dimension: int | None = None
    zero: bool = False
    fixture: Christoffel | None = None
    fixture_params: tuple = ()
    free: tuple = ()
    rule: str | None = None
    notes: list = field(default_factory=list)
    surface: dict | None = None
    statement_variant: Christoffel | None = None    # differing published display, if any

    def describe(self) -> str:
        if self.status == "unique":
            return "unique (zero)" if self.zero else "unique"
        if self.status == "dim":
            return f"dim {self.dimension}"
        if self.status == "characterized":
            return "characterized (infinite-dimensional)"
        return self.status


def fixture_christoffel(entries: dict, fixture_params, spec: CaseSpec) -> Christoffel:
    """Parse fixture entries with the case's parameters, then apply its bindings."""
    raw = _raw(spec.id)
    rate = raw["exp_rate"]
    rate = rate if rate in raw["params"] else (Fraction(rate) if rate is not None else None)
    space = ParamSpace(tuple(raw["params"]) + tuple(fixture_params), rate)
    gamma = christoffel_from_entries({parse_label(k): v for k, v in entries.items()}, space)
    bound = {n: v for n, v in spec.bindings if v is not None}
    return gamma.subs(bound) if bound else gamma


def expected_result(case_id: int, params=None, r: int | None = None) -> Expectation:
    raw = _raw(case_id)
    spec = get_case(case_id, params, r=r)
    exp = dict(raw["expectation"])
    notes = list(raw["notes"])
    bound = {n: v for n, v in spec.bindings if v is not None}
    for special in exp.pop("special", []):
        when = {k: Fraction(v) for k, v in special["when"].items()}
        if all(bound.get(k) == v for k, v in when.items()):
            exp = {**exp, **{k: v for k, v in special.items() if k != "when"}, "zero": False}
            notes.append("special parameter value " + ", ".join(f"{k} = {v}" for k, v in when.items()))
        elif spec.symbolic and set(when) <= set(spec.symbolic):
            notes.append("generic answer; changes at " + ", ".join(f"{k} = {v}" for k, v in when.items()))
    r_only = exp.pop("r_only", None)
    if r_only is not None:
        allowed = r_only if isinstance(r_only, list) else [r_only]
        if spec.r not in allowed:
            return Expectation("none", notes=notes + [f"no expectation recorded for r = {spec.r}"],
                               surface=raw["surface"])
    fixture = variant = None
    fixture_params = exp.get("fixture_params", [])
    if "fixture" in exp:
        fixture = fixture_christoffel(exp["fixture"], fixture_params, spec)
    if "statement_variant" in exp:
        variant = fixture_christoffel({**exp["fixture"], **exp["statement_variant"]}, fixture_params, spec)
    return Expectation(exp["status"], exp.get("dimension"), exp.get("zero", False), fixture,
                       tuple(fixture_params), tuple(exp.get("free", ())), exp.get("rule"),
                       notes, raw["surface"], variant)


def parameter_regimes(case_id: int, r: int | None = None) -> list[dict]:
    """Symbolic plus the sampled rational values of every parameter."""
    spec = get_case(case_id, r=r)
    if not spec.params:
        return [{}]
    regimes = [{}]
    for name, values in spec.param_samples.items():
        regimes += [{name: v} for v in values]
    return regimes
