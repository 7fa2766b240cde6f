"""Text fixtures, generator files and deterministic JSON documents."""
from __future__ import annotations

import json
import re

from .errors import ParseError
from .expr import Expr
from .geometry import INDICES, Christoffel, label, parse_label
from .grammar import parse_expr, parse_field, tokenize
from .scalars import RESERVED, ParamSpace

_PARAMS_HEADER = re.compile(r"#\s*params\s*:(.*)", re.IGNORECASE)


def read_fixture_entries(text: str) -> tuple[dict, list[str]]:
    """``({(i, j, k): expr text}, declared params)`` from ``G[i][j][k] = <expr>`` lines."""
    entries: dict = {}
    params: list[str] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            m = _PARAMS_HEADER.fullmatch(line)
            if m:
                params += [p for p in re.split(r"[,\s]+", m.group(1).strip()) if p]
            continue
        lhs, sep, rhs = line.partition("=")
        if not sep or not rhs.strip():
            raise ParseError(f"line {lineno}: expected 'G[i][j][k] = <expr>', got {raw!r}")
        idx = parse_label(lhs)
        if idx in entries:
            raise ParseError(f"line {lineno}: {label(idx)} given twice")
        entries[idx] = rhs.strip()
    return entries, params


def fixture_names(entries: dict, declared=()) -> list[str]:
    names = list(declared)
    for text in entries.values():
        for kind, tok in tokenize(text):
            if kind == "name" and tok not in RESERVED and tok not in names:
                names.append(tok)
    return names


def christoffel_from_entries(entries: dict, space: ParamSpace) -> Christoffel:
    out = {idx: Expr.zero(space) for idx in INDICES}
    for idx, text in entries.items():
        out[idx] = parse_expr(text, space)
    return Christoffel(out)


def write_fixture(gamma: Christoffel, params=(), header: str | None = None) -> str:
    lines = []
    if header:
        lines += [f"# {h}" for h in header.splitlines()]
    if params:
        lines.append("# params: " + ", ".join(params))
    lines += [f"{label(idx)} = {e}" for idx, e in gamma.items()]
    return "\n".join(lines) + "\n"


def read_generators(text: str, space: ParamSpace) -> list:
    """One ``(P) dx + (Q) dy`` field per non-comment line."""
    fields = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            try:
                fields.append(parse_field(line, space))
            except ParseError as exc:
                raise ParseError(f"line {lineno}: {exc}") from exc
    return fields


# --- JSON --------------------------------------------------------------------

def params_json(params: dict) -> dict:
    return {k: str(v) for k, v in sorted(params.items())}


def tensor_json(t) -> dict:
    return {label(idx): str(e) for idx, e in t.items()}


def solution_json(sol, r=None) -> dict:
    """The solver schema; key order is fixed."""
    doc = {
        "case": sol.case,
        "params": params_json(sol.params),
        "status": sol.status,
        "dimension": sol.dimension,
        "particular": tensor_json(sol.particular) if sol.particular is not None else None,
        "basis": [tensor_json(b) for b in sol.basis],
        "pivot_denominators": list(sol.pivot_denominators),
        "domain_notes": list(sol.domain_notes),
    }
    if r is not None:
        doc["r"] = r
    doc["certificate"] = sol.certificate
    doc["exceptional"] = [{"param": e["param"], "value": str(e["value"]), "kind": e["kind"],
                           "status": e["status"], "dimension": e["dimension"]} for e in sol.exceptional]
    doc["ansatz"] = sol.ansatz
    return doc


def fiber_json(case_id, params: dict, fib, r=None) -> dict:
    doc = {
        "case": case_id,
        "params": params_json(params),
        "point": [str(c) for c in fib.point],
        "status": fib.status,
        "dimension": fib.dimension,
        "particular": fib.particular.as_strings() if fib.particular is not None else None,
        "basis": [b.as_strings() for b in fib.basis],
        "isotropy": list(fib.isotropy),
        "jet_dimension": fib.jet_dimension,
        "linear_dimension": fib.linear_dimension,
        "certificate": fib.certificate,
    }
    if r is not None:
        doc["r"] = r
    return doc


def dumps(doc) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"
