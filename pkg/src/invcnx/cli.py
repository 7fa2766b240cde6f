"""Command-line interface.

Exit codes: 0 success, 1 usage or input error, 2 expectation mismatch or
failed verification, 3 internal error.
"""
from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .catalog import catalog_document, expected_result, get_case, load_catalog
from .errors import (ConstraintViolated, InvcnxError, ParamSpaceError, ParseError, UnknownCase)
from .fiber import fiber_fixed_space
from .formats import (christoffel_from_entries, dumps, fiber_json, fixture_names, params_json,
                      read_fixture_entries, read_generators, solution_json)
from .geometry import LieAlgebraAction, lie_bracket, verify_invariance
from .grammar import infer_space, parse_field
from .linalg import express_in_span
from .report import run_full_report
from .scalars import ParamSpace, parse_rational
from .solver import AnsatzProfile, invariant_connection_space, solve_action

USAGE_ERRORS = (UnknownCase, ConstraintViolated, ParamSpaceError, ParseError)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _param(text: str) -> tuple[str, str]:
    name, sep, value = text.partition("=")
    if not sep or not name.strip():
        raise argparse.ArgumentTypeError(f"expected name=value or name=symbolic, got {text!r}")
    value = value.strip()
    if value != "symbolic":
        try:
            parse_rational(value)
        except (ValueError, ZeroDivisionError, ParseError):
            raise argparse.ArgumentTypeError(f"{value!r} is neither a rational nor 'symbolic'") from None
    return name.strip(), value


def _point(text: str) -> tuple[Fraction, Fraction]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected x,y, got {text!r}")
    try:
        return tuple(parse_rational(p.strip()) for p in parts)
    except (ValueError, ZeroDivisionError, ParseError):
        raise argparse.ArgumentTypeError(f"coordinates must be rationals: {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--case", type=int, help="catalog case 1..28")
    common.add_argument("--param", type=_param, action="append", default=[], metavar="NAME=VALUE",
                        help="bind a parameter to a rational, or keep it symbolic (default)")
    common.add_argument("--r", type=int, help="r for the cases carrying it")
    common.add_argument("--format", choices=("json", "markdown"), default="markdown")

    parser = _Parser(prog="invcnx", description="Invariant affine connections of Lie algebras of "
                                                "vector fields on the plane.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", parents=[common], help="solve for the invariant connections")
    p.add_argument("--generators", type=Path, help="file of '(P) dx + (Q) dy' lines instead of --case")
    p.add_argument("--window", type=int, help="Laurent exponent window of the ansatz")

    p = sub.add_parser("verify", parents=[common], help="check a Christoffel fixture for invariance")
    p.add_argument("--fixture", type=Path, required=True)
    p.add_argument("--generators", type=Path)

    p = sub.add_parser("fiber", parents=[common], help="isotropy fixed points at a base point")
    p.add_argument("--point", type=_point, help="x,y (default: the case's first base point)")
    p.add_argument("--generators", type=Path)

    p = sub.add_parser("bracket", parents=[common], help="brackets of the generators, or of two fields")
    p.add_argument("--field", action="append", default=[], help="a field '(P) dx + (Q) dy'; give two")
    p.add_argument("--generators", type=Path)

    p = sub.add_parser("report", parents=[common], help="reproduce every catalog case")
    p.add_argument("--workers", type=int, default=1)

    sub.add_parser("catalog", parents=[common], help="dump the case catalog")
    return parser


# --- helpers -------------------------------------------------------------------

def _params(args) -> dict:
    return dict(args.param)


def _custom_action(path: Path, extra_texts=()) -> LieAlgebraAction:
    text = path.read_text(encoding="utf-8")
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    space = infer_space([ln for ln in lines if ln] + list(extra_texts))
    fields = read_generators(text, space)
    if not fields:
        raise ParseError(f"{path}: no generators")
    return LieAlgebraAction(tuple(fields), space.params)


def _bind_custom(g: LieAlgebraAction, params: dict) -> LieAlgebraAction:
    bound = {k: parse_rational(v) for k, v in params.items() if v != "symbolic"}
    unknown = set(bound) - set(g.space.params)
    if unknown:
        raise ParamSpaceError(f"no parameter(s) {sorted(unknown)} in the generators")
    if not bound:
        return g
    gens = tuple(A.subs(bound) for A in g.generators)
    return LieAlgebraAction(gens, tuple(p for p in g.space.params if p not in bound), g.constraints,
                            g.labels)


def _require_case(args):
    if args.case is None and getattr(args, "generators", None) is None:
        raise UsageError(f"invcnx {args.command}: give --case N" +
                         (" or --generators FILE" if hasattr(args, "generators") else ""))


def _emit(out, args, doc, markdown):
    out.write(dumps(doc) if args.format == "json" else markdown(doc))


# --- markdown renderers -----------------------------------------------------------

def _md_tensor(t: dict | None) -> list[str]:
    if not t:
        return ["(none)"]
    nonzero = [f"    {k} = {v}" for k, v in t.items() if v != "0"]
    return nonzero or ["    all symbols 0"]


def _md_solution(doc) -> str:
    head = f"case {doc['case']}" if doc["case"] is not None else "custom algebra"
    lines = [f"# {head}"]
    if doc["params"]:
        lines.append("params: " + ", ".join(f"{k} = {v}" for k, v in doc["params"].items()))
    if "r" in doc:
        lines.append(f"r = {doc['r']}")
    lines.append(f"ansatz: {doc['ansatz']}")
    if doc["status"] == "empty":
        lines.append("status: empty (no invariant connection)")
        lines.append(f"certificate: {doc['certificate']}")
    else:
        lines.append(f"status: nonempty, dimension {doc['dimension']}")
        lines.append("particular:")
        lines += _md_tensor(doc["particular"])
        for n, b in enumerate(doc["basis"], 1):
            lines.append(f"direction {n}:")
            lines += _md_tensor(b)
    if doc["domain_notes"]:
        lines.append("negative powers of: " + ", ".join(doc["domain_notes"]))
    if doc["pivot_denominators"]:
        lines.append("parametric pivots: " + ", ".join(doc["pivot_denominators"]))
    for e in doc["exceptional"]:
        lines.append(f"at {e['param']} = {e['value']}: {e['kind']} ({e['status']}, dimension {e['dimension']})")
    return "\n".join(lines) + "\n"


def _md_fiber(doc) -> str:
    point = "(" + ", ".join(doc["point"]) + ")"
    lines = [f"# fiber at {point}" + (f", case {doc['case']}" if doc["case"] is not None else "")]
    if doc["params"]:
        lines.append("params: " + ", ".join(f"{k} = {v}" for k, v in doc["params"].items()))
    lines.append("isotropy: " + ("; ".join(doc["isotropy"]) or "0"))
    if doc["status"] == "empty":
        lines.append(f"status: empty\ncertificate: {doc['certificate']}")
    else:
        lines.append(f"status: nonempty, dimension {doc['dimension']}")
        lines.append("fixed value:")
        lines += _md_tensor(doc["particular"])
    lines.append(f"1-jet system dimension: {doc['jet_dimension']}")
    lines.append(f"linear part fixed dimension: {doc['linear_dimension']}")
    return "\n".join(lines) + "\n"


def _md_verify(doc) -> str:
    lines = [f"verify: {'pass' if doc['ok'] else 'FAIL'}"]
    for r in doc["residuals"]:
        lines.append(f"  generator {r['generator']} ({r['field']}):")
        lines += [f"    {k}: {v}" for k, v in r["components"].items()]
    if doc.get("expected"):
        lines.append(f"published verdict: {doc['expected']}")
    return "\n".join(lines) + "\n"


def _md_bracket(doc) -> str:
    lines = []
    for b in doc["brackets"]:
        combo = f"  = {b['combination']}" if b.get("combination") else ""
        lines.append(f"[{b['left']}, {b['right']}] = {b['value']}{combo}")
    if doc.get("closed") is not None:
        lines.append("closed under brackets: " + ("yes" if doc["closed"] else "no"))
    return "\n".join(lines) + "\n"


# --- subcommands -----------------------------------------------------------------

def cmd_solve(args, out) -> int:
    _require_case(args)
    params = _params(args)
    if args.generators is not None:
        g = _bind_custom(_custom_action(args.generators), params)
        profile = AnsatzProfile() if args.window is None else AnsatzProfile().with_window(args.window)
        sol = solve_action(g, profile)
        sol.params = params
        doc = solution_json(sol)
    else:
        sol = invariant_connection_space(args.case, params, r=args.r, window=args.window)
        doc = solution_json(sol, r=get_case(args.case, params, r=args.r).r)
    _emit(out, args, doc, _md_solution)
    return 0


def _fixture(args, g_space: ParamSpace, spec=None):
    text = args.fixture.read_text(encoding="utf-8")
    entries, declared = read_fixture_entries(text)
    if spec is not None:
        raw = load_catalog()[spec.id]
        base = list(raw["params"])
        names = base + [n for n in fixture_names(entries, declared) if n not in base]
        rate = raw["exp_rate"]
        rate = rate if rate in raw["params"] else (Fraction(rate) if rate is not None else None)
        gamma = christoffel_from_entries(entries, ParamSpace(names, rate))
        bound = {n: v for n, v in spec.bindings if v is not None}
        return gamma.subs(bound) if bound else gamma
    names = list(g_space.params) + [n for n in fixture_names(entries, declared) if n not in g_space.params]
    return christoffel_from_entries(entries, ParamSpace(names, g_space.exp_rate))


def cmd_verify(args, out) -> int:
    _require_case(args)
    params = _params(args)
    expected = None
    if args.generators is not None:
        g = _bind_custom(_custom_action(args.generators), params)
        gamma = _fixture(args, g.space)
    else:
        spec = get_case(args.case, params, r=args.r)
        g = spec.action
        gamma = _fixture(args, g.space, spec)
        expected = expected_result(args.case, params, r=args.r).describe()
    rep = verify_invariance(g, gamma)
    doc = {"case": args.case, "params": params_json(params), "ok": rep.ok,
           "residuals": [{"generator": n + 1, "field": lab, "components": comps}
                         for n, lab, comps in rep.residuals]}
    if expected is not None:
        doc["expected"] = expected
    _emit(out, args, doc, _md_verify)
    return 0 if rep.ok else 2


def cmd_fiber(args, out) -> int:
    _require_case(args)
    params = _params(args)
    if args.generators is not None:
        g = _bind_custom(_custom_action(args.generators), params)
        if args.point is None:
            raise UsageError("invcnx fiber: --point is required with --generators")
        point, r = args.point, None
    else:
        spec = get_case(args.case, params, r=args.r)
        g = spec.action
        point = args.point if args.point is not None else spec.base_points[0]
        r = spec.r
    fib = fiber_fixed_space(g, point)
    _emit(out, args, fiber_json(args.case, params, fib, r=r), _md_fiber)
    return 0


def cmd_bracket(args, out) -> int:
    params = _params(args)
    if args.field:
        if len(args.field) != 2:
            raise UsageError("invcnx bracket: give exactly two --field values")
        space = infer_space(args.field)
        X, Y = (parse_field(f, space) for f in args.field)
        doc = {"brackets": [{"left": str(X), "right": str(Y), "value": str(lie_bracket(X, Y))}]}
        _emit(out, args, doc, _md_bracket)
        return 0
    _require_case(args)
    if args.generators is not None:
        g = _bind_custom(_custom_action(args.generators), params)
    else:
        g = get_case(args.case, params, r=args.r).action
    brackets = []
    closed = True
    n = len(g.generators)
    for i in range(n):
        for j in range(i + 1, n):
            br = lie_bracket(g.generators[i], g.generators[j])
            coeffs = express_in_span(g.generators, br)
            if coeffs is None:
                closed = False
                combo = None
            else:
                combo = " + ".join(f"({c})*A{k + 1}" for k, c in enumerate(coeffs) if c) or "0"
            brackets.append({"left": f"A{i + 1}", "right": f"A{j + 1}", "value": str(br),
                             "combination": combo})
    doc = {"case": args.case, "generators": {f"A{k + 1}": str(A) for k, A in enumerate(g.generators)},
           "brackets": brackets, "closed": closed}

    def md(d):
        head = "\n".join(f"{k} = {v}" for k, v in d["generators"].items())
        return head + "\n" + _md_bracket(d)

    _emit(out, args, doc, md)
    return 0 if closed else 2


def cmd_report(args, out) -> int:
    cases = (args.case,) if args.case is not None else tuple(sorted(load_catalog()))
    report = run_full_report(cases, workers=max(1, args.workers))
    if args.format == "json":
        out.write(dumps(report.as_json()))
    else:
        out.write(report.markdown())
    return 0 if report.ok else 2


def cmd_catalog(args, out) -> int:
    if args.case is None:
        out.write(catalog_document())
        return 0
    get_case(args.case)
    _emit(out, args, load_catalog()[args.case], lambda d: dumps(d))
    return 0


COMMANDS = {"solve": cmd_solve, "verify": cmd_verify, "fiber": cmd_fiber, "bracket": cmd_bracket,
            "report": cmd_report, "catalog": cmd_catalog}


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return COMMANDS[args.command](args, out)
    except UsageError as exc:
        err.write(f"{exc}\n")
        return 1
    except SystemExit as exc:      # --help and --version
        return int(exc.code or 0)
    except OSError as exc:
        err.write(f"invcnx: {exc}\n")
        return 1
    except USAGE_ERRORS as exc:
        err.write(f"invcnx: {type(exc).__name__}: {exc}\n")
        return 1
    except InvcnxError as exc:
        err.write(f"invcnx: {type(exc).__name__}: {exc}\n")
        return 3
    except Exception as exc:  # noqa: BLE001
        err.write(f"invcnx: internal error: {type(exc).__name__}: {exc}\n")
        return 3


if __name__ == "__main__":
    sys.exit(main())
