from fractions import Fraction

import pytest

from invcnx import LieAlgebraAction, ParamSpace, parse_field
from invcnx.catalog import CASE_IDS, get_case, parameter_regimes
from invcnx.errors import NotTransitive
from invcnx.fiber import (fiber_contains, fiber_fixed_space, is_transitive_at, isotropy_action,
                          isotropy_basis)
from invcnx.geometry import INDICES
from invcnx.solver import invariant_connection_space

S = ParamSpace()


def transitive_regimes():
    for c in CASE_IDS:
        spec = get_case(c)
        if not spec.transitive:
            continue
        for r in spec.r_values or (None,):
            for params in parameter_regimes(c, r):
                yield c, params, r


def test_transitivity_examples():
    assert is_transitive_at(get_case(2).action, (0, 1))
    assert not is_transitive_at(get_case(9).action, (1, 2))
    g20 = get_case(20, r=1).action
    for p in [(0, 1), (0, -3), (0, Fraction(1, 2))]:
        assert not is_transitive_at(g20, p)


def test_isotropy_case1_origin():
    g = get_case(1, {"alpha": "symbolic"}).action
    iso = isotropy_basis(g, (0, 0))
    assert len(iso) == 1
    assert iso[0].value_at((0, 0)) == (0, 0)
    # proportional to the rotation-dilation generator
    X = parse_field("(alpha*x + y) dx + (-x + alpha*y) dy", g.space)
    c = iso[0].value_at((0, 1))[0]           # X has x-component 1 at (0, 1)
    assert c and iso[0] == X.scale(c)


def test_isotropy_case18():
    g = get_case(18).action
    iso = isotropy_basis(g, (0, 1))
    assert len(iso) == 1
    target = parse_field("(x^2) dx + (x*y) dy", S)
    c = iso[0].value_at((1, 1))[0]
    assert c and iso[0] == target.scale(c)


def test_isotropy_translations_only():
    g = LieAlgebraAction((parse_field("(1) dx", S), parse_field("(1) dy", S)))
    assert isotropy_basis(g, (3, -1)) == []
    assert isotropy_action(g, (3, -1)).matrices == []


def test_fiber_examples():
    f18 = fiber_fixed_space(get_case(18).action, (0, 1))
    assert f18.dimension == 3 and not f18.empty
    f1 = fiber_fixed_space(get_case(1, {"alpha": "symbolic"}).action, (0, 0))
    assert f1.dimension == 0 and all(v == 0 for v in f1.particular.values)
    f8 = fiber_fixed_space(get_case(8).action, (0, 0))
    assert f8.empty and f8.certificate


def test_not_transitive_raises():
    with pytest.raises(NotTransitive):
        fiber_fixed_space(get_case(9).action, (0, 1))


def test_cross_method_agreement():
    for c, params, r in transitive_regimes():
        spec = get_case(c, params, r=r)
        sol = invariant_connection_space(c, params, r=r)
        for p in spec.base_points:
            fib = fiber_fixed_space(spec.action, p)
            assert fib.empty == sol.empty, (c, params, r, p)
            if not sol.empty:
                assert fib.dimension == sol.dimension, (c, params, r, p)
                assert fib.consistent_with_jets
                values = [sol.particular.entry(idx).value_at(p) for idx in INDICES]
                assert fiber_contains(spec.action, p, values), (c, params, r, p)
                for b in sol.basis:
                    bv = [b.entry(idx).value_at(p) for idx in INDICES]
                    assert fiber_contains(spec.action, p, bv, homogeneous=True)


def test_isotropy_rank_nullity():
    for c, params, r in transitive_regimes():
        spec = get_case(c, params, r=r)
        for p in spec.base_points:
            assert len(isotropy_basis(spec.action, p)) + 2 == len(spec.action), (c, p)


def test_isotropy_generators_vanish_at_point():
    for c, params, r in transitive_regimes():
        spec = get_case(c, params, r=r)
        p = spec.base_points[0]
        for X in isotropy_basis(spec.action, p):
            assert all(v == 0 for v in X.value_at(p))


def test_membership_rejects_perturbation():
    g = get_case(18).action
    sol = invariant_connection_space(18)
    p = (0, 1)
    values = [sol.particular.entry(idx).value_at(p) for idx in INDICES]
    assert fiber_contains(g, p, values)
    values[INDICES.index((1, 1, 1))] = values[INDICES.index((1, 1, 1))] + 1
    assert not fiber_contains(g, p, values)
