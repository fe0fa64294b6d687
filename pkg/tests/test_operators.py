import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from expbergman.cli import operator_family, random_polynomials
from expbergman.operators import (OperatorSpec, SymbolPair, apply_GI, apply_GV, apply_Jg, apply_Vg,
                                  operator_norm_lower_bound)
from expbergman.series import (PowerSeries, compose, constant, differentiate, identity,
                               integrate_from_0, monomial, multiply)

ID = identity()
HALF = PowerSeries([0.0, 0.5])

coef = st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False)
poly = st.lists(coef, min_size=1, max_size=10).map(PowerSeries)
small_phi = st.lists(st.complex_numbers(max_magnitude=0.2, allow_nan=False, allow_infinity=False),
                     min_size=1, max_size=4).map(PowerSeries)


def exact(a: PowerSeries, b: PowerSeries, tol=1e-13):
    n = max(a.coeffs.size, b.coeffs.size)
    x = np.pad(a.coeffs, (0, n - a.coeffs.size))
    y = np.pad(b.coeffs, (0, n - b.coeffs.size))
    return np.max(np.abs(x - y), initial=0.0) <= tol * max(1.0, np.max(np.abs(y), initial=0.0))


def test_gi_identity_unit_symbol():
    f = PowerSeries([2.0, -1.0, 0.5, 3j])
    assert exact(apply_GI(SymbolPair(ID, constant(1.0)), f), f - constant(2.0))


def test_gi_constant_is_zero():
    out = apply_GI(SymbolPair(HALF, monomial(1)), constant(4.0))
    assert not np.any(out.coeffs)


def test_gi_hand_example():
    out = apply_GI(SymbolPair(HALF, monomial(1)), monomial(2))
    assert exact(out, monomial(3, 1 / 3))


def test_gv_of_one_integrates_g():
    g = PowerSeries([1.0, 2.0, -1j])
    assert exact(apply_GV(SymbolPair(HALF, g), constant(1.0)), integrate_from_0(g))


def test_gv_hand_example():
    assert exact(apply_GV(SymbolPair(HALF, constant(1.0)), monomial(1)), monomial(2, 0.25))


def test_vg_jg_examples():
    g = PowerSeries([3.0, 1.0, 2.0])
    assert exact(apply_Vg(g, constant(1.0)), g - constant(3.0))
    assert not np.any(apply_Jg(g, constant(5.0)).coeffs)


@settings(max_examples=50, deadline=None)
@given(f=poly, g=poly)
def test_integration_by_parts(f, g):
    lhs = apply_Vg(g, f) + apply_Jg(g, f)
    fg = multiply(f, g, f.degree_cap + g.degree_cap)
    assert exact(lhs, fg - constant(f.coeffs[0] * g.coeffs[0]))


@settings(max_examples=50, deadline=None)
@given(f=poly, g=poly)
def test_routing_matches_classical_operators(f, g):
    assert exact(apply_GV(SymbolPair(ID, differentiate(g)), f), apply_Vg(g, f))
    assert exact(apply_GI(SymbolPair(ID, g), f), apply_Jg(g, f))
    assert exact(OperatorSpec("Vg", g=g.to_pairs()).apply(f), apply_Vg(g, f))
    assert exact(OperatorSpec("Jg", g=g.to_pairs()).apply(f), apply_Jg(g, f))


@settings(max_examples=50, deadline=None)
@given(f=poly, g=poly, phi=small_phi)
def test_derivative_identity(f, g, phi):
    phi = PowerSeries(np.r_[phi.coeffs[:1], 0.5, phi.coeffs[1:]])
    s = SymbolPair(phi, g)
    out = apply_GI(s, f)
    df = differentiate(f)
    comp = compose(df, phi, df.degree_cap * (phi.degree_cap))
    rhs = multiply(comp, g, comp.degree_cap + g.degree_cap)
    assert exact(differentiate(out), rhs, tol=1e-11)


@settings(max_examples=40, deadline=None)
@given(f=poly, h=poly, g=poly, a=coef, b=coef)
def test_linearity(f, h, g, a, b):
    s = SymbolPair(HALF, g)
    for T in (apply_GI, apply_GV):
        cap = 40
        lhs = T(s, PowerSeries(a * np.pad(f.coeffs, (0, 12 - f.coeffs.size)))
                + PowerSeries(b * np.pad(h.coeffs, (0, 12 - h.coeffs.size))), cap)
        rhs = PowerSeries(a * T(s, f, cap).coeffs) + PowerSeries(b * T(s, h, cap).coeffs)
        assert exact(lhs, rhs, tol=1e-11)
        # linear in g as well
        s2 = SymbolPair(HALF, PowerSeries(a * g.coeffs))
        assert exact(T(s2, f, cap), PowerSeries(a * T(s, f, cap).coeffs), tol=1e-11)


def test_symbol_pair_rejects_non_self_map():
    with pytest.raises(ValueError):
        SymbolPair(PowerSeries([0.0, 1.2]), constant(1.0))
    with pytest.raises(ValueError):
        SymbolPair(PowerSeries([1.0]), constant(1.0))
    s = SymbolPair(PowerSeries([0.2, 0.5]), constant(1.0))
    assert s.certificate < 1


def test_operator_spec_round_trip():
    op = OperatorSpec("GI", phi=((0.1, 0.0), (0.5, 0.0)), g=((0.0, 1.0),))
    assert OperatorSpec.from_dict(op.to_dict()) == op
    assert OperatorSpec("Vg").family == "GV" and OperatorSpec("Jg").family == "GI"
    with pytest.raises(ValueError):
        OperatorSpec("Cphi")


def test_opnorm_zero_symbol(w, grid, m128):
    fam = operator_family(m128, grid, 2.0, 5, seed=0, r_limit=0.7)
    res = operator_norm_lower_bound(OperatorSpec("GV", g=((0.0, 0.0),)), 2, 2, fam, grid, w)
    assert res["best_ratio"] == 0.0


def test_opnorm_scales_with_g(w, grid, m128):
    fam = operator_family(m128, grid, 2.0, 8, seed=1, r_limit=0.7)
    one = operator_norm_lower_bound(OperatorSpec("GV", g=((1.0, 0.0), (0.5, 0.0))), 2, 2, fam, grid, w)
    two = operator_norm_lower_bound(OperatorSpec("GV", g=((2.0, 0.0), (1.0, 0.0))), 2, 2, fam, grid, w)
    assert two["best_ratio"] == pytest.approx(2 * one["best_ratio"], rel=1e-12)
    assert two["witness"] == one["witness"]


def test_opnorm_skips_zero_members(w, grid):
    fam = [PowerSeries([0.0]), constant(1.0)]
    with warnings.catch_warnings(record=True) as rec:
        warnings.simplefilter("always")
        res = operator_norm_lower_bound(OperatorSpec("GV"), 2, 2, fam, grid, w)
    assert any("skipped" in str(r.message) for r in rec)
    assert np.isnan(res["ratios"][0]) and res["witness"] == 1
    with pytest.raises(ValueError), pytest.warns(RuntimeWarning):
        operator_norm_lower_bound(OperatorSpec("GV"), 2, 2, fam[:1], grid, w)


def test_opnorm_volterra_stable(w, grid_fine, m640):
    op = OperatorSpec("GV")
    fam = operator_family(m640, grid_fine, 2.0, 10, seed=0)
    extra = random_polynomials(np.random.default_rng(1), 10, 30)
    b0 = operator_norm_lower_bound(op, 2, 2, fam, grid_fine, w)["best_ratio"]
    b1 = operator_norm_lower_bound(op, 2, 2, fam + extra, grid_fine, w)["best_ratio"]
    assert np.isfinite(b0) and abs(b1 - b0) / b0 < 0.05
