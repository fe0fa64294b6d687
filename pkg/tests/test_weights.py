import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from expbergman.weights import (check_class_L, check_tau_comparability, make_weight, tau)


def test_omega_at_origin(w):
    assert w.omega(0.0) == pytest.approx(np.exp(-1.0), rel=1e-14)


def test_phi_at_half(w):
    assert w.phi(0.5) == pytest.approx(1.0, rel=1e-14)


def test_gamma_one_decays():
    w1 = make_weight(1.0, 1.0, 1.0)
    assert w1.omega(0.99) < 1e-40


def test_omega_phi_identity(rng):
    for params in [(0, 1, 1), (1, 1, 1), (2.5, 0.5, 3.0)]:
        wt = make_weight(*params)
        r = rng.uniform(0, 0.999, 1000)
        direct = (1 - r) ** wt.gamma * np.exp(-wt.b / (1 - r) ** wt.alpha)
        np.testing.assert_allclose(wt.omega(r), direct, rtol=1e-12)
        np.testing.assert_allclose(2 * wt.phi(r), -wt.gamma * np.log(1 - r) + wt.b / (1 - r) ** wt.alpha,
                                   rtol=1e-12)


def test_tau_at_half_matches_finite_difference_laplacian(w):
    # Laplacian of phi(|z|) at z = 1/2 from central differences along both axes
    h = 1e-4

    def P(x, y):
        return w.phi(np.hypot(x, y))

    lap = (P(0.5 + h, 0) - 2 * P(0.5, 0) + P(0.5 - h, 0)) / h**2 + (P(0.5, h) - 2 * P(0.5, 0) + P(0.5, -h)) / h**2
    assert lap == pytest.approx(12.0, rel=1e-6)
    assert tau(w, 0.5) == pytest.approx(12.0**-0.5, rel=1e-12)
    assert tau(w, 0.5) == pytest.approx(lap**-0.5, rel=1e-6)


def test_tau_boundary_scaling(w):
    r = np.linspace(0.5, 0.99, 200)
    ratio = w.tau(r) / (1 - r) ** 1.5
    assert ratio.min() > 0.5 and ratio.max() < 1.5


def test_tau_frozen_below_eps(w):
    assert tau(w, 0.0) == tau(w, w.eps_center) == tau(w, 0.01)


def test_tau_domain_error(w):
    with pytest.raises(ValueError):
        tau(w, 1.0)
    with pytest.raises(ValueError):
        tau(w, -0.1)


@pytest.mark.parametrize("name,kwargs", [
    ("gamma", dict(gamma=-1.0)),
    ("alpha", dict(alpha=0.0)),
    ("b", dict(b=-2.0)),
    ("eps_center", dict(eps_center=0.3)),
])
def test_make_weight_names_bad_parameter(name, kwargs):
    with pytest.raises(ValueError, match=name):
        make_weight(**kwargs)


def test_class_L_passes_for_model_weight(w):
    rep = check_class_L(w)
    assert rep.passed
    assert rep.m_tau <= 0.25
    assert rep.c1_est == pytest.approx(0.586, abs=0.01)


def test_class_L_fails_for_constant_tau():
    class ConstTau:
        def tau(self, r):
            return np.full(np.shape(r), 0.1)

    rep = check_class_L(ConstTau())
    assert not rep.condition_A
    assert not rep.passed


def test_class_L_needs_dense_grid(w):
    with pytest.raises(ValueError):
        check_class_L(w, np.linspace(0, 0.9, 50))


def test_tau_decreasing_beyond_peak(w):
    rep = check_class_L(w)
    r = np.linspace(rep.r_peak, 0.999, 5000)
    assert np.all(np.diff(w.tau(r)) < 0)


def test_tau_comparability_on_delta_disks(w, m_tau):
    rep = check_tau_comparability(w, m_tau / 2, n_pairs=500, seed=1)
    assert rep["passed"]


@settings(max_examples=40, deadline=None)
@given(gamma=st.floats(0, 3), alpha=st.floats(0.2, 3), b=st.floats(0.1, 5),
       r=st.floats(0, 0.995))
def test_tau_positive_and_finite(gamma, alpha, b, r):
    wt = make_weight(gamma, alpha, b)
    t = tau(wt, r)
    assert np.isfinite(t) and t > 0
    assert wt.psi(r) <= 1.0


@settings(max_examples=20, deadline=None)
@given(gamma=st.floats(0, 3), alpha=st.floats(0.3, 2), b=st.floats(0.2, 4))
def test_m_tau_at_most_quarter(gamma, alpha, b):
    assert check_class_L(make_weight(gamma, alpha, b)).m_tau <= 0.25
