import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dirichlet_moments.analysis import complex_gamma
from dirichlet_moments.lvalues import Shifts
from dirichlet_moments.weights import (
    WeightTable, decay_fit, g_factor, h_poly, rescaling_residual, rescaling_residual_mp, w_weight, w_weight_mp,
    weight_kernel,
)

T = Shifts((0.02, 0.01, -0.015), (-0.01, 0.005, 0.025))
ZERO = Shifts.zero()


def test_g_at_half_zero_shifts():
    assert abs(g_factor(0.5, ZERO) - complex_gamma(0.25) ** 6) <= 1e-12 * abs(complex_gamma(0.25) ** 6)


def test_g_permutation_invariance():
    t = Shifts((0.1, -0.05j, 0.02), (0.03, 0.07, -0.01))
    s = 0.5 + 0.3j
    ref = g_factor(s, t)
    for p in itertools.permutations(range(3)):
        tp = Shifts(tuple(t.alpha[i] for i in p), t.beta)
        assert abs(g_factor(s, tp) - ref) <= 1e-13 * abs(ref)


def test_g_decreasing_on_line():
    y = np.linspace(0, 20, 401)
    mags = np.abs(g_factor(0.5 + 1j * y, ZERO))
    assert np.all(np.diff(mags) < 0)


def test_h_examples():
    # nine (i, j) pairs, each (s^2)^3: s^54 at zero shifts
    assert h_poly(2.0, ZERO) == 2**54
    root = (T.alpha[0] - T.beta[0]) / 2
    assert abs(h_poly(root, T)) <= 1e-30
    ratios = [abs(h_poly(root + e, T)) / e**3 for e in (1e-2, 1e-3, 1e-4, 1e-5, 1e-6)]
    assert all(np.isfinite(ratios)) and ratios[-1] > 0
    # third order exactly: H / eps^3 settles to a nonzero limit
    assert abs(ratios[-1] / ratios[-2] - 1) < 0.05


def test_rescaling_identity_spec_point():
    # double precision cannot resolve W with the degree-54 kernel; the extended path can
    assert rescaling_residual_mp(3, 7, 1.5, 40, T) <= 1e-8
    assert rescaling_residual(3, 7, 1.5, 40, T, kernel="unit") <= 1e-8


def test_contour_independence():
    a = w_weight(3, 7, 1.5, T, abscissa=0.5).value
    b = w_weight(3, 7, 1.5, T, abscissa=2.0).value
    assert abs(a - b) <= 1e-8 * abs(a)


def test_extended_precision_agrees_with_double_where_conditioned():
    for xi, eta, mu in ((1.0, 2.0, 1.0), (30.0, 40.0, 2.0)):
        d = w_weight(xi, eta, mu, T, abscissa="auto")
        m = w_weight_mp(xi, eta, mu, T, abscissa=d.contour_abscissa)
        assert abs(d.value - m) <= 1e-10 * abs(m)


def test_decay_fit_then_verify():
    fit = decay_fit(T, np.linspace(1, 10, 19), np.linspace(10, 20, 21))
    assert fit["K"] > 0 and fit["worst_ratio"] <= 1


def test_decay_unit_kernel_left_endpoint():
    fit = decay_fit(T, [1.0], np.linspace(1, 20, 39), kernel="unit")
    assert fit["worst_ratio"] <= 1


def test_shift_permutation_symmetry():
    ref = w_weight(2.0, 5.0, 1.3, T, abscissa="auto").value
    for pa in itertools.permutations(range(3)):
        for pb in itertools.permutations(range(3)):
            tp = Shifts(tuple(T.alpha[i] for i in pa), tuple(T.beta[i] for i in pb))
            assert abs(w_weight(2.0, 5.0, 1.3, tp, abscissa="auto").value - ref) <= 1e-10 * abs(ref)


def test_table_matches_direct():
    kern = weight_kernel(T, "unit")
    tab = WeightTable(kern, -5.0, 25.0)
    u = np.linspace(-5, 25, 301)
    assert np.max(np.abs(tab(u) - kern.evaluate(u, 1.0))) < 1e-12
    with pytest.raises(ValueError):
        tab(np.array([30.0]))


def test_weight_errors():
    with pytest.raises(ValueError):
        w_weight(0, 1, 1, T)
    with pytest.raises(ValueError):
        w_weight(1, 1, 1, Shifts((0.01, 0, 0), (0.01, 0.2, 0.3)))  # alpha_1 = beta_1
    with pytest.raises(ValueError):
        weight_kernel(T, "gauss")


def test_remainder_reported():
    ev = w_weight(1.0, 1.0, 1.0, T)
    assert 0 <= ev.truncation_remainder < 1e-8 * abs(ev.value)


def _close(a, b, scale=1.0):
    # within the reported floating-point error of both evaluations
    slack = 10 * (a.roundoff + abs(scale) * b.roundoff) + 1e-12 * abs(a.value)
    return abs(a.value - scale * b.value) <= slack


@given(st.floats(0.05, 50), st.floats(0.05, 50), st.floats(0.2, 5), st.floats(1.5, 100))
@settings(max_examples=60, deadline=None)
def test_rescaling_unit_kernel_property(m, n, u, Q):
    left = w_weight(m, n, u * Q, T, "auto", "unit")
    right = w_weight(m / Q**1.5, n / Q**1.5, u, T, "auto", "unit")
    assert _close(left, right, Q**T.delta)


@given(st.floats(0.1, 20), st.floats(0.1, 20), st.floats(0.3, 3))
@settings(max_examples=40, deadline=None)
def test_w_depends_on_product_only(xi, eta, mu):
    a = w_weight(xi, eta, mu, T, "auto", "unit")
    b = w_weight(xi * eta, 1.0, mu, T, "auto", "unit")
    assert _close(a, b)


def test_decay_left_endpoint():
    # K fitted at y = 1 only; with h = H the scaled weight keeps growing past y = 1
    fit = decay_fit(T, [1.0], np.linspace(1, 20, 39))
    assert fit["worst_ratio"] <= 1
