import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dirichlet_moments.arith import euler_phi
from dirichlet_moments.expsums import (
    HyperKloostermanPoisson,
    KloostermanPoisson,
    ProgressionPoisson,
    degenerate_hyper_suite,
    deligne_suite,
    hyper_kloosterman,
    hyper_kloosterman_row,
    inverse,
    kloosterman,
    kloosterman_row,
    poisson_residue_check,
    ramanujan_suite,
    ramanujan_sum,
    ramanujan_sum_direct,
    smith_suite,
    twisted_multiplicativity_suite,
    weil_suite,
)


def e(x):
    return cmath.exp(2j * math.pi * x)


def naive_kloosterman(a, b, c):
    return sum(e((a * x + b * pow(x, -1, c)) / c) for x in range(c) if math.gcd(x, c) == 1) if c > 1 else 1


def test_kloosterman_examples():
    assert kloosterman(3, 7, 1).value == pytest.approx(1)
    assert kloosterman(1, 1, 2).value == pytest.approx(1)
    assert kloosterman(1, 1, 5).value == pytest.approx(2 + 2 * math.cos(4 * math.pi / 5), abs=1e-12)
    assert abs(kloosterman(1, 1, 5).value - 0.381966) < 1e-6


@given(st.integers(-50, 50), st.integers(-50, 50), st.integers(1, 60))
def test_kloosterman_matches_naive(a, b, c):
    assert abs(kloosterman(a, b, c).value - naive_kloosterman(a, b, c)) < 1e-9


@given(st.integers(-30, 30), st.integers(1, 80))
def test_kloosterman_symmetric_argument_is_real(a, c):
    assert abs(kloosterman(a, a, c).value.imag) < 1e-9


@given(st.integers(0, 40), st.integers(1, 50))
def test_kloosterman_row_matches_direct(b, c):
    row = kloosterman_row(b, c)
    direct = np.array([kloosterman(k, b, c).value for k in range(c)])
    assert np.max(np.abs(row - direct)) < 1e-9


@given(st.integers(1, 200), st.integers(2, 200))
def test_inverse(x, r):
    if math.gcd(x, r) == 1:
        assert (inverse(x, r) * x) % r == 1
    else:
        with pytest.raises(ValueError):
            inverse(x, r)


def test_hyper_examples():
    assert hyper_kloosterman(4, 5, 6, 1).value == pytest.approx(1)
    for f, g, h in [(1, 1, 1), (1, 2, 4), (0, 0, 0), (3, 5, 8)]:
        assert hyper_kloosterman(f, g, h, 2).value == pytest.approx((-1) ** (f + g + h))


@settings(max_examples=30)
@given(st.integers(-10, 10), st.integers(-10, 10), st.integers(-10, 10), st.integers(1, 14))
def test_hyper_matches_naive(f, g, h, r):
    units = [a for a in range(r) if math.gcd(a, r) == 1] if r > 1 else [0]
    ref = 0j
    for a in units:
        for b in units:
            inv = pow(a * b, -1, r) if r > 1 else 0
            ref += e((a * f + b * g + inv * h) / r)
    assert abs(hyper_kloosterman(f, g, h, r).value - ref) < 1e-9


@settings(max_examples=20)
@given(st.integers(0, 20), st.integers(0, 20), st.integers(1, 25))
def test_hyper_row_matches_direct(f, h, r):
    row = hyper_kloosterman_row(f, h, r)
    direct = np.array([hyper_kloosterman(f, k, h, r).value for k in range(r)])
    assert np.max(np.abs(row - direct)) < 1e-8


def test_degenerate_middle_argument():
    res = degenerate_hyper_suite(rmax=60)
    assert res.passed, res


def test_ramanujan_examples():
    for r in (1, 2, 6, 12, 30, 97):
        assert ramanujan_sum(r, 0).value == euler_phi(r)
    for p in (2, 3, 5, 7, 13):
        for n in (1, 2, 4, 11):
            if n % p:
                assert ramanujan_sum(p, n).value == -1
    assert ramanujan_sum(6, 4).value == -1
    assert ramanujan_sum_direct(6, 4).value == pytest.approx(2 * math.cos(2 * math.pi / 3) + 0j, abs=1e-12)


@given(st.integers(1, 300), st.integers(-300, 300))
def test_ramanujan_closed_form_matches_direct(r, n):
    a = ramanujan_sum(r, n)
    b = ramanujan_sum_direct(r, n)
    assert a.method == "closed_form" and b.method == "direct"
    assert abs(a.value - b.value) <= 1e-9
    assert abs(b.value.imag) <= 1e-9


def test_modulus_validation():
    for bad in (0, -3):
        with pytest.raises(ValueError):
            kloosterman(1, 1, bad)
        with pytest.raises(ValueError):
            ramanujan_sum(bad, 1)


def test_weil_small_range():
    res = weil_suite(pmax=100)
    assert res.passed and res.worst <= 1


def test_deligne_small_range():
    res = deligne_suite(pmax=60, per_prime=5)
    assert res.passed and res.worst <= 1


def test_ramanujan_small_range():
    assert ramanujan_suite(rmax=60, nmax=60).passed


def test_twisted_multiplicativity():
    res = twisted_multiplicativity_suite(cmax=400)
    assert res.checked > 100 and res.passed, res


def test_poisson_progression_example():
    assert poisson_residue_check(ProgressionPoisson(7, 2, 3, 1, 6, 10.0)).residual <= 1e-6


def test_poisson_no_sieve():
    for r, f, g, n, E in [(7, 2, 3, 1, 10.0), (11, 1, 4, 5, 30.0), (5, 3, 3, 2, 17.5)]:
        assert poisson_residue_check(ProgressionPoisson(r, f, g, n, 1, E)).residual <= 1e-8


def test_poisson_kloosterman_and_hyper_examples():
    assert poisson_residue_check(KloostermanPoisson(3, 2, 1, 4, 7, 6, 20.0)).residual <= 1e-6
    assert poisson_residue_check(HyperKloostermanPoisson(1, 2, 3, 1, 2, 5, 3, 12.0)).residual <= 1e-6


def test_poisson_rejects_hypothesis_violations():
    with pytest.raises(ValueError):
        poisson_residue_check(ProgressionPoisson(6, 2, 3, 1, 6, 10.0))
    with pytest.raises(ValueError):
        poisson_residue_check(KloostermanPoisson(3, 2, 7, 4, 7, 6, 20.0))
    with pytest.raises(ValueError):
        poisson_residue_check(HyperKloostermanPoisson(5, 2, 3, 1, 2, 5, 3, 12.0))
    with pytest.raises(ValueError):
        poisson_residue_check(ProgressionPoisson(7, 2, 3, 1, 6, -1.0))
    with pytest.raises(TypeError):
        poisson_residue_check((7, 2, 3, 1, 6, 10.0))


def test_smith_type_bound():
    # C is fitted on r <= 50 and then held fixed up to r = 300
    res = smith_suite()
    assert res.passed, (res.detail, res.worst)
