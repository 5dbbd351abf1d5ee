import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dirichlet_moments.arith import divisors, euler_phi
from dirichlet_moments.characters import (
    conductor, count_primitive_even, enumerate_characters, gauss_sum, get_character, orthogonality_sides,
    phi_flat, primitive_even_characters,
)


def brute_conductor(chi):
    q = chi.modulus
    units = [a for a in range(q) if math.gcd(a, q) == 1]
    for d in divisors(q):
        if all(abs(chi(a) - chi(b)) < 1e-9 for a in units for b in units if (a - b) % d == 0):
            return d
    return q


def quadratic(q):
    return next(c for c in enumerate_characters(q)
                if c.index and all(abs(c(a).imag) < 1e-12 for a in range(q)))


@pytest.mark.parametrize("q, count", [(1, 1), (8, 4), (15, 8)])
def test_enumeration_counts(q, count):
    chars = enumerate_characters(q)
    assert len(chars) == count
    tables = {tuple(np.round(c.values, 9)) for c in chars}
    assert len(tables) == count
    assert chars[0].is_principal and conductor(chars[0]) == 1


def test_character_count_by_conductor():
    for q in range(1, 301):
        grp_conds = [c.conductor for c in enumerate_characters(q)]
        assert len(grp_conds) == euler_phi(q)
        assert sum(grp_conds.count(d) for d in divisors(q)) == euler_phi(q)


def test_conductor_examples():
    assert conductor(quadratic(5)) == 5
    induced = [c for c in enumerate_characters(9) if c.conductor == 3]
    assert len(induced) == 1 and brute_conductor(induced[0]) == 3
    assert all(abs(induced[0](a) - (1 if a % 3 == 1 else -1)) < 1e-12 for a in range(9) if a % 3)


def test_conductor_brute_force_oracle():
    for q in list(range(1, 41)) + [64, 72, 100]:
        for chi in enumerate_characters(q):
            assert chi.conductor == brute_conductor(chi) == conductor(chi)


@pytest.mark.parametrize("q", range(1, 121))
def test_value_table_invariants(q):
    for chi in enumerate_characters(q):
        v = chi.values
        unit = np.array([math.gcd(a, q) == 1 for a in range(q)])
        assert np.all((np.abs(v) > 0.5) == unit)
        assert chi.is_even == (abs(v[(q - 1) % q] - 1) < 1e-12)


def test_multiplicativity_sampled():
    rng = np.random.default_rng(5)
    for q in rng.integers(2, 400, size=25):
        q = int(q)
        chars = enumerate_characters(q)
        for _ in range(40):
            chi = chars[int(rng.integers(len(chars)))]
            a, b = (int(x) for x in rng.integers(1, q, size=2))
            if math.gcd(a * b, q) != 1:
                continue
            assert abs(chi(a) * chi(b) - chi(a * b)) < 1e-12


@pytest.mark.parametrize("q, count", [(3, 0), (5, 1), (6, 0), (10, 0), (14, 0)])
def test_count_primitive_even(q, count):
    assert count_primitive_even(q) == count


def test_phi_flat_closed_form_matches_enumeration():
    for q in range(1, 301):
        brute = sum(1 for c in enumerate_characters(q) if c.is_primitive and c.is_even)
        assert phi_flat(q) == count_primitive_even(q) == brute


def test_gauss_sum_examples():
    assert abs(gauss_sum(enumerate_characters(1)[0]).value - 1) < 1e-12
    assert abs(gauss_sum(quadratic(5)).value - math.sqrt(5)) < 1e-10


def test_gauss_sum_conjugate_for_even():
    for q in range(3, 101):
        for chi in primitive_even_characters(q):
            assert abs(gauss_sum(chi.conjugate()).value - np.conj(gauss_sum(chi).value)) < 1e-9


@pytest.mark.parametrize("q, m, n, value", [(5, 1, 1, 1), (4, 1, 1, 0), (3, 1, 1, 0)])
def test_orthogonality_examples(q, m, n, value):
    lhs, rhs = orthogonality_sides(q, m, n)
    assert abs(lhs - value) < 1e-12 and abs(rhs - value) < 1e-12


def test_orthogonality_rejects_common_factor():
    with pytest.raises(ValueError):
        orthogonality_sides(6, 2, 1)


def test_get_character_range():
    with pytest.raises(ValueError):
        get_character(7, 6)


@given(st.integers(2, 250), st.integers(1, 500), st.integers(1, 500))
@settings(max_examples=150, deadline=None)
def test_orthogonality_property(q, m, n):
    if math.gcd(m * n, q) != 1:
        return
    lhs, rhs = orthogonality_sides(q, m, n)
    assert abs(lhs - rhs) <= 1e-9
