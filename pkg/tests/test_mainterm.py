import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dirichlet_moments.arith import primes_up_to, tau3
from dirichlet_moments.characters import phi_flat
from dirichlet_moments.cutoffs import psi_default
from dirichlet_moments.lvalues import COSETS, Shifts
from dirichlet_moments.mainterm import (
    a3_constant, a3_constant_printed, a_product, b_q, bp_local, bp_local_with_tail, corollary_density,
    corollary_leading, coset_representatives_from_s6, diagonal_term, main_term_model, predicted_moment, q_main,
    q_tilde, zeta_local,
)

T = Shifts((0.02, 0.01, -0.015), (-0.01, 0.005, 0.025))
# shifts wide enough that the 20 coset terms can be summed in double precision as a cross-check
WIDE = Shifts((0.21, 0.13 + 0.05j, -0.17), (-0.11, 0.06, 0.29 - 0.04j))
ZERO = Shifts.zero()


def conj_each(t):
    return Shifts(tuple(np.conj(t.alpha)), tuple(np.conj(t.beta)))


def permuted(t, pa, pb):
    return Shifts(tuple(t.alpha[i] for i in pa), tuple(t.beta[i] for i in pb))


def test_bp_limits_and_direct_sum():
    assert abs(bp_local(3, 20, T) - 1) < 1e-12
    direct = math.fsum(((r + 1) * (r + 2) // 2) ** 2 / 2**r for r in range(200))
    assert all(tau3(2**r) == (r + 1) * (r + 2) // 2 for r in range(60))
    assert abs(bp_local(2, 0.5, ZERO) - direct) < 1e-12
    val, tail = bp_local_with_tail(2, 0.5, ZERO)
    assert 0 <= tail < 1e-14


def test_bp_permutation_and_domain():
    ref = bp_local(5, 0.6, WIDE)
    for pa in itertools.permutations(range(3)):
        assert abs(bp_local(5, 0.6, permuted(WIDE, pa, (0, 1, 2))) - ref) < 1e-13
    with pytest.raises(ValueError):
        bp_local(2, 0.2, T)
    with pytest.raises(ValueError):
        bp_local(2, 0.5, T, rmax=5)


def test_zeta_local_examples():
    assert abs(zeta_local(2, 0.5, ZERO) - 2**9) < 1e-9
    # Z_2(1; 0, 0) = zeta_2(2)^9 with zeta_2(2) = 4/3
    assert abs(zeta_local(2, 1.0, ZERO) - (4 / 3) ** 9) < 1e-12
    s = 0.55 + 0.2j
    assert abs(zeta_local(7, s.conjugate(), conj_each(WIDE)) - np.conj(zeta_local(7, s, WIDE))) < 1e-12


def test_a_product_tail_honest():
    v3, v4, v5 = (a_product(0.5, WIDE, P) for P in (10**3, 10**4, 10**5))
    assert abs(np.log(v3.value / v4.value)) <= v3.tail_bound
    assert abs(np.log(v4.value / v5.value)) <= v4.tail_bound


def test_a_local_factor_decay():
    for p in primes_up_to(2000):
        p = int(p)
        if p < 50:
            continue
        f = bp_local(p, 0.5, ZERO) / zeta_local(p, 0.5, ZERO)
        assert abs(f - 1) <= 10 / p**2


def test_a_product_symmetry_and_region():
    ref = a_product(0.5, WIDE, 10**4).value
    for pa, pb in [((1, 0, 2), (0, 1, 2)), ((2, 1, 0), (1, 2, 0))]:
        assert abs(a_product(0.5, permuted(WIDE, pa, pb), 10**4).value - ref) < 1e-12 * abs(ref)
    with pytest.raises(ValueError):
        a_product(0.25, T)


def test_a_at_zero_shift_is_a3():
    a, c = a_product(0.5, ZERO), a3_constant()
    assert abs(math.log(a.value.real / c.value)) <= a.tail_bound + c.tail_bound


def test_a3_constant():
    a4, a5 = a3_constant(10**4), a3_constant(10**5)
    assert abs(math.log(a4.value / a5.value)) <= a4.tail_bound
    assert 0.04 < a5.value < 0.06


def test_a3_printed_product():
    assert a3_constant_printed(2).value == pytest.approx(195 / 64, rel=1e-15)
    parts = [a3_constant_printed(P).value for P in (100, 1000, 10**4, 10**5)]
    assert all(b > a for a, b in zip(parts, parts[1:]))
    with pytest.raises(ValueError):
        a3_constant(50)


def test_q_main_symmetry():
    ref = q_main(35, WIDE)
    for pa in itertools.permutations(range(3)):
        for pb in itertools.permutations(range(3)):
            assert abs(q_main(35, permuted(WIDE, pa, pb)) - ref) <= 1e-12 * abs(ref)


def test_q_main_new_prime_factor():
    qp = 15
    # Q(q) = (q/pi)^delta C / B_q: adding the prime 2 multiplies by 2^delta / B_2
    lhs = q_main(2 * qp, WIDE) * bp_local(2, 0.5, WIDE) / 2**WIDE.delta
    assert abs(lhs - q_main(qp, WIDE)) <= 1e-10 * abs(lhs)
    assert abs(b_q(30, 0.5, WIDE) - bp_local(2, 0.5, WIDE) * bp_local(3, 0.5, WIDE) * bp_local(5, 0.5, WIDE)) < 1e-12


def test_q_main_conjugation():
    ref = q_main(21, WIDE)
    assert abs(q_main(21, conj_each(WIDE)) - np.conj(ref)) <= 1e-12 * abs(ref)
    # (alpha, beta) -> (-conj beta, -conj alpha) is the other term-by-term conjugation
    assert abs(q_main(21, conj_each(WIDE).negated_swap()) - np.conj(ref)) <= 1e-12 * abs(ref)


def test_q_main_rejects_degenerate():
    with pytest.raises(ValueError):
        q_main(5, Shifts((0.01, 0.2, 0.3), (0.01, -0.1, -0.2)))


def test_coset_enumeration():
    assert len(COSETS) == 20 == math.comb(6, 3)
    gen = coset_representatives_from_s6()
    hand = {(frozenset(c), frozenset(set(range(6)) - set(c))) for c in COSETS}
    assert gen == hand


def test_q_tilde_is_coset_sum():
    q = 24
    direct = sum(q_main(q, WIDE.coset(c)) for c in COSETS)
    assert abs(q_tilde(q, WIDE) - direct) <= 1e-10 * abs(direct)


def test_q_tilde_as_s6_average():
    q = 13
    total = 0j
    for perm in itertools.permutations(range(6)):
        total += q_main(q, WIDE.permuted(perm))
    assert abs(total / 36 - q_tilde(q, WIDE)) <= 1e-9 * abs(total / 36)


def test_q_tilde_full_swap_invariance():
    for t in (WIDE, T):
        a, b = q_tilde(40, t), q_tilde(40, t.swapped())
        assert abs(a - b) <= 1e-10 * abs(a)


def test_q_tilde_partition():
    model = main_term_model(WIDE)
    parts = model.partition(40)
    sizes = {k: sum(1 for c in model.constants if sum(i >= 3 for i in c.left) == k) for k in range(4)}
    assert sizes == {0: 1, 1: 9, 2: 9, 3: 1}
    assert abs(sum(parts.values()) - model.q_tilde(40)) <= 1e-10 * abs(model.q_tilde(40))


def test_q_tilde_identifies_degenerate_coset():
    bad = Shifts((0.02, 0.01, 0.3), (0.3 + 1e-6, -0.05, 0.07))
    with pytest.raises(ValueError, match="coset"):
        main_term_model(bad)


def test_predicted_moment_examples():
    assert predicted_moment(1, T) == 0
    psi = psi_default()
    p1 = predicted_moment(30, WIDE, psi)
    assert abs(predicted_moment(30, WIDE, psi.scaled(2.0)) - 2 * p1) <= 1e-12 * abs(p1)
    assert abs(predicted_moment(30, WIDE.conj(), psi) - np.conj(p1)) <= 1e-10 * abs(p1)


def test_diagonal_support_and_coprimality():
    res = diagonal_term(20, WIDE, kernel="unit")
    qs = [q for q, _ in res.per_q]
    assert min(qs) > 20 and max(qs) < 40
    assert all(v == 0 for q, v in res.per_q if phi_flat(q) == 0)


def test_diagonal_tail_honest():
    a = diagonal_term(20, WIDE, kernel="unit")
    b = diagonal_term(20, WIDE, kernel="unit", mmax=2 * a.mmax)
    assert abs(a.value - b.value) <= max(a.tail, 1e-12 * abs(a.value))


def test_corollary_leading():
    vals = [corollary_leading(Q) for Q in (100, 200, 400, 800, 1600, 3200)]
    assert all(b >= a for a, b in zip(vals, vals[1:]))
    a3 = a3_constant().value
    q = 101
    expect = 42 * a3 * phi_flat(q) * (1 - 1 / q) ** 5 / (1 + 4 / q + 1 / q**2) * math.log(q) ** 9 / math.factorial(9)
    assert corollary_density(q, a3) == pytest.approx(expect, rel=1e-14)
    assert corollary_leading(102) - corollary_leading(100) == pytest.approx(expect, rel=1e-9)


def test_corollary_growth_band():
    # (log 2Q / log Q)^9 alone is about 3.5 at Q = 100, and the doubling ratio there is about 19.4
    vals = [corollary_leading(Q) for Q in (100, 200, 400, 800, 1600, 3200)]
    ratios = [b / a for a, b in zip(vals, vals[1:])]
    assert all(1 < r < 16 for r in ratios), ratios


@given(st.integers(2, 400))
@settings(max_examples=40, deadline=None)
def test_corollary_monotone_property(Q):
    if Q < 3:
        return
    assert corollary_leading(Q + 1) >= corollary_leading(Q)
