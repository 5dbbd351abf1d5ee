"""Euler products B_p, Z_p, A, B_q and the main terms Q, Q~, the diagonal term and a_3."""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import mpmath
import numpy as np

from .analysis import riemann_zeta
from .arith import factorize, primes_up_to, sigma_table
from .characters import phi_flat
from .cutoffs import WeightFunction, psi_default
from .lvalues import COSETS, Shifts
from .weights import WeightTable, h_poly, log_g_factor, log_x, prefactor, weight_kernel

SHIFT_FLOOR = 1e-4
DEFAULT_PRIME_CUT = 10**5
DIRECT_PRIMES = 200


@dataclass(frozen=True)
class EulerProductValue:
    value: complex
    prime_cut: int
    tail_bound: float  # bound on |log(full product) - log(truncated product)|


def _shift_excess(t: Shifts) -> float:
    """max(-Re alpha) + max(Re beta), floored at 0: growth of p^{-alpha} p^{beta} in p."""
    return max(0.0, max(-a.real for a in t.alpha) + max(b.real for b in t.beta))


def _elementary(v: np.ndarray) -> np.ndarray:
    """Elementary symmetric polynomials e_0..e_k of the columns of v (shape (n, k)), per row."""
    n, k = v.shape
    e = np.zeros((n, k + 1), dtype=complex)
    e[:, 0] = 1
    for j in range(k):
        e[:, 1:] = e[:, 1:] + v[:, j : j + 1] * e[:, :-1]
    return e


def _h_series(x: np.ndarray, R: int) -> np.ndarray:
    """Complete homogeneous h_0..h_R of three variables per row: sigma(p^r; .) for x = p^{-shift}."""
    e = _elementary(x)
    h = np.zeros((x.shape[0], R + 1), dtype=complex)
    h[:, 0] = 1
    for r in range(1, R + 1):
        acc = e[:, 1] * h[:, r - 1]
        if r >= 2:
            acc = acc - e[:, 2] * h[:, r - 2]
        if r >= 3:
            acc = acc + e[:, 3] * h[:, r - 3]
        h[:, r] = acc
    return h


def _local_arrays(p: np.ndarray, s: complex, t: Shifts, R: int):
    lp = np.log(p.astype(float))[:, None]
    x = np.exp(-np.array(t.alpha)[None, :] * lp)
    y = np.exp(np.array(t.beta)[None, :] * lp)
    z = np.exp(-2 * s * lp[:, 0])
    return x, y, z


def _required_terms(p: float, s: complex, t: Shifts, eps: float) -> int:
    rho = p ** (-2 * s.real + _shift_excess(t))
    if rho >= 1:
        raise ValueError(f"B_p series diverges at p={p}, s={s}")
    r = 10
    while (r + 2) ** 4 / 4 * rho**r > eps * (1 - rho):
        r += 1
    return r


def bp_local_with_tail(p: int, s: complex, t: Shifts, rmax: int = 10) -> tuple[complex, float]:
    s = complex(s)
    if s.real < 0.3:
        raise ValueError("B_p requires Re s >= 0.3")
    if rmax < 10:
        raise ValueError("rmax must be at least 10")
    R = max(rmax, _required_terms(p, s, t, 1e-17))
    x, y, z = _local_arrays(np.array([p]), s, t, R)
    hx, hy = _h_series(x, R), _h_series(y, R)
    terms = hx[0] * hy[0] * z[0] ** np.arange(R + 1)
    rho = p ** (-2 * s.real + _shift_excess(t))
    tail = abs(terms[-1]) * rho / (1 - rho) * ((R + 3) / (R + 2)) ** 4
    return complex(math.fsum(terms.real) + 1j * math.fsum(terms.imag)), float(tail)


def bp_local(p: int, s: complex, t: Shifts, rmax: int = 10) -> complex:
    """B_p(s) = sum_r sigma(p^r; alpha) sigma(p^r; -beta) p^{-2rs}."""
    return bp_local_with_tail(p, s, t, rmax)[0]


def zeta_local(p: int, s: complex, t: Shifts) -> complex:
    """Z_p(s) = prod_{i,j} (1 - p^{-(2s + alpha_i - beta_j)})^{-1}."""
    args = 2 * complex(s) + t.differences().ravel()
    if np.any(np.abs(args) == 0):
        raise ValueError("zeta_p has a pole at argument 0")
    return complex(np.prod(1 / (1 - np.exp(-args * math.log(p)))))


def _log_local_ratio(p: np.ndarray, s: complex, t: Shifts) -> np.ndarray:
    """log(B_p / Z_p) per prime, accurate relative to its own (small) size.

    The series of B_p * prod(1 - w z) starts 1 + 0*z + c_2 z^2 + ...; the z^1 coefficient
    vanishes identically, so it is dropped instead of computed as a difference.
    """
    R = max(_required_terms(float(p.min()), s, t, 1e-18), 12)
    x, y, z = _local_arrays(p, s, t, R)
    # fold p^{-s} into each variable: h_r and e_k are homogeneous, and this keeps every term bounded
    half = np.exp(-complex(s) * np.log(p.astype(float)))[:, None]
    x, y = x * half, y * half
    hx, hy = _h_series(x, R), _h_series(y, R)
    w = (x[:, :, None] * y[:, None, :]).reshape(len(p), 9)
    e = _elementary(w)
    b = hx * hy
    sgn = (-1) ** np.arange(10)
    ez = e * sgn[None, :]
    c = np.zeros_like(b)
    for k in range(10):
        c[:, k:] += ez[:, k : k + 1] * b[:, : R + 1 - k]
    E = c[:, 2:].sum(axis=1)
    return np.log1p(E)


def _tail_bound(p: np.ndarray, logs: np.ndarray, expo: float, P: int) -> float:
    if expo <= 1:
        raise ValueError("Euler product outside its region of absolute convergence")
    window = p > P / 2
    K = 2 * float(np.max(np.abs(logs[window]) * p[window].astype(float) ** expo)) if np.any(window) else 1.0
    return K * P ** (1 - expo) / (expo - 1)


@lru_cache(maxsize=256)
def a_product(s: complex, t: Shifts, prime_cut: int = DEFAULT_PRIME_CUT) -> EulerProductValue:
    """A(s) = prod_{p <= prime_cut} B_p(s) / Z_p(s), with a bound on the log of the neglected tail."""
    s = complex(s)
    expo = 4 * s.real - 2 * _shift_excess(t)
    if expo <= 1:
        raise ValueError(f"A(s) needs 4 Re s - 2*shift > 1, got {expo:.3g}")
    p = primes_up_to(prime_cut)
    # small primes directly (the factors are O(1) there), the rest through the cancellation-free series
    small = p[p < DIRECT_PRIMES]
    big = p[p >= DIRECT_PRIMES]
    direct = np.array([cmath.log(bp_local(int(q), s, t)) - cmath.log(zeta_local(int(q), s, t)) for q in small])
    series = [_log_local_ratio(big[i : i + 4096], s, t) for i in range(0, len(big), 4096)]
    logs = np.concatenate([direct.astype(complex)] + series)
    total = math.fsum(logs.real) + 1j * math.fsum(logs.imag)
    return EulerProductValue(complex(np.exp(total)), prime_cut, _tail_bound(p, logs, expo, prime_cut))


def a3_constant(prime_cut: int = DEFAULT_PRIME_CUT) -> EulerProductValue:
    """prod_p (1 - 1/p)^4 (1 + 4/p + 1/p^2), truncated at prime_cut."""
    if prime_cut < 100:
        raise ValueError("prime_cut must be at least 100")
    p = primes_up_to(prime_cut).astype(float)
    x = 1 / p
    logs = 4 * np.log1p(-x) + np.log1p(4 * x + x * x)
    return EulerProductValue(math.exp(math.fsum(logs)), prime_cut, _tail_bound(p, logs, 2.0, prime_cut))


def a3_constant_printed(prime_cut: int) -> EulerProductValue:
    """The literal product prod_p (1 - p^-4)(1 + 4/p + 1/p^2); it diverges, partial products grow like (log P)^4."""
    p = primes_up_to(prime_cut).astype(float)
    logs = np.log1p(-p**-4) + np.log1p(4 / p + 1 / p**2)
    return EulerProductValue(math.exp(math.fsum(logs)), prime_cut, math.inf)


def b_q(q: int, s: complex, t: Shifts) -> complex:
    out = 1 + 0j
    for p in factorize(q).primes:
        out *= bp_local(p, s, t)
    return out


def z_global(t: Shifts) -> complex:
    """prod_{i,j} zeta(1 + alpha_i - beta_j)."""
    t.check_admissible(SHIFT_FLOOR)
    out = 1 + 0j
    for d in t.differences().ravel():
        out *= riemann_zeta(1 + d)
    return out


def q_main(q: int, t: Shifts, prime_cut: int = DEFAULT_PRIME_CUT) -> complex:
    """Q(q; alpha, beta) = (q/pi)^delta G(1/2) A(1/2) Z(1/2) / B_q(1/2)."""
    t.check_admissible(SHIFT_FLOOR)
    A = a_product(0.5, t, prime_cut).value
    g = np.exp(log_g_factor(0.5, t))
    return complex(prefactor(q, t) * g * A * z_global(t) / b_q(q, 0.5, t))


# --- symmetrized main term in extended precision ---------------------------------------------


def _mp_bp(p: int, alpha, beta, eps) -> mpmath.mpc:
    lp = mpmath.log(p)
    x = [mpmath.exp(-a * lp) for a in alpha]
    y = [mpmath.exp(b * lp) for b in beta]
    ex = (x[0] + x[1] + x[2], x[0] * x[1] + x[0] * x[2] + x[1] * x[2], x[0] * x[1] * x[2])
    ey = (y[0] + y[1] + y[2], y[0] * y[1] + y[0] * y[2] + y[1] * y[2], y[0] * y[1] * y[2])
    hx = [mpmath.mpc(1), ex[0]]
    hy = [mpmath.mpc(1), ey[0]]
    z = mpmath.mpf(1) / p
    zr = z
    total = 1 + hx[1] * hy[1] * z
    r = 1
    while True:
        r += 1
        hx.append(ex[0] * hx[r - 1] - ex[1] * hx[r - 2] + (ex[2] * hx[r - 3] if r >= 3 else 0))
        hy.append(ey[0] * hy[r - 1] - ey[1] * hy[r - 2] + (ey[2] * hy[r - 3] if r >= 3 else 0))
        zr *= z
        term = hx[r] * hy[r] * zr
        total += term
        if abs(term) < eps and r > 4:
            return total


@lru_cache(maxsize=65536)
def _mp_log_bp(p: int, st: Shifts, dps: int) -> mpmath.mpc:
    with mpmath.workdps(dps):
        alpha = [mpmath.mpc(a) for a in st.alpha]
        beta = [mpmath.mpc(b) for b in st.beta]
        return mpmath.log(_mp_bp(p, alpha, beta, mpmath.mpf(10) ** (-dps - 5)))


def _mp_zp_inv(p: int, alpha, beta):
    lp = mpmath.log(p)
    out = mpmath.mpc(1)
    for a in alpha:
        for b in beta:
            out *= 1 - mpmath.exp(-(1 + a - b) * lp)
    return out


def _canonical(st: Shifts) -> Shifts:
    # A, G, Z and B_q are symmetric within each triple; a fixed order makes each coset term reproducible
    key = lambda z: (z.real, z.imag)
    return Shifts(tuple(sorted(st.alpha, key=key)), tuple(sorted(st.beta, key=key)))


@lru_cache(maxsize=512)
def _coset_log_constant(st: Shifts, prime_cut: int, mp_cut: int, dps: int):
    """log of pi^{-delta} G(1/2) A(1/2) Z(1/2) in extended precision, and delta."""
    with mpmath.workdps(dps):
        alpha = [mpmath.mpc(a) for a in st.alpha]
        beta = [mpmath.mpc(b) for b in st.beta]
        delta = (mpmath.fsum(alpha) - mpmath.fsum(beta)) / 2
        half = mpmath.mpf(1) / 2
        logc = -delta * mpmath.log(mpmath.pi)
        for a, b in zip(alpha, beta):
            logc += mpmath.loggamma((half + a) / 2) + mpmath.loggamma((half - b) / 2)
        for a in alpha:
            for b in beta:
                logc += mpmath.log(mpmath.zeta(1 + a - b))
        eps = mpmath.mpf(10) ** (-dps - 5)
        small = [int(p) for p in primes_up_to(mp_cut)]
        logc += mpmath.fsum(mpmath.log(_mp_bp(p, alpha, beta, eps) * _mp_zp_inv(p, alpha, beta)) for p in small)
        big = primes_up_to(prime_cut)
        big = big[big > mp_cut]
        if len(big):
            logs = np.concatenate([_log_local_ratio(big[i : i + 4096], 0.5 + 0j, st) for i in range(0, len(big), 4096)])
            logc += mpmath.mpc(math.fsum(logs.real), math.fsum(logs.imag))
        return logc, delta


@dataclass(frozen=True)
class CosetConstant:
    left: tuple[int, int, int]
    shifts: Shifts
    log_const: mpmath.mpc  # log of pi^{-delta} G(1/2) A(1/2) Z(1/2)
    delta: mpmath.mpc


class MainTermModel:
    """Per-coset q-independent constants for the symmetrized main term.

    The twenty coset terms are individually of size prod |alpha_i - beta_j|^{-1}
    and cancel down to the size of the sum, so every factor is carried in
    extended precision. Primes up to ``mp_cut`` are handled entirely in mpmath;
    primes in (mp_cut, prime_cut] contribute log(B_p/Z_p), which is computed in
    double precision with relative accuracy and is below p^{-2} in size.
    """

    def __init__(self, t: Shifts, prime_cut: int = DEFAULT_PRIME_CUT, mp_cut: int = 3000, dps: int = 50):
        self.shifts = t
        self.prime_cut = prime_cut
        self.mp_cut = mp_cut
        self.dps = dps
        self.constants: list[CosetConstant] = []
        with mpmath.workdps(dps):
            for left in COSETS:
                st = t.coset(left)
                try:
                    st.check_admissible(SHIFT_FLOOR)
                except ValueError as exc:
                    raise ValueError(f"coset {left} is degenerate: {exc}") from None
                st = _canonical(st)
                logc, delta = _coset_log_constant(st, prime_cut, mp_cut, dps)
                self.constants.append(CosetConstant(left, st, logc, delta))

    def _log_bq(self, q: int, st: Shifts) -> mpmath.mpc:
        return mpmath.fsum(_mp_log_bp(p, st, self.dps) for p in factorize(q).primes)

    def terms(self, q: int) -> list[mpmath.mpc]:
        with mpmath.workdps(self.dps):
            lq = mpmath.log(q)
            return [mpmath.exp(c.log_const + c.delta * lq - self._log_bq(q, c.shifts)) for c in self.constants]

    def q_tilde(self, q: int) -> complex:
        with mpmath.workdps(self.dps):
            return complex(mpmath.fsum(self.terms(q)))

    def partition(self, q: int) -> dict[int, complex]:
        """Partial sums grouped by how many beta entries were moved to the alpha side."""
        out: dict[int, list] = {0: [], 1: [], 2: [], 3: []}
        terms = self.terms(q)
        with mpmath.workdps(self.dps):
            for c, v in zip(self.constants, terms):
                out[sum(1 for i in c.left if i >= 3)].append(v)
            return {k: complex(mpmath.fsum(v)) for k, v in out.items()}


@lru_cache(maxsize=16)
def main_term_model(t: Shifts, prime_cut: int = DEFAULT_PRIME_CUT) -> MainTermModel:
    return MainTermModel(t, prime_cut)


def q_tilde(q: int, t: Shifts, prime_cut: int = DEFAULT_PRIME_CUT) -> complex:
    """Sum of Q(q; .) over the 20 cosets of S6/(S3 x S3)."""
    return main_term_model(t, prime_cut).q_tilde(q)


def coset_representatives_from_s6() -> set[tuple[frozenset, frozenset]]:
    """Cosets of S3 x S3 in S6 as (alpha-side, beta-side) index sets, generated from all 720 permutations."""
    return {(frozenset(p[:3]), frozenset(p[3:])) for p in itertools.permutations(range(6))}


def predicted_moment(Q: int, t: Shifts, psi: WeightFunction | None = None,
                     prime_cut: int = DEFAULT_PRIME_CUT) -> complex:
    """sum_q Psi(q/Q) phi_flat(q) Q~(q)."""
    psi = psi or psi_default()
    model = None
    acc_re, acc_im = [], []
    for q in support_moduli(Q, psi):
        f = phi_flat(q)
        wq = psi(q / Q)
        if f == 0 or wq == 0:
            continue
        if model is None:
            model = main_term_model(t, prime_cut)
        v = wq * f * model.q_tilde(q)
        acc_re.append(v.real)
        acc_im.append(v.imag)
    return complex(math.fsum(acc_re), math.fsum(acc_im))


def support_moduli(Q: int, psi: WeightFunction) -> list[int]:
    lo = math.floor(psi.lo * Q) + 1
    hi = math.ceil(psi.hi * Q) - 1
    return list(range(max(lo, 1), hi + 1))


def corollary_density(q: int, a3: float) -> float:
    """42 a_3 prod_{p | q} (1-1/p)^5 / (1 + 4/p + 1/p^2) phi_flat(q) (log q)^9 / 9!."""
    f = phi_flat(q)
    if f == 0:
        return 0.0
    loc = 1.0
    for p in factorize(q).primes:
        loc *= (1 - 1 / p) ** 5 / (1 + 4 / p + 1 / p**2)
    return 42 * a3 * loc * f * math.log(q) ** 9 / math.factorial(9)


def corollary_leading(Q: int, prime_cut: int = DEFAULT_PRIME_CUT) -> float:
    """The leading asymptotic for sum_{q <= Q} of the flat sixth moment, summed exactly over q."""
    if Q < 3:
        raise ValueError("Q must be at least 3")
    a3 = a3_constant(prime_cut).value
    return math.fsum(corollary_density(q, a3) for q in range(2, Q + 1))


# --- diagonal term ----------------------------------------------------------------------------


@dataclass(frozen=True)
class DiagonalResult:
    value: complex
    tail: float
    mmax: int
    per_q: tuple[tuple[int, complex], ...]


def _diag_u(m: np.ndarray, q: int) -> np.ndarray:
    return log_x(m.astype(float), m.astype(float), float(q))


def choose_mmax(Q: int, t: Shifts, psi: WeightFunction | None = None, kernel: str = "H", tol: float = 1e-8) -> int:
    """Smallest power of two beyond which the magnitude bound for W(m, m; q) drops below tol times its peak."""
    psi = psi or psi_default()
    kern = weight_kernel(t, kernel)
    qmax = max(support_moduli(Q, psi))
    u0 = float(_diag_u(np.array([1]), qmax)[0])
    uu = np.linspace(u0, u0 + 80, 1601)
    b = kern.magnitude_bound(uu)
    peak = b.max()
    m = 16
    while True:
        u = float(_diag_u(np.array([m]), qmax)[0])
        if float(kern.magnitude_bound(u)) * m < tol * peak:
            return m
        m *= 2


def diagonal_term(Q: int, t: Shifts, psi: WeightFunction | None = None, mmax: int | None = None,
                  kernel: str = "H", tol: float = 1e-8, strict: bool = False) -> DiagonalResult:
    """D = sum_q Psi(q/Q) phi_flat(q) sum_{m <= mmax, (m,q)=1} sigma(m;alpha) sigma(m;-beta)/m W(m,m;q)."""
    psi = psi or psi_default()
    if kernel == "H":
        t.check_admissible(0.0)
    mmax = mmax or choose_mmax(Q, t, psi, kernel, tol)
    kern = weight_kernel(t, kernel)
    M2 = 2 * mmax
    m = np.arange(1, M2 + 1)
    coef = (sigma_table(M2, t.alpha) * sigma_table(M2, tuple(-b for b in t.beta)))[1:] / m
    qs = support_moduli(Q, psi)
    table = WeightTable(kern, float(_diag_u(np.array([1]), max(qs))[0]) - 0.01,
                        float(_diag_u(np.array([M2]), min(qs))[0]) + 0.01)
    per_q = []
    tail_total = 0.0
    for q in qs:
        wq = psi(q / Q)
        f = phi_flat(q)
        if wq == 0 or f == 0:
            per_q.append((q, 0j))
            continue
        cop = np.gcd(m, q) == 1
        terms = np.where(cop, coef * table(_diag_u(m, q)), 0) * complex(prefactor(q, t))
        inner = terms[:mmax]
        val = wq * f * complex(math.fsum(inner.real), math.fsum(inner.imag))
        # tail: the next shell bounded termwise, then a geometric factor from the bound's decay
        bnd = kern.magnitude_bound(_diag_u(m[mmax:], q)) * abs(complex(prefactor(q, t)))
        shell = float(np.sum(np.abs(coef[mmax:]) * bnd))
        ratio = float(kern.magnitude_bound(_diag_u(np.array([M2]), q))[0] /
                      max(kern.magnitude_bound(_diag_u(np.array([mmax]), q))[0], 1e-300))
        tail_total += wq * f * shell / max(1 - min(ratio, 0.99), 1e-2)
        per_q.append((q, val))
    total = complex(math.fsum(v.real for _, v in per_q), math.fsum(v.imag for _, v in per_q))
    if strict and tail_total > tol * abs(total):
        raise ValueError(f"mmax={mmax} leaves a tail of {tail_total:.3g} against |D| = {abs(total):.3g}")
    return DiagonalResult(total, tail_total, mmax, tuple(per_q))


def diagonal_residue_main(Q: int, t: Shifts, psi: WeightFunction | None = None, kernel: str = "H") -> complex:
    """h(0) sum_q Psi(q/Q) phi_flat(q) Q(q; alpha, beta): the s = 0 residue of the diagonal term."""
    psi = psi or psi_default()
    h0 = h_poly(0.0, t) if kernel == "H" else 1.0
    acc = []
    for q in support_moduli(Q, psi):
        f = phi_flat(q)
        if f:
            acc.append(psi(q / Q) * f * q_main(q, t))
    return h0 * complex(math.fsum(v.real for v in acc), math.fsum(v.imag for v in acc))
