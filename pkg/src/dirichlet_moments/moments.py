"""Empirical moments over primitive even characters, the truncated AFE sums and the report."""

from __future__ import annotations

import csv
import io
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import mpmath
import numpy as np

from . import __version__
from .analysis import complex_gamma
from .arith import sigma_table
from .characters import DirichletCharacter, character_group, gauss_sum, phi_flat
from .cutoffs import WeightFunction, psi_default
from .lvalues import Shifts, lambda_shifted_batch, l_values_batch
from .mainterm import a3_constant, corollary_density, main_term_model, support_moduli
from .weights import WeightTable, h_poly, log_x, prefactor, weight_kernel

METHODS = ("hurwitz", "afe", "both")
MODES = ("smooth", "sharp")
THREAD_ENV = "DIRICHLET_MOMENTS_THREADS"
# the shift set used for AFE checks and as a small-shift stand-in for the zero-shift limit
SURROGATE_SHIFTS = Shifts((0.02, 0.01, -0.015), (-0.01, 0.005, 0.025))


@dataclass(frozen=True)
class MomentConfig:
    Q: int
    shifts: Shifts | None = None  # None means zero shifts: plain |L(1/2, chi)|^6
    weight: WeightFunction = field(default_factory=psi_default)
    afe_truncation: int | None = None  # max m n; None picks it per modulus
    method: str = "hurwitz"
    mode: str = "smooth"
    kernel: str = "unit"
    thread_hint: int = 1

    def __post_init__(self) -> None:
        if int(self.Q) != self.Q or self.Q < 1:
            raise ValueError("Q must be a positive integer")
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.thread_hint < 1:
            raise ValueError("thread_hint must be positive")
        if self.shifts is None and self.method != "hurwitz":
            raise ValueError("zero shifts are evaluated from L-values directly; use method='hurwitz'")
        if self.afe_truncation is not None and self.afe_truncation < 1:
            raise ValueError("afe_truncation must be positive")

    @property
    def zero_shift(self) -> bool:
        return self.shifts is None

    def moduli(self) -> list[int]:
        if self.mode == "sharp":
            return list(range(2, self.Q + 1))  # q = 1 would be zeta itself
        return support_moduli(self.Q, self.weight)

    def modulus_weight(self, q: int) -> float:
        return 1.0 if self.mode == "sharp" else self.weight(q / self.Q)

    def echo(self) -> dict:
        t = self.shifts
        return {
            "Q": self.Q,
            "shifts": "zero" if t is None else [[z.real, z.imag] for z in t.all_six],
            "weight": [self.weight.name, self.weight.lo, self.weight.hi, self.weight.scale],
            "afe_truncation": self.afe_truncation,
            "method": self.method,
            "mode": self.mode,
            "kernel": self.kernel,
        }


@dataclass
class MomentReport:
    config: MomentConfig
    per_q: list[tuple[int, int, complex, complex]]  # (q, phi_flat, empirical, predicted), weights included
    empirical_total: complex
    predicted_total: complex
    ratio: complex
    runtime_seconds: float
    afe_total: complex | None = None
    afe_tail: float = 0.0

    def csv_text(self) -> str:
        buf = io.StringIO()
        buf.write(f"# dirichlet_moments {__version__}\n")
        buf.write(f"# config {json.dumps(self.config.echo(), sort_keys=True)}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["q", "phi_flat", "re_emp", "im_emp", "re_pred", "im_pred"])
        for q, f, e, p in self.per_q:
            w.writerow([q, f, repr(e.real), repr(e.imag), repr(p.real), repr(p.imag)])
        return buf.getvalue()

    def summary(self) -> dict:
        out = {
            "empirical_total": [self.empirical_total.real, self.empirical_total.imag],
            "predicted_total": [self.predicted_total.real, self.predicted_total.imag],
            "ratio": [self.ratio.real, self.ratio.imag],
            "runtime_seconds": self.runtime_seconds,
        }
        if self.afe_total is not None:
            out["afe_total"] = [self.afe_total.real, self.afe_total.imag]
            out["afe_tail"] = self.afe_tail
        return out


def _csum(values) -> complex:
    values = list(values)
    return complex(math.fsum(v.real for v in values), math.fsum(v.imag for v in values))


# --- truncated approximate functional equation ------------------------------------------------


def _weight_u(k: np.ndarray, q: int) -> np.ndarray:
    return log_x(k.astype(float), 1.0, float(q))


def afe_tail_estimate(q: int, t: Shifts, N: int, kernel: str = "unit") -> float:
    """Rough bound for the part of one Lambda_0 sum with m n > N.

    Uses |sigma(m; alpha) sigma(n; -beta)| <= tau_6(mn) (mn)^c with tau_6 replaced by its
    mean (log k)^5/5!, and the contour bound for |W|.
    """
    kern = weight_kernel(t, kernel)
    c = max(max(abs(z.real) for z in t.all_six), 0.0)
    k = np.exp(np.linspace(math.log(N), math.log(N) + 12, 2001))
    dens = (np.log(k) ** 5 / 120 + 1) * k ** (c - 0.5) * kern.magnitude_bound(_weight_u(k, q))
    dk = np.diff(k)
    return float(np.sum(0.5 * (dens[1:] + dens[:-1]) * dk)) * abs(complex(prefactor(q, t)))


def required_truncation(q: int, t: Shifts, kernel: str = "unit", tol: float = 1e-8) -> int:
    """Smallest N (on a 2^(1/4) ladder) whose tail estimate is below tol times the m = n = 1 term."""
    kern = weight_kernel(t, kernel)
    ref = float(kern.magnitude_bound(_weight_u(np.array([1]), q))[0]) * abs(complex(prefactor(q, t)))
    N = 16.0
    while afe_tail_estimate(q, t, int(N), kernel) > tol * ref:
        N *= 2 ** 0.25
        if N > 1e9:
            raise ValueError(f"no truncation below 1e9 meets the tail target at q = {q}")
    return int(N)


def _residue_matrices(q: int, shift_sets: list[Shifts], N: int, kernel: str) -> list[np.ndarray]:
    """M[i, j] = sum over m = i, n = j mod q, mn <= N of sigma(m;alpha) sigma(n;-beta) W(m,n;q)/sqrt(mn).

    One matrix per shift set; the (m, n) enumeration is shared.
    """
    k = np.arange(1, N + 1)
    u = _weight_u(k, q)
    coefs = []
    for t in shift_sets:
        kern = weight_kernel(t, kernel)
        table = WeightTable(kern, float(u[0]) - 0.01, float(u[-1]) + 0.01)
        w = np.zeros(N + 1, dtype=complex)
        w[1:] = table(u) * complex(prefactor(q, t)) / np.sqrt(k)
        coefs.append((sigma_table(N, t.alpha), sigma_table(N, tuple(-z for z in t.beta)), w))
    units = np.flatnonzero(np.gcd(np.arange(N + 1), q) == 1)
    units = units[units > 0]
    acc = [np.zeros(q * q, dtype=complex) for _ in shift_sets]
    # blocks of m with roughly 2e6 pairs each
    start = 0
    while start < len(units):
        stop = start
        count = 0
        while stop < len(units) and count < 2_000_000:
            count += N // units[stop]
            stop += 1
        ms = units[start:stop]
        lens = np.searchsorted(units, N // ms, side="right")
        m_rep = np.repeat(ms, lens)
        n_rep = units[np.arange(len(m_rep)) - np.repeat(np.cumsum(lens) - lens, lens)]
        idx = (m_rep % q) * q + (n_rep % q)
        mn = m_rep * n_rep
        for out, (a, b, w) in zip(acc, coefs):
            c = a[m_rep] * b[n_rep] * w[mn]
            out += np.bincount(idx, weights=c.real, minlength=q * q)
            out += 1j * np.bincount(idx, weights=c.imag, minlength=q * q)
        start = stop
    return [x.reshape(q, q) for x in acc]


def afe_lambda0_both(q: int, t: Shifts, N: int | None = None, kernel: str = "unit",
                     indices=None) -> tuple[np.ndarray, np.ndarray, float]:
    """Lambda_0(chi; alpha, beta) and Lambda_0(chi; beta, alpha) for primitive even chi mod q, and the tail."""
    N = N or max(required_truncation(q, t, kernel), required_truncation(q, t.swapped(), kernel))
    grp = character_group(q)
    idx = grp.primitive_even if indices is None else np.asarray(indices)
    if len(idx) == 0:
        return np.zeros(0, dtype=complex), np.zeros(0, dtype=complex), 0.0
    v = grp.values[idx]
    vals = [np.einsum("ci,ij,cj->c", v, M, np.conj(v)) for M in _residue_matrices(q, [t, t.swapped()], N, kernel)]
    tail = afe_tail_estimate(q, t, N, kernel) + afe_tail_estimate(q, t.swapped(), N, kernel)
    return vals[0], vals[1], tail


def afe_lambda0_batch(q: int, t: Shifts, N: int | None = None, kernel: str = "unit",
                      indices=None) -> tuple[np.ndarray, float]:
    """Lambda_0(chi; alpha, beta) for primitive even chi mod q (group order) and the tail estimate."""
    N = N or required_truncation(q, t, kernel)
    grp = character_group(q)
    idx = grp.primitive_even if indices is None else np.asarray(indices)
    if len(idx) == 0:
        return np.zeros(0, dtype=complex), 0.0
    v = grp.values[idx]
    M = _residue_matrices(q, [t], N, kernel)[0]
    return np.einsum("ci,ij,cj->c", v, M, np.conj(v)), afe_tail_estimate(q, t, N, kernel)


def afe_lambda0(chi: DirichletCharacter, t: Shifts, mn_max: int | None = None, kernel: str = "unit") -> complex:
    vals, _ = afe_lambda0_batch(chi.modulus, t, mn_max, kernel, [chi.index])
    return complex(vals[0])


def afe_identity_residuals(q: int, t: Shifts, kernel: str = "unit", N: int | None = None) -> np.ndarray:
    """|h(0) Lambda - Lambda_0(alpha, beta) - Lambda_0(beta, alpha)| / |h(0) Lambda| per primitive even chi."""
    h0 = h_poly(0.0, t) if kernel == "H" else 1.0
    lam = lambda_shifted_batch(q, t)
    if len(lam) == 0:
        return np.zeros(0)
    l0, l1, _ = afe_lambda0_both(q, t, N, kernel)
    return np.abs(h0 * lam - l0 - l1) / np.abs(h0 * lam)


# --- an independent L-value path --------------------------------------------------------------


def l_value_afe(chi: DirichletCharacter, z: complex = 0.5, nmax: int | None = None) -> complex:
    """L(z, chi) for primitive even chi from the incomplete-gamma form of the functional equation.

    With y = pi n^2 / q,
    (q/pi)^{z/2} Gamma(z/2) L(z) = sum chi(n) y^{-z/2} Gamma(z/2, y)
                                   + eps sum conj chi(n) y^{-(1-z)/2} Gamma((1-z)/2, y).
    Independent of the Hurwitz route; used as an oracle.
    """
    if not (chi.is_primitive and chi.is_even):
        raise ValueError("primitive even character required")
    q = chi.modulus
    z = complex(z)
    nmax = nmax or int(6 * math.sqrt(q) + 10)
    eps = gauss_sum(chi).value / math.sqrt(q)
    first, second = [], []
    for n in range(1, nmax + 1):
        c = chi(n)
        if c == 0:
            continue
        y = mpmath.pi * n * n / q
        first.append(complex(c * y ** (-z / 2) * mpmath.gammainc(z / 2, y)))
        second.append(complex(np.conj(c) * y ** (-(1 - z) / 2) * mpmath.gammainc((1 - z) / 2, y)))
    lam = _csum(first) + eps * _csum(second)
    return complex(lam / ((q / math.pi) ** (z / 2) * complex_gamma(z / 2)))


# --- per-modulus work -------------------------------------------------------------------------


def _modulus_contribution(q: int, cfg: MomentConfig) -> tuple[complex, complex | None, float]:
    """(hurwitz-route sum, afe-route sum or None, afe tail) over primitive even chi mod q, unweighted."""
    if phi_flat(q) == 0:
        return 0j, (0j if cfg.method != "hurwitz" else None), 0.0
    grp = character_group(q)
    idx = grp.primitive_even
    if cfg.zero_shift:
        vals = np.abs(l_values_batch(q, 0.5, idx)) ** 6
        return complex(math.fsum(vals)), None, 0.0
    t = cfg.shifts
    hur = _csum(lambda_shifted_batch(q, t)) if cfg.method != "afe" else 0j
    afe = None
    tail = 0.0
    if cfg.method != "hurwitz":
        l0, l1, tl = afe_lambda0_both(q, t, cfg.afe_truncation, cfg.kernel)
        h0 = h_poly(0.0, t) if cfg.kernel == "H" else 1.0
        afe = _csum((l0 + l1) / h0)
        tail = len(idx) * tl / abs(h0)
        if cfg.method == "afe":
            hur = afe
    return hur, afe, tail


def _worker(args):
    q, cfg = args
    return q, _modulus_contribution(q, cfg)


def thread_count(cfg: MomentConfig) -> int:
    env = os.environ.get(THREAD_ENV)
    if env:
        n = int(env)
        if n < 1:
            raise ValueError(f"{THREAD_ENV} must be a positive integer")
        return n
    return cfg.thread_hint


def _contributions(cfg: MomentConfig) -> dict[int, tuple[complex, complex | None, float]]:
    qs = [q for q in cfg.moduli() if cfg.modulus_weight(q) != 0]
    workers = thread_count(cfg)
    if workers == 1 or len(qs) < 2:
        results = dict(_worker((q, cfg)) for q in qs)
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = dict(pool.map(_worker, [(q, cfg) for q in qs]))
    return results


def empirical_moment(cfg: MomentConfig) -> MomentReport:
    """sum_q Psi(q/Q) sum_flat Lambda(chi; alpha, beta), or the sharp sum over q <= Q.

    Zero shifts give the flat sixth moment of |L(1/2, chi)|. The predicted column is left at zero.
    """
    t0 = time.perf_counter()
    res = _contributions(cfg)
    per_q = []
    afe_vals = []
    tail = 0.0
    for q in sorted(res):
        wq = cfg.modulus_weight(q)
        hur, afe, tl = res[q]
        per_q.append((q, phi_flat(q), wq * hur, 0j))
        if afe is not None:
            afe_vals.append(wq * afe)
            tail += wq * tl
    total = _csum(e for _, _, e, _ in per_q)
    afe_total = _csum(afe_vals) if cfg.method == "both" else None
    return MomentReport(cfg, per_q, total, 0j, 0j, time.perf_counter() - t0, afe_total, tail)


def _predicted_per_q(cfg: MomentConfig, qs: list[int]) -> dict[int, complex]:
    out = {}
    if cfg.zero_shift:
        a3 = float(a3_constant().value.real)
        for q in qs:
            out[q] = complex(cfg.modulus_weight(q) * corollary_density(q, a3))
        return out
    model = main_term_model(cfg.shifts)
    for q in qs:
        f = phi_flat(q)
        out[q] = cfg.modulus_weight(q) * f * model.q_tilde(q) if f else 0j
    return out


def moment_report(cfg: MomentConfig) -> MomentReport:
    """Empirical moment next to the predicted main term, per modulus and in total.

    Shifted runs predict with the symmetrized main term; zero-shift runs with the leading
    asymptotic density. A zero prediction against a zero empirical value gives ratio 1.
    """
    t0 = time.perf_counter()
    rep = empirical_moment(cfg)
    pred = _predicted_per_q(cfg, [q for q, *_ in rep.per_q])
    rep.per_q = [(q, f, e, pred[q]) for q, f, e, _ in rep.per_q]
    rep.predicted_total = _csum(p for *_, p in rep.per_q)
    if rep.predicted_total == 0:
        rep.ratio = 1 + 0j if rep.empirical_total == 0 else complex(math.inf)
    else:
        rep.ratio = rep.empirical_total / rep.predicted_total
    rep.runtime_seconds = time.perf_counter() - t0
    return rep


def write_report(rep: MomentReport, path: str) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(rep.csv_text())
