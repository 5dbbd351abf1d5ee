"""Archimedean weights G, H and the two-variable cutoff W(xi, eta; mu)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import mpmath
import numpy as np

from .analysis import DecayError, log_gamma, panel_nodes
from .lvalues import Shifts

KERNELS = ("H", "unit")
# abscissae tried when the contour is placed automatically
ABSCISSA_LADDER = (0.02, 0.05, 0.1, 0.2, 0.35, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0, 12.0, 16.0,
                   24.0, 32.0, 48.0, 64.0, 96.0, 128.0)


def log_g_factor(s, t: Shifts):
    s = np.asarray(s, dtype=complex)
    out = np.zeros(s.shape, dtype=complex)
    for a, b in zip(t.alpha, t.beta):
        out = out + log_gamma((s + a) / 2) + log_gamma((s - b) / 2)
    return out


def g_factor(s, t: Shifts):
    """prod_i Gamma((s + alpha_i)/2) Gamma((s - beta_i)/2)."""
    out = np.exp(log_g_factor(s, t))
    return complex(out) if np.ndim(s) == 0 else out


def _h_roots(t: Shifts) -> np.ndarray:
    return (t.differences() / 2).ravel()


def log_h_poly(s, t: Shifts):
    s = np.asarray(s, dtype=complex)
    out = np.zeros(s.shape, dtype=complex)
    with np.errstate(divide="ignore", invalid="ignore"):
        for r in _h_roots(t):
            out = out + 3 * (np.log(s - r) + np.log(s + r))
    # exact zeros of H on the contour: exp(-inf) = 0
    return np.where(np.isfinite(out), out, -np.inf + 0j)


def h_poly(s, t: Shifts):
    """prod_{i,j} (s^2 - ((alpha_i - beta_j)/2)^2)^3."""
    s = np.asarray(s, dtype=complex)
    out = np.ones(s.shape, dtype=complex)
    for r in _h_roots(t):
        out = out * (s * s - r * r) ** 3
    return complex(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class WeightEvaluation:
    value: complex
    contour_abscissa: float
    truncation_remainder: float
    roundoff: float = 0.0


@dataclass(frozen=True)
class _Line:
    c: float
    height: float
    t: np.ndarray
    w: np.ndarray
    logg: np.ndarray  # log of G(1/2+s) h(s) / s at the nodes, divided by 2 pi for the measure
    peak: float  # max of Re logg
    l1: float  # log of (1/2pi) * integral of |integrand| at u = 0
    log_tail: float  # log of the estimated neglected mass at u = 0


class WeightKernel:
    """The integrand G(1/2+s) h(s) X^{-s} / s on vertical lines, with h = H or h = 1.

    F(u) = (1/2 pi i) int_(c) G(1/2+s) h(s) e^{-su} ds/s is the weight without the
    (mu/pi)^delta prefactor, as a function of u = log X, X = xi eta pi^3 / mu^3.
    """

    def __init__(self, t: Shifts, kernel: str = "H", nodes: int = 24):
        if kernel not in KERNELS:
            raise ValueError(f"kernel must be one of {KERNELS}")
        if kernel == "H" and t.min_gap() == 0:
            raise ValueError("H kernel needs alpha_i != beta_j")
        self.shifts = t
        self.kernel = kernel
        self.nodes = nodes
        self._lines: dict[float, _Line] = {}

    def _log_integrand(self, s: np.ndarray) -> np.ndarray:
        out = log_g_factor(0.5 + s, self.shifts) - np.log(s)
        if self.kernel == "H":
            out = out + log_h_poly(s, self.shifts)
        return out

    def line(self, c: float) -> _Line:
        c = float(c)
        if c <= 0:
            raise ValueError("abscissa must be positive (the pole at s = 0 sits on the left)")
        if c in self._lines:
            return self._lines[c]
        # coarse scan of |integrand| to place the truncation height
        grid = np.arange(0.0, 4000.0, 0.5)
        prof = np.maximum(self._log_integrand(c + 1j * grid).real, self._log_integrand(c - 1j * grid).real)
        peak = float(prof.max())
        alive = np.flatnonzero(prof > peak - 45.0)
        T = max(30.0, float(grid[alive[-1]]) + 2.0)
        if T >= grid[-1] - 10:
            raise DecayError(f"weight integrand does not decay on Re s = {c}")
        t, w = panel_nodes(T, self.nodes)
        logg = self._log_integrand(c + 1j * t) + math.log(1 / (2 * math.pi))
        mag = np.exp(logg.real - peak)
        l1 = peak + math.log(float(np.sum(w * mag)))
        # tails beyond T: geometric decay estimated from the last unit of height
        edge = self._log_integrand(np.array([c + 1j * T, c + 1j * (T - 1)])).real
        rate = max(edge[1] - edge[0], 1e-3)
        log_tail = edge[0] - math.log(math.pi * rate)
        ln = _Line(c, T, t, w, logg, peak - math.log(2 * math.pi), l1, log_tail)
        self._lines[c] = ln
        return ln

    def evaluate(self, u, c: float = 1.0) -> np.ndarray:
        """F(u) on the line Re s = c, vectorized over u."""
        ln = self.line(c)
        u = np.atleast_1d(np.asarray(u, dtype=float))
        s = c + 1j * ln.t
        out = np.empty(u.shape, dtype=complex)
        step = max(1, 2_000_000 // len(ln.t))
        for i in range(0, len(u), step):
            uu = u[i : i + step]
            with np.errstate(invalid="ignore"):
                e = np.exp(ln.logg[None, :] - s[None, :] * uu[:, None])
            out[i : i + step] = np.where(np.isnan(e), 0, e) @ ln.w
        return out

    def roundoff(self, u, c: float) -> np.ndarray:
        """Rough floating-point error of evaluate(u, c): machine epsilon times the integrand peak."""
        ln = self.line(c)
        return 1e-16 * np.exp(ln.peak - c * np.asarray(u, dtype=float)) * math.sqrt(len(ln.t))

    def best_abscissa(self, u: float) -> float:
        """The abscissa on the ladder that minimizes the integrand peak at u, i.e. the roundoff."""
        scores = [self.line(c).peak - c * u for c in ABSCISSA_LADDER]
        return ABSCISSA_LADDER[int(np.argmin(scores))]

    def magnitude_bound(self, u) -> np.ndarray:
        """Upper bound for |F(u)|: min over the ladder of (1/2pi) int |integrand| dt."""
        u = np.asarray(u, dtype=float)
        logs = np.array([self.line(c).l1 - c * u for c in ABSCISSA_LADDER])
        return np.exp(np.min(logs, axis=0))

    def remainder(self, u, c: float) -> np.ndarray:
        ln = self.line(c)
        return np.exp(ln.log_tail - c * np.asarray(u, dtype=float))


@lru_cache(maxsize=32)
def weight_kernel(t: Shifts, kernel: str = "H") -> WeightKernel:
    return WeightKernel(t, kernel)


def log_x(xi, eta, mu) -> np.ndarray:
    return np.log(xi) + np.log(eta) + 3 * math.log(math.pi) - 3 * np.log(mu)


def prefactor(mu, t: Shifts):
    return np.exp(t.delta * (np.log(mu) - math.log(math.pi)))


def w_weight(xi: float, eta: float, mu: float, t: Shifts, abscissa: float | str = 1.0,
             kernel: str = "H") -> WeightEvaluation:
    """W(xi, eta; mu) = (mu/pi)^delta (1/2 pi i) int_(c) G(1/2+s) h(s) (xi eta pi^3/mu^3)^{-s} ds/s."""
    if min(xi, eta, mu) <= 0:
        raise ValueError("xi, eta and mu must be positive")
    k = weight_kernel(t, kernel)
    u = float(log_x(xi, eta, mu))
    c = k.best_abscissa(u) if abscissa == "auto" else float(abscissa)
    pre = complex(prefactor(mu, t))
    val = complex(k.evaluate(u, c)[0]) * pre
    return WeightEvaluation(val, c, float(k.remainder(u, c)) * abs(pre), float(k.roundoff(u, c)) * abs(pre))


class WeightTable:
    """Piecewise Chebyshev interpolant of F(u) on [u_lo, u_hi] for bulk sums."""

    def __init__(self, kern: WeightKernel, u_lo: float, u_hi: float, width: float = 0.5, degree: int = 40):
        self.kernel = kern
        npan = max(1, int(math.ceil((u_hi - u_lo) / width)))
        self.u_lo = u_lo
        self.width = (u_hi - u_lo) / npan if u_hi > u_lo else width
        self.npan = npan
        x = np.cos(np.pi * (np.arange(degree + 1) + 0.5) / (degree + 1))
        coefs = []
        self.abscissae = []
        self.err = np.zeros(npan)
        for j in range(npan):
            a = u_lo + j * self.width
            mid = a + self.width / 2
            c = kern.best_abscissa(mid)
            uu = mid + x * self.width / 2
            vals = kern.evaluate(uu, c)
            coefs.append(np.polynomial.chebyshev.chebfit(x, vals, degree))
            self.abscissae.append(c)
            self.err[j] = float(np.max(kern.roundoff(uu, c))) + abs(coefs[-1][-1]) + abs(coefs[-1][-2])
        self.coefs = np.array(coefs)

    def __call__(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        j = np.clip(((u - self.u_lo) / self.width).astype(np.int64), 0, self.npan - 1)
        if np.any(u < self.u_lo - 1e-9) or np.any(u > self.u_lo + self.npan * self.width + 1e-9):
            raise ValueError("point outside the tabulated range")
        out = np.empty(u.shape, dtype=complex)
        order = np.argsort(j, kind="stable")
        js = j[order]
        bounds = np.searchsorted(js, np.arange(self.npan + 1))
        for p in range(self.npan):
            lo, hi = bounds[p], bounds[p + 1]
            if lo == hi:
                continue
            idx = order[lo:hi]
            x = 2 * (u[idx] - self.u_lo - p * self.width) / self.width - 1
            out[idx] = np.polynomial.chebyshev.chebval(x, self.coefs[p])
        return out


def decay_fit(t: Shifts, ys_fit, ys_check, mu: float = 1.0, rate: float = 0.5, kernel: str = "H",
              abscissa: float | str = "auto") -> dict:
    """Fit K = max |W| e^{rate y} over ys_fit and report the worst ratio over ys_check.

    y = (xi eta / mu^3)^{1/3}; we take xi = eta = sqrt(y^3 mu^3).
    """
    def scaled(y):
        xi = math.sqrt(y**3 * mu**3)
        return abs(w_weight(xi, xi, mu, t, abscissa, kernel).value) * math.exp(rate * y)

    K = max(scaled(y) for y in ys_fit)
    worst = max(scaled(y) / K for y in ys_check)
    return {"K": K, "worst_ratio": worst}


def rescaling_residual(m: float, n: float, u: float, Q: float, t: Shifts, kernel: str = "H",
                       abscissa: float | str = 1.0) -> float:
    """Relative gap in W(m, n; uQ) = Q^delta W(m/Q^{3/2}, n/Q^{3/2}; u)."""
    left = w_weight(m, n, u * Q, t, abscissa, kernel).value
    right = Q**t.delta * w_weight(m / Q**1.5, n / Q**1.5, u, t, abscissa, kernel).value
    return abs(left - right) / abs(left)


@lru_cache(maxsize=8)
def _mp_legendre(dps: int):
    from mpmath.calculus.quadrature import GaussLegendre

    with mpmath.workdps(dps):
        return GaussLegendre(mpmath.mp).calc_nodes(5, mpmath.mp.prec)


@lru_cache(maxsize=16)
def _mp_line(t: Shifts, kernel: str, c: float, dps: int):
    """Nodes s_k and weights w_k G(1/2+s_k) h(s_k) / (2 pi s_k) along Re s = c, panels of width 1."""
    kern = weight_kernel(t, kernel)
    # |exp(-s log x)| is constant on the line, so the cut only depends on the kernel
    grid = np.arange(0.0, 4000.0, 0.5)
    prof = np.maximum(kern._log_integrand(c + 1j * grid).real, kern._log_integrand(c - 1j * grid).real)
    alive = np.flatnonzero(prof > prof.max() - (dps + 10) * math.log(10))
    T = int(math.ceil(grid[alive[-1]] + 1))
    nodes = _mp_legendre(dps)
    with mpmath.workdps(dps):
        half = mpmath.mpf(1) / 2
        al = [mpmath.mpc(a) for a in t.alpha]
        be = [mpmath.mpc(b) for b in t.beta]
        roots = [(a - b) / 2 for a in al for b in be]
        pts, wts = [], []
        for k in range(-T, T):
            mid = mpmath.mpf(k) + half
            for x, w in nodes:
                s = mpmath.mpc(c, mid + x / 2)
                g = mpmath.mpf(1)
                for a, b in zip(al, be):
                    g *= mpmath.gamma((half + s + a) / 2) * mpmath.gamma((half + s - b) / 2)
                if kernel == "H":
                    for r in roots:
                        g *= (s * s - r * r) ** 3
                pts.append(s)
                wts.append(w * g / (4 * mpmath.pi * s))
    return tuple(pts), tuple(wts)


def w_weight_mp(xi: float, eta: float, mu: float, t: Shifts, kernel: str = "H", abscissa: float = 1.0,
                dps: int = 60) -> complex:
    """W(xi, eta; mu) with the line integral done in ``dps``-digit arithmetic.

    With h = H the integrand peaks far above the value of the integral, so double
    precision loses everything. The first call for a given (t, kernel, abscissa, dps)
    tabulates the Gamma factors (several seconds); later calls reuse them.
    """
    if min(xi, eta, mu) <= 0:
        raise ValueError("xi, eta and mu must be positive")
    pts, wts = _mp_line(t, kernel, float(abscissa), dps)
    with mpmath.workdps(dps):
        logx = (mpmath.log(mpmath.mpf(xi)) + mpmath.log(mpmath.mpf(eta)) + 3 * mpmath.log(mpmath.pi)
                - 3 * mpmath.log(mpmath.mpf(mu)))
        total = mpmath.fsum(w * mpmath.exp(-s * logx) for s, w in zip(pts, wts))
        delta = mpmath.mpc(t.delta)
        return complex(total * mpmath.exp(delta * (mpmath.log(mu) - mpmath.log(mpmath.pi))))


def rescaling_residual_mp(m: float, n: float, u: float, Q: float, t: Shifts, kernel: str = "H",
                          dps: int = 60) -> float:
    """High-precision counterpart of :func:`rescaling_residual`."""
    left = w_weight_mp(m, n, u * Q, t, kernel, dps=dps)
    right = Q**t.delta * w_weight_mp(m / Q**1.5, n / Q**1.5, u, t, kernel, dps=dps)
    return abs(left - right) / abs(left)
