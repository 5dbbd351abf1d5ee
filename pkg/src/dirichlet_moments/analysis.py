"""Complex Gamma, Hurwitz zeta and vertical-line quadrature."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

# Lanczos coefficients, g = 607/128, n = 15 (Godfrey)
LANCZOS_G = 607 / 128
LANCZOS_C = np.array([
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
])
HALF_LOG_2PI = 0.5 * math.log(2 * math.pi)


def _log_gamma_right(z: np.ndarray) -> np.ndarray:
    z = z - 1
    x = np.full(z.shape, LANCZOS_C[0], dtype=complex)
    for k in range(1, len(LANCZOS_C)):
        x = x + LANCZOS_C[k] / (z + k)
    t = z + LANCZOS_G + 0.5
    return HALF_LOG_2PI + (z + 0.5) * np.log(t) - t + np.log(x)


def _log_sin_pi(z: np.ndarray) -> np.ndarray:
    # sin(pi z) = (i/2) e^{-i pi z} (1 - e^{2 pi i z}) for Im z >= 0; no overflow for large |Im z|
    upper = z.imag >= 0
    w = np.where(upper, z, np.conj(z))
    val = np.log(0.5j) - 1j * np.pi * w + np.log1p(-np.exp(2j * np.pi * w))
    return np.where(upper, val, np.conj(val))


def _is_pole(s: np.ndarray) -> np.ndarray:
    return (s.imag == 0) & (s.real <= 0) & (s.real == np.round(s.real))


def log_gamma(s) -> np.ndarray | complex:
    """A logarithm of Gamma(s), vectorized; exp() of it is Gamma(s). Branch is not the principal one."""
    arr = np.asarray(s, dtype=complex)
    if np.any(_is_pole(arr)):
        raise ValueError("Gamma has a pole at a nonpositive integer")
    z = np.atleast_1d(arr)
    left = z.real < 0.5
    out = np.empty(z.shape, dtype=complex)
    out[~left] = _log_gamma_right(z[~left])
    if np.any(left):
        zl = z[left]
        out[left] = math.log(math.pi) - _log_sin_pi(zl) - _log_gamma_right(1 - zl)
    return out.reshape(arr.shape) if arr.ndim else complex(out[0])


def complex_gamma(s):
    """Gamma(s) for complex s (scalar or array); nonpositive integers raise ValueError."""
    arr = np.asarray(s, dtype=complex)
    if arr.ndim == 0 and arr.imag == 0 and arr.real > 0 and arr.real == round(arr.real.item()) and arr.real < 171:
        return complex(math.factorial(int(arr.real) - 1))
    out = np.exp(log_gamma(arr))
    return complex(out) if arr.ndim == 0 else out


# B_{2k} / (2k)! for k = 1..12
_BERN = [1 / 6, -1 / 30, 1 / 42, -1 / 30, 5 / 66, -691 / 2730, 7 / 6, -3617 / 510, 43867 / 798,
         -174611 / 330, 854513 / 138, -236364091 / 2730]
EM_COEFFS = np.array([b / math.factorial(2 * k) for k, b in enumerate(_BERN, start=1)])


def _em_cutoff(s: complex, tol: float) -> int:
    # size of the first omitted Euler-Maclaurin term (k = 13) relative to the leading term
    sigma = s.real
    n = max(10, int(abs(s)) + 5)
    while True:
        poch = 1.0
        for j in range(25):
            poch *= abs(s + j)
        bound = 2 * poch / (2 * math.pi * n) ** 26
        if bound * max(1.0, n ** (-sigma)) < tol * min(1.0, n ** (-sigma)) or n > 10**6:
            return n
        n = int(n * 1.25) + 1


def _pole_part_removed(u: np.ndarray, s: complex) -> np.ndarray:
    # (u^{1-s} - 1)/(s - 1), finite at s = 1
    x = (1 - s) * np.log(u)
    if s == 1:
        return -np.log(u)
    small = np.abs(x) < 1e-5
    ratio = np.where(small, 1 + x / 2 + x * x / 6, np.expm1(x) / np.where(small, 1, x))
    return -np.log(u) * ratio


def hurwitz_zeta(s: complex, a, tol: float = 1e-15, regular: bool = False):
    """zeta(s, a) by Euler-Maclaurin, vectorized over ``a`` in (0, 1].

    With ``regular=True`` the pole part 1/(s-1) is subtracted, which makes
    s = 1 admissible.
    """
    s = complex(s)
    if s == 1 and not regular:
        raise ValueError("Hurwitz zeta has a pole at s = 1")
    aa = np.atleast_1d(np.asarray(a, dtype=float))
    if np.any(aa <= 0):
        raise ValueError("Hurwitz parameter must be positive")
    N = _em_cutoff(s, tol)
    n = np.arange(N, dtype=float)
    head = np.sum(np.exp(-s * np.log(n[None, :] + aa[:, None])), axis=1)
    u = N + aa
    logu = np.log(u)
    us = np.exp(-s * logu)
    if regular:
        tail = _pole_part_removed(u, s) + 0.5 * us
    else:
        tail = u * us / (s - 1) + 0.5 * us
    poch = s
    upow = us / u
    for k, c in enumerate(EM_COEFFS, start=1):
        tail = tail + c * poch * upow
        poch = poch * (s + 2 * k - 1) * (s + 2 * k)
        upow = upow / (u * u)
    out = head + tail
    return complex(out[0]) if np.ndim(a) == 0 else out


def hurwitz_zeta_deriv(s: complex, a, tol: float = 1e-15):
    """d/ds zeta(s, a), differentiating the Euler-Maclaurin expansion term by term."""
    s = complex(s)
    if s == 1:
        raise ValueError("Hurwitz zeta has a pole at s = 1")
    aa = np.atleast_1d(np.asarray(a, dtype=float))
    N = _em_cutoff(s, tol)
    n = np.arange(N, dtype=float)
    logs = np.log(n[None, :] + aa[:, None])
    head = -np.sum(logs * np.exp(-s * logs), axis=1)
    u = N + aa
    logu = np.log(u)
    us = np.exp(-s * logu)
    tail = -logu * u * us / (s - 1) - u * us / (s - 1) ** 2 - 0.5 * logu * us
    poch, dpoch = s, 1.0 + 0j
    upow = us / u
    for k, c in enumerate(EM_COEFFS, start=1):
        tail = tail + c * upow * (dpoch - logu * poch)
        for j in (2 * k - 1, 2 * k):
            dpoch = dpoch * (s + j) + poch
            poch = poch * (s + j)
        upow = upow / (u * u)
    out = head + tail
    return complex(out[0]) if np.ndim(a) == 0 else out


def riemann_zeta(s: complex) -> complex:
    return hurwitz_zeta(s, 1.0)


@dataclass(frozen=True)
class ContourSpec:
    real_part: float = 1.0
    truncation_height: float = 30.0
    node_count: int = 16

    def __post_init__(self) -> None:
        if self.node_count < 8:
            raise ValueError("node_count must be at least 8")
        if self.truncation_height <= 0:
            raise ValueError("truncation_height must be positive")


@dataclass(frozen=True)
class LineIntegral:
    value: complex
    remainder: float
    height: float


@lru_cache(maxsize=64)
def panel_nodes(T: float, nodes: int, width: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre nodes and weights on [-T, T] with panels of the given width."""
    x, w = np.polynomial.legendre.leggauss(nodes)
    npan = max(1, int(math.ceil(2 * T / width)))
    h = 2 * T / npan
    left = -T + h * np.arange(npan)
    t = (left[:, None] + h * (x[None, :] + 1) / 2).ravel()
    wt = np.tile(w * h / 2, npan)
    t.setflags(write=False)
    wt.setflags(write=False)
    return t, wt


class DecayError(RuntimeError):
    pass


def vertical_line_integral(f: Callable[[np.ndarray], np.ndarray], spec: ContourSpec = ContourSpec(),
                           tol: float = 1e-14, max_height: float = 2000.0) -> LineIntegral:
    """(1/2 pi i) times the integral of f over the line Re s = c, truncated adaptively.

    ``f`` must accept an array of complex points. The remainder is an estimate of
    the neglected tails, assuming exponential decay beyond the truncation height.
    """
    T = max(30.0, spec.truncation_height)
    c = spec.real_part
    while True:
        t, w = panel_nodes(T, spec.node_count)
        vals = np.asarray(f(c + 1j * t), dtype=complex)
        if not np.all(np.isfinite(vals)):
            raise DecayError("integrand is not finite on the contour")
        value = np.sum(vals * w) / (2 * math.pi)
        # decay rate from the outermost unit of height on each side
        outer = np.abs(t) > T - 1
        inner = (np.abs(t) > T - 2) & ~outer
        end = float(np.max(np.abs(vals[outer])))
        prev = float(np.max(np.abs(vals[inner])))
        scale = max(float(np.max(np.abs(vals))), 1e-300)
        if end <= tol * scale * 1e-3 or end == 0:
            rate = math.log(prev / end) if end > 0 and prev > end else 1.0
            return LineIntegral(complex(value), 2 * end / rate / (2 * math.pi), T)
        if end >= prev:
            if T >= max_height:
                raise DecayError(f"integrand does not decay on Re s = {c} (|f| = {end:.3g} at height {T})")
        if T >= max_height:
            rate = math.log(prev / end) if prev > end else 0.0
            if rate <= 0:
                raise DecayError(f"integrand does not decay on Re s = {c}")
            return LineIntegral(complex(value), 2 * end / rate / (2 * math.pi), T)
        T = min(max_height, T * 1.5)
