"""Smooth compactly supported cutoffs and their Fourier transforms."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np


def _bump(x, lo: float, hi: float) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    y = (2 * x - (lo + hi)) / (hi - lo)
    inside = np.abs(y) < 1
    out = np.zeros(x.shape)
    yi = y[inside]
    out[inside] = np.exp(1 - 1 / (1 - yi * yi))
    return out


@dataclass(frozen=True)
class WeightFunction:
    """exp(1 - 1/(1 - y^2)) on (lo, hi) with y the affine image onto (-1, 1), times ``scale``.

    Sup norm is ``scale`` (attained at the midpoint); zero outside the open support.
    """

    name: str
    lo: float
    hi: float
    scale: float = 1.0
    derivative_bounds: tuple[float, ...] = field(init=False, compare=False)

    def __post_init__(self) -> None:
        if not self.hi > self.lo:
            raise ValueError("empty support")
        x = np.linspace(self.lo, self.hi, 20001)
        v = self(x)
        bounds = []
        h = x[1] - x[0]
        for _ in range(4):
            bounds.append(float(np.max(np.abs(v))))
            v = np.gradient(v, h)
        object.__setattr__(self, "derivative_bounds", tuple(bounds))

    def __call__(self, x):
        out = self.scale * _bump(x, self.lo, self.hi)
        return float(out) if np.ndim(x) == 0 else out

    def scaled(self, factor: float) -> "WeightFunction":
        return WeightFunction(self.name, self.lo, self.hi, self.scale * factor)

    def fourier(self, xi, points: int = 4001):
        """V^(xi) = int V(x) e(-x xi) dx by the trapezoid rule (spectrally accurate for a bump)."""
        x = np.linspace(self.lo, self.hi, points)
        h = x[1] - x[0]
        v = self(x)
        xi = np.atleast_1d(np.asarray(xi, dtype=float))
        out = np.empty(xi.shape, dtype=complex)
        for i in range(0, len(xi), 256):
            blk = xi[i : i + 256]
            out[i : i + 256] = np.exp(-2j * np.pi * np.outer(blk, x)) @ v * h
        return out

    def fourier_cutoff(self, rel: float = 1e-12, limit: float = 400.0) -> float:
        """Smallest X with |V^(xi)| < rel * |V^(0)| for all scanned xi >= X (scan step 1/4 up to ``limit``)."""
        return _fourier_cutoff(self.lo, self.hi, rel, limit)


@lru_cache(maxsize=32)
def _fourier_cutoff(lo: float, hi: float, rel: float, limit: float) -> float:
    w = WeightFunction("tmp", lo, hi)
    xi = np.arange(0.0, limit, 0.25)
    a = np.abs(w.fourier(xi))
    big = np.flatnonzero(a >= rel * a[0])
    return float(xi[big[-1]] + 0.25)


def psi_default() -> WeightFunction:
    return WeightFunction("psi", 1.0, 2.0)


def v_default() -> WeightFunction:
    return WeightFunction("V", 0.5, 2.5)
