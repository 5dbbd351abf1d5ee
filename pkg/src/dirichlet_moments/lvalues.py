"""Dirichlet L-values, completed L-values and the six-fold shifted product."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .analysis import complex_gamma, hurwitz_zeta, riemann_zeta
from .characters import DirichletCharacter, character_group, gauss_sum
from .arith import factorize


@dataclass(frozen=True)
class Shifts:
    """Shift triples alpha, beta. Admissibility (alpha_i != beta_j) is checked where it matters."""

    alpha: tuple[complex, complex, complex]
    beta: tuple[complex, complex, complex]
    delta: complex = field(init=False)

    def __post_init__(self) -> None:
        if len(self.alpha) != 3 or len(self.beta) != 3:
            raise ValueError("alpha and beta must each have three entries")
        a = tuple(complex(x) for x in self.alpha)
        b = tuple(complex(x) for x in self.beta)
        if not all(np.isfinite(x) for x in a + b):
            raise ValueError("shifts must be finite")
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "beta", b)
        object.__setattr__(self, "delta", 0.5 * (sum(a) - sum(b)))

    @classmethod
    def zero(cls) -> "Shifts":
        return cls((0, 0, 0), (0, 0, 0))

    @property
    def all_six(self) -> tuple[complex, ...]:
        return self.alpha + self.beta

    def swapped(self) -> "Shifts":
        return Shifts(self.beta, self.alpha)

    def conj(self) -> "Shifts":
        """(alpha, beta) -> (conj beta, conj alpha)."""
        return Shifts(tuple(np.conj(self.beta)), tuple(np.conj(self.alpha)))

    def negated_swap(self) -> "Shifts":
        """(alpha, beta) -> (-beta, -alpha)."""
        return Shifts(tuple(-x for x in self.beta), tuple(-x for x in self.alpha))

    def differences(self) -> np.ndarray:
        """3x3 array of alpha_i - beta_j."""
        return np.array(self.alpha)[:, None] - np.array(self.beta)[None, :]

    def min_gap(self) -> float:
        return float(np.min(np.abs(self.differences())))

    def max_abs(self) -> float:
        return max(abs(x) for x in self.all_six)

    def check_admissible(self, floor: float = 0.0, Q: float | None = None, C: float | None = None) -> None:
        gap = self.min_gap()
        if gap <= floor:
            i, j = np.unravel_index(np.argmin(np.abs(self.differences())), (3, 3))
            raise ValueError(f"|alpha_{i + 1} - beta_{j + 1}| = {gap:.3g} is not above {floor:g}")
        if Q is not None and C is not None and self.max_abs() > C / math.log(Q):
            raise ValueError(f"shift size {self.max_abs():.3g} exceeds {C}/log({Q})")

    def coset(self, left: tuple[int, int, int]) -> "Shifts":
        """Put the entries of all_six at positions ``left`` on the alpha side."""
        six = self.all_six
        right = tuple(i for i in range(6) if i not in left)
        return Shifts(tuple(six[i] for i in left), tuple(six[i] for i in right))

    def permuted(self, perm) -> "Shifts":
        six = self.all_six
        return Shifts(tuple(six[perm[i]] for i in range(3)), tuple(six[perm[i]] for i in range(3, 6)))


COSETS: tuple[tuple[int, int, int], ...] = tuple(itertools.combinations(range(6), 3))


def _check_l_args(chi: DirichletCharacter, s: complex) -> None:
    if chi.is_principal and complex(s) == 1:
        raise ValueError("L(s, chi_0) has a pole at s = 1")


def l_value(chi: DirichletCharacter, s: complex) -> complex:
    """L(s, chi) through Hurwitz zeta values; principal characters go through zeta(s) times local factors."""
    s = complex(s)
    _check_l_args(chi, s)
    q = chi.modulus
    if chi.is_principal:
        val = riemann_zeta(s)
        for p in factorize(q).primes:
            val *= 1 - p ** (-s)
        return val
    a = np.arange(1, q + 1)
    # character values sum to zero, so the pole parts cancel exactly
    z = hurwitz_zeta(s, a / q, regular=True)
    return complex(np.exp(-s * math.log(q)) * np.dot(chi.values[a % q], z))


def l_values_batch(q: int, s: complex, indices=None) -> np.ndarray:
    """L(s, chi) for the characters mod q with the given group indices (all nonprincipal)."""
    s = complex(s)
    grp = character_group(q)
    idx = np.arange(grp.values.shape[0]) if indices is None else np.asarray(indices)
    if np.any(idx == 0):
        raise ValueError("l_values_batch handles nonprincipal characters only")
    if len(idx) == 0:
        return np.zeros(0, dtype=complex)
    a = np.arange(1, q + 1)
    z = hurwitz_zeta(s, a / q, regular=True)
    return np.exp(-s * math.log(q)) * (grp.values[idx][:, a % q] @ z)


def _require_primitive_even(chi: DirichletCharacter) -> None:
    if not chi.is_primitive or not chi.is_even:
        raise ValueError(f"character {chi.index} mod {chi.modulus} is not primitive and even")


def root_number(chi: DirichletCharacter) -> complex:
    _require_primitive_even(chi)
    return gauss_sum(chi).value / math.sqrt(chi.modulus)


def gamma_factor(q: int, s: complex) -> complex:
    """(q/pi)^{s/2} Gamma(1/4 + s/2): the factor completing L(1/2 + s)."""
    s = complex(s)
    return np.exp(0.5 * s * math.log(q / math.pi)) * complex_gamma(0.25 + 0.5 * s)


@dataclass(frozen=True)
class CompletedLValue:
    value: complex
    modulus: int
    shift_point: complex
    gamma_factor: complex
    raw_l: complex


def completed_lambda(chi: DirichletCharacter, s: complex) -> CompletedLValue:
    """Lambda(1/2 + s, chi)."""
    _require_primitive_even(chi)
    s = complex(s)
    raw = l_value(chi, 0.5 + s)
    gf = gamma_factor(chi.modulus, s)
    return CompletedLValue(gf * raw, chi.modulus, s, gf, raw)


def lambda_shifted(chi: DirichletCharacter, t: Shifts) -> complex:
    _require_primitive_even(chi)
    cbar = chi.conjugate()
    out = 1 + 0j
    for a, b in zip(t.alpha, t.beta):
        out *= completed_lambda(chi, a).value * completed_lambda(cbar, -b).value
    return out


def lambda_shifted_batch(q: int, t: Shifts) -> np.ndarray:
    """Lambda(chi; alpha, beta) for every primitive even chi mod q, in group order."""
    grp = character_group(q)
    idx = grp.primitive_even
    if len(idx) == 0:
        return np.zeros(0, dtype=complex)
    out = np.ones(len(idx), dtype=complex)
    cidx = grp.conj_index[idx]
    for a, b in zip(t.alpha, t.beta):
        out *= gamma_factor(q, a) * l_values_batch(q, 0.5 + a, idx)
        out *= gamma_factor(q, -b) * l_values_batch(q, 0.5 - b, cidx)
    return out
