"""Named verification sweeps shared by the CLI and the acceptance tests."""

from __future__ import annotations

import math

import numpy as np

from .characters import character_group, enumerate_characters, gauss_sum, orthogonality_sides
from .expsums import SUITES as EXPSUM_SUITES
from .expsums import SuiteResult
from .lvalues import Shifts, completed_lambda, root_number
from .weights import rescaling_residual, rescaling_residual_mp, w_weight, w_weight_mp

FE_POINTS = (0.1, 0.05 + 0.2j, -0.03 + 1.0j)
SURROGATE = Shifts((0.02, 0.01, -0.015), (-0.01, 0.005, 0.025))


def orthogonality_suite(qmax: int = 60, mnmax: int = 40, tol: float = 1e-9) -> SuiteResult:
    checked = bad = 0
    worst = 0.0
    for q in range(1, qmax + 1):
        for m in range(1, mnmax + 1):
            if math.gcd(m, q) != 1:
                continue
            for n in range(1, mnmax + 1):
                if math.gcd(n, q) != 1:
                    continue
                lhs, rhs = orthogonality_sides(q, m, n)
                err = abs(lhs - rhs)
                checked += 1
                bad += err > tol
                worst = max(worst, err)
    return SuiteResult("orthogonality", checked, int(bad), worst)


def gauss_suite(qmax: int = 200, tol: float = 1e-8) -> SuiteResult:
    """|tau(chi)|^2 = q over primitive characters."""
    checked = bad = 0
    worst = 0.0
    for q in range(1, qmax + 1):
        grp = character_group(q)
        for chi in enumerate_characters(q):
            if grp.conductors[chi.index] != q:
                continue
            err = abs(abs(gauss_sum(chi).value) ** 2 - q)
            checked += 1
            bad += err > tol
            worst = max(worst, err)
    return SuiteResult("gauss", checked, int(bad), worst)


def functional_equation_suite(qmax: int = 100, points=FE_POINTS, tol: float = 1e-8) -> SuiteResult:
    """|Lambda(1/2+s, chi) - eps Lambda(1/2-s, conj chi)| over primitive even chi."""
    checked = bad = 0
    worst = 0.0
    for q in range(3, qmax + 1):
        grp = character_group(q)
        for i in grp.primitive_even:
            chi = enumerate_characters(q)[int(i)]
            eps = root_number(chi)
            cbar = chi.conjugate()
            for s in points:
                left = completed_lambda(chi, s).value
                right = eps * completed_lambda(cbar, -s).value
                err = abs(left - right)
                checked += 1
                bad += err > tol
                worst = max(worst, err)
    return SuiteResult("functional_equation", checked, int(bad), worst)


def rescaling_suite(Qs=(40, 80), t: Shifts = SURROGATE, tol: float = 1e-8, kernel: str = "H",
                    precise: bool = True) -> SuiteResult:
    """W(m, n; uQ) = Q^delta W(m/Q^1.5, n/Q^1.5; u) on a 5 x 5 x 3 grid."""
    ms = ns = (1, 3, 7, 20, 60)
    us = (1.0, 1.5, 2.0)
    checked = bad = 0
    worst = 0.0
    for Q in Qs:
        for m in ms:
            for n in ns:
                for u in us:
                    resid = rescaling_residual_mp if precise else rescaling_residual
                    err = resid(m, n, u, Q, t, kernel)
                    checked += 1
                    bad += not err <= tol
                    worst = max(worst, err if np.isfinite(err) else math.inf)
    return SuiteResult("rescaling", checked, int(bad), worst)


def contour_suite(t: Shifts = SURROGATE, tol: float = 1e-8, kernel: str = "H", precise: bool = False) -> SuiteResult:
    """Abscissa 0.5 against 2.0 on a few (xi, eta, mu)."""
    pts = ((3.0, 7.0, 1.5), (1.0, 1.0, 1.0), (20.0, 5.0, 4.0), (0.3, 0.2, 0.5))
    checked = bad = 0
    worst = 0.0
    for xi, eta, mu in pts:
        if precise:
            a = w_weight_mp(xi, eta, mu, t, kernel, abscissa=0.5)
            b = w_weight_mp(xi, eta, mu, t, kernel, abscissa=2.0)
        else:
            a = w_weight(xi, eta, mu, t, abscissa=0.5, kernel=kernel).value
            b = w_weight(xi, eta, mu, t, abscissa=2.0, kernel=kernel).value
        err = abs(a - b) / max(abs(a), 1e-300)
        checked += 1
        bad += not err <= tol
        worst = max(worst, err if np.isfinite(err) else math.inf)
    return SuiteResult("contour", checked, int(bad), worst)


SUITES = {
    "orthogonality": orthogonality_suite,
    "gauss": gauss_suite,
    "functional_equation": functional_equation_suite,
    "rescaling": rescaling_suite,
    "contour": contour_suite,
    **EXPSUM_SUITES,
}
