"""Kloosterman-type and Ramanujan sums, bound sweeps and Poisson summation checks."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .arith import divisors, euler_phi, mobius, primes_up_to
from .cutoffs import WeightFunction, v_default


@dataclass(frozen=True)
class ExpSumValue:
    value: complex
    modulus: int
    method: str  # "direct" or "closed_form"


def _check_modulus(c: int) -> None:
    if int(c) != c or c < 1:
        raise ValueError(f"modulus must be a positive integer, got {c}")


def inverse(x: int, r: int) -> int:
    """Inverse of x mod r by the extended Euclidean algorithm."""
    a, b, u0, u1 = x % r, r, 1, 0
    while b:
        k = a // b
        a, b = b, a - k * b
        u0, u1 = u1, u0 - k * u1
    if a != 1:
        raise ValueError(f"{x} is not invertible mod {r}")
    return u0 % r


@lru_cache(maxsize=512)
def _units(r: int) -> tuple[np.ndarray, np.ndarray]:
    """Units mod r and their inverses."""
    if r == 1:
        return np.zeros(1, dtype=np.int64), np.zeros(1, dtype=np.int64)
    u = np.array([x for x in range(1, r) if math.gcd(x, r) == 1], dtype=np.int64)
    inv = np.array([inverse(int(x), r) for x in u], dtype=np.int64)
    u.setflags(write=False)
    inv.setflags(write=False)
    return u, inv


@lru_cache(maxsize=512)
def _roots(r: int) -> np.ndarray:
    out = np.exp(2j * np.pi * np.arange(r) / r)
    out.setflags(write=False)
    return out


def kloosterman(a: int, b: int, c: int) -> ExpSumValue:
    """S(a, b; c) = sum over units x mod c of e((a x + b x^-1)/c)."""
    _check_modulus(c)
    u, inv = _units(c)
    k = (a * u + b * inv) % c
    return ExpSumValue(complex(_roots(c)[k].sum()), c, "direct")


def kloosterman_row(b: int, c: int) -> np.ndarray:
    """S(k, b; c) for k = 0, ..., c - 1 from one FFT."""
    _check_modulus(c)
    u, inv = _units(c)
    v = np.zeros(c, dtype=complex)
    v[u % c] = _roots(c)[(b * inv) % c]
    return np.fft.ifft(v) * c


def hyper_kloosterman(f: int, g: int, h: int, r: int) -> ExpSumValue:
    """KS(f, g, h; r) = sum over units a, b mod r of e((a f + b g + (ab)^-1 h)/r)."""
    _check_modulus(r)
    u, inv = _units(r)
    k = (f * u[:, None] + g * u[None, :] + h * ((inv[:, None] * inv[None, :]) % r)) % r
    return ExpSumValue(complex(_roots(r)[k].sum()), r, "direct")


def hyper_kloosterman_row(f: int, h: int, r: int) -> np.ndarray:
    """KS(f, k, h; r) for k = 0, ..., r - 1."""
    _check_modulus(r)
    u, inv = _units(r)
    inner = np.array([kloosterman(f, h * int(ib), r).value for ib in inv])
    v = np.zeros(r, dtype=complex)
    v[u % r] = inner
    return np.fft.ifft(v) * r


def ramanujan_sum(r: int, n: int) -> ExpSumValue:
    """mu(r/(n,r)) phi(r) / phi(r/(n,r))."""
    _check_modulus(r)
    m = r // math.gcd(n, r)
    return ExpSumValue(complex(mobius(m) * euler_phi(r) // euler_phi(m)), r, "closed_form")


def ramanujan_sum_direct(r: int, n: int) -> ExpSumValue:
    _check_modulus(r)
    u, _ = _units(r)
    return ExpSumValue(complex(_roots(r)[(n * u) % r].sum()), r, "direct")


# --- Poisson summation identities --------------------------------------------------------------


def _squarefree_divisors_coprime(lam: int, r: int) -> list[int]:
    return [d for d in divisors(lam) if mobius(d) != 0 and math.gcd(d, r) == 1]


@dataclass(frozen=True)
class ProgressionPoisson:
    """sum_{e = (fg)^-1 n mod r, (e, lam) = 1} V(e/E) against its dual sum."""

    r: int
    f: int
    g: int
    n: int
    lam: int
    E: float

    def check(self) -> None:
        if min(self.r, self.f, self.g, self.n, self.lam) < 1 or self.E <= 0:
            raise ValueError("r, f, g, n, lam must be positive integers and E > 0")
        if math.gcd(self.f * self.g * self.n, self.r) != 1:
            raise ValueError("(fgn, r) > 1")


@dataclass(frozen=True)
class KloostermanPoisson:
    """sum_{(f, alpha r) = 1} e(n e (nu1 f g)^-1 / r) V(f/F) against the Kloosterman dual sum."""

    n: int
    e: int
    nu1: int
    g: int
    r: int
    alpha: int
    F: float

    def check(self) -> None:
        if min(self.n, self.e, self.nu1, self.g, self.r, self.alpha) < 1 or self.F <= 0:
            raise ValueError("integer parameters must be positive and F > 0")
        if math.gcd(self.g * self.nu1, self.r) != 1:
            raise ValueError("(g nu1, r) > 1")


@dataclass(frozen=True)
class HyperKloostermanPoisson:
    """sum_{(g, alpha r) = 1} S(nu2^-1 f, n e (nu1 g)^-1; r) V(g/G) against the hyper-Kloosterman dual sum."""

    nu1: int
    nu2: int
    f: int
    n: int
    e: int
    r: int
    alpha: int
    G: float

    def check(self) -> None:
        if min(self.nu1, self.nu2, self.f, self.n, self.e, self.r, self.alpha) < 1 or self.G <= 0:
            raise ValueError("integer parameters must be positive and G > 0")
        if math.gcd(self.nu1 * self.nu2, self.r) != 1:
            raise ValueError("(nu1 nu2, r) > 1")


@dataclass(frozen=True)
class PoissonResidual:
    lhs: complex
    rhs: complex
    residual: float
    dual_terms: int = field(default=0)


def _dual_range(V: WeightFunction, scale: float, rel: float) -> np.ndarray:
    # dual index k enters through V^(k * scale); beyond the cutoff the transform is negligible
    kmax = int(math.ceil(V.fourier_cutoff(rel) / scale))
    return np.arange(-kmax, kmax + 1)


def _support(V: WeightFunction, X: float) -> np.ndarray:
    return np.arange(max(1, int(math.floor(V.lo * X))), int(math.ceil(V.hi * X)) + 1)


def _lhs_progression(p: ProgressionPoisson, V: WeightFunction) -> complex:
    c = (inverse(p.f * p.g, p.r) * p.n) % p.r
    e = _support(V, p.E)
    keep = (e % p.r == c) & (np.gcd(e, p.lam) == 1)
    return complex(math.fsum(V(e[keep] / p.E)))


def _rhs_progression(p: ProgressionPoisson, V: WeightFunction, rel: float) -> tuple[complex, int]:
    total, count = 0j, 0
    for nu in _squarefree_divisors_coprime(p.lam, p.r):
        k = _dual_range(V, p.E / (nu * p.r), rel)
        phase = _roots(p.r)[(p.n * k * inverse(nu * p.f * p.g, p.r)) % p.r]
        inner = np.sum(phase * V.fourier(p.E * k / (nu * p.r)))
        total += mobius(nu) / nu * inner
        count += len(k)
    return p.E / p.r * total, count


def _lhs_kloosterman(p: KloostermanPoisson, V: WeightFunction) -> complex:
    c = (p.n * p.e * inverse(p.nu1 * p.g, p.r)) % p.r
    f = _support(V, p.F)
    f = f[np.gcd(f, p.alpha * p.r) == 1]
    finv = np.array([inverse(int(x), p.r) for x in f], dtype=np.int64)
    return complex(np.sum(_roots(p.r)[(c * finv) % p.r] * V(f / p.F)))


def _rhs_kloosterman(p: KloostermanPoisson, V: WeightFunction, rel: float) -> tuple[complex, int]:
    c = (p.n * p.e * inverse(p.nu1 * p.g, p.r)) % p.r
    row = kloosterman_row(c, p.r)
    total, count = 0j, 0
    for nu in _squarefree_divisors_coprime(p.alpha, p.r):
        k = _dual_range(V, p.F / (nu * p.r), rel)
        s = row[(inverse(nu, p.r) * k) % p.r]
        total += mobius(nu) / nu * np.sum(s * V.fourier(p.F * k / (nu * p.r)))
        count += len(k)
    return p.F / p.r * total, count


def _lhs_hyper(p: HyperKloostermanPoisson, V: WeightFunction) -> complex:
    x = (inverse(p.nu2, p.r) * p.f) % p.r
    g = _support(V, p.G)
    g = g[np.gcd(g, p.alpha * p.r) == 1]
    out = 0j
    for gg in g:
        y = (p.n * p.e * inverse(p.nu1 * int(gg), p.r)) % p.r
        out += kloosterman(x, y, p.r).value * V(gg / p.G)
    return out


def _rhs_hyper(p: HyperKloostermanPoisson, V: WeightFunction, rel: float) -> tuple[complex, int]:
    x = (inverse(p.nu2, p.r) * p.f) % p.r
    z = (inverse(p.nu1, p.r) * p.n * p.e) % p.r
    row = hyper_kloosterman_row(x, z, p.r)
    total, count = 0j, 0
    for nu in _squarefree_divisors_coprime(p.alpha, p.r):
        k = _dual_range(V, p.G / (nu * p.r), rel)
        s = row[(inverse(nu, p.r) * k) % p.r]
        total += mobius(nu) / nu * np.sum(s * V.fourier(p.G * k / (nu * p.r)))
        count += len(k)
    return p.G / p.r * total, count


_IDENTITIES = {
    ProgressionPoisson: (_lhs_progression, _rhs_progression),
    KloostermanPoisson: (_lhs_kloosterman, _rhs_kloosterman),
    HyperKloostermanPoisson: (_lhs_hyper, _rhs_hyper),
}


def poisson_residue_check(params, V: WeightFunction | None = None, rel: float = 1e-12) -> PoissonResidual:
    """Evaluate both sides of one of the three Poisson identities and return |LHS - RHS|.

    Dual sums stop where |V^| drops below ``rel`` times |V^(0)|.
    """
    if type(params) not in _IDENTITIES:
        raise TypeError(f"unknown parameter set {type(params).__name__}")
    params.check()
    V = V or v_default()
    lhs_fn, rhs_fn = _IDENTITIES[type(params)]
    lhs = lhs_fn(params, V)
    rhs, count = rhs_fn(params, V, rel)
    return PoissonResidual(lhs, complex(rhs), abs(lhs - rhs), count)


def random_poisson_params(kind: str, rng: np.random.Generator):
    """An admissible random parameter set for the chosen identity ('progression', 'kloosterman', 'hyper')."""
    r = int(rng.integers(2, 24))

    def coprime(limit: int) -> int:
        while True:
            x = int(rng.integers(1, limit))
            if math.gcd(x, r) == 1:
                return x

    if kind == "progression":
        return ProgressionPoisson(r, coprime(40), coprime(40), coprime(40), int(rng.integers(1, 61)),
                                  float(rng.uniform(5, 60)))
    if kind == "kloosterman":
        return KloostermanPoisson(int(rng.integers(1, 30)), int(rng.integers(1, 30)), coprime(12), coprime(30), r,
                                  int(rng.integers(1, 31)), float(rng.uniform(5, 60)))
    if kind == "hyper":
        return HyperKloostermanPoisson(coprime(12), coprime(12), int(rng.integers(1, 30)), int(rng.integers(1, 30)),
                                       int(rng.integers(1, 30)), r, int(rng.integers(1, 31)), float(rng.uniform(5, 40)))
    raise ValueError(f"unknown identity {kind!r}")


# --- bound sweeps ------------------------------------------------------------------------------


@dataclass
class SuiteResult:
    name: str
    checked: int
    violations: int
    worst: float  # largest observed ratio to the bound (or residual)
    detail: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.violations == 0


def weil_suite(pmax: int = 500) -> SuiteResult:
    """|S(a, b; p)| <= 2 sqrt(p) for all primes p <= pmax and 1 <= a, b < p."""
    checked = bad = 0
    worst = 0.0
    for p in primes_up_to(pmax):
        p = int(p)
        u, inv = _units(p)
        # row b: x -> e(b x^-1 / p); the FFT over x gives every a at once
        m = np.zeros((p - 1, p), dtype=complex)
        m[:, u] = _roots(p)[(np.arange(1, p)[:, None] * inv[None, :]) % p]
        table = np.abs(np.fft.ifft(m, axis=1) * p)[:, 1:]
        ratio = table / (2 * math.sqrt(p))
        checked += ratio.size
        bad += int(np.sum(ratio > 1 + 1e-12))
        worst = max(worst, float(ratio.max()))
    return SuiteResult("weil", checked, bad, worst)


def deligne_suite(pmax: int = 200, per_prime: int = 20, seed: int = 0) -> SuiteResult:
    """|KS(f, g, h; p)| <= 3p on random triples with p not dividing fgh."""
    rng = np.random.default_rng(seed)
    checked = bad = 0
    worst = 0.0
    for p in primes_up_to(pmax):
        p = int(p)
        for _ in range(per_prime):
            f, g, h = (int(x) for x in rng.integers(1, p, size=3)) if p > 2 else (1, 1, 1)
            ratio = abs(hyper_kloosterman(f, g, h, p).value) / (3 * p)
            checked += 1
            bad += ratio > 1 + 1e-12
            worst = max(worst, ratio)
    return SuiteResult("deligne", checked, int(bad), worst)


def _smith_triples(r: int, count: int) -> list[tuple[int, int, int]]:
    rng = np.random.default_rng(r)
    out = [tuple(int(x) for x in rng.integers(0, r, size=3)) for _ in range(count)]
    # make sure f sharing a factor with r is represented
    for d in divisors(r)[1:4]:
        out.append((d, int(rng.integers(1, r)) if r > 1 else 0, int(rng.integers(1, r)) if r > 1 else 0))
    return out


def smith_suite(fit_max: int = 50, check_max: int = 300, per_r: int = 20, exponent: float = 1.01) -> SuiteResult:
    """Fit C in |KS(f,g,h;r)| <= C r^exponent (f, r) on r <= fit_max, then test fit_max < r <= check_max."""
    def ratios(r: int) -> list[float]:
        return [abs(hyper_kloosterman(f, g, h, r).value) / (r**exponent * math.gcd(f, r))
                for f, g, h in _smith_triples(r, per_r)]

    def fit_ratios(r: int) -> list[float]:
        # for units f, g the sum only depends on f g h mod r, so (1, 1, m) covers that whole orbit
        full = [abs(hyper_kloosterman(1, 1, m, r).value) / r**exponent for m in range(r)]
        return ratios(r) + full

    C = max(max(fit_ratios(r)) for r in range(1, fit_max + 1))
    checked = bad = 0
    worst = 0.0
    for r in range(fit_max + 1, check_max + 1):
        for x in ratios(r):
            checked += 1
            bad += x > C * (1 + 1e-12)
            worst = max(worst, x / C)
    return SuiteResult("smith", checked, int(bad), worst, {"C": C, "exponent": exponent})


def ramanujan_suite(rmax: int = 300, nmax: int = 300) -> SuiteResult:
    worst = 0.0
    checked = bad = 0
    n = np.arange(-nmax, nmax + 1)
    for r in range(1, rmax + 1):
        u, _ = _units(r)
        direct = _roots(r)[(n[:, None] * u[None, :]) % r].sum(axis=1)
        closed = np.array([ramanujan_sum(r, int(x)).value for x in n])
        err = np.abs(direct - closed)
        checked += len(n)
        bad += int(np.sum(err > 1e-9))
        worst = max(worst, float(err.max()))
    return SuiteResult("ramanujan", checked, bad, worst)


def twisted_multiplicativity_suite(cmax: int = 400, pairs: int = 4, seed: int = 1) -> SuiteResult:
    """S(a, b; c1 c2) = S(a c2^-2, b; c1) S(a c1^-2, b; c2) for coprime c1, c2 >= 2."""
    rng = np.random.default_rng(seed)
    checked = bad = 0
    worst = 0.0
    for c1 in range(2, cmax // 2 + 1):
        for c2 in range(c1 + 1, cmax // c1 + 1):
            if math.gcd(c1, c2) != 1:
                continue
            for _ in range(pairs):
                a, b = (int(x) for x in rng.integers(0, c1 * c2, size=2))
                whole = kloosterman(a, b, c1 * c2).value
                i2, i1 = inverse(c2, c1), inverse(c1, c2)
                split = kloosterman(a * i2 * i2, b, c1).value * kloosterman(a * i1 * i1, b, c2).value
                err = abs(whole - split)
                checked += 1
                bad += err > 1e-9
                worst = max(worst, err)
    return SuiteResult("twisted", checked, int(bad), worst)


def degenerate_hyper_suite(rmax: int = 60, seed: int = 2) -> SuiteResult:
    """KS(f, 0, h; r) = r_r(f) r_r(h)."""
    rng = np.random.default_rng(seed)
    checked = bad = 0
    worst = 0.0
    for r in range(1, rmax + 1):
        for _ in range(5):
            f, h = (int(x) for x in rng.integers(0, 2 * r + 1, size=2))
            err = abs(hyper_kloosterman(f, 0, h, r).value - ramanujan_sum(r, f).value * ramanujan_sum(r, h).value)
            checked += 1
            bad += err > 1e-9
            worst = max(worst, err)
    return SuiteResult("degenerate_hyper", checked, int(bad), worst)


def poisson_suite(count: int = 30, seed: int = 3, tol: float = 1e-6) -> SuiteResult:
    rng = np.random.default_rng(seed)
    checked = bad = 0
    worst = 0.0
    per_kind = {}
    for kind in ("progression", "kloosterman", "hyper"):
        kw = 0.0
        for _ in range(count):
            res = poisson_residue_check(random_poisson_params(kind, rng))
            checked += 1
            bad += res.residual > tol
            kw = max(kw, res.residual)
        per_kind[kind] = kw
        worst = max(worst, kw)
    return SuiteResult("poisson", checked, int(bad), worst, per_kind)


SUITES = {
    "weil": weil_suite,
    "deligne": deligne_suite,
    "smith": smith_suite,
    "ramanujan": ramanujan_suite,
    "twisted": twisted_multiplicativity_suite,
    "degenerate": degenerate_hyper_suite,
    "poisson": poisson_suite,
}
