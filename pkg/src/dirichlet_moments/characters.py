"""Dirichlet characters mod q built from CRT generators, with conductors and Gauss sums."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .arith import divisors, euler_phi, factorize, mobius


@dataclass(frozen=True)
class CyclicComponent:
    """One cyclic factor of (Z/qZ)*: generator ``gen`` of order ``order`` living mod ``prime_power``."""

    prime_power: int
    gen: int
    order: int


def primitive_root(pe: int) -> int:
    """Smallest primitive root mod an odd prime power."""
    f = factorize(pe)
    if len(f) != 1 or f.primes[0] == 2:
        raise ValueError(f"{pe} is not an odd prime power")
    phi = euler_phi(pe)
    qs = factorize(phi).primes
    for g in range(2, pe):
        if math.gcd(g, pe) == 1 and all(pow(g, phi // r, pe) != 1 for r in qs):
            return g
    raise ArithmeticError(f"no primitive root mod {pe}")


def _components(q: int) -> list[CyclicComponent]:
    comps = []
    for p, e in factorize(q):
        pe = p**e
        if p == 2:
            if e >= 2:
                comps.append(CyclicComponent(pe, pe - 1, 2))
            if e >= 3:
                comps.append(CyclicComponent(pe, 5, 2 ** (e - 2)))
        else:
            comps.append(CyclicComponent(pe, primitive_root(pe), pe - pe // p))
    return comps


def _discrete_logs(q: int, comps: list[CyclicComponent]) -> np.ndarray:
    """Row i holds log of (a mod p^e) w.r.t. component i, -1 on non-units of q."""
    a = np.arange(q)
    unit = np.gcd(a, q) == 1
    logs = np.full((len(comps), q), -1, dtype=np.int64)
    for i, c in enumerate(comps):
        pe = c.prime_power
        table = np.full(pe, -1, dtype=np.int64)
        if pe % 2 == 0 and c.gen == pe - 1:
            # sign component: a = (-1)^u 5^v
            table[np.arange(pe) % 4 == 1] = 0
            table[np.arange(pe) % 4 == 3] = 1
        elif pe % 2 == 0:
            x = 1
            for j in range(c.order):
                table[x] = j
                table[pe - x] = j
                x = x * 5 % pe
        else:
            x = 1
            for j in range(c.order):
                table[x] = j
                x = x * c.gen % pe
        logs[i] = np.where(unit, table[a % pe], -1)
    return logs


@dataclass(frozen=True)
class CharacterGroup:
    """All characters mod q as integer phase rows over a common root-of-unity order."""

    modulus: int
    components: tuple[CyclicComponent, ...]
    exponents: np.ndarray  # (phi(q), ncomp)
    phase_order: int  # chi(a) = exp(2 pi i phase / phase_order)
    phases: np.ndarray  # (phi(q), q), -1 on non-units
    values: np.ndarray  # complex (phi(q), q)
    conductors: np.ndarray
    even: np.ndarray
    conj_index: np.ndarray

    @property
    def primitive_even(self) -> np.ndarray:
        return np.flatnonzero((self.conductors == self.modulus) & self.even)


def _conductors(q: int, phases: np.ndarray) -> np.ndarray:
    a = np.arange(q)
    unit = np.gcd(a, q) == 1
    cond = np.full(phases.shape[0], q, dtype=np.int64)
    done = np.zeros(phases.shape[0], dtype=bool)
    for d in divisors(q):
        # chi is induced from mod d iff chi is trivial on units congruent to 1 mod d
        kernel = unit & (a % d == 1 % d)
        trivial = np.all(phases[:, kernel] == 0, axis=1) & ~done
        cond[trivial] = d
        done |= trivial
    return cond


@lru_cache(maxsize=16)
def character_group(q: int) -> CharacterGroup:
    if q < 1:
        raise ValueError(f"modulus must be positive, got {q}")
    comps = _components(q)
    orders = [c.order for c in comps]
    L = math.lcm(*orders) if orders else 1
    tuples = list(itertools.product(*[range(n) for n in orders]))
    exps = np.array(tuples, dtype=np.int64).reshape(len(tuples), len(comps))
    logs = _discrete_logs(q, comps)
    unit = np.gcd(np.arange(q), q) == 1
    scale = np.array([L // n for n in orders], dtype=np.int64)
    phases = ((exps * scale) @ np.where(logs < 0, 0, logs)) % L if comps else np.zeros((1, q), dtype=np.int64)
    phases[:, ~unit] = -1
    roots = np.exp(2j * np.pi * np.arange(L) / L)
    values = np.where(phases >= 0, roots[np.maximum(phases, 0)], 0)
    values.setflags(write=False)
    phases.setflags(write=False)
    even = phases[:, (q - 1) % q] == 0
    conj_exps = (-exps) % np.array(orders, dtype=np.int64) if comps else exps
    # exponent tuples are enumerated in lexicographic order, so a mixed-radix rank recovers the index
    radix = np.ones(len(comps), dtype=np.int64)
    for i in range(len(comps) - 2, -1, -1):
        radix[i] = radix[i + 1] * orders[i + 1]
    conj_index = conj_exps @ radix if comps else np.zeros(1, dtype=np.int64)
    return CharacterGroup(
        modulus=q,
        components=tuple(comps),
        exponents=exps,
        phase_order=L,
        phases=phases,
        values=values,
        conductors=_conductors(q, phases),
        even=even,
        conj_index=conj_index,
    )


@dataclass(frozen=True)
class DirichletCharacter:
    modulus: int
    component_exponents: tuple[int, ...]
    conductor: int
    parity: str
    values: np.ndarray = field(repr=False, compare=False)
    index: int = 0

    @property
    def is_primitive(self) -> bool:
        return self.conductor == self.modulus

    @property
    def is_even(self) -> bool:
        return self.parity == "even"

    @property
    def is_principal(self) -> bool:
        return self.index == 0

    def __call__(self, a: int) -> complex:
        return complex(self.values[a % self.modulus])

    def conjugate(self) -> "DirichletCharacter":
        grp = character_group(self.modulus)
        return _make(grp, int(grp.conj_index[self.index]))


def _make(grp: CharacterGroup, i: int) -> DirichletCharacter:
    return DirichletCharacter(
        modulus=grp.modulus,
        component_exponents=tuple(int(k) for k in grp.exponents[i]),
        conductor=int(grp.conductors[i]),
        parity="even" if grp.even[i] else "odd",
        values=grp.values[i],
        index=i,
    )


def enumerate_characters(q: int) -> list[DirichletCharacter]:
    """All phi(q) characters mod q; index 0 is the principal character."""
    grp = character_group(q)
    return [_make(grp, i) for i in range(grp.values.shape[0])]


def get_character(q: int, index: int) -> DirichletCharacter:
    grp = character_group(q)
    if not 0 <= index < grp.values.shape[0]:
        raise ValueError(f"character index {index} out of range for modulus {q}")
    return _make(grp, index)


def conductor(chi: DirichletCharacter) -> int:
    return int(_conductors(chi.modulus, character_group(chi.modulus).phases[[chi.index]])[0])


def primitive_even_characters(q: int) -> list[DirichletCharacter]:
    grp = character_group(q)
    return [_make(grp, int(i)) for i in grp.primitive_even]


def count_primitive_even(q: int) -> int:
    return len(character_group(q).primitive_even)


def phi_flat(q: int) -> int:
    """Closed-form count of primitive even characters mod q (no enumeration)."""
    total = 0
    total2 = 0
    for r in divisors(q):
        term = mobius(q // r) * euler_phi(r)
        total += term
        if r <= 2:
            total2 += term
    return (total + total2) // 2


@dataclass(frozen=True)
class GaussSumResult:
    value: complex
    modulus_root: float


def gauss_sum(chi: DirichletCharacter) -> GaussSumResult:
    q = chi.modulus
    a = np.arange(q)
    tau = complex(np.sum(chi.values * np.exp(2j * np.pi * a / q)))
    return GaussSumResult(tau, math.sqrt(q))


def orthogonality_sides(q: int, m: int, n: int) -> tuple[complex, complex]:
    """Character sum over primitive even chi of chi(m) conj(chi(n)), and its divisor-sum evaluation."""
    if math.gcd(m * n, q) != 1:
        raise ValueError(f"gcd({m}*{n}, {q}) > 1")
    grp = character_group(q)
    rows = grp.values[grp.primitive_even]
    lhs = complex(np.sum(rows[:, m % q] * np.conj(rows[:, n % q])))
    rhs = 0
    for r in divisors(q):
        hits = ((m + n) % r == 0) + ((m - n) % r == 0)
        if hits:
            rhs += mobius(q // r) * euler_phi(r) * hits
    return lhs, complex(rhs / 2)
