"""Zero tests for finite exponential sums ``sum_j c_j exp(-2 pi i theta_j)``.

With rational phases the sum is an element of the cyclotomic field Q(zeta_N),
where N is the common phase denominator. Writing it as a polynomial in
``zeta = exp(-2 pi i / N)`` it vanishes exactly when the N-th cyclotomic
polynomial divides that polynomial.
"""
from __future__ import annotations

import cmath
import math
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache, reduce
from typing import Iterable, NamedTuple

DEFAULT_TOL = 1e-9


class IrrationalPhaseError(ValueError):
    pass


# integer polynomials as tuples of coefficients, constant term first

def _trim(p: list[int]) -> list[int]:
    while p and p[-1] == 0:
        p.pop()
    return p


def poly_mul(p, q) -> tuple[int, ...]:
    out = [0] * (len(p) + len(q) - 1) if p and q else []
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return tuple(_trim(out))


def poly_divmod_monic(p, q) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Division by a monic integer polynomial; stays in the integers."""
    r = list(p)
    dq = len(q) - 1
    if len(r) <= dq:
        return (), tuple(_trim(r))
    quot = [0] * (len(r) - dq)
    for i in range(len(r) - 1, dq - 1, -1):
        c = r[i]
        if c:
            quot[i - dq] = c
            for j in range(dq + 1):
                r[i - dq + j] -= c * q[j]
    return tuple(_trim(quot)), tuple(_trim(r[:dq]))


def divisors(n: int) -> list[int]:
    small = [d for d in range(1, math.isqrt(n) + 1) if n % d == 0]
    return sorted(set(small + [n // d for d in small]))


@lru_cache(maxsize=None)
def cyclotomic_poly(n: int) -> tuple[int, ...]:
    """Phi_n, obtained by dividing x^n - 1 by Phi_d for every proper divisor d."""
    if n < 1:
        raise ValueError("n must be positive")
    p = (-1,) + (0,) * (n - 1) + (1,)
    for d in divisors(n)[:-1]:
        p, rem = poly_divmod_monic(p, cyclotomic_poly(d))
        assert not rem
    return p


@lru_cache(maxsize=64)
def _power_table(n: int) -> tuple[tuple[int, ...], ...]:
    """``x^k mod Phi_n`` for k = 0..n-1, each padded to length deg(Phi_n)."""
    phi = cyclotomic_poly(n)
    deg = len(phi) - 1
    table = []
    cur = [1] + [0] * (deg - 1) if deg else []
    for _ in range(n):
        table.append(tuple(cur))
        # multiply by x and reduce with the monic phi
        top = cur[-1] if deg else 0
        cur = [0] + cur[:-1] if deg else []
        if top:
            for j in range(deg):
                cur[j] -= top * phi[j]
    return tuple(table)


@dataclass
class ExponentialSum:
    """``sum c exp(-2 pi i phase)``.

    Rational phases are kept exactly, reduced to [0, 1), with equal phases
    merged. Irrational phases (floats) are carried separately and force the
    numeric route.
    """

    exact: dict[Fraction, Fraction] = field(default_factory=dict)
    numeric: list[tuple[float, float]] = field(default_factory=list)

    @classmethod
    def of(cls, terms: Iterable[tuple]) -> "ExponentialSum":
        s = cls()
        for c, phase in terms:
            s.add(c, phase)
        return s

    def add(self, coefficient, phase) -> None:
        if isinstance(phase, (int, Fraction)) and isinstance(coefficient, (int, Fraction)):
            ph = Fraction(phase) % 1
            c = self.exact.get(ph, Fraction(0)) + Fraction(coefficient)
            if c:
                self.exact[ph] = c
            else:
                self.exact.pop(ph, None)
        else:
            self.numeric.append((float(coefficient), float(phase) % 1.0))

    @property
    def is_exact(self) -> bool:
        return not self.numeric

    def terms(self) -> list[tuple]:
        return sorted(self.exact.items()) + list(self.numeric)

    def shifted(self, r) -> "ExponentialSum":
        """Multiply by the unit ``exp(-2 pi i r)``."""
        out = ExponentialSum()
        for ph, c in self.exact.items():
            out.add(c, ph + r)
        for c, ph in self.numeric:
            out.add(c, ph + float(r))
        return out

    def value(self) -> complex:
        re = [float(c) * math.cos(2 * math.pi * float(ph)) for ph, c in self.exact.items()]
        im = [-float(c) * math.sin(2 * math.pi * float(ph)) for ph, c in self.exact.items()]
        re += [c * math.cos(2 * math.pi * ph) for c, ph in self.numeric]
        im += [-c * math.sin(2 * math.pi * ph) for c, ph in self.numeric]
        return complex(math.fsum(re), math.fsum(im))

    def abs_weight(self) -> float:
        return math.fsum([abs(float(c)) for c in self.exact.values()]
                         + [abs(c) for c, _ in self.numeric])

    def __str__(self) -> str:
        parts = [f"{c}*e(-{ph})" for ph, c in sorted(self.exact.items())]
        parts += [f"{c:.12g}*e(-{ph:.12g})" for c, ph in self.numeric]
        return " + ".join(parts) if parts else "0"


def is_zero_exact(s: ExponentialSum) -> bool:
    if not s.is_exact:
        raise IrrationalPhaseError("irrational phase present; use is_zero_numeric")
    if not s.exact:
        return True
    n = reduce(math.lcm, (ph.denominator for ph in s.exact), 1)
    scale = reduce(math.lcm, (c.denominator for c in s.exact.values()), 1)
    table = _power_table(n)
    deg = len(table[0])
    acc = [0] * deg
    for ph, c in s.exact.items():
        k = int(ph * n)
        ci = int(c * scale)
        for j, t in enumerate(table[k]):
            if t:
                acc[j] += ci * t
    return not any(acc)


class NumericZero(NamedTuple):
    is_zero: bool
    magnitude: float
    error_bound: float
    mode: str = "numeric"


def is_zero_numeric(s: ExponentialSum, tol: float = DEFAULT_TOL) -> NumericZero:
    """Float evaluation with compensated summation and an a priori error bound.

    Each term carries at most a few ulps from cos/sin and the product, so the
    total error is bounded by ``8 eps sum |c|`` (fsum adds no further error
    beyond the final rounding).
    """
    v = s.value()
    bound = 8 * sys.float_info.epsilon * max(s.abs_weight(), 1.0)
    mag = abs(v)
    return NumericZero(mag <= tol, mag, bound)


def is_zero(s: ExponentialSum, tol: float = DEFAULT_TOL) -> tuple[bool, str]:
    """Exact test when possible, numeric otherwise; returns ``(zero, mode)``."""
    if s.is_exact:
        return is_zero_exact(s), "exact"
    return is_zero_numeric(s, tol).is_zero, "numeric"


def complex_str(z: complex) -> str:
    return f"{z.real:.12g}{z.imag:+.12g}j"


def phase_value(ph) -> complex:
    return cmath.exp(-2j * math.pi * float(ph))
