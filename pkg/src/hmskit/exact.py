"""Exact arithmetic in the cyclotomic fields Q(zeta_m).

Elements are stored as coefficient vectors in the power basis
1, x, ..., x^(phi(m)-1) of Q[x]/Phi_m(x), with x standing for
zeta_m = exp(2*pi*i/m).  Coefficients are :class:`fractions.Fraction`.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import Iterable, Sequence, Union

__all__ = [
    "CycScalar",
    "CyclotomicDivisionError",
    "cyclotomic_poly",
    "cyc_add",
    "cyc_mul",
    "cyc_inv",
    "embed_complex",
    "euler_phi",
    "zeta",
]


class CyclotomicDivisionError(ZeroDivisionError):
    """Raised when inverting the zero element of Q(zeta_m)."""


def _poly_trim(p: list) -> list:
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return p


def _poly_divmod(num: Sequence, den: Sequence) -> tuple[list, list]:
    """Long division of polynomials given low-to-high coefficient lists."""
    num = [Fraction(c) for c in num]
    den = _poly_trim([Fraction(c) for c in den])
    if len(den) == 1 and den[0] == 0:
        raise ZeroDivisionError("polynomial division by zero")
    if len(num) < len(den):
        return [Fraction(0)], _poly_trim(num)
    q = [Fraction(0)] * (len(num) - len(den) + 1)
    lead = den[-1]
    for k in range(len(num) - len(den), -1, -1):
        c = num[k + len(den) - 1] / lead
        q[k] = c
        if c:
            for i, d in enumerate(den):
                num[k + i] -= c * d
    return _poly_trim(q), _poly_trim(num[: len(den) - 1] or [Fraction(0)])


@lru_cache(maxsize=None)
def cyclotomic_poly(m: int) -> tuple[int, ...]:
    """Return Phi_m as integer coefficients, lowest degree first.

    Computed as (x^m - 1) divided exactly by Phi_d for every proper divisor d.
    """
    if m < 1:
        raise ValueError(f"cyclotomic order must be positive, got {m}")
    num: list = [Fraction(-1)] + [Fraction(0)] * (m - 1) + [Fraction(1)]
    for d in range(1, m):
        if m % d == 0:
            num, rem = _poly_divmod(num, cyclotomic_poly(d))
            assert all(r == 0 for r in rem), "inexact cyclotomic division"
    assert all(c.denominator == 1 for c in num)
    return tuple(int(c) for c in num)


@lru_cache(maxsize=None)
def euler_phi(m: int) -> int:
    return len(cyclotomic_poly(m)) - 1


@lru_cache(maxsize=None)
def _power_table(m: int) -> tuple[tuple[Fraction, ...], ...]:
    """Reductions of x^k mod Phi_m for 0 <= k < m (x^m = 1 covers the rest)."""
    phi = euler_phi(m)
    phi_m = cyclotomic_poly(m)
    rows = []
    cur = [Fraction(0)] * phi
    if phi:
        cur[0] = Fraction(1)
    for _ in range(m):
        rows.append(tuple(cur))
        # multiply by x and reduce with the monic Phi_m
        top = cur[-1]
        cur = [Fraction(0)] + cur[:-1]
        if top:
            cur = [c - top * phi_m[i] for i, c in enumerate(cur)]
    return tuple(rows)


Number = Union[int, Fraction, "CycScalar"]


class CycScalar:
    """Immutable element of Q(zeta_m)."""

    __slots__ = ("order", "coeffs", "_hash")

    def __init__(self, order: int, coeffs: Iterable):
        phi = euler_phi(order)
        cs = tuple(Fraction(c) for c in coeffs)
        if len(cs) > phi:
            cs = _reduce(order, cs)
        elif len(cs) < phi:
            cs = cs + (Fraction(0),) * (phi - len(cs))
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "coeffs", cs)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("CycScalar is immutable")

    # constructors -------------------------------------------------------
    @classmethod
    def from_rational(cls, order: int, value) -> "CycScalar":
        return cls(order, [Fraction(value)])

    @classmethod
    def zero(cls, order: int) -> "CycScalar":
        return cls(order, ())

    @classmethod
    def one(cls, order: int) -> "CycScalar":
        return cls(order, [1])

    # predicates ---------------------------------------------------------
    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def __bool__(self) -> bool:
        return not self.is_zero()

    def _coerce(self, other) -> "CycScalar":
        if isinstance(other, CycScalar):
            if other.order != self.order:
                raise ValueError(
                    f"mixed cyclotomic orders {self.order} and {other.order}"
                )
            return other
        if isinstance(other, (int, Rational)):
            return CycScalar(self.order, [Fraction(other)])
        return NotImplemented

    def __eq__(self, other) -> bool:
        o = self._coerce(other) if not isinstance(other, float) else NotImplemented
        if o is NotImplemented:
            return NotImplemented
        return self.coeffs == o.coeffs

    def __hash__(self) -> int:
        h = self._hash
        if h is None:
            h = hash((self.order, self.coeffs)) if not self.is_rational() else hash(self.coeffs[0] if self.coeffs else 0)
            object.__setattr__(self, "_hash", h)
        return h

    # arithmetic ---------------------------------------------------------
    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return _make(self.order, tuple(a + b for a, b in zip(self.coeffs, o.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return _make(self.order, tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return _make(self.order, tuple(a - b for a, b in zip(self.coeffs, o.coeffs)))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return CycScalar.zero(self.order)
            return _make(self.order, tuple(a * other for a in self.coeffs))
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return _make(self.order, _mul_coeffs(self.order, self.coeffs, o.coeffs))

    __rmul__ = __mul__

    def inverse(self) -> "CycScalar":
        return cyc_inv(self)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if o.is_rational():
            if o.coeffs[0] == 0:
                raise CyclotomicDivisionError("division by zero in Q(zeta_m)")
            return self * (1 / o.coeffs[0])
        return self * cyc_inv(o)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, k: int) -> "CycScalar":
        if k < 0:
            return cyc_inv(self) ** (-k)
        acc = CycScalar.one(self.order)
        base = self
        while k:
            if k & 1:
                acc = acc * base
            base = base * base
            k >>= 1
        return acc

    # display ------------------------------------------------------------
    def __repr__(self) -> str:
        return f"CycScalar({self.order}, {self})"

    def __str__(self) -> str:
        terms = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            mono = "" if i == 0 else ("z" if i == 1 else f"z^{i}")
            if mono and c == 1:
                terms.append(mono)
            elif mono and c == -1:
                terms.append("-" + mono)
            else:
                terms.append(f"{c}{'*' + mono if mono else ''}")
        return " + ".join(terms).replace("+ -", "- ") if terms else "0"

    def to_complex(self) -> complex:
        return embed_complex(self)


def _make(order: int, coeffs: tuple) -> CycScalar:
    obj = object.__new__(CycScalar)
    object.__setattr__(obj, "order", order)
    object.__setattr__(obj, "coeffs", coeffs)
    object.__setattr__(obj, "_hash", None)
    return obj


def _reduce(order: int, coeffs: Sequence[Fraction]) -> tuple[Fraction, ...]:
    phi = euler_phi(order)
    table = _power_table(order)
    out = [Fraction(0)] * phi
    for k, c in enumerate(coeffs):
        if not c:
            continue
        row = table[k % order]
        for i in range(phi):
            if row[i]:
                out[i] += c * row[i]
    return tuple(out)


def _mul_coeffs(order: int, a: tuple, b: tuple) -> tuple:
    phi = len(a)
    if phi == 1:
        return (a[0] * b[0],)
    prod = [Fraction(0)] * (2 * phi - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    prod[i + j] += x * y
    return _reduce(order, prod)


def zeta(m: int, k: int = 1) -> CycScalar:
    """zeta_m ** k as an exact element."""
    k %= m
    return CycScalar(m, [0] * k + [1])


def cyc_add(a: CycScalar, b: CycScalar) -> CycScalar:
    return a + b


def cyc_mul(a: CycScalar, b: CycScalar) -> CycScalar:
    return a * b


def cyc_inv(a: CycScalar) -> CycScalar:
    """Inverse modulo Phi_m via the extended Euclidean algorithm over Q."""
    if a.is_zero():
        raise CyclotomicDivisionError("zero has no inverse in Q(zeta_m)")
    if a.is_rational():
        return _make(a.order, (1 / a.coeffs[0],) + a.coeffs[1:])
    modulus = [Fraction(c) for c in cyclotomic_poly(a.order)]
    # invariants: s0 * a == r0, s1 * a == r1  (mod Phi_m)
    r0, r1 = modulus, _poly_trim(list(a.coeffs))
    s0, s1 = [Fraction(0)], [Fraction(1)]
    while not (len(r1) == 1 and r1[0] == 0):
        q, r = _poly_divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, _poly_sub(s0, _poly_mul(q, s1))
    # r0 is a nonzero constant because Phi_m is irreducible
    assert len(r0) == 1 and r0[0] != 0
    inv = [c / r0[0] for c in s0]
    return CycScalar(a.order, inv)


def _poly_mul(p: Sequence, q: Sequence) -> list:
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, x in enumerate(p):
        for j, y in enumerate(q):
            out[i + j] += x * y
    return _poly_trim(out)


def _poly_sub(p: Sequence, q: Sequence) -> list:
    n = max(len(p), len(q))
    p = list(p) + [Fraction(0)] * (n - len(p))
    q = list(q) + [Fraction(0)] * (n - len(q))
    return _poly_trim([x - y for x, y in zip(p, q)])


def embed_complex(a: CycScalar) -> complex:
    """Numeric image under zeta_m -> exp(2*pi*i/m)."""
    m = a.order
    total = 0j
    for k, c in enumerate(a.coeffs):
        if c:
            total += float(c) * cmath.exp(2j * math.pi * k / m)
    return complex(total)
