"""Bounded-precision arithmetic in Q_p.

A nonzero scalar is stored as ``p**valuation * unit`` with the unit known
modulo ``p**precision``.  Zero is the exact value with valuation INFINITE.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Union

from .errors import DivisionByZero, PrecisionExhausted

INFINITE = math.inf

Rational = Union[int, Fraction]


def vp(x: Rational, p: int) -> float:
    """p-adic valuation of an exact rational (INFINITE for 0)."""
    x = Fraction(x)
    if x == 0:
        return INFINITE
    num, den = x.numerator, x.denominator
    k = 0
    while num % p == 0:
        num //= p
        k += 1
    while den % p == 0:
        den //= p
        k -= 1
    return k


def split_unit(x: Rational, p: int) -> tuple[int, Fraction]:
    """x = p**k * u with u a p-adic unit; returns (k, u)."""
    k = vp(x, p)
    if k == INFINITE:
        raise DivisionByZero("zero has no unit part")
    return k, Fraction(x) / Fraction(p) ** k


def mod_pk(x: Rational, p: int, m: int) -> int:
    """Residue in [0, p^m) of a rational with nonnegative valuation."""
    x = Fraction(x)
    if m <= 0:
        return 0
    mod = p**m
    if x.denominator % p == 0:
        raise ValueError(f"{x} is not {p}-integral")
    return x.numerator * pow(x.denominator, -1, mod) % mod


def frac_mod(x: Rational, p: int, n: int) -> Fraction:
    """Canonical representative of x modulo p^n (n may be negative).

    The result has a p-power denominator and lies in [0, p^n)."""
    x = Fraction(x)
    w = x / Fraction(p) ** n
    k = vp(w, p)
    if k == INFINITE or k >= 0:
        return Fraction(0)
    m = -int(k)
    num = w.numerator
    den = w.denominator // p**m
    r = num * pow(den, -1, p**m) % p**m
    return Fraction(r, p**m) * Fraction(p) ** n


@dataclass(frozen=True, eq=False)
class PAdicScalar:
    p: int
    valuation: float  # int, or INFINITE for zero
    unit: int
    precision: int

    def __post_init__(self):
        if self.precision < 1:
            raise ValueError("precision must be positive")
        if self.valuation == INFINITE:
            object.__setattr__(self, "unit", 0)
        else:
            u = self.unit % self.p**self.precision
            if u % self.p == 0:
                raise ValueError("unit must be prime to p")
            object.__setattr__(self, "unit", u)
            object.__setattr__(self, "valuation", int(self.valuation))

    # --- basic views ---
    def is_zero(self) -> bool:
        return self.valuation == INFINITE

    @property
    def abs_precision(self) -> float:
        """Exponent m such that the value is known modulo p^m."""
        if self.is_zero():
            return INFINITE
        return self.valuation + self.precision

    def lift(self) -> Fraction:
        """The canonical rational representative p^v * unit."""
        if self.is_zero():
            return Fraction(0)
        return Fraction(self.p) ** self.valuation * self.unit

    def residue(self, m: int) -> int:
        """The value modulo p^m as an integer; needs valuation >= 0."""
        if m <= 0 or self.is_zero():
            return 0
        if self.valuation < 0:
            raise ValueError("scalar is not integral")
        if self.valuation >= m:
            return 0
        if self.abs_precision < m:
            raise PrecisionExhausted(f"need digits up to p^{m}, have p^{self.abs_precision}")
        return self.unit * self.p**self.valuation % self.p**m

    def residue_rational(self, m: int) -> Fraction:
        """Canonical representative modulo p^m for any valuation."""
        if self.is_zero():
            return Fraction(0)
        if self.abs_precision < m and self.valuation < m:
            raise PrecisionExhausted(f"need digits up to p^{m}, have p^{self.abs_precision}")
        return frac_mod(self.lift(), self.p, m)

    def truncate(self, N: int) -> PAdicScalar:
        if N > self.precision:
            raise PrecisionExhausted("cannot extend precision")
        return PAdicScalar(self.p, self.valuation, self.unit, N)

    # --- arithmetic ---
    def _coerce(self, other) -> PAdicScalar:
        if isinstance(other, PAdicScalar):
            if other.p != self.p:
                raise ValueError("mixed primes")
            return other
        if isinstance(other, (int, Fraction)):
            return from_fraction(self.p, other, self.precision)
        return NotImplemented

    def __neg__(self):
        if self.is_zero():
            return self
        return PAdicScalar(self.p, self.valuation, -self.unit, self.precision)

    def __add__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        a = self
        if a.is_zero():
            return b
        if b.is_zero():
            return a
        if a == -b:
            return zero(a.p, min(a.precision, b.precision))
        if a.valuation > b.valuation:
            a, b = b, a
        d = b.valuation - a.valuation
        k = min(a.precision, d + b.precision)
        s = (a.unit + self.p**d * b.unit) % self.p**k
        # s != 0 here: equal valuations with s == 0 means a == -b
        w = 0
        while s % self.p == 0:
            s //= self.p
            w += 1
        return PAdicScalar(self.p, a.valuation + w, s, k - w)

    __radd__ = __add__

    def __sub__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        return self + (-b)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        n = min(self.precision, b.precision)
        if self.is_zero() or b.is_zero():
            return zero(self.p, n)
        return PAdicScalar(self.p, self.valuation + b.valuation, self.unit * b.unit, n)

    __rmul__ = __mul__

    def inverse(self) -> PAdicScalar:
        if self.is_zero():
            raise DivisionByZero("inverse of zero")
        mod = self.p**self.precision
        return PAdicScalar(self.p, -self.valuation, pow(self.unit, -1, mod), self.precision)

    def __truediv__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        return self * b.inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = one(self.p, self.precision)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = from_fraction(self.p, other, self.precision)
        if not isinstance(other, PAdicScalar):
            return NotImplemented
        if other.p != self.p or self.valuation != other.valuation:
            return False
        if self.is_zero():
            return True
        n = min(self.precision, other.precision)
        return (self.unit - other.unit) % self.p**n == 0

    __hash__ = None

    def __repr__(self):
        if self.is_zero():
            return f"PAdicScalar(p={self.p}, 0)"
        return f"PAdicScalar(p={self.p}, v={self.valuation}, unit={self.unit} mod {self.p}^{self.precision})"


def zero(p: int, N: int = 1) -> PAdicScalar:
    return PAdicScalar(p, INFINITE, 0, N)


def one(p: int, N: int) -> PAdicScalar:
    return PAdicScalar(p, 0, 1, N)


def scalar_from_rational(p: int, numerator: int, denominator: int, N: int) -> PAdicScalar:
    if denominator == 0:
        raise DivisionByZero("zero denominator")
    return from_fraction(p, Fraction(numerator, denominator), N)


def from_fraction(p: int, x: Rational, N: int) -> PAdicScalar:
    x = Fraction(x)
    if x == 0:
        return zero(p, N)
    k, u = split_unit(x, p)
    return PAdicScalar(p, k, mod_pk(u, p, N), N)


def field_ops(a: PAdicScalar, b: PAdicScalar, op: str) -> PAdicScalar:
    if a.p != b.p:
        raise ValueError("mixed primes")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown op {op!r}")


def valuation_of(a: PAdicScalar) -> float:
    return a.valuation


@dataclass(frozen=True)
class ResidueUnitSet:
    p: int
    m: int

    def __iter__(self) -> Iterator[int]:
        if self.m == 0:
            yield 0
            return
        for a in range(1, self.p**self.m):
            if a % self.p:
                yield a

    def __len__(self) -> int:
        if self.m == 0:
            return 1
        return (self.p - 1) * self.p ** (self.m - 1)

    def __contains__(self, a) -> bool:
        if self.m == 0:
            return True
        return a % self.p != 0


def residue_units(p: int, m: int) -> ResidueUnitSet:
    if m < 0:
        raise ValueError("exponent must be >= 0")
    return ResidueUnitSet(p, m)


def _prime_factors(n: int) -> list[int]:
    out, q = [], 2
    while q * q <= n:
        if n % q == 0:
            out.append(q)
            while n % q == 0:
                n //= q
        q += 1
    if n > 1:
        out.append(n)
    return out


@lru_cache(maxsize=None)
def unit_group_generators(p: int, m: int) -> tuple[int, ...]:
    """Generators of (Z/p^m)^*: a primitive root for odd p, {-1, 5} for p = 2."""
    if m <= 0 or p**m <= 2:
        return (1,)
    mod = p**m
    if p == 2:
        return ((-1) % mod, 5 % mod) if m >= 3 else ((-1) % mod,)
    order = (p - 1) * p ** (m - 1)
    qs = _prime_factors(order)
    for g in range(2, mod):
        if g % p and all(pow(g, order // q, mod) != 1 for q in qs):
            return (g,)
    raise AssertionError("no primitive root")  # unreachable for odd primes


def is_prime(n: int) -> bool:
    return n >= 2 and _prime_factors(n) == [n]


def default_precision(r: int = 0, t: int = 0) -> int:
    env = os.environ.get("BTE_PRECISION")
    if env:
        return int(env)
    return r + 2 * t + 6
