"""Closed formulas for the local embedding numbers e1..e4."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

from ..errors import DomainViolation, UnsupportedKind
from ..orders import OrderSpec
from ..padic import residue_units, vp

Number = Union[int, Fraction]

CONVENTIONS = ("one", "two", "auto")


@dataclass(frozen=True)
class EVector:
    raw: tuple[Fraction, Fraction, Fraction, Fraction]
    method: str
    reason: Optional[str] = None
    convention: Optional[str] = None

    @property
    def flags(self) -> tuple[bool, ...]:
        return tuple(x.denominator != 1 for x in self.raw)

    @property
    def integral(self) -> bool:
        return not any(self.flags)

    @property
    def e(self) -> tuple[Number, ...]:
        return tuple(int(x) if x.denominator == 1 else x for x in self.raw)

    @property
    def e1(self):
        return self.e[0]

    @property
    def e2(self):
        return self.e[1]

    @property
    def e3(self):
        return self.e[2]

    @property
    def e4(self):
        return self.e[3]

    @property
    def is_sentinel(self) -> bool:
        return self.reason is not None and all(x == 0 for x in self.raw)


def make_evector(values: Sequence[Number], method: str, reason=None, convention=None) -> EVector:
    return EVector(tuple(Fraction(x) for x in values), method, reason, convention)


NO_EMBEDDING = "no optimal embedding: r < 2t"


def _u0_value(conv: str) -> int:
    # "auto" defers to the evector level; alone it means the stated value 1
    return 2 if conv == "two" else 1


def chi(p: int, r: int, u: int, t: int, u0_convention: str = "one") -> int:
    """#{a in (Z/p^m)^* : a^2 = 1, v(a - 1) = t - r + u}, m = t - r + 2u.

    v(0) is read as m, i.e. a = 1 has distance exactly m from 1."""
    if u0_convention not in CONVENTIONS:
        raise ValueError(f"unknown convention {u0_convention!r}")
    m = t - r + 2 * u
    if not (max(0, r - t) <= u <= r // 2) or m < 0:
        raise DomainViolation(f"chi undefined at r={r}, u={u}, t={t}")
    if u == 0:
        return _u0_value(u0_convention)
    target = t - r + u
    mod = p**m
    count = 0
    for a in residue_units(p, m):
        if (a * a - 1) % mod:
            continue
        d = (a - 1) % mod
        if (m if d == 0 else vp(d, p)) == target:
            count += 1
    return count


@dataclass(frozen=True)
class Table1Row:
    regime: str
    n: Fraction
    n1: Fraction
    chi2: Fraction
    chi3: Fraction
    chi4: Fraction


def table1_row(p: int, r: int, t: int, u0_convention: str = "one") -> Table1Row:
    v, h = max(0, r - t), r // 2
    F = Fraction
    c = lambda u: F(chi(p, r, u, t, u0_convention))
    if r < 2 * t and r % 2:
        c3 = sum((c(u) for u in range(v, h + 1)), F(0))
        return Table1Row("odd_lt", F(p**h), F(0), F(0), c3, c3 / 2)
    if r < 2 * t:
        c2 = c(h)
        c3 = sum((c(u) for u in range(v, h + 1)), F(0))
        return Table1Row("even_lt", F(p**h), F((p - 1) * p**h, p), c2, c3, (c2 + c3) / 2)
    if r == 2 * t:
        c2 = c(t)
        return Table1Row("eq", F(p**t), F((p - 2) * p**t, p), c2, c2, c2)
    return Table1Row("gt", F(2 * p**t), F(2 * (p - 1) * p**t, p), F(0), F(0), F(0))


def _split(p: int, r: int, t: int, conv: str) -> EVector:
    if r == 0:
        return make_evector((1, 1, 1, 1), "formula", convention=conv)
    row = table1_row(p, r, t, conv)
    n, n1 = row.n, row.n1
    half = Fraction(1, 2)
    e = (
        2 * n - n1,
        n - n1 * half + row.chi2 * half,
        n - n1 * half + row.chi3 * half,
        n * half + row.chi4 * half,
    )
    return make_evector(e, "formula", convention=conv)


def _nilpotent(p: int, r: int) -> EVector:
    e1 = 1 if r == 0 else p ** (r // 2) + p ** ((r - 1) // 2)
    if r % 2 == 0 and vp(2, p) >= r // 2:
        e2 = Fraction(p ** (r // 2))
    else:
        e2 = Fraction(e1, 2)
    return make_evector((e1, e2, r + 1, (r + 2) // 2), "formula")


def _triangular(p: int, r: int, t: int) -> EVector:
    if r < 2 * t:
        return make_evector((0, 0, 0, 0), "formula", reason=NO_EMBEDDING)
    if t == 0:
        return make_evector((1, 1, 1, 1) if r == 0 else (2, 1, 2, 1), "formula")
    x = Fraction((p - 1) * p ** (2 * t - 1))
    if r == 2 * t:
        return make_evector((x, x / 2, 1, 1), "formula")
    return make_evector((2 * x, x, 2, 1), "formula")


def evector_formula(p: int, spec: OrderSpec, r: int, u0_convention: str = "one") -> EVector:
    if spec.kind == "nilpotent":
        return _nilpotent(p, r)
    if spec.kind == "triangular":
        return _triangular(p, r, spec.t)
    if spec.kind == "split":
        if u0_convention == "auto":
            first = _split(p, r, spec.t, "one")
            if first.integral:
                return first
            second = _split(p, r, spec.t, "two")
            return second if second.integral else first
        return _split(p, r, spec.t, u0_convention)
    raise UnsupportedKind(f"no closed formula for kind {spec.kind!r}")
