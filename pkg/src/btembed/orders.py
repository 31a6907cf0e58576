"""Suborders of M2(Q_p), their branches in the tree, and optimality tests.

Matrices are 4-tuples (a, b, c, d) of Fractions for [[a, b], [c, d]].
An order is Z_p * 1 + sum Z_p * g over its generators g.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Optional, Sequence, Union

from .errors import NotContained, UnsupportedKind
from .localmod import hermite_form, saturation_basis
from .padic import INFINITE, vp
from .tree import Ball, Walk, ball_distance, ball_geodesic, enumerate_region, neighbors

Mat = tuple[Fraction, Fraction, Fraction, Fraction]

KINDS = ("trivial", "nilpotent", "split", "triangular", "eichler")

IDENTITY: Mat = (Fraction(1), Fraction(0), Fraction(0), Fraction(1))


def mat(a, b, c, d) -> Mat:
    return (Fraction(a), Fraction(b), Fraction(c), Fraction(d))


def mat_mul(x: Mat, y: Mat) -> Mat:
    a, b, c, d = x
    e, f, g, h = y
    return (a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)


def mat_scale(x: Mat, s) -> Mat:
    return tuple(Fraction(s) * v for v in x)


@dataclass(frozen=True)
class OrderSpec:
    kind: str
    p: int
    t: int = 0
    r: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise UnsupportedKind(f"unknown order kind {self.kind!r}")
        if self.t < 0 or self.r < 0:
            raise ValueError("t and r must be >= 0")


@dataclass(frozen=True)
class MatrixOrder:
    p: int
    generators: tuple[Mat, ...]

    def module_key(self):
        return hermite_form([IDENTITY, *self.generators], self.p)

    def contains(self, x: Mat) -> bool:
        return hermite_form([IDENTITY, *self.generators, x], self.p) == self.module_key()

    def is_closed(self) -> bool:
        gs = [IDENTITY, *self.generators]
        return all(self.contains(mat_mul(x, y)) for x in gs for y in gs)

    @property
    def rank(self) -> int:
        return len(self.module_key())


def standard_order(spec: OrderSpec) -> MatrixOrder:
    p, t, r = spec.p, spec.t, spec.r
    q = p**t
    gens = {
        "trivial": [],
        "nilpotent": [mat(0, 1, 0, 0)],
        "split": [mat(q, 0, 0, 0)],
        "triangular": [mat(q, 0, 0, 0), mat(0, q, 0, 0)],
        "eichler": [mat(q, 0, 0, 0), mat(0, q, 0, 0), mat(0, 0, q * p**r, 0)],
    }[spec.kind]
    return MatrixOrder(p, tuple(gens))


def bracket_t(H: MatrixOrder, t: int) -> MatrixOrder:
    if t < 0:
        raise ValueError("t must be >= 0")
    return MatrixOrder(H.p, tuple(mat_scale(g, Fraction(H.p) ** t) for g in H.generators))


def conjugate_into_ball(g: Mat, B: Ball) -> Mat:
    """g written in the basis (z, 1), (p^n, 0) of the lattice of B."""
    z, q = B.center, Fraction(B.p) ** B.n
    basis = (z, q, Fraction(1), Fraction(0))
    inv = (Fraction(0), Fraction(1), 1 / q, -z / q)
    return mat_mul(inv, mat_mul(g, basis))


def is_integral(x: Mat, p: int) -> bool:
    return all(vp(v, p) >= 0 for v in x)


def vertex_contains_order(H: MatrixOrder, B: Ball) -> bool:
    return all(is_integral(conjugate_into_ball(g, B), H.p) for g in H.generators)


def branch_bruteforce(H: MatrixOrder, base: Ball, R: int) -> set[Ball]:
    return {v for v in enumerate_region(base, R) if vertex_contains_order(H, v)}


# --- branches --------------------------------------------------------------
# ends in descriptors are exact rationals, None meaning infinity


@dataclass(frozen=True)
class Point:
    vertex: Ball


@dataclass(frozen=True)
class FinitePath:
    walk: Walk


@dataclass(frozen=True)
class Ray:
    origin: Ball
    end: Optional[Fraction] = None


@dataclass(frozen=True)
class Apartment:
    end1: Optional[Fraction]
    end2: Optional[Fraction]


Stem = Union[Point, FinitePath, Ray, Apartment]


def _join_level(v: Ball, x: Fraction) -> float:
    return min(v.n, vp(v.center - x, v.p))


def nearest_stem_vertex(stem: Stem, v: Ball) -> Ball:
    p = v.p
    if isinstance(stem, Point):
        return stem.vertex
    if isinstance(stem, FinitePath):
        return min(stem.walk, key=lambda w: (ball_distance(v, w), w.sort_key()))
    if isinstance(stem, Ray):
        O = stem.origin
        if stem.end is None:
            return Ball(p, O.center, int(min(O.n, _join_level(v, O.center))))
        j = _join_level(v, stem.end)
        if j >= O.n:
            return Ball(p, stem.end, int(j))
        return O
    x, y = stem.end1, stem.end2
    if x is None:
        x, y = y, x
    if y is None:
        return Ball(p, x, int(_join_level(v, x)))
    j0 = int(vp(x - y, p))
    jx, jy = _join_level(v, x), _join_level(v, y)
    if jx >= jy and jx >= j0:
        return Ball(p, x, int(jx))
    if jy >= j0:
        return Ball(p, y, int(jy))
    return Ball(p, x, j0)


def distance_to_stem(stem: Stem, v: Ball) -> int:
    return ball_distance(v, nearest_stem_vertex(stem, v))


@dataclass(frozen=True)
class Branch:
    """Descriptor of the set of maximal orders containing an order.

    kind "thick": vertices within ``depth`` of ``stem``;
    kind "leaf": the balls B with n <= ``level`` (an infinite leaf at infinity);
    kind "whole": every vertex."""

    kind: str
    stem: Optional[Stem] = None
    depth: int = 0
    level: int = 0

    def contains(self, v: Ball) -> bool:
        if self.kind == "whole":
            return True
        if self.kind == "leaf":
            return v.n <= self.level
        return distance_to_stem(self.stem, v) <= self.depth

    def is_endpoint(self, v: Ball) -> bool:
        if self.kind == "whole":
            return False
        if self.kind == "leaf":
            return v.n == self.level
        return distance_to_stem(self.stem, v) == self.depth

    def on_stem(self, v: Ball) -> bool:
        return self.kind == "thick" and distance_to_stem(self.stem, v) == 0

    def restrict(self, region: Iterable[Ball]) -> set[Ball]:
        return {v for v in region if self.contains(v)}


WHOLE_TREE = Branch("whole")


def branch_symbolic(spec: OrderSpec) -> Branch:
    p, t, r = spec.p, spec.t, spec.r
    o = Ball(p, 0, 0)
    if spec.kind == "trivial":
        return WHOLE_TREE
    if spec.kind == "nilpotent":
        return Branch("leaf", level=0)
    if spec.kind == "split":
        return Branch("thick", Apartment(Fraction(0), None), t)
    if spec.kind == "triangular":
        return Branch("thick", Ray(o), t)
    path = Walk(tuple(Ball(p, 0, -k) for k in range(r + 1)))
    return Branch("thick", FinitePath(path), t)


def thicken(S: Union[Branch, Iterable[Ball]], t: int):
    if t < 0:
        raise ValueError("t must be >= 0")
    if isinstance(S, Branch):
        if S.kind == "thick":
            return Branch("thick", S.stem, S.depth + t)
        if S.kind == "leaf":
            return Branch("leaf", level=S.level + t)
        return S
    out = set()
    for v in S:
        out.update(enumerate_region(v, t))
    return out


def parity_violations(branch: Branch, vertices: Iterable[Ball]) -> list[tuple[Ball, Ball]]:
    """Endpoint pairs breaking: distance = (stem points on the path) - 1 mod 2,
    or distance even when the path misses the stem."""
    ends = [v for v in vertices if branch.is_endpoint(v)]
    bad = []
    for v, w in combinations(ends, 2):
        path = ball_geodesic(v, w)
        c = sum(1 for x in path if branch.on_stem(x))
        want = (c - 1) % 2 if c > 0 else 0
        if (len(path) - 1) % 2 != want:
            bad.append((v, w))
    return bad


# --- Eichler orders and optimality ------------------------------------------


@dataclass(frozen=True)
class EichlerOrder:
    """Intersection of the maximal orders at the two ends of ``path``."""

    path: Walk

    @property
    def level(self) -> int:
        return self.path.length

    @property
    def p(self) -> int:
        return self.path[0].p

    @classmethod
    def standard(cls, p: int, r: int) -> EichlerOrder:
        return cls(Walk(tuple(Ball(p, 0, -k) for k in range(r + 1))))

    def functionals(self, x: Mat) -> list[Fraction]:
        ends = {self.path[0], self.path[-1]}
        out = []
        for B in sorted(ends, key=Ball.sort_key):
            out.extend(conjugate_into_ball(x, B))
        return out

    def contains(self, x: Mat) -> bool:
        return all(vp(v, self.p) >= 0 for v in self.functionals(x))


def algebra_basis(L: Union[OrderSpec, MatrixOrder, Sequence[Mat]]) -> list[Mat]:
    """Spanning matrices of the algebra, identity excluded."""
    if isinstance(L, OrderSpec):
        L = standard_order(L)
    if isinstance(L, MatrixOrder):
        return list(L.generators)
    return [tuple(Fraction(v) for v in g) for g in L]


def _combine(coeffs: Sequence[Fraction], basis: Sequence[Mat]) -> Mat:
    out = [Fraction(0)] * 4
    for c, g in zip(coeffs, basis):
        for i in range(4):
            out[i] += c * g[i]
    return tuple(out)


def intersect_with_eichler(L: Union[OrderSpec, MatrixOrder, Sequence[Mat]], E: EichlerOrder) -> MatrixOrder:
    """The largest order of the algebra spanned by 1 and L that lies in E."""
    p = E.p
    basis = algebra_basis(L) + [IDENTITY]
    if len(hermite_form(basis, p)) != len(basis):
        raise ValueError("spanning matrices are linearly dependent with 1")
    M = [list(col) for col in zip(*(E.functionals(g) for g in basis))]
    lattice = hermite_form(saturation_basis(M, p), p)
    # 1 lies in E and is primitive there, so the last Hermite vector is 1
    assert lattice[-1] == tuple(Fraction(int(i == len(basis) - 1)) for i in range(len(basis)))
    gens = tuple(_combine(c, basis) for c in lattice[:-1])
    return MatrixOrder(p, gens)


def is_optimal(H: MatrixOrder, E: EichlerOrder) -> bool:
    for g in H.generators:
        if not E.contains(g):
            raise NotContained("order is not contained in the Eichler order")
    return intersect_with_eichler(H, E).module_key() == H.module_key()


def is_optimal_rank3_geometric(R: Branch, P: Walk) -> bool:
    """Optimality of the order with thick-ray branch R in the Eichler order of P."""
    if R.kind != "thick" or not isinstance(R.stem, Ray):
        raise ValueError("expects a thick ray")
    for v in P:
        if not R.contains(v):
            raise NotContained(f"{v} is outside the branch")
    v0, vr = P[0], P[-1]
    if not (R.is_endpoint(v0) and R.is_endpoint(vr)):
        return False
    border = R.stem.origin
    if border not in (nearest_stem_vertex(R.stem, v0), nearest_stem_vertex(R.stem, vr)):
        return False
    return P.length >= 2 * R.depth


def walks_in(contains, start: Ball, length: int) -> list[Walk]:
    """All no-backtracking walks of the given length from ``start`` inside a vertex predicate."""
    out = []
    stack = [(start,)]
    while stack:
        w = stack.pop()
        if len(w) == length + 1:
            out.append(Walk(w))
            continue
        for C in neighbors(w[-1]):
            if (len(w) < 2 or C != w[-2]) and contains(C):
                stack.append(w + (C,))
    return out
