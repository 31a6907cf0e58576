"""PGL2(Q_p) acting on P1 and on the tree, plus cross-ratio tools.

Convention: [[a, b], [c, d]] is z -> (az + b)/(cz + d) on ends and acts on a
ball through its lattice (columns (z, 1), (p^n, 0)).  With this choice
[[1, 1], [0, 1]] is z -> z + 1 and fixes exactly the balls with n <= 0.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .errors import IndistinguishableEnds, ShapeMismatch
from .padic import PAdicScalar, Rational, from_fraction, vp
from .tree import (
    INFINITY,
    Ball,
    End,
    Hull,
    Lattice2,
    QuartetShape,
    ball_distance,
    ball_geodesic,
    ball_lattice_roundtrip,
    canonical_ball,
    hull_of,
    lattice_to_ball,
    neighbors,
)

__all__ = [
    "MoebiusMap",
    "QuartetShape",
    "apply_to_end",
    "act_on_ball_lattice",
    "act_on_ball_partition",
    "cross_ratio",
    "map_from_triples",
    "triplets_conjugate",
    "quartets_conjugate",
    "ends_beyond",
]

DEFAULT_N = 32


@dataclass(frozen=True, eq=False)
class MoebiusMap:
    a: PAdicScalar
    b: PAdicScalar
    c: PAdicScalar
    d: PAdicScalar

    def __post_init__(self):
        ents = (self.a, self.b, self.c, self.d)
        if (self.a * self.d - self.b * self.c).is_zero():
            raise ValueError("matrix is singular")
        k = min(x.valuation for x in ents)
        if k != 0:
            s = Fraction(self.p) ** (-k)
            for name, x in zip("abcd", ents):
                object.__setattr__(self, name, x * s)

    @property
    def p(self) -> int:
        return self.a.p

    @classmethod
    def from_entries(cls, p: int, a: Rational, b: Rational, c: Rational, d: Rational, N: int = DEFAULT_N):
        return cls(*(from_fraction(p, x, N) for x in (a, b, c, d)))

    def entries(self):
        return self.a, self.b, self.c, self.d

    def __matmul__(self, other: MoebiusMap) -> MoebiusMap:
        a, b, c, d = self.entries()
        e, f, g, h = other.entries()
        return MoebiusMap(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)

    def inverse(self) -> MoebiusMap:
        return MoebiusMap(self.d, -self.b, -self.c, self.a)

    def same_as(self, other: MoebiusMap) -> bool:
        """Equality in PGL2: proportional entries."""
        x = self.entries()
        y = other.entries()
        i = next(k for k in range(4) if not x[k].is_zero())
        if y[i].is_zero():
            return False
        lam = y[i] / x[i]
        return all(yy == xx * lam for xx, yy in zip(x, y))

    def __repr__(self):
        return "MoebiusMap([[{}, {}], [{}, {}]])".format(*(x.lift() for x in self.entries()))


def apply_to_end(s: MoebiusMap, e: End) -> End:
    if e.is_infinity:
        if s.c.is_zero():
            return INFINITY
        return End(s.a / s.c)
    x = e.value
    den = s.c * x + s.d
    if den.is_zero():
        return INFINITY
    return End((s.a * x + s.b) / den)


def act_on_ball_lattice(s: MoebiusMap, B: Ball) -> Ball:
    N = min(x.precision for x in s.entries())
    u, w = ball_lattice_roundtrip(B, N).cols
    img = tuple((s.a * v[0] + s.b * v[1], s.c * v[0] + s.d * v[1]) for v in (u, w))
    return lattice_to_ball(Lattice2(img))


# --- partition action ------------------------------------------------------
# a P1-ball is ("in", B) for B itself or ("out", B) for its complement


def _translate(piece, t: PAdicScalar):
    kind, B = piece
    z = B.center + t.residue_rational(B.n)
    return kind, Ball(B.p, z, B.n)


def _scale(piece, s: PAdicScalar):
    kind, B = piece
    k = int(s.valuation)
    if B.center == 0:
        return kind, Ball(B.p, 0, B.n + k)
    z = s * from_fraction(B.p, B.center, s.precision)
    return kind, canonical_ball(B.p, z, B.n + k)


def _invert(piece):
    kind, B = piece
    p = B.p
    if B.center == 0:  # 0 is in B
        img = ("out", Ball(p, 0, 1 - B.n))
    else:
        m = int(vp(B.center, p))
        img = ("in", Ball(p, 1 / B.center, B.n - 2 * m))
    if kind == "out":
        img = ("in" if img[0] == "out" else "out", img[1])
    return img


def moebius_factors(s: MoebiusMap) -> list:
    """Elementary steps whose composition (left to right) is s."""
    a, b, c, d = s.entries()
    if c.is_zero():
        return [("scale", a / d), ("translate", b / d)]
    return [("translate", d / c), ("invert", None), ("scale", (b * c - a * d) / (c * c)), ("translate", a / c)]


def act_on_ball_partition(s: MoebiusMap, B: Ball) -> Ball:
    pieces = [("out", B)] + [("in", C) for C in neighbors(B)[1:]]
    for op, arg in moebius_factors(s):
        if op == "translate":
            pieces = [_translate(x, arg) for x in pieces]
        elif op == "scale":
            pieces = [_scale(x, arg) for x in pieces]
        else:
            pieces = [_invert(x) for x in pieces]
    outs = [X for kind, X in pieces if kind == "out"]
    if len(outs) != 1:
        raise AssertionError("partition image does not contain infinity exactly once")
    E = outs[0]
    kids = {X for kind, X in pieces if kind == "in"}
    if kids != set(neighbors(E)[1:]):
        raise AssertionError("partition image is not the partition of a ball")
    return E


# --- cross ratios ----------------------------------------------------------


def _check_distinct(ends: Sequence[End]) -> None:
    for i, x in enumerate(ends):
        for y in ends[i + 1:]:
            if x == y:
                raise IndistinguishableEnds("ends agree to stored precision")


def cross_ratio(a: End, b: End, c: End, d: End) -> PAdicScalar:
    """[a, b; c, d] = (a - c)(b - d) / ((b - c)(a - d)); factors with infinity drop."""
    _check_distinct([a, b, c, d])
    if a.is_infinity:
        return (b.value - d.value) / (b.value - c.value)
    if b.is_infinity:
        return (a.value - c.value) / (a.value - d.value)
    if c.is_infinity:
        return (b.value - d.value) / (a.value - d.value)
    if d.is_infinity:
        return (a.value - c.value) / (b.value - c.value)
    a, b, c, d = a.value, b.value, c.value, d.value
    return (a - c) * (b - d) / ((b - c) * (a - d))


def _to_standard(a: End, b: End, c: End, p: int, N: int) -> MoebiusMap:
    """The map sending (a, b, c) to (inf, 0, 1)."""
    one = from_fraction(p, 1, N)
    zero = from_fraction(p, 0, N)
    if a.is_infinity:
        return MoebiusMap(one, -b.value, zero, c.value - b.value)
    if b.is_infinity:
        return MoebiusMap(zero, c.value - a.value, one, -a.value)
    if c.is_infinity:
        return MoebiusMap(one, -b.value, one, -a.value)
    a, b, c = a.value, b.value, c.value
    return MoebiusMap(c - a, -b * (c - a), c - b, -a * (c - b))


def _prime_and_precision(ends: Sequence[End]) -> tuple[int, int]:
    vals = [e.value for e in ends if not e.is_infinity]
    return vals[0].p, min(v.precision for v in vals)


def map_from_triples(a: End, b: End, c: End, a2: End, b2: End, c2: End) -> MoebiusMap:
    _check_distinct([a, b, c])
    _check_distinct([a2, b2, c2])
    p, N = _prime_and_precision([a, b, c, a2, b2, c2])
    return _to_standard(a2, b2, c2, p, N).inverse() @ _to_standard(a, b, c, p, N)


# --- conjugacy of tuples of vertices -------------------------------------------


def _direction_order(B: Ball, C: Ball):
    # children first, by center; the parent last
    return (C.n < B.n, C.center)


def ends_beyond(balls: Sequence[Ball], N: int = DEFAULT_N) -> list[End]:
    """For each ball, an end whose ray from the hull passes through it.

    Picks the least neighbour not leading to another ball; a parent
    direction gives infinity, a child direction gives the child's center."""
    out = []
    for i, X in enumerate(balls):
        blocked = set()
        for j, Y in enumerate(balls):
            if j != i:
                blocked.add(ball_geodesic(X, Y)[1])
        free = sorted((C for C in neighbors(X) if C not in blocked), key=lambda C: _direction_order(X, C))
        if not free:
            raise ShapeMismatch(f"every direction at {X} leads to another ball")
        C = free[0]
        if C.n < X.n:
            out.append(INFINITY)
        else:
            out.append(End(from_fraction(X.p, C.center, N)))
    return out


def _pair_distances(S: Sequence[Ball]) -> tuple[int, ...]:
    return tuple(ball_distance(S[i], S[j]) for i in range(len(S)) for j in range(i + 1, len(S)))


def triplets_conjugate(S: Sequence[Ball], S2: Sequence[Ball], N: int = DEFAULT_N) -> Optional[MoebiusMap]:
    """A map sending S to S2 vertexwise, or None if the hulls differ."""
    if len(S) != 3 or len(S2) != 3:
        raise ValueError("need three balls on each side")
    hull_of(S)
    hull_of(S2)
    if _pair_distances(S) != _pair_distances(S2):
        return None
    e, e2 = ends_beyond(S, N), ends_beyond(S2, N)
    s = map_from_triples(*e, *e2)
    if [act_on_ball_lattice(s, X) for X in S] != list(S2):
        return None
    return s


def _quartet_hull(S: Sequence[Ball]) -> Hull:
    h = hull_of(S)
    if not h.shape.u_is_min:
        raise ShapeMismatch("u is not the minimum of (r, s, t, u)")
    return h


def quartets_conjugate(
    S: Sequence[Ball],
    S2: Sequence[Ball],
    ends: Optional[Sequence[End]] = None,
    ends2: Optional[Sequence[End]] = None,
    N: int = DEFAULT_N,
) -> bool:
    """Whether some map sends the quartet S to S2 (split as AB | CD)."""
    h, h2 = _quartet_hull(S), _quartet_hull(S2)
    if h.shape != h2.shape:
        return False
    m = h.shape.m
    if m == 0:  # congruence mod 1 is vacuous
        return True
    ends = list(ends) if ends is not None else ends_beyond(S, N)
    ends2 = list(ends2) if ends2 is not None else ends_beyond(S2, N)
    diff = cross_ratio(*ends) - cross_ratio(*ends2)
    return diff.is_zero() or diff.valuation >= m
