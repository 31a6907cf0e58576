"""Brute-force embedding numbers by enumerating optimal embeddings mod p^N.

A point is the tuple of images of the order's generators, each written in
the coordinates (a, b, c / p^r, d) of the standard Eichler order E_r and
reduced mod p^N.  Optimality is the mod-p independence of the coordinates
of 1 and the generator images.  Orbits are taken under generators of
Q_p^* E_r^*, plus the Atkin-Lehner element for e2/e4 and automorphisms of
the order for e3/e4.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from ..errors import NotStabilized, UnsupportedKind
from ..orders import OrderSpec
from ..padic import mod_pk, unit_group_generators, vp
from .formulas import NO_EMBEDDING, EVector, make_evector
from .orbits import DEFAULT_BUDGET, closure, fixed_orbits, orbit_labels

ONE = (1, 0, 0, 1)


def default_oracle_precision(kind: str, r: int, t: int) -> int:
    if kind == "triangular":
        return t + 1
    return max(1, r)


def default_grid(r: int, t: int) -> int:
    return r + t + 2


def ecoords(m, p: int, r: int, N: int) -> Optional[tuple[int, int, int, int]]:
    """E_r-coordinates mod p^N of a rational matrix, or None if m is not in E_r."""
    a, b, c, d = m[0], m[1], Fraction(m[2]) / p**r, m[3]
    if any(vp(x, p) < 0 for x in (a, b, c, d)):
        return None
    return tuple(mod_pk(x, p, N) for x in (a, b, c, d))


def rank_mod_p(vecs, p: int) -> int:
    rows = [[x % p for x in v] for v in vecs]
    rk = 0
    for c in range(len(rows[0])):
        piv = next((i for i in range(rk, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[rk], rows[piv] = rows[piv], rows[rk]
        inv = pow(rows[rk][c], -1, p)
        for i in range(len(rows)):
            if i != rk and rows[i][c]:
                f = rows[i][c] * inv
                rows[i] = [(x - f * y) % p for x, y in zip(rows[i], rows[rk])]
        rk += 1
    return rk


def conjugate(g, X, p: int, r: int, N: int):
    """g X g^-1 in E-coordinates, for g = [[g11, g12], [p^r g21, g22]]."""
    mod = p**N
    g11, g12, g21, g22 = g
    a, b, c, d = X
    pr = p**r
    di = pow((g11 * g22 - pr * g12 * g21) % mod, -1, mod)
    A = g11 * a + pr * g12 * c
    B = g11 * b + g12 * d
    C = g21 * a + g22 * c
    D = pr * g21 * b + g22 * d
    out = (A * g22 - pr * g21 * B, -A * g12 + g11 * B, C * g22 - g21 * D, -pr * C * g12 + D * g11)
    return tuple(x * di % mod for x in out)


# --- parametrization -------------------------------------------------------
# points of P1 are primitive integer vectors (x, y) standing for x/y


def _v(x: int, p: int) -> float:
    return vp(x, p) if x else float("inf")


def scaled_ecoords(nums, e: int, unit: int, p: int, r: int, N: int):
    """E-coordinates mod p^N of the matrix nums * p^e / unit, or None if outside E_r."""
    mod = p**N
    uinv = pow(unit, -1, mod)
    out = []
    for i, x in enumerate(nums):
        k = e - r if i == 2 else e
        if x == 0:
            out.append(0)
            continue
        if _v(x, p) + k < 0:
            return None
        y = x * p**k if k >= 0 else x // p ** (-k)
        out.append(y * uinv % mod)
    return tuple(out)


def nilpotent_nums(A):
    """Rank-one nilpotent with image and kernel the line of A."""
    x, y = A
    return (-x * y, x * x, -y * y, x * y)


def projector_nums(A, C, p: int):
    """(numerators, valuation, unit) of the projector with image A and kernel C."""
    det = A[0] * C[1] - A[1] * C[0]
    if det == 0:
        return None
    d = int(vp(det, p))
    return (A[0] * C[1], -A[0] * C[0], A[1] * C[1], -A[1] * C[0]), d, det // p**d


def end_orbit_reps(p: int, r: int) -> list:
    """One end from each E_r^*-orbit on P1: 0, p^-j (0 < j < r), infinity."""
    if r == 0:
        return [(0, 1)]
    return [(0, 1)] + [(1, p**j) for j in range(1, r)] + [(1, 0)]


def end_grid(p: int, K: int) -> list:
    return [(1, 0)] + [(z, 1) for z in range(p**K)] + [(1, p * y) for y in range(1, p ** (K - 1))]


def _primitive_nilpotent(A, p: int, r: int):
    """Nilpotent with image A, scaled so its E-coordinates are primitive."""
    nums = nilpotent_nums(A)
    w = min(_v(x, p) - (r if i == 2 else 0) for i, x in enumerate(nums))
    return nums, -int(w)


def seeds(kind: str, p: int, r: int, t: int, N: int, K: int) -> set:
    mod = p**N
    units = [e for e in range(1, mod) if e % p]
    pts = set()
    for A in end_orbit_reps(p, r):
        if kind in ("nilpotent", "triangular"):
            nums, w = _primitive_nilpotent(A, p, r)
            base = scaled_ecoords(nums, w, 1, p, r, N)
            Ms = [tuple(eps * x % mod for x in base) for eps in units]
        if kind == "nilpotent":
            # for 0 and infinity a diagonal unit already rescales the nilpotent
            for M in Ms if A not in ((0, 1), (1, 0)) else Ms[:1]:
                if rank_mod_p([ONE, M], p) == 2:
                    pts.add((M,))
            continue
        if kind not in ("split", "triangular"):
            raise UnsupportedKind(f"oracle does not handle kind {kind!r}")
        for C in end_grid(p, K):
            proj = projector_nums(A, C, p)
            if proj is None:
                continue
            nums, d, u = proj
            Q = scaled_ecoords(nums, t - d, u, p, r, N)
            if Q is None:
                continue
            if kind == "split":
                if rank_mod_p([ONE, Q], p) == 2:
                    pts.add((Q,))
            elif (Q, Ms[0]) not in pts:
                for M in Ms:
                    if rank_mod_p([ONE, Q, M], p) == 3:
                        pts.add((Q, M))
    return pts


# --- moves -----------------------------------------------------------------


def gamma1_generators(p: int, r: int, N: int) -> list:
    """1 + e12, 1 + p^r e21 and diag(g, 1); in E-coordinates form (g11, g12, g21, g22)."""
    gens = [(1, 1, 0, 1), (1, 0, 1, 1)]
    gens += [(g, 0, 0, 1) for g in unit_group_generators(p, N)]
    return gens


def _conj_move(g, p, r, N):
    return lambda X: tuple(conjugate(g, x, p, r, N) for x in X)


def atkin_lehner(X):
    return tuple((x[3], x[2], x[1], x[0]) for x in X)


def automorphism_moves(kind: str, p: int, t: int, N: int) -> list:
    mod = p**N
    gens = unit_group_generators(p, N)
    if kind == "nilpotent":
        return [lambda X, g=g: tuple(tuple(g * y % mod for y in x) for x in X) for g in gens]
    if kind == "split":
        q = p**t % mod

        def swap(X):
            a, b, c, d = X[0]
            return (((q - a) % mod, -b % mod, -c % mod, (q - d) % mod),)

        return [swap]
    moves = [lambda X, g=g: (X[0], tuple(g * y % mod for y in X[1])) for g in gens]
    moves.append(lambda X: (tuple((x - y) % mod for x, y in zip(X[0], X[1])), X[1]))
    return moves


@dataclass(frozen=True)
class OrbitCounts:
    e: tuple[int, int, int, int]
    points: int
    seeds: int
    fixed_x: int
    fixed_y: int

    @property
    def merge_ok(self) -> bool:
        e1, e2, e3, e4 = self.e
        return 2 * e2 == e1 + self.fixed_x and 2 * e4 == e3 + self.fixed_y


def count_orbits(kind: str, p: int, r: int, t: int, N: int, K: int, budget: int = DEFAULT_BUDGET) -> OrbitCounts:
    start = seeds(kind, p, r, t, N, K)
    g1 = [_conj_move(g, p, r, N) for g in gamma1_generators(p, r, N)]
    aut = automorphism_moves(kind, p, t, N)
    pts = closure(start, g1 + [atkin_lehner] + aut, budget)
    lab1 = orbit_labels(pts, g1, budget)
    lab3 = orbit_labels(pts, g1 + aut, budget)
    e1 = len(set(lab1.values()))
    e2 = len(set(orbit_labels(pts, g1 + [atkin_lehner], budget).values()))
    e3 = len(set(lab3.values()))
    e4 = len(set(orbit_labels(pts, g1 + aut + [atkin_lehner], budget).values()))
    return OrbitCounts(
        (e1, e2, e3, e4), len(pts), len(start), fixed_orbits(lab1, atkin_lehner), fixed_orbits(lab3, atkin_lehner)
    )


@dataclass(frozen=True)
class OracleReport:
    evector: EVector
    precision: int
    grid: int
    counts: OrbitCounts
    counts_next: OrbitCounts
    stats: dict = field(default_factory=dict)

    @property
    def stabilized(self) -> bool:
        return self.counts.e == self.counts_next.e

    @property
    def merge_ok(self) -> bool:
        return self.counts.merge_ok and self.counts_next.merge_ok


def oracle_evector(
    p: int,
    spec: OrderSpec,
    r: int,
    N: Optional[int] = None,
    K: Optional[int] = None,
    budget: int = DEFAULT_BUDGET,
    require_stable: bool = True,
) -> OracleReport:
    if spec.kind not in ("nilpotent", "split", "triangular"):
        raise UnsupportedKind(f"oracle does not handle kind {spec.kind!r}")
    t = spec.t if spec.kind != "nilpotent" else 0
    N = N or default_oracle_precision(spec.kind, r, t)
    K = K or default_grid(r, t)
    now = count_orbits(spec.kind, p, r, t, N, K, budget)
    nxt = count_orbits(spec.kind, p, r, t, N + 1, K + 1, budget)
    reason = NO_EMBEDDING if now.points == 0 else None
    rep = OracleReport(make_evector(now.e, "oracle", reason=reason), N, K, now, nxt)
    if require_stable and not rep.stabilized:
        raise NotStabilized(f"counts {now.e} at N={N} but {nxt.e} at N={N + 1}")
    return rep
