"""Embedding numbers from the tree: classify Eichler paths against a fixed branch.

With the order fixed in standard position, Γ1-classes of optimal embeddings
are oriented paths P (length r, optimal for the order) modulo the centralizer
of the order's algebra.  Reversing P accounts for the Atkin-Lehner element;
the normalizer of the order accounts for passing to image orders.

Keys, one canonical value per class:
  nilpotent   translate the n=0 end of P to B_0^[0]; key (side, i, c p^i mod p^(r-i))
              where B_0^[-i] is the top of P and its far end is B_c^[r-2i]
  split       shift P so its start projects to B_0^[0], then fix the unit
              rotation vertex by vertex; key is the normalized path
  triangular  trivial centralizer; key is the path itself
"""
from __future__ import annotations

from fractions import Fraction
from typing import Callable, Iterable

from ..errors import ShapeMismatch, UnsupportedKind
from ..moebius import MoebiusMap, act_on_ball_lattice
from ..orders import (
    Branch,
    OrderSpec,
    branch_symbolic,
    distance_to_stem,
    is_optimal_rank3_geometric,
    nearest_stem_vertex,
    walks_in,
)
from ..padic import mod_pk, split_unit, unit_group_generators, vp
from ..tree import Ball, Walk, enumerate_region
from .formulas import NO_EMBEDDING, EVector, make_evector

Key = tuple


def _shift(P: Walk, s: Fraction) -> Walk:
    return Walk(tuple(Ball(B.p, B.center + s, B.n) for B in P))


def _scale(P: Walk, u: Fraction) -> Walk:
    """z -> u z on vertices, for u = p^k * unit."""
    out = []
    for B in P:
        k = int(vp(u, B.p))
        out.append(Ball(B.p, B.center * u, B.n + k))
    return Walk(tuple(out))


def is_optimal_placement(branch: Branch, kind: str, P: Walk) -> bool:
    if not all(branch.contains(v) for v in P):
        return False
    if kind == "nilpotent":
        return any(v.n == branch.level for v in P)
    if kind == "split":
        return max(distance_to_stem(branch.stem, v) for v in P) == branch.depth
    return is_optimal_rank3_geometric(branch, P)


# --- keys ------------------------------------------------------------------


def _nilpotent_key(P: Walk, r: int) -> Key:
    side = "head"
    if P[0].n != 0:
        side, P = "tail", P.reversed()
    P = _shift(P, -P[0].center)
    top = min(v.n for v in P)
    i = -top
    far = P[-1]
    p = far.p
    cls = mod_pk(far.center * Fraction(p) ** i, p, r - i) if r - i > 0 else 0
    return (side, i, cls)


def _split_normal_form(P: Walk) -> tuple:
    p = P[0].p
    # move the projection of the start onto B_0^[0]
    v0 = P[0]
    j = int(min(v0.n, vp(v0.center, p)))
    P = _scale(P, Fraction(p) ** (-j))
    k = 0  # residual rotations are the units = 1 mod p^k
    for idx in range(len(P)):
        B = P[idx]
        if B.center == 0 or vp(B.center, p) >= B.n:
            continue
        m, w = split_unit(B.center, p)
        depth = B.n - m
        if depth <= k:
            continue
        w = mod_pk(w, p, depth)
        target = 1 if k == 0 else w % p**k
        u = target * pow(w, -1, p**depth) % p**depth
        P = _scale(P, Fraction(u))
        k = depth
    return tuple((B.center, B.n) for B in P)


def invariant_key(p: int, spec: OrderSpec, r: int, configuration: Walk) -> Key:
    """Canonical key of an oriented Eichler path placed against the standard branch."""
    if configuration.length != r:
        raise ShapeMismatch("path length differs from the level")
    branch = branch_symbolic(spec)
    if not is_optimal_placement(branch, spec.kind, configuration):
        raise ShapeMismatch("not an optimal placement")
    if spec.kind == "nilpotent":
        return _nilpotent_key(configuration, r)
    if spec.kind == "split":
        return _split_normal_form(configuration)
    if spec.kind == "triangular":
        return tuple((B.center, B.n) for B in configuration)
    raise UnsupportedKind(spec.kind)


# --- enumeration -----------------------------------------------------------


def _starts(p: int, spec: OrderSpec, r: int, branch: Branch) -> list[Ball]:
    o = Ball(p, 0, 0)
    if spec.kind == "nilpotent":
        return [o]
    if spec.kind == "split":
        return [v for v in enumerate_region(o, spec.t) if nearest_stem_vertex(branch.stem, v) == o]
    # triangular: one end projects within r of the border
    return [v for v in enumerate_region(o, r + spec.t) if branch.contains(v) and nearest_stem_vertex(branch.stem, v).n >= -r]


def configurations(p: int, spec: OrderSpec, r: int) -> list[Walk]:
    """Optimal oriented paths meeting every class (several per class allowed)."""
    branch = branch_symbolic(spec)
    out = []
    for v0 in _starts(p, spec, r, branch):
        for P in walks_in(branch.contains, v0, r):
            if is_optimal_placement(branch, spec.kind, P):
                out.append(P)
                out.append(P.reversed())
    return out


def normalizer_moves(p: int, spec: OrderSpec, r: int) -> list[Callable[[Walk], Walk]]:
    """Elements normalizing the order but not centralizing its algebra."""
    K = r + spec.t + 2
    units = [Fraction(g) for g in unit_group_generators(p, K)]
    if spec.kind == "nilpotent":
        return [lambda P, g=g: _scale(P, g) for g in units]
    if spec.kind == "split":
        inv = MoebiusMap.from_entries(p, 0, 1, 1, 0)
        return [lambda P: Walk(tuple(act_on_ball_lattice(inv, B) for B in P))]
    return [lambda P: _shift(P, Fraction(1))] + [lambda P, g=g: _scale(P, g) for g in units]


def _components(keys: dict, moves: Iterable[Callable[[Walk], Walk]], key_of) -> int:
    parent = {k: k for k in keys}

    def find(k):
        while parent[k] != k:
            parent[k] = parent[parent[k]]
            k = parent[k]
        return k

    for k, P in keys.items():
        for mv in moves:
            k2 = key_of(mv(P))
            if k2 not in parent:
                raise AssertionError(f"move left the enumerated classes: {k2}")
            a, b = find(k), find(k2)
            if a != b:
                parent[a] = b
    return len({find(k) for k in keys})


def evector_keys(p: int, spec: OrderSpec, r: int) -> EVector:
    if spec.kind not in ("nilpotent", "split", "triangular"):
        raise UnsupportedKind(f"no key classification for {spec.kind!r}")
    key_of = lambda P: invariant_key(p, spec, r, P)
    reps: dict = {}
    for P in configurations(p, spec, r):
        reps.setdefault(key_of(P), P)
    if not reps:
        return make_evector((0, 0, 0, 0), "keys", reason=NO_EMBEDDING)
    rev = [Walk.reversed]
    norm = normalizer_moves(p, spec, r)
    e = (
        len(reps),
        _components(reps, rev, key_of),
        _components(reps, norm, key_of),
        _components(reps, rev + norm, key_of),
    )
    return make_evector(e, "keys")
