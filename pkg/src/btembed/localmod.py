"""Lattices over the local ring Z_(p) inside Q^k, with exact Fractions.

Smith form gives saturations {c : M c integral}; a lower-triangular Hermite
form gives a canonical basis, so module equality is key equality.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .padic import INFINITE, frac_mod, vp

Matrix = list[list[Fraction]]


def _min_entry(rows: Matrix, p: int, r0: int, c0: int):
    best = None
    for i in range(r0, len(rows)):
        for j in range(c0, len(rows[0])):
            v = vp(rows[i][j], p)
            if v != INFINITE and (best is None or v < best[0]):
                best = (v, i, j)
    return best


def saturation_basis(M: Sequence[Sequence], p: int) -> list[list[Fraction]]:
    """Basis (as column vectors) of {c in Q_p^k : M c has p-integral entries}.

    M is m x k of full column rank."""
    rows = [[Fraction(x) for x in row] for row in M]
    m, k = len(rows), len(rows[0])
    # C tracks the column operations; the answer is C * diag(p^-d)
    C = [[Fraction(int(i == j)) for j in range(k)] for i in range(k)]
    ds = []
    for s in range(k):
        piv = _min_entry(rows, p, s, s)
        if piv is None:
            raise ValueError("matrix does not have full column rank")
        d, i, j = piv
        rows[s], rows[i] = rows[i], rows[s]
        for R in rows:
            R[s], R[j] = R[j], R[s]
        for R in C:
            R[s], R[j] = R[j], R[s]
        a = rows[s][s]
        for i2 in range(m):
            if i2 != s and rows[i2][s]:
                f = rows[i2][s] / a
                rows[i2] = [x - f * y for x, y in zip(rows[i2], rows[s])]
        for j2 in range(s + 1, k):
            if rows[s][j2]:
                f = rows[s][j2] / a
                for R in rows:
                    R[j2] -= f * R[s]
                for R in C:
                    R[j2] -= f * R[s]
        ds.append(d)
    return [[C[i][j] / Fraction(p) ** ds[j] for i in range(k)] for j in range(k)]


def hermite_form(gens: Sequence[Sequence], p: int) -> tuple[tuple[Fraction, ...], ...]:
    """Canonical basis of the Z_(p)-span of ``gens`` (vectors in Q^k).

    Column-style lower-triangular form: basis vector j has zeros above its
    pivot row, pivot p^d, and entries below reduced modulo later pivots."""
    cols = [[Fraction(x) for x in g] for g in gens if any(g)]
    if not cols:
        return ()
    k = len(cols[0])
    basis: list[list[Fraction]] = []
    pivots: list[tuple[int, int]] = []
    for row in range(k):
        live = [c for c in cols if c[row] != 0]
        if not live:
            continue
        best = min(live, key=lambda c: vp(c[row], p))
        rest = [c for c in cols if c is not best]
        d = vp(best[row], p)
        best = [x * Fraction(p) ** d / best[row] for x in best]
        new_rest = []
        for c in rest:
            if c[row]:
                f = c[row] / best[row]
                c = [x - f * y for x, y in zip(c, best)]
            if any(c):
                new_rest.append(c)
        cols = new_rest
        basis.append(best)
        pivots.append((row, int(d)))
    # reduce entries below each pivot by the later basis vectors
    for j in range(len(basis)):
        for jj in range(j + 1, len(basis)):
            row, d = pivots[jj]
            x = basis[j][row]
            red = frac_mod(x, p, d)
            f = (x - red) / basis[jj][row]
            basis[j] = [a - f * b for a, b in zip(basis[j], basis[jj])]
    return tuple(tuple(b) for b in basis)


def same_module(a: Sequence[Sequence], b: Sequence[Sequence], p: int) -> bool:
    return hermite_form(a, p) == hermite_form(b, p)
