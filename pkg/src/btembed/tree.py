"""The Bruhat-Tits tree of PGL2(Q_p) as the graph of p-adic balls.

B_z^[n] = z + p^n Z_p.  Its lattice is spanned by the columns (z, 1) and
(p^n, 0); neighbours are the parent B_z^[n-1] and the p children.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

from .errors import IndistinguishableEnds, PrecisionExhausted, ShapeMismatch
from .padic import INFINITE, PAdicScalar, Rational, frac_mod, from_fraction, vp


@dataclass(frozen=True)
class Ball:
    p: int
    center: Fraction
    n: int

    def __post_init__(self):
        object.__setattr__(self, "center", frac_mod(self.center, self.p, self.n))

    def contains_point(self, x: Rational) -> bool:
        return vp(Fraction(x) - self.center, self.p) >= self.n

    def contains_ball(self, other: Ball) -> bool:
        return other.n >= self.n and self.contains_point(other.center)

    def center_scalar(self, N: int) -> PAdicScalar:
        return from_fraction(self.p, self.center, N)

    def sort_key(self):
        return (self.n, self.center)

    @property
    def label(self) -> str:
        return ball_label(self)

    def __repr__(self):
        return self.label


def ball_label(B: Ball) -> str:
    return f"B_{B.center}^[{B.n}]"


def canonical_ball(p: int, z: Union[Rational, PAdicScalar], n: int) -> Ball:
    if isinstance(z, PAdicScalar):
        z = z.residue_rational(n)
    return Ball(p, Fraction(z), n)


@dataclass(frozen=True, eq=False)
class End:
    """A point of P1(Q_p); ``value is None`` is the end at infinity."""

    value: Optional[PAdicScalar] = None

    @property
    def is_infinity(self) -> bool:
        return self.value is None

    def __eq__(self, other):
        if not isinstance(other, End):
            return NotImplemented
        if self.value is None or other.value is None:
            return self.value is None and other.value is None
        return self.value == other.value

    __hash__ = None

    def __repr__(self):
        if self.value is None:
            return "End(inf)"
        return f"End({self.value.lift()})"


INFINITY = End(None)


def end_at(p: int, x: Rational, N: int) -> End:
    return End(from_fraction(p, x, N))


def ball_distance(B: Ball, D: Ball) -> int:
    j = min(B.n, D.n, vp(B.center - D.center, B.p))
    return int(B.n - j + D.n - j)


def neighbors(B: Ball) -> list[Ball]:
    p = B.p
    step = Fraction(p) ** B.n
    return [Ball(p, B.center, B.n - 1)] + [Ball(p, B.center + i * step, B.n + 1) for i in range(p)]


def parent(B: Ball) -> Ball:
    return Ball(B.p, B.center, B.n - 1)


def children(B: Ball) -> list[Ball]:
    return neighbors(B)[1:]


def enumerate_region(base: Ball, R: int) -> list[Ball]:
    if R < 0:
        raise ValueError("radius must be >= 0")
    seen = {base: 0}
    order = [base]
    queue = deque([base])
    while queue:
        B = queue.popleft()
        if seen[B] == R:
            continue
        for C in neighbors(B):
            if C not in seen:
                seen[C] = seen[B] + 1
                order.append(C)
                queue.append(C)
    return order


# --- lattices ---------------------------------------------------------------


@dataclass(frozen=True)
class Lattice2:
    """Z_p-lattice in Q_p^2 given by two column generators."""

    cols: tuple[tuple[PAdicScalar, PAdicScalar], tuple[PAdicScalar, PAdicScalar]]

    @property
    def p(self) -> int:
        return self.cols[0][0].p


def ball_lattice_roundtrip(B: Ball, N: int = 32) -> Lattice2:
    p = B.p
    z = from_fraction(p, B.center, N)
    return Lattice2(((z, from_fraction(p, 1, N)), (from_fraction(p, Fraction(p) ** B.n, N), from_fraction(p, 0, N))))


def lattice_from_rows(p: int, rows, N: int = 32) -> Lattice2:
    """Build a lattice from a 2x2 array whose columns are the generators."""
    (a, b), (c, d) = rows
    f = lambda x: x if isinstance(x, PAdicScalar) else from_fraction(p, x, N)
    return Lattice2(((f(a), f(c)), (f(b), f(d))))


def lattice_to_ball(L: Lattice2) -> Ball:
    p = L.p
    u, w = L.cols
    if u[1].valuation > w[1].valuation:
        u, w = w, u
    if u[1].is_zero():
        raise PrecisionExhausted("lattice basis is singular to the stored precision")
    # (z, 1) := u / u2 spans the same line; then clear w's second coordinate
    z = u[0] / u[1]
    scale = u[1].valuation
    rest = w[0] - w[1] * z
    if rest.is_zero():
        raise PrecisionExhausted("lattice basis is singular to the stored precision")
    n = int(rest.valuation - scale)
    # homothety by p^-scale keeps the class; z is unaffected
    return canonical_ball(p, z, n)


# --- walks, geodesics, hulls -------------------------------------------------


@dataclass(frozen=True)
class Walk:
    vertices: tuple[Ball, ...]

    def __post_init__(self):
        vs = self.vertices
        if len(set(vs)) != len(vs):
            raise ValueError("walk repeats a vertex")
        for a, b in zip(vs, vs[1:]):
            if ball_distance(a, b) != 1:
                raise ValueError(f"{a} and {b} are not adjacent")

    @property
    def length(self) -> int:
        return len(self.vertices) - 1

    def reversed(self) -> Walk:
        return Walk(tuple(reversed(self.vertices)))

    def __iter__(self):
        return iter(self.vertices)

    def __len__(self):
        return len(self.vertices)

    def __getitem__(self, i):
        return self.vertices[i]


def ball_geodesic(A: Ball, B: Ball) -> list[Ball]:
    p = A.p
    j = int(min(A.n, B.n, vp(A.center - B.center, p)))
    up = [Ball(p, A.center, k) for k in range(A.n, j - 1, -1)]
    down = [Ball(p, B.center, k) for k in range(j + 1, B.n + 1)]
    return up + down


def _end_join(x: PAdicScalar, item) -> Optional[int]:
    """Level at which the ray towards the end x leaves ``item``."""
    p = x.p
    if isinstance(item, End):
        if item.is_infinity:
            return None
        d = x - item.value
        if d.is_zero():
            raise IndistinguishableEnds("ends agree to stored precision")
        return int(d.valuation)
    m = int(min(item.n, x.abs_precision))
    diff = x.lift() - item.center
    if frac_mod(diff, p, m) != 0:
        return int(vp(diff, p))
    if m == item.n:
        return item.n
    raise IndistinguishableEnds(f"stored precision cannot decide whether the end lies in {item}")


def _join(a, b) -> Optional[int]:
    if isinstance(a, Ball) and isinstance(b, Ball):
        return ball_distance_join(a, b)
    if isinstance(a, Ball):
        a, b = b, a
    return _end_join(a.value, b)


def truncate_items(items: Sequence, extent: int = 0) -> list[Ball]:
    """Replace ends by balls far enough along their rays.

    A finite end goes ``extent`` steps past its deepest branching with the
    other items; infinity goes ``extent`` steps above everything."""
    finite = [it for it in items if isinstance(it, Ball) or not it.is_infinity]
    if not finite:
        raise ValueError("need a finite item")
    first = finite[0]
    p = first.p if isinstance(first, Ball) else first.value.p
    out = []
    for it in items:
        if isinstance(it, Ball):
            out.append(it)
        elif it.is_infinity:
            levels = [a.n for a in finite if isinstance(a, Ball)]
            for i, a in enumerate(finite):
                levels += [_join(a, b) for b in finite[i + 1:]]
            if not levels:
                x = first.value
                levels = [0 if x.is_zero() else int(x.valuation)]
            T = min(levels)
            c = first.center if isinstance(first, Ball) else first.value.residue_rational(T)
            out.append(Ball(p, c, T - extent))
        else:
            x = it.value
            joins = [j for j in (_join(it, o) for o in items if o is not it) if j is not None]
            if not joins:
                joins = [0 if x.is_zero() else int(x.valuation)]
            L = min(max(joins) + extent, x.abs_precision)
            out.append(canonical_ball(p, x, int(L)))
    return out


def ball_distance_join(A: Ball, B: Ball) -> int:
    return int(min(A.n, B.n, vp(A.center - B.center, A.p)))


def geodesic(a: Union[Ball, End], b: Union[Ball, End], extent: int = 3) -> Walk:
    """The no-backtracking walk from a to b; ends are truncated ``extent``
    steps past the branching."""
    if isinstance(a, Ball) and isinstance(b, Ball):
        if a == b:
            raise ValueError("geodesic needs distinct endpoints")
        return Walk(tuple(ball_geodesic(a, b)))
    if isinstance(a, End) and isinstance(b, End) and a == b:
        raise IndistinguishableEnds("ends agree to stored precision")
    A, B = truncate_items([a, b], extent)
    return Walk(tuple(ball_geodesic(A, B)))


def median(A: Ball, B: Ball, C: Ball) -> Ball:
    common = set(ball_geodesic(A, B)) & set(ball_geodesic(B, C)) & set(ball_geodesic(A, C))
    (U,) = common
    return U


@dataclass(frozen=True)
class QuartetShape:
    """Hull parameters of a quartet split as AB | CD.

    r, s: distances of A, B to the branch vertex U; t, u: of C, D to V;
    l = d(U, V).  Ends have distance INFINITE.  m = l + u."""

    r: float
    s: float
    t: float
    u: float
    l: int

    @property
    def m(self) -> float:
        return self.l + self.u

    @property
    def u_is_min(self) -> bool:
        return self.u == min(self.r, self.s, self.t, self.u)


@dataclass(frozen=True)
class Hull:
    items: tuple
    vertices: frozenset
    center: Optional[Ball] = None
    shape: Optional[QuartetShape] = None
    branch_points: tuple = field(default=())


def _distinct(items) -> None:
    for i, a in enumerate(items):
        for b in items[i + 1:]:
            if type(a) is type(b) and a == b:
                if isinstance(a, End):
                    raise IndistinguishableEnds("ends agree to stored precision")
                raise ValueError("hull items must be distinct")


def quartet_shape(items: Sequence, truncated: Sequence[Ball]):
    A, B, C, D = truncated
    U = median(A, B, C)
    V = median(C, D, A)
    if median(A, B, D) != U or median(C, D, B) != V:
        raise ShapeMismatch("quartet is not split as (A B | C D)")

    def dist(item, X, Y):
        return INFINITE if isinstance(item, End) else ball_distance(X, Y)

    shape = QuartetShape(
        dist(items[0], A, U), dist(items[1], B, U), dist(items[2], C, V), dist(items[3], D, V), ball_distance(U, V)
    )
    return shape, (U, V)


def hull_of(items: Sequence) -> Hull:
    items = tuple(items)
    if not 2 <= len(items) <= 4:
        raise ValueError("hull takes 2 to 4 items")
    _distinct(items)
    balls = truncate_items(items, 0)
    verts = set()
    for i, a in enumerate(balls):
        for b in balls[i + 1:]:
            verts.update(ball_geodesic(a, b))
    center = shape = None
    bps: tuple = ()
    if len(items) == 3:
        center = median(*balls)
        bps = (center,)
    elif len(items) == 4:
        shape, bps = quartet_shape(items, balls)
    return Hull(items, frozenset(verts), center, shape, bps)


def to_dot_graph(
    vertices: Iterable[Ball],
    styles: Optional[dict] = None,
    name: str = "tree",
    directed: bool = False,
    attrs: Optional[dict] = None,
) -> str:
    """DOT text for the induced subgraph on ``vertices``; directed edges run parent -> child."""
    vs = sorted(set(vertices), key=Ball.sort_key)
    styles = styles or {}
    attrs = attrs or {}
    ids = {v: f"v{i}" for i, v in enumerate(vs)}
    arrow = "->" if directed else "--"
    lines = [f"{'digraph' if directed else 'graph'} {name} {{"]
    for v in vs:
        extra = "".join(f", {k}={val}" for k, val in sorted(attrs.get(v, {}).items()))
        lines.append(f'  {ids[v]} [label="{ball_label(v)}", shape={styles.get(v, "circle")}{extra}];')
    for v in vs:
        par = parent(v)
        if par in ids:
            lines.append(f"  {ids[par]} {arrow} {ids[v]};")
    lines.append("}")
    return "\n".join(lines) + "\n"
