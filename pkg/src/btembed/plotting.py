"""Static figures for crosscheck grids and branch drawings (matplotlib, Agg)."""
from __future__ import annotations

from typing import Iterable, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .counting import KNOWN_GAP, MATCH, MISMATCH, CellReport  # noqa: E402
from .tree import Ball, parent  # noqa: E402

VERDICT_COLORS = {MATCH: "#4c9a4c", KNOWN_GAP: "#e0b040", MISMATCH: "#c03030"}


def _row_label(rep: CellReport) -> str:
    if rep.spec.kind == "nilpotent":
        return f"p={rep.p} nilpotent"
    return f"p={rep.p} {rep.spec.kind} t={rep.spec.t}"


def plot_crosscheck(reports: Sequence[CellReport], path: str) -> None:
    """One colored square per cell: rows are (p, kind, t), columns are levels r."""
    rows: list[str] = []
    for rep in reports:
        if _row_label(rep) not in rows:
            rows.append(_row_label(rep))
    levels = sorted({rep.r for rep in reports})
    fig, ax = plt.subplots(figsize=(1.2 + 0.9 * len(levels), 0.8 + 0.4 * len(rows)))
    for rep in reports:
        x, y = levels.index(rep.r), rows.index(_row_label(rep))
        ax.add_patch(plt.Rectangle((x - 0.45, y - 0.4), 0.9, 0.8, color=VERDICT_COLORS[rep.verdict]))
        ax.text(x, y, ",".join(str(v) for v in rep.oracle.evector.e), ha="center", va="center", fontsize=6)
    ax.set_xlim(-0.5, len(levels) - 0.5)
    ax.set_ylim(len(rows) - 0.5, -0.5)
    ax.set_xticks(range(len(levels)), [f"r={r}" for r in levels])
    ax.set_yticks(range(len(rows)), rows)
    handles = [plt.Rectangle((0, 0), 1, 1, color=c) for c in VERDICT_COLORS.values()]
    ax.legend(handles, list(VERDICT_COLORS), loc="upper left", bbox_to_anchor=(1.01, 1), fontsize=7)
    ax.set_title("oracle vectors by verdict", fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def tree_layout(vertices: Iterable[Ball]) -> dict[Ball, tuple[float, float]]:
    """Layered layout: y is the ball exponent, leaves spread left to right."""
    vs = set(vertices)
    kids: dict[Ball, list[Ball]] = {v: [] for v in vs}
    roots = []
    for v in sorted(vs, key=Ball.sort_key):
        par = parent(v)
        if par in vs:
            kids[par].append(v)
        else:
            roots.append(v)
    pos: dict[Ball, tuple[float, float]] = {}
    slot = 0

    def place(v: Ball) -> float:
        nonlocal slot
        if not kids[v]:
            x = float(slot)
            slot += 1
        else:
            xs = [place(c) for c in kids[v]]
            x = sum(xs) / len(xs)
        pos[v] = (x, -v.n)
        return x

    for root in roots:
        place(root)
    return pos


def plot_branch(vertices: Iterable[Ball], stem: Iterable[Ball], endpoints: Iterable[Ball], path: str, title: str = "") -> None:
    vs = set(vertices)
    stem, endpoints = set(stem), set(endpoints)
    pos = tree_layout(vs)
    fig, ax = plt.subplots(figsize=(max(4.0, 0.25 * len(vs)), 4.0))
    for v in vs:
        par = parent(v)
        if par in vs:
            (x0, y0), (x1, y1) = pos[par], pos[v]
            ax.plot([x0, x1], [y0, y1], color="0.5", lw=0.8, zorder=1)
    for v, (x, y) in pos.items():
        marker = "s" if v in stem else "o"
        face = "black" if v in endpoints else "white"
        ax.scatter([x], [y], marker=marker, s=40, facecolors=face, edgecolors="black", zorder=2)
    ax.set_xticks([])
    ax.set_ylabel("-n")
    if title:
        ax.set_title(title, fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
