"""Orbit counting on finite sets under a list of bijective moves."""
from __future__ import annotations

from collections import deque
from typing import Callable, Hashable, Iterable, Sequence

from ..errors import OrbitBudgetExceeded

Move = Callable[[Hashable], Hashable]

DEFAULT_BUDGET = 5_000_000


def closure(seeds: Iterable[Hashable], moves: Sequence[Move], budget: int = DEFAULT_BUDGET) -> set:
    seen = set(seeds)
    stack = list(seen)
    while stack:
        x = stack.pop()
        for mv in moves:
            y = mv(x)
            if y not in seen:
                seen.add(y)
                if len(seen) > budget:
                    raise OrbitBudgetExceeded(f"more than {budget} points")
                stack.append(y)
    return seen


def orbit_labels(points: Iterable[Hashable], moves: Sequence[Move], budget: int = DEFAULT_BUDGET) -> dict:
    """Map each point to the index of its orbit (BFS order).

    Moves must send the set into itself; finite bijections then generate a
    group, so forward search finds whole orbits."""
    pts = set(points)
    if len(pts) > budget:
        raise OrbitBudgetExceeded(f"{len(pts)} points exceed budget {budget}")
    label: dict = {}
    k = 0
    for x0 in pts:
        if x0 in label:
            continue
        label[x0] = k
        queue = deque([x0])
        while queue:
            x = queue.popleft()
            for mv in moves:
                y = mv(x)
                if y not in pts:
                    raise ValueError(f"move leaves the point set: {x!r} -> {y!r}")
                if y not in label:
                    label[y] = k
                    queue.append(y)
        k += 1
    return label


def orbit_count(points: Iterable[Hashable], moves: Sequence[Move], budget: int = DEFAULT_BUDGET) -> int:
    return len(set(orbit_labels(points, moves, budget).values()))


def fixed_orbits(labels: dict, move: Move) -> int:
    """Number of orbits that ``move`` maps to themselves."""
    reps = {}
    for x, k in labels.items():
        reps.setdefault(k, x)
    return sum(1 for k, x in reps.items() if labels[move(x)] == k)
