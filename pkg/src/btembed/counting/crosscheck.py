from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from ..orders import OrderSpec
from .formulas import EVector, evector_formula
from .keys import evector_keys
from .oracle import OracleReport, oracle_evector

MATCH, KNOWN_GAP, MISMATCH = "MATCH", "KNOWN-GAP", "MISMATCH"


@dataclass(frozen=True)
class Cell:
    kind: str
    r: int
    t: int = 0


@dataclass(frozen=True)
class CellReport:
    p: int
    spec: OrderSpec
    r: int
    formula: EVector
    keys: EVector
    oracle: OracleReport
    verdict: str
    note: str = ""


def _formula_candidates(p: int, spec: OrderSpec, r: int, convention: str) -> list[EVector]:
    if spec.kind != "split" or convention != "auto":
        return [evector_formula(p, spec, r, convention)]
    return [evector_formula(p, spec, r, c) for c in ("one", "two")]


def judge(formulas: Sequence[EVector], keys: EVector, oracle: OracleReport) -> tuple[EVector, str, str]:
    observed = oracle.evector.raw
    if not oracle.stabilized:
        return formulas[0], MISMATCH, "oracle not stabilized"
    if not oracle.merge_ok:
        return formulas[0], MISMATCH, "merge identity failed"
    if keys.raw != observed:
        return formulas[0], MISMATCH, "keys disagree with oracle"
    integral = [f for f in formulas if f.integral]
    for f in integral:
        if f.raw == observed:
            return f, MATCH, ""
    if integral:
        return integral[0], MISMATCH, "formula disagrees with oracle"
    return formulas[0], KNOWN_GAP, "formula not integral"


def check_cell(p: int, cell: Cell, convention: str = "auto", N: Optional[int] = None, budget: Optional[int] = None) -> CellReport:
    spec = OrderSpec(cell.kind, p, cell.t)
    kw = {"budget": budget} if budget else {}
    oracle = oracle_evector(p, spec, cell.r, N=N, require_stable=False, **kw)
    keys = evector_keys(p, spec, cell.r)
    f, verdict, note = judge(_formula_candidates(p, spec, cell.r, convention), keys, oracle)
    return CellReport(p, spec, cell.r, f, keys, oracle, verdict, note)


def standard_grid(kinds: Iterable[str] = ("nilpotent", "triangular", "split"), r_max: int = 4) -> list[Cell]:
    cells = []
    for kind in kinds:
        if kind == "nilpotent":
            cells += [Cell(kind, r) for r in range(r_max + 1)]
        elif kind == "triangular":
            cells += [Cell(kind, r, t) for t in (0, 1) for r in range(r_max + 1)]
        elif kind == "split":
            cells += [Cell(kind, r, t) for t in (0, 1, 2) for r in range(1, r_max + 1)]
    return cells


def crosscheck(ps: Iterable[int], grid: Iterable[Cell], convention: str = "auto", N: Optional[int] = None) -> list[CellReport]:
    grid = list(grid)
    return [check_cell(p, cell, convention, N) for p in ps for cell in grid]
