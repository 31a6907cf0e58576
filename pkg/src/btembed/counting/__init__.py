from .crosscheck import KNOWN_GAP, MATCH, MISMATCH, Cell, CellReport, check_cell, crosscheck, standard_grid
from .formulas import EVector, Table1Row, chi, evector_formula, table1_row
from .keys import evector_keys, invariant_key
from .oracle import OracleReport, oracle_evector
from .orbits import orbit_count

__all__ = [
    "Cell",
    "CellReport",
    "EVector",
    "KNOWN_GAP",
    "MATCH",
    "MISMATCH",
    "OracleReport",
    "Table1Row",
    "check_cell",
    "chi",
    "crosscheck",
    "evector_formula",
    "evector_keys",
    "invariant_key",
    "oracle_evector",
    "orbit_count",
    "standard_grid",
    "table1_row",
]
