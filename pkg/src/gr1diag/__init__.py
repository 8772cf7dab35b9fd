"""Diagnostics for unsynthesizable GR(1) robot specifications."""

from .engine import (
    Diagnosis,
    classify,
    diagnose,
    unreal_bmc,
    unreal_iterate,
    unsat_bmc,
)
from .errors import Gr1DiagError
from .game import (
    Counterstrategy,
    check_realizability,
    check_satisfiability,
    extract_counterstrategy,
)
from .model import GR1Spec, Statement, statement_slice
from .parser import parse_spec
from .workspace import Workspace, parse_map_file

__all__ = [
    "Counterstrategy",
    "Diagnosis",
    "GR1Spec",
    "Gr1DiagError",
    "Statement",
    "Workspace",
    "check_realizability",
    "check_satisfiability",
    "classify",
    "diagnose",
    "extract_counterstrategy",
    "parse_map_file",
    "parse_spec",
    "statement_slice",
    "unreal_bmc",
    "unreal_iterate",
    "unsat_bmc",
]

__version__ = "0.1.0"
