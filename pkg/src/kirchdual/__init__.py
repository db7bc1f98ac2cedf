"""kirchdual: complete critical-point census for the dual algebraic stress
equation of 3-D finite deformation with St Venant-Kirchhoff material."""

__version__ = "0.1.0"

from .dual_solver import (
    Classification,
    DualSolution,
    SolutionCensus,
    SpectralLoad,
    canonical_tau,
    census_from_load,
    load_from_sigmas,
    solve_all,
    solve_combo,
    spectral_decompose_load,
)
from .energetics import EnergyReport, Triality, classify_triality
from .material import MaterialParams
from .oracle import OracleConfig, oracle_solve_all, set_compare

__all__ = [
    "Classification",
    "DualSolution",
    "EnergyReport",
    "MaterialParams",
    "OracleConfig",
    "SolutionCensus",
    "SpectralLoad",
    "Triality",
    "canonical_tau",
    "census_from_load",
    "classify_triality",
    "load_from_sigmas",
    "oracle_solve_all",
    "set_compare",
    "solve_all",
    "solve_combo",
    "spectral_decompose_load",
]
