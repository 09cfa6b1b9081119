"""Exact exponent bookkeeping and spectral experiments for the weighted biharmonic NLS

    i u_t + Δ²u + λ|x|^{-b}|u|^α u = 0.
"""

__version__ = "0.1.0"

from .pairs import ExponentPair, PreconditionError, ParameterRangeError, is_admissible, lemma_report
from .regime import ProblemParams, Regime, TheoremId, check_all, check_theorem, critical_index
from .spectral import ComplexField, Grid, WeightField, read_field, weight, write_field
from .solver import Scheme, SolverConfig, Trajectory, energy, evolve, mass, picard_iterate
from .norms import FamilyKind, NormSpec, StrichartzFamily, mixed_norm, strichartz_norm

__all__ = [
    "ComplexField",
    "ExponentPair",
    "FamilyKind",
    "Grid",
    "NormSpec",
    "ParameterRangeError",
    "PreconditionError",
    "ProblemParams",
    "Regime",
    "Scheme",
    "SolverConfig",
    "StrichartzFamily",
    "TheoremId",
    "Trajectory",
    "WeightField",
    "check_all",
    "check_theorem",
    "critical_index",
    "energy",
    "evolve",
    "is_admissible",
    "lemma_report",
    "mass",
    "mixed_norm",
    "picard_iterate",
    "read_field",
    "strichartz_norm",
    "weight",
    "write_field",
]
