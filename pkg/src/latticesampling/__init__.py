"""Exact tightness and orthogonality checks for sampling on unions of shifted lattices."""
from __future__ import annotations

__version__ = "0.1.0"

from .criteria import (CriterionError, NoCriterionError, OrthogonalityVerdict, TightnessVerdict,
                       Witness, check_bounded, check_orthogonal, check_orthogonal_shifted_pair,
                       check_orthogonal_shifted_shared, check_orthogonal_unshifted, check_tight,
                       check_tight_shifted, check_tight_unshifted, multiplier_symbol,
                       witness_violates)
from .cyclotomic import ExponentialSum, cyclotomic_poly, is_zero, is_zero_exact, is_zero_numeric
from .lattice_core import (LatticeSystem, ShiftedLattice, covering_function, enumerate_lambda,
                           group_shifts, overlap_shifts_band)
from .rational_geometry import Band, Box, GeometryError, RatMatrix, as_rational

__all__ = [
    "Band", "Box", "CriterionError", "ExponentialSum", "GeometryError", "LatticeSystem",
    "NoCriterionError", "OrthogonalityVerdict", "RatMatrix", "ShiftedLattice", "TightnessVerdict",
    "Witness", "as_rational", "check_bounded", "check_orthogonal", "check_orthogonal_shifted_pair",
    "check_orthogonal_shifted_shared", "check_orthogonal_unshifted", "check_tight",
    "check_tight_shifted", "check_tight_unshifted", "covering_function", "cyclotomic_poly",
    "enumerate_lambda", "group_shifts", "is_zero", "is_zero_exact", "is_zero_numeric",
    "multiplier_symbol", "overlap_shifts_band", "witness_violates",
]
