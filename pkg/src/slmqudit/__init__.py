"""Grating-based operations on single-photon multipath qudits.

Phase gratings on a spatial light modulator, one per path, set the Fourier
coefficients that become the columns of the implemented matrix once the
paths are merged, Fourier transformed by a lens and spatially filtered.
"""

from .core import DensityMatrix, ModeGeometry, QuditState, Violation, fidelity, validate_geometry
from .gratings import (
    MODULATION_CAP,
    Family,
    GratingSpec,
    ModulationCapError,
    binary,
    coeff,
    coeff_ideal,
    coeff_pixelated,
    coeff_quadrature,
    compose,
    constant,
    displace,
    phase_at,
    sawtooth,
    tabulated,
    triangular,
    validate_modulation,
)
from .maps import KrausMap, apply_map, empirical_map, schedule
from .transform import (
    FilterWindow,
    TransformMatrix,
    apply_to_state,
    block_column,
    build_matrix,
    merge_paths,
    phase_correct,
)
from .design import DesignProblem, DesignResult, residual, search

__version__ = "0.1.0"

__all__ = [
    "DensityMatrix", "ModeGeometry", "QuditState", "Violation", "fidelity", "validate_geometry",
    "MODULATION_CAP", "Family", "GratingSpec", "ModulationCapError", "binary", "coeff",
    "coeff_ideal", "coeff_pixelated", "coeff_quadrature", "compose", "constant", "displace",
    "phase_at", "sawtooth", "tabulated", "triangular", "validate_modulation",
    "KrausMap", "apply_map", "empirical_map", "schedule",
    "FilterWindow", "TransformMatrix", "apply_to_state", "block_column", "build_matrix",
    "merge_paths", "phase_correct",
    "DesignProblem", "DesignResult", "residual", "search",
]
