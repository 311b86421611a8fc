"""Spectra, dualities and spectral flow of 1D contact interactions."""

from .boundary import (
    BoundaryData,
    BoundaryMatrix,
    CharacteristicParams,
    CouplingPair,
    InteractionClass,
    Sector,
    SMatrix,
    TorusPoint,
    Transform,
    boundary_residual,
    classify,
    coupling_strengths,
    current_mismatch,
    inversion,
    is_parity_invariant,
    params_from_u,
    s_matrix,
    torus_from_u,
    transform,
    u_from_params,
    u_from_torus,
)
from .flow import (
    FlowPath,
    FlowResult,
    anholonomy_shift,
    concatenate,
    delta_epsilon_duality,
    sample_path,
    track,
    verify_duality,
)
from .oracle import GridSpec, convergence_report, fd_spectrum
from .spectrum import (
    Branch,
    BoxSpec,
    Level,
    Parity,
    Spectrum,
    eigenphases,
    negative_root,
    sector_roots,
    sector_value,
    spectrum,
    torus_spectrum,
    wavefunction,
)

__version__ = "0.1.0"

__all__ = [
    "anholonomy_shift",
    "boundary_residual",
    "BoundaryData",
    "BoundaryMatrix",
    "BoxSpec",
    "Branch",
    "CharacteristicParams",
    "classify",
    "concatenate",
    "convergence_report",
    "coupling_strengths",
    "CouplingPair",
    "current_mismatch",
    "delta_epsilon_duality",
    "eigenphases",
    "fd_spectrum",
    "FlowPath",
    "FlowResult",
    "GridSpec",
    "InteractionClass",
    "inversion",
    "is_parity_invariant",
    "Level",
    "negative_root",
    "params_from_u",
    "Parity",
    "s_matrix",
    "sample_path",
    "Sector",
    "sector_roots",
    "sector_value",
    "SMatrix",
    "Spectrum",
    "spectrum",
    "torus_from_u",
    "torus_spectrum",
    "TorusPoint",
    "track",
    "Transform",
    "transform",
    "u_from_params",
    "u_from_torus",
    "verify_duality",
    "wavefunction",
]
