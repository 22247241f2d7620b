"""Entanglement switch simulator for arrays of trapped electric dipoles.

The library builds the excitation-conserving Hamiltonian of a dipole array
(1D, 2D, 3D or custom), diagonalizes it exactly, forms ground or thermal
states, and evaluates Wootters concurrence between any pair of sites as a
function of the switch parameter x = omega/Omega and temperature. Hot loops
run in a compiled extension when available and fall back to numpy otherwise
(see ``dipoleswitch.kernels``).
"""

from .errors import (
    DegenerateReferenceError,
    DipoleSwitchError,
    InvalidConfigError,
    InvalidDensityError,
    InvalidGeometryError,
    InvalidInputError,
    InvalidPairError,
    OutputError,
    SizeLimitError,
)
from .geometry import (
    CouplingMatrix,
    DipoleGeometry,
    ModelScales,
    PhysicalParams,
    build_geometry,
    coupling_matrix,
    nearest_neighbour_pair,
    physical_to_model,
    raw_couplings,
)
from .hamiltonian import (
    HamiltonianMatrix,
    SectorBlock,
    build_hamiltonian,
    enumerate_sector,
)
from .spectral import (
    PartitionFunction,
    SpectralDecomposition,
    ThermalState,
    beta_from_kt,
    diagonalize,
    ground_state,
    partition_function,
    thermal_state,
)
from .entanglement import (
    TwoQubitDensity,
    concurrence,
    reduce_to_pair,
    spin_flip,
)
from .sweep import (
    SweepConfig,
    SweepResult,
    Transition,
    detect_transitions,
    emit_csv,
    render_csv,
    render_transitions_csv,
    run_sweep,
    transitions_path_for,
)
from . import kernels

__version__ = "0.1.0"

__all__ = [
    "DipoleSwitchError",
    "InvalidInputError",
    "SizeLimitError",
    "InvalidGeometryError",
    "DegenerateReferenceError",
    "InvalidPairError",
    "InvalidDensityError",
    "InvalidConfigError",
    "OutputError",
    "DipoleGeometry",
    "CouplingMatrix",
    "PhysicalParams",
    "ModelScales",
    "build_geometry",
    "coupling_matrix",
    "raw_couplings",
    "nearest_neighbour_pair",
    "physical_to_model",
    "HamiltonianMatrix",
    "SectorBlock",
    "build_hamiltonian",
    "enumerate_sector",
    "SpectralDecomposition",
    "ThermalState",
    "PartitionFunction",
    "diagonalize",
    "partition_function",
    "thermal_state",
    "ground_state",
    "beta_from_kt",
    "TwoQubitDensity",
    "reduce_to_pair",
    "spin_flip",
    "concurrence",
    "SweepConfig",
    "SweepResult",
    "Transition",
    "run_sweep",
    "detect_transitions",
    "emit_csv",
    "render_csv",
    "render_transitions_csv",
    "transitions_path_for",
    "kernels",
    "__version__",
]
