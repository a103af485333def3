"""Quantum and classical decoherence dynamics for a system coupled to a
harmonic bath: perturbative short-time rates, exact strong-decoherence
evolution, entropies and decay exponents, with brute-force oracles."""

__version__ = "0.1.0"

from .bath import (
    BathMode,
    BathPhasePoint,
    BathSpec,
    b1,
    b2,
    b2_dot,
    discretize_ohmic,
    sample_thermal,
    thermal_sample_block,
    thermal_strength,
)
from .model import (
    CouplingFunction,
    LinearCoupling,
    ModelConfig,
    PolynomialCoupling,
    QuadraticCoupling,
    SinusoidalCoupling,
    TabulatedCoupling,
    coupling_from_config,
)
from .oracle import FockConfig, McEstimate, fock_quantum_factor, mc_classical_factor, short_time_fit
from .rates import (
    RatePair,
    classical_rate2,
    hbar_scan,
    linear_closed_form,
    quantum_rate2,
    rate_pair,
    separation_scan,
)
from .states import (
    DensityMatrixGrid,
    GaussianPacket,
    GridCoverageError,
    GridSpec,
    SuperpositionState,
    WignerGrid,
    build_density_matrix,
    inverse_wigner,
    position_variance,
    purity,
    wigner_purity,
    wigner_transform,
)
from .strongdec import (
    DecoherenceFactor,
    DecoherenceSeries,
    classical_factor,
    compute_series,
    entropy_classical,
    entropy_quantum,
    entropy_series,
    evolve_matrix,
    gamma,
    quantum_factor,
)

__all__ = [
    "__version__",
    "ModelConfig",
    "CouplingFunction",
    "LinearCoupling",
    "QuadraticCoupling",
    "PolynomialCoupling",
    "SinusoidalCoupling",
    "TabulatedCoupling",
    "coupling_from_config",
    "BathMode",
    "BathSpec",
    "BathPhasePoint",
    "discretize_ohmic",
    "thermal_strength",
    "b1",
    "b2",
    "b2_dot",
    "sample_thermal",
    "thermal_sample_block",
    "GaussianPacket",
    "SuperpositionState",
    "GridSpec",
    "GridCoverageError",
    "DensityMatrixGrid",
    "WignerGrid",
    "build_density_matrix",
    "wigner_transform",
    "inverse_wigner",
    "purity",
    "wigner_purity",
    "position_variance",
    "RatePair",
    "classical_rate2",
    "quantum_rate2",
    "rate_pair",
    "linear_closed_form",
    "separation_scan",
    "hbar_scan",
    "DecoherenceFactor",
    "DecoherenceSeries",
    "classical_factor",
    "quantum_factor",
    "gamma",
    "evolve_matrix",
    "entropy_classical",
    "entropy_quantum",
    "entropy_series",
    "compute_series",
    "McEstimate",
    "FockConfig",
    "mc_classical_factor",
    "fock_quantum_factor",
    "short_time_fit",
]
