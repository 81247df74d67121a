"""Thermalization of interacting fermions under a random two-body interaction.

Pipeline: enumerate the Fock basis, assemble the dense random two-body
Hamiltonian, diagonalize exactly, analyze strength functions, evolve an
initially excited basis state, and compare against the analytic
interpolation between initial and equilibrium occupations.
"""

from .basis import (
    Basis,
    ClassPartition,
    build_basis,
    classify,
    fermionic_phase,
    occupancy_matrix,
    occupied_orbitals,
    orbital_difference,
    state_from_orbitals,
)
from .dynamics import (
    AmplitudeFrame,
    OccupationTrajectory,
    TimeGrid,
    asymptotic_occupations,
    average_occupations,
    average_survival,
    class_populations,
    default_grid,
    diagonal_weights,
    evolve_amplitudes,
    occupation_numbers,
    simulate_trajectory,
    split_occupation_terms,
    survival_probability,
)
from .exceptions import (
    EigensolverError,
    FitConvergenceError,
    InsufficientStatisticsError,
    ParameterError,
    PreconditionError,
    StageError,
)
from .hamiltonian import (
    HamiltonianMatrix,
    ModelParams,
    SingleParticleSpectrum,
    TwoBodyTensor,
    build_hamiltonian,
    dump_hamiltonian,
    load_hamiltonian,
    sample_spectrum,
    sample_two_body,
)
from .spectral import (
    EigenDecomposition,
    SpectralStats,
    diagonalize,
    dump_decomposition,
    load_decomposition,
    spectral_stats,
)
from .strength import (
    BWFit,
    HybridFit,
    SpreadingParams,
    StrengthProfile,
    compound_occupations,
    energy_variance,
    fit_bw,
    fit_hybrid,
    golden_rule_gamma,
    spreading_params,
    strength_function,
)
from .theory import (
    FermiDiracFit,
    SurvivalModelCurves,
    ThermalizationPrediction,
    convolve_strength,
    convolve_strength_map,
    fit_fermi_dirac,
    predict_occupations,
    prediction_error,
    survival_models,
)

__version__ = "0.1.0"
