"""Simulator and closed-form toolkit for squeezing-driven photon creation
under amplitude and phase damping, with a three-level medium model."""

from ._accel import HAVE_NUMBA, backend_name
from .dephasing import (
    BogoliubovCoeffs,
    dephase_map,
    gedanken_density_evolution,
    gedanken_evolution,
    measured_step,
    project_diagonal,
    squeeze_bogoliubov,
    vacuum_vs_resonance_split,
)
from .fock import (
    annihilation,
    creation,
    expectation,
    mean_n,
    number_diagonal_density,
    number_operator,
    s_moment,
    squeeze_hamiltonian,
    thermal_probs,
    validate_density_matrix,
)
from .integrator import IntegrationError, integrate_adaptive
from .lindblad import ModelParams, Trajectory, evolve, initial_state, lindblad_rhs, suggest_dim
from .moments import (
    MomentState,
    above_threshold,
    analytic_n,
    characteristic_exponent,
    fast_decoherence_n,
    ideal_n,
    integrate_moments,
    moment_rhs,
    propagate_moments,
    steady_state_n,
)
from .threelevel import (
    ThreeLevelParams,
    ThreeLevelTrajectory,
    adiabatic_psi_c,
    decoherence_photon_threshold,
    effective_permittivity,
    integrate_three_level,
    noise_energy_estimate,
    rabi_amplitude,
    stark_shift,
    three_level_rhs,
    xi_from_geometry,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "HAVE_NUMBA",
    "backend_name",
    "annihilation",
    "creation",
    "number_operator",
    "squeeze_hamiltonian",
    "number_diagonal_density",
    "thermal_probs",
    "expectation",
    "mean_n",
    "s_moment",
    "validate_density_matrix",
    "ModelParams",
    "Trajectory",
    "IntegrationError",
    "integrate_adaptive",
    "lindblad_rhs",
    "evolve",
    "initial_state",
    "suggest_dim",
    "MomentState",
    "moment_rhs",
    "integrate_moments",
    "propagate_moments",
    "analytic_n",
    "characteristic_exponent",
    "above_threshold",
    "steady_state_n",
    "fast_decoherence_n",
    "ideal_n",
    "BogoliubovCoeffs",
    "dephase_map",
    "project_diagonal",
    "squeeze_bogoliubov",
    "measured_step",
    "gedanken_evolution",
    "gedanken_density_evolution",
    "vacuum_vs_resonance_split",
    "ThreeLevelParams",
    "ThreeLevelTrajectory",
    "three_level_rhs",
    "integrate_three_level",
    "adiabatic_psi_c",
    "effective_permittivity",
    "rabi_amplitude",
    "stark_shift",
    "xi_from_geometry",
    "noise_energy_estimate",
    "decoherence_photon_threshold",
]
