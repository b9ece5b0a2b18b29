"""Steady-state phonon statistics of Coulomb-coupled mechanical resonators.

Two weakly nonlinear resonators exchange excitations through a tunable
Coulomb coupling; driving one of them and tuning detuning, Kerr strength, or
a second drive against the coupling suppresses the two-phonon amplitude and
yields strongly sub-Poissonian phonon (and, through a cavity readout,
photon) statistics.  The package solves the dissipative dynamics on
truncated Fock spaces, evaluates second-order correlations, provides the
closed-form optimal blockade conditions, and sweeps parameters to CSV from
the command line.
"""

__version__ = "0.1.0"

from .fock import (
    HilbertSpace,
    adjoint,
    create,
    destroy,
    expectation,
    fock_state,
    identity,
    number,
    projector,
)
from .model import (
    CoulombGeometry,
    MechParams,
    OmParams,
    Superoperator,
    WeakDriveWarning,
    build_full_hamiltonian,
    build_liouvillian,
    build_mech_hamiltonian,
    coulomb_coupling,
    full_collapse_ops,
    mech_collapse_ops,
    thermal_occupation,
)
from .steady import (
    ConvergenceReport,
    DegenerateSteadyStateError,
    SteadyOptions,
    SteadyStateError,
    convergence_check,
    evolve,
    propagator,
    steady_state,
)
from .correl import (
    CorrelationSeries,
    UndefinedCorrelationError,
    g2_tau,
    g2_zero,
    occupation,
    photon_g2_zero,
)
from .optimal import (
    AmplitudeState,
    QuadraticCoeffs,
    SingleDriveOptimum,
    TwoDriveOptimum,
    amplitude_g2,
    amplitude_steady_state,
    coefficient_matrix,
    determinant_residual,
    first_order_amplitudes,
    quadratic_coeffs,
    single_drive_optimal,
    two_drive_optimal,
)
from .sweep import (
    ConfigError,
    SweepConfig,
    SweepResult,
    load_config,
    parse_config,
    run_sweep,
)
from .verify import CheckResult, run_all_checks

__all__ = [
    "__version__",
    "HilbertSpace", "adjoint", "create", "destroy", "expectation",
    "fock_state", "identity", "number", "projector",
    "CoulombGeometry", "MechParams", "OmParams", "Superoperator",
    "WeakDriveWarning", "build_full_hamiltonian",
    "build_liouvillian", "build_mech_hamiltonian", "coulomb_coupling",
    "full_collapse_ops", "mech_collapse_ops", "thermal_occupation",
    "ConvergenceReport", "DegenerateSteadyStateError", "SteadyOptions",
    "SteadyStateError", "convergence_check", "evolve", "propagator",
    "steady_state",
    "CorrelationSeries", "UndefinedCorrelationError", "g2_tau", "g2_zero",
    "occupation", "photon_g2_zero",
    "AmplitudeState", "QuadraticCoeffs", "SingleDriveOptimum",
    "TwoDriveOptimum", "amplitude_g2", "amplitude_steady_state",
    "coefficient_matrix", "determinant_residual", "first_order_amplitudes",
    "quadratic_coeffs", "single_drive_optimal", "two_drive_optimal",
    "ConfigError", "SweepConfig", "SweepResult", "load_config",
    "parse_config", "run_sweep",
    "CheckResult", "run_all_checks",
]
