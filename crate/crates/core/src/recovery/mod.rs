//! Nearest-point recovery and parameter estimation from compressive
//! measurements, with checks of the recovery-error bounds.

mod adversarial;
mod bounds;
mod solver;
mod trials;

pub use adversarial::{construct_adversarial_instance, AdversarialInstance, MIN_SIGMA, PSEUDO_INVERSE_TOLERANCE};
pub use bounds::{
    check_deterministic_bound, check_geodesic_bound, check_probabilistic_bound, deterministic_rhs,
    geodesic_precondition_holds, geodesic_rhs, signal_recovery_rhs, BoundCheckRecord, BoundKind, Epsilon,
    Instance, Regime, BOUND_SLACK_ALLOWANCE, GEODESIC_PRECONDITION,
};
pub use solver::{
    estimate_parameter, minimize_over_domain, nearest_point_on_manifold, parameter_distance, recover_signal,
    Minimizer, OracleResult, RecoveryResult, SolverTrace, DEFAULT_GRID, DEFAULT_TOLERANCE, MIN_GRID,
    TIE_TOLERANCE,
};
pub use trials::{median, run_trial, summarize_trials, write_trials_csv, TrialBench, TrialRecord, TrialSetup, TrialSummary};
