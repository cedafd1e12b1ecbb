//! Reach, principal angles, nets, secants and lemma property checks.

mod angles;
mod dirichlet;
mod nets;
mod reach;
mod secants;
mod toolbox;

pub use angles::{principal_angle, PrincipalAngle, TangentProjector, PROJECTOR_GAP_TOLERANCE};
pub use dirichlet::{dirichlet_kernel, side_lobe_peak, unit_ball_volume, BallVolume};
pub use nets::{
    build_net_hierarchy, covering_number_bound, greedy_net, ln_direction_net_bound,
    resolve_volume, volume_assumption_holds, BallGrid, GreedyNet, NetHierarchy, NetLevel, C_ETA,
    C_ETA_PRIME, THRESHOLD_CONSTANT,
};
pub use reach::{estimate_reach, federer_quotient, resolve_reach, ReachEstimate, MIN_REACH_SAMPLE};
pub use secants::{
    chord_direction, sample_secants, sample_secants_budget, tangent_surrogate, SecantPair,
    SecantSample,
};
pub use toolbox::{
    check_property, check_toolbox_property, chord_angle_slack, chord_perturbation_slack,
    geodesic_bound_slack, projector_gap_slack, short_chord_slack, tangent_angle_slack, PropertyId,
    PropertyReport, CURVATURE_ALLOWANCE, INJECTIVITY_FLOOR, SLACK_ALLOWANCE,
};
