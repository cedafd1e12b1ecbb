//! Gaussian measurement operators and embedding guarantees.

mod bounds;
mod chaining;
mod distortion;
mod operator;
mod spectrum;
mod tails;

pub use bounds::{required_measurements, BoundBranch, BoundReport};
pub use chaining::{chain_weight_sum, chaining_failure_bound, ChainCertificate, DEFAULT_TRUNCATION};
pub use distortion::{direction_distortion, embedding_distortion, DistortionPart, DistortionReport};
pub use operator::{draw_gaussian_operator, MeasurementOperator};
pub use spectrum::{singular_value_range, SingularValueReport, SPECTRUM_TOLERANCE};
pub use tails::{empirical_tail_check, TailComparison, TailReport, MIN_TAIL_TRIALS};
