//! Manifold compressive sensing laboratory.
//!
//! Builds parametric manifolds, measures them with seeded Gaussian
//! operators, checks embedding distortion against sufficient measurement
//! counts, runs nearest-point recovery, and property-tests reach, net and
//! geodesic inequalities on dense samples.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod csvout;
pub mod error;
pub mod exec;
pub mod experiments;
pub mod geometry;
pub mod linalg;
pub mod manifold;
pub mod measurement;
pub mod recovery;
pub mod rng;

pub use error::{Error, Result};
