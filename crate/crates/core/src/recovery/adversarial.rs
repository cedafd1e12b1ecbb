//! Worst-case instance on the segment [0, e₁]: a point whose measurements
//! vanish, so the compressive estimate collapses to the origin.

use super::bounds::{BoundCheckRecord, BoundKind, Epsilon, Instance};
use super::solver::{nearest_point_on_manifold, recover_signal, DEFAULT_GRID, DEFAULT_TOLERANCE};
use crate::error::{Error, Result};
use crate::linalg::{distance, norm};
use crate::manifold::make_line_segment;
use crate::measurement::{singular_value_range, MeasurementOperator};
use nalgebra::{DMatrix, DVector};
use serde::Serialize;

/// Smallest singular value for which the construction is guaranteed.
pub const MIN_SIGMA: f64 = 8.0 / 3.0;
/// Relative pivot floor when factoring ΦΦᵀ.
pub const PSEUDO_INVERSE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdversarialInstance {
    pub x: Vec<f64>,
    /// Row-span direction with `Φ(e₁ + νu) = 0`.
    pub u: Vec<f64>,
    /// ν = (1+ε)/σ_m
    pub nu: f64,
    pub sigma_min: f64,
    pub u_norm: f64,
    /// ‖Φx‖, zero up to rounding.
    pub measurement_norm: f64,
    pub x_hat: Vec<f64>,
    pub x_star: Vec<f64>,
    /// ‖x − x̂‖ / ‖x − x*‖
    pub ratio: f64,
    /// σ_m / (2(1+ε))
    pub ratio_bound: f64,
    pub record: BoundCheckRecord,
}

/// `Φᵀ(ΦΦᵀ)⁻¹Φv`, the projection of `v` onto the row span of Φ.
fn row_span_projection(op: &MeasurementOperator, v: &[f64]) -> Result<Vec<f64>> {
    let (m, n) = (op.rows(), op.cols());
    let phi = DMatrix::from_row_slice(m, n, op.entries());
    let gram = &phi * phi.transpose();
    let scale = gram.diagonal().max();
    let chol = gram.clone().cholesky().ok_or_else(|| {
        Error::DegenerateSpectrum("Phi Phi^T is not positive definite".into())
    })?;
    let min_pivot = chol.l_dirty().diagonal().iter().fold(f64::INFINITY, |a, &b| a.min(b * b));
    if min_pivot <= PSEUDO_INVERSE_TOLERANCE * scale {
        return Err(Error::DegenerateSpectrum(format!(
            "Phi Phi^T pivot {min_pivot} below {PSEUDO_INVERSE_TOLERANCE} relative tolerance"
        )));
    }
    let phi_v = &phi * DVector::from_column_slice(v);
    let w = chol.solve(&phi_v);
    Ok((phi.transpose() * w).iter().copied().collect())
}

/// Build x = e₁ + νu and check the worst-case ratio with the solvers.
pub fn construct_adversarial_instance(op: &MeasurementOperator, epsilon: f64) -> Result<AdversarialInstance> {
    if !(epsilon > 0.0 && epsilon <= 1.0 / 3.0) {
        return Err(Error::OutOfRange(format!("epsilon must lie in (0, 1/3], got {epsilon}")));
    }
    let n = op.cols();
    let spectrum = singular_value_range(op)?;
    let sigma_min = spectrum.sigma_min;
    if sigma_min < MIN_SIGMA {
        return Err(Error::PreconditionViolated(format!(
            "smallest singular value {sigma_min} is below 8/3"
        )));
    }
    let nu = (1.0 + epsilon) / sigma_min;
    let mut e1 = vec![0.0; n];
    e1[0] = 1.0;
    let projected = row_span_projection(op, &e1)?;
    let u: Vec<f64> = projected.iter().map(|p| -p / nu).collect();
    let x: Vec<f64> = e1.iter().zip(&u).map(|(e, ui)| e + nu * ui).collect();
    let measurement_norm = norm(&op.apply(&x)?);

    let segment = make_line_segment(n)?;
    let y = op.apply(&x)?;
    let hat = recover_signal(&segment, op, &y, DEFAULT_GRID, DEFAULT_TOLERANCE)?;
    let star = nearest_point_on_manifold(&segment, &x, DEFAULT_GRID, DEFAULT_TOLERANCE)?;
    let ratio = distance(&x, &hat.x_hat) / star.distance;
    let ratio_bound = sigma_min / (2.0 * (1.0 + epsilon));
    let noise = vec![0.0; op.rows()];
    let inst = Instance {
        x: &x,
        x_hat: &hat.x_hat,
        x_star: &star.x_star,
        noise: &noise,
    };
    let slack = ratio - ratio_bound;
    let record = BoundCheckRecord {
        kind: BoundKind::Adversarial,
        epsilon: Epsilon::Theorem(epsilon),
        optimal_error: star.distance,
        recovery_error: distance(inst.x, inst.x_hat),
        geodesic: None,
        noise_norm: 0.0,
        sigma: Some(sigma_min),
        n: Some(n),
        m: Some(op.rows()),
        tau: None,
        regime: None,
        sqrt_argument: None,
        applicable: true,
        lhs: ratio_bound,
        rhs: ratio,
        slack,
        pass: slack >= -super::bounds::BOUND_SLACK_ALLOWANCE,
    };
    Ok(AdversarialInstance {
        u_norm: norm(&u),
        x,
        u,
        nu,
        sigma_min,
        measurement_norm,
        x_hat: hat.x_hat,
        x_star: star.x_star,
        ratio,
        ratio_bound,
        record,
    })
}
