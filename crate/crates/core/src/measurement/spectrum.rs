//! Extremal singular values of a measurement operator.

use super::operator::MeasurementOperator;
use crate::error::{Error, Result};
use crate::linalg::{dot, norm};
use crate::rng::CounterStream;
use nalgebra::DMatrix;
use serde::Serialize;

/// Relative residual at which eigen-iterations stop.
pub const SPECTRUM_TOLERANCE: f64 = 1e-8;
const MAX_ITERATIONS: usize = 200_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SingularValueReport {
    pub sigma_max: f64,
    pub sigma_min: f64,
    pub tolerance: f64,
    pub iterations_max: usize,
    pub iterations_min: usize,
    /// `√(N/M) + 2`
    pub upper_reference: f64,
    /// `√(N/M) − 2`
    pub lower_reference: f64,
    pub upper_holds: bool,
    pub lower_holds: bool,
}

struct Eigen {
    value: f64,
    iterations: usize,
}

fn mat_vec(g: &[f64], m: usize, v: &[f64]) -> Vec<f64> {
    (0..m).map(|i| dot(&g[i * m..(i + 1) * m], v)).collect()
}

/// Iterate `v ← T(v)/‖T(v)‖` until the Rayleigh residual of `G` at `v` is
/// below `tol · λ`.
fn iterate<T>(g: &[f64], m: usize, seed: u64, step: T) -> Eigen
where
    T: Fn(&[f64]) -> Vec<f64>,
{
    let mut v = CounterStream::new(seed, 0x5bec).unit_vec(m);
    let mut value = 0.0;
    for it in 1..=MAX_ITERATIONS {
        let w = step(&v);
        let wn = norm(&w);
        if wn == 0.0 || !wn.is_finite() {
            return Eigen { value: 0.0, iterations: it };
        }
        v = w.iter().map(|x| x / wn).collect();
        let gv = mat_vec(g, m, &v);
        value = dot(&v, &gv);
        let residual = gv
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - value * b).powi(2))
            .sum::<f64>()
            .sqrt();
        if residual <= SPECTRUM_TOLERANCE * value.abs() {
            return Eigen { value, iterations: it };
        }
    }
    Eigen {
        value,
        iterations: MAX_ITERATIONS,
    }
}

/// Largest and smallest singular values of Φ (M ≤ N) from power iteration
/// and Cholesky-backed inverse iteration on ΦΦᵀ.
pub fn singular_value_range(op: &MeasurementOperator) -> Result<SingularValueReport> {
    let (m, n) = (op.rows(), op.cols());
    if m > n {
        return Err(Error::UnsupportedShape(format!(
            "singular value range needs M <= N, got {m}x{n}"
        )));
    }
    let g = op.gram();
    let top = iterate(&g, m, 1, |v| mat_vec(&g, m, v));
    if !(top.value > 0.0) {
        return Err(Error::DegenerateSpectrum("operator is zero".into()));
    }
    let chol = DMatrix::from_row_slice(m, m, &g).cholesky().ok_or_else(|| {
        Error::DegenerateSpectrum("Gram matrix is not positive definite (rank deficient)".into())
    })?;
    let bottom = iterate(&g, m, 2, |v| {
        chol.solve(&DMatrix::from_column_slice(m, 1, v))
            .as_slice()
            .to_vec()
    });
    if !(bottom.value > 0.0) {
        return Err(Error::DegenerateSpectrum("smallest eigenvalue is not positive".into()));
    }
    let sigma_max = top.value.sqrt();
    let sigma_min = bottom.value.sqrt();
    let ratio = (n as f64 / m as f64).sqrt();
    Ok(SingularValueReport {
        sigma_max,
        sigma_min,
        tolerance: SPECTRUM_TOLERANCE,
        iterations_max: top.iterations,
        iterations_min: bottom.iterations,
        upper_reference: ratio + 2.0,
        lower_reference: ratio - 2.0,
        upper_holds: sigma_max <= ratio + 2.0,
        lower_holds: sigma_min >= ratio - 2.0,
    })
}
