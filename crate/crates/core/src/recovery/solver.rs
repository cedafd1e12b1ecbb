//! Grid search plus golden-section refinement over a one-dimensional
//! parameter domain.

use crate::error::{invalid, Error, Result};
use crate::exec;
use crate::linalg::{distance, norm};
use crate::manifold::{Manifold, Topology};
use crate::measurement::MeasurementOperator;
use serde::Serialize;

pub const DEFAULT_GRID: usize = 1024;
/// Refinement stops when the bracket is shorter than `tol · extent`.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;
pub const MIN_GRID: usize = 8;
/// Objective values closer than this fraction of the largest grid value
/// count as ties.
pub const TIE_TOLERANCE: f64 = 1e-12;
/// Number of best grid-local minima that get refined.
const REFINED_BASINS: usize = 3;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolverTrace {
    pub grid: usize,
    pub grid_best_theta: f64,
    pub grid_best_value: f64,
    pub refinement_iterations: usize,
    /// False when no refined point beat the grid minimum by more than a tie.
    pub refined: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Minimizer {
    pub theta: Vec<f64>,
    pub value: f64,
    pub trace: SolverTrace,
}

/// ‖y − Φx̂‖ minimizer with x̂ = chart(θ̂).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecoveryResult {
    pub x_hat: Vec<f64>,
    pub theta_hat: Vec<f64>,
    pub residual: f64,
    pub trace: SolverTrace,
}

/// Nearest manifold point x* = chart(θ*) to an ambient x.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleResult {
    pub x_star: Vec<f64>,
    pub theta_star: Vec<f64>,
    pub distance: f64,
    pub trace: SolverTrace,
}

/// Minimize `objective` over the model's one-dimensional domain.
///
/// Ties are broken toward the smallest canonical parameter, so a flat
/// objective returns the domain minimum.
pub fn minimize_over_domain<F>(model: &dyn Manifold, grid: usize, tol: f64, objective: F) -> Result<Minimizer>
where
    F: Fn(f64) -> f64 + Sync,
{
    let domain = model.domain();
    if domain.dim() != 1 {
        return Err(Error::UnsupportedShape(format!(
            "solver handles one-dimensional domains, got K = {}",
            domain.dim()
        )));
    }
    if grid < MIN_GRID {
        return Err(invalid(format!("grid must have at least {MIN_GRID} points, got {grid}")));
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(invalid(format!("tolerance must be positive, got {tol}")));
    }
    let lo = domain.lower(0);
    let extent = domain.extent(0);
    let periodic = domain.topology() == Topology::Circle;
    let step = if periodic {
        extent / grid as f64
    } else {
        extent / (grid - 1) as f64
    };
    let grid_theta = |i: usize| lo + i as f64 * step;
    let values = exec::map_range(grid, |i| objective(grid_theta(i)));
    let tie = TIE_TOLERANCE * values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let better = |a: f64, b: f64| a < b - tie;

    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if better(v, values[best]) {
            best = i;
        }
    }
    // Candidate basins: grid-local minima in increasing value order.
    let at = |i: isize| -> Option<f64> {
        if periodic {
            Some(values[i.rem_euclid(grid as isize) as usize])
        } else if i < 0 || i >= grid as isize {
            None
        } else {
            Some(values[i as usize])
        }
    };
    let mut basins: Vec<usize> = (0..grid)
        .filter(|&i| {
            let v = values[i];
            let ii = i as isize;
            at(ii - 1).is_none_or(|l| v <= l) && at(ii + 1).is_none_or(|r| v <= r)
        })
        .collect();
    basins.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    basins.truncate(REFINED_BASINS);
    if !basins.contains(&best) {
        basins.insert(0, best);
    }

    let hi = lo + extent;
    let clamp = |t: f64| if periodic { t } else { t.clamp(lo, hi) };
    let target = tol * extent;
    let mut iterations = 0;
    let mut best_theta = grid_theta(best);
    let mut best_value = values[best];
    let mut refined = false;
    for &i in &basins {
        let centre = grid_theta(i);
        let mut a = clamp(centre - step);
        let mut b = clamp(centre + step);
        let mut c = b - INV_PHI * (b - a);
        let mut d = a + INV_PHI * (b - a);
        let mut fc = objective(c);
        let mut fd = objective(d);
        let (mut local_theta, mut local_value) = (centre, values[i]);
        let mut note = |t: f64, v: f64| {
            if v < local_value {
                local_theta = t;
                local_value = v;
            }
        };
        note(c, fc);
        note(d, fd);
        while b - a > target {
            iterations += 1;
            if fc <= fd {
                b = d;
                d = c;
                fd = fc;
                c = b - INV_PHI * (b - a);
                fc = objective(c);
                note(c, fc);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + INV_PHI * (b - a);
                fd = objective(d);
                note(d, fd);
            }
        }
        let mid = 0.5 * (a + b);
        let fm = objective(mid);
        note(mid, fm);
        // Squared objectives are smooth at the minimum, so one parabolic
        // step through (a, mid, b) polishes below the bracket width.
        let (fa, fb) = (objective(a), objective(b));
        let (ga, gm, gb) = (fa * fa, fm * fm, fb * fb);
        let h = 0.5 * (b - a);
        let curvature = ga - 2.0 * gm + gb;
        if curvature > 0.0 {
            let t = mid + 0.5 * h * (ga - gb) / curvature;
            if t > a && t < b {
                note(t, objective(t));
            }
        }
        if better(local_value, best_value) {
            best_theta = local_theta;
            best_value = local_value;
            refined = true;
        }
    }
    let theta = domain.canonicalize(&[best_theta]);
    // Canonicalizing a periodic parameter can move it by an ulp.
    let value = objective(theta[0]);
    Ok(Minimizer {
        theta,
        value: if refined { value } else { values[best].min(value) },
        trace: SolverTrace {
            grid,
            grid_best_theta: grid_theta(best),
            grid_best_value: values[best],
            refinement_iterations: iterations,
            refined,
        },
    })
}

/// Solve `min_θ ‖x − x_θ‖`.
pub fn nearest_point_on_manifold(model: &dyn Manifold, x: &[f64], grid: usize, tol: f64) -> Result<OracleResult> {
    if x.len() != model.ambient_dim() {
        return Err(invalid(format!(
            "point has length {}, manifold lives in R^{}",
            x.len(),
            model.ambient_dim()
        )));
    }
    let min = minimize_over_domain(model, grid, tol, |t| distance(x, &model.chart(&[t])))?;
    let x_star = model.chart(&min.theta);
    Ok(OracleResult {
        distance: distance(x, &x_star),
        x_star,
        theta_star: min.theta,
        trace: min.trace,
    })
}

fn measurement_residual(model: &dyn Manifold, op: &MeasurementOperator, y: &[f64], theta: f64) -> f64 {
    let image = op.apply_unchecked(&model.chart(&[theta]));
    let r: Vec<f64> = y.iter().zip(&image).map(|(a, b)| a - b).collect();
    norm(&r)
}

/// Solve `min_θ ‖y − Φx_θ‖` and return x̂ = x_θ̂.
pub fn recover_signal(
    model: &dyn Manifold,
    op: &MeasurementOperator,
    y: &[f64],
    grid: usize,
    tol: f64,
) -> Result<RecoveryResult> {
    if y.len() != op.rows() {
        return Err(invalid(format!("y has length {}, operator has {} rows", y.len(), op.rows())));
    }
    if op.cols() != model.ambient_dim() {
        return Err(invalid(format!(
            "operator has {} columns, manifold lives in R^{}",
            op.cols(),
            model.ambient_dim()
        )));
    }
    let min = minimize_over_domain(model, grid, tol, |t| measurement_residual(model, op, y, t))?;
    let x_hat = model.chart(&min.theta);
    Ok(RecoveryResult {
        residual: measurement_residual(model, op, y, min.theta[0]),
        x_hat,
        theta_hat: min.theta,
        trace: min.trace,
    })
}

/// Parameter estimate θ̂; the same program as [`recover_signal`].
pub fn estimate_parameter(
    model: &dyn Manifold,
    op: &MeasurementOperator,
    y: &[f64],
    grid: usize,
    tol: f64,
) -> Result<Vec<f64>> {
    recover_signal(model, op, y, grid, tol).map(|r| r.theta_hat)
}

/// d_Θ between two parameters in the model's domain metric.
pub fn parameter_distance(model: &dyn Manifold, a: &[f64], b: &[f64]) -> f64 {
    model.domain().metric(a, b)
}
