//! Parametric manifold models and their discretizations.

mod builtins;
mod sample;

pub use builtins::{
    make_circle, make_complex_exponential, make_gaussian_pulse, make_line_segment, Circle,
    ComplexExponential, GaussianPulse, LineSegment, DEFAULT_PULSE_WIDTH,
};
pub use sample::{sample_manifold, ManifoldSample};

use crate::error::{invalid, Result};
use std::sync::Arc;

/// How the coordinates of a parameter domain are glued.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Topology {
    /// Closed box `[lo, hi]` per coordinate.
    Interval,
    /// Reals modulo the period `hi - lo` per coordinate.
    Circle,
}

/// Parameter space Θ with its metric.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterDomain {
    topology: Topology,
    bounds: Vec<(f64, f64)>,
}

impl ParameterDomain {
    pub fn new(topology: Topology, bounds: Vec<(f64, f64)>) -> Result<Self> {
        if bounds.is_empty() {
            return Err(invalid("parameter domain needs at least one coordinate"));
        }
        for &(lo, hi) in &bounds {
            if !(lo.is_finite() && hi.is_finite() && hi > lo) {
                return Err(invalid(format!("bad coordinate bounds [{lo}, {hi}]")));
            }
        }
        Ok(Self { topology, bounds })
    }

    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        Self::new(Topology::Interval, vec![(lo, hi)])
    }

    pub fn circle(lo: f64, period: f64) -> Result<Self> {
        Self::new(Topology::Circle, vec![(lo, lo + period)])
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    pub fn extent(&self, coord: usize) -> f64 {
        let (lo, hi) = self.bounds[coord];
        hi - lo
    }

    pub fn lower(&self, coord: usize) -> f64 {
        self.bounds[coord].0
    }

    /// Map a parameter to its canonical representative (wraps circle
    /// coordinates into `[lo, hi)`, clamps interval coordinates).
    pub fn canonicalize(&self, theta: &[f64]) -> Vec<f64> {
        theta
            .iter()
            .zip(&self.bounds)
            .map(|(&t, &(lo, hi))| match self.topology {
                Topology::Interval => t.clamp(lo, hi),
                Topology::Circle => {
                    let p = hi - lo;
                    let w = lo + (t - lo).rem_euclid(p);
                    if w >= hi {
                        lo
                    } else {
                        w
                    }
                }
            })
            .collect()
    }

    /// Signed coordinate difference `b - a`, wrapped to `[-P/2, P/2]` on circles.
    pub fn difference(&self, a: f64, b: f64, coord: usize) -> f64 {
        let d = b - a;
        match self.topology {
            Topology::Interval => d,
            Topology::Circle => {
                let p = self.extent(coord);
                let w = d.rem_euclid(p);
                if w > p / 2.0 {
                    w - p
                } else {
                    w
                }
            }
        }
    }

    /// d_Θ: Euclidean on boxes, wrapped arc metric on circles.
    pub fn metric(&self, a: &[f64], b: &[f64]) -> f64 {
        (0..self.dim())
            .map(|c| self.difference(a[c], b[c], c).powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

/// What is known about a model's reach τ (inverse condition number).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KnownReach {
    /// Exact value; `f64::INFINITY` marks a flat set.
    Exact(f64),
    /// Only an upper bound is known.
    UpperBound(f64),
    Unknown,
}

impl KnownReach {
    pub fn exact(&self) -> Option<f64> {
        match *self {
            KnownReach::Exact(t) => Some(t),
            _ => None,
        }
    }
}

/// A smooth parametric manifold θ ↦ x_θ ⊂ ℝᴺ.
///
/// Charts must be deterministic: equal θ gives bit-identical output.
/// Charts may be evaluated slightly outside the domain (finite differences
/// at interval ends rely on this).
pub trait Manifold: Send + Sync + std::fmt::Debug {
    fn name(&self) -> &str;

    fn domain(&self) -> &ParameterDomain;

    /// Length N of the (real) ambient vector.
    fn ambient_dim(&self) -> usize;

    fn chart_into(&self, theta: &[f64], out: &mut [f64]);

    fn chart(&self, theta: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.ambient_dim()];
        self.chart_into(theta, &mut out);
        out
    }

    /// Analytic partial derivatives ∂x/∂θ_k, if available.
    fn tangent(&self, _theta: &[f64]) -> Option<Vec<Vec<f64>>> {
        None
    }

    fn reach(&self) -> KnownReach {
        KnownReach::Unknown
    }

    /// K-dimensional volume, if known.
    fn volume(&self) -> Option<f64> {
        None
    }

    fn intrinsic_dim(&self) -> usize {
        self.domain().dim()
    }
}

pub type ModelRef = Arc<dyn Manifold>;

/// Central-difference partial derivatives with the given step per coordinate.
pub fn finite_difference_tangent(model: &dyn Manifold, theta: &[f64], step: f64) -> Vec<Vec<f64>> {
    let n = model.ambient_dim();
    let mut plus = vec![0.0; n];
    let mut minus = vec![0.0; n];
    (0..theta.len())
        .map(|k| {
            let mut tp = theta.to_vec();
            let mut tm = theta.to_vec();
            tp[k] += step;
            tm[k] -= step;
            model.chart_into(&tp, &mut plus);
            model.chart_into(&tm, &mut minus);
            plus.iter()
                .zip(&minus)
                .map(|(p, m)| (p - m) / (2.0 * step))
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn circle_metric_wraps() {
        let d = ParameterDomain::circle(0.0, 2.0 * PI).unwrap();
        assert!((d.metric(&[0.1], &[2.0 * PI - 0.1]) - 0.2).abs() < 1e-12);
        assert_eq!(d.metric(&[1.0], &[1.0]), 0.0);
        assert!((d.metric(&[0.0], &[PI]) - PI).abs() < 1e-12);
    }

    #[test]
    fn interval_metric_is_euclidean() {
        let d = ParameterDomain::interval(0.0, 1.0).unwrap();
        assert!((d.metric(&[0.1], &[0.9]) - 0.8).abs() < 1e-15);
    }

    #[test]
    fn canonicalize_wraps_into_half_open_range() {
        let d = ParameterDomain::circle(0.0, 1.0).unwrap();
        assert_eq!(d.canonicalize(&[1.0]), vec![0.0]);
        assert!((d.canonicalize(&[-0.25])[0] - 0.75).abs() < 1e-15);
    }

    #[test]
    fn degenerate_bounds_rejected() {
        assert!(ParameterDomain::interval(1.0, 1.0).is_err());
        assert!(ParameterDomain::new(Topology::Interval, vec![]).is_err());
        assert!(ParameterDomain::interval(0.0, f64::INFINITY).is_err());
    }
}
