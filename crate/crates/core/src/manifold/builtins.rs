//! Built-in one-dimensional manifolds.

use super::{KnownReach, Manifold, ParameterDomain};
use crate::error::{invalid, Result};
use std::f64::consts::PI;

/// Default Gaussian pulse width; keeps the pulse well inside `[0, 1]`.
pub const DEFAULT_PULSE_WIDTH: f64 = 0.05;

/// Circle of radius κ in the first two ambient coordinates.
#[derive(Debug, Clone)]
pub struct Circle {
    kappa: f64,
    n: usize,
    domain: ParameterDomain,
}

pub fn make_circle(kappa: f64, n: usize) -> Result<Circle> {
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(invalid(format!("circle radius must be positive, got {kappa}")));
    }
    if n < 2 {
        return Err(invalid(format!("circle needs ambient dimension >= 2, got {n}")));
    }
    Ok(Circle {
        kappa,
        n,
        domain: ParameterDomain::circle(0.0, 2.0 * PI)?,
    })
}

impl Circle {
    pub fn radius(&self) -> f64 {
        self.kappa
    }
}

impl Manifold for Circle {
    fn name(&self) -> &str {
        "circle"
    }

    fn domain(&self) -> &ParameterDomain {
        &self.domain
    }

    fn ambient_dim(&self) -> usize {
        self.n
    }

    fn chart_into(&self, theta: &[f64], out: &mut [f64]) {
        out.fill(0.0);
        let (s, c) = theta[0].sin_cos();
        out[0] = self.kappa * c;
        out[1] = self.kappa * s;
    }

    fn tangent(&self, theta: &[f64]) -> Option<Vec<Vec<f64>>> {
        let mut t = vec![0.0; self.n];
        let (s, c) = theta[0].sin_cos();
        t[0] = -self.kappa * s;
        t[1] = self.kappa * c;
        Some(vec![t])
    }

    fn reach(&self) -> KnownReach {
        KnownReach::Exact(self.kappa)
    }

    fn volume(&self) -> Option<f64> {
        Some(2.0 * PI * self.kappa)
    }
}

/// Shifts of a sampled Gaussian pulse: `x_θ(n) = exp(-(n/N - θ)² / 2σ²)`,
/// θ ∈ [0, 1].
#[derive(Debug, Clone)]
pub struct GaussianPulse {
    sigma: f64,
    n: usize,
    domain: ParameterDomain,
}

pub fn make_gaussian_pulse(sigma: f64, n: usize) -> Result<GaussianPulse> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(invalid(format!("pulse width must be positive, got {sigma}")));
    }
    if n < 2 {
        return Err(invalid(format!("pulse needs N >= 2, got {n}")));
    }
    Ok(GaussianPulse {
        sigma,
        n,
        domain: ParameterDomain::interval(0.0, 1.0)?,
    })
}

impl GaussianPulse {
    pub fn width(&self) -> f64 {
        self.sigma
    }
}

impl Manifold for GaussianPulse {
    fn name(&self) -> &str {
        "gaussian-pulse"
    }

    fn domain(&self) -> &ParameterDomain {
        &self.domain
    }

    fn ambient_dim(&self) -> usize {
        self.n
    }

    fn chart_into(&self, theta: &[f64], out: &mut [f64]) {
        let inv = 1.0 / (2.0 * self.sigma * self.sigma);
        let nf = self.n as f64;
        for (i, o) in out.iter_mut().enumerate() {
            let t = i as f64 / nf - theta[0];
            *o = (-t * t * inv).exp();
        }
    }
}

/// Complex exponential curve `t ↦ (e^{i2πnt})_{n=-f..f}` in ℂ^{2f+1},
/// stored as interleaved (re, im) pairs.
#[derive(Debug, Clone)]
pub struct ComplexExponential {
    f_c: usize,
    domain: ParameterDomain,
}

pub fn make_complex_exponential(f_c: usize) -> Result<ComplexExponential> {
    if f_c < 1 {
        return Err(invalid("complex exponential needs f_C >= 1"));
    }
    Ok(ComplexExponential {
        f_c,
        domain: ParameterDomain::circle(0.0, 1.0)?,
    })
}

impl ComplexExponential {
    /// Number of complex entries, `2 f_C + 1`.
    pub fn complex_dim(&self) -> usize {
        2 * self.f_c + 1
    }

    pub fn max_frequency(&self) -> usize {
        self.f_c
    }

    fn frequencies(&self) -> impl Iterator<Item = f64> {
        let f = self.f_c as i64;
        (-f..=f).map(|k| k as f64)
    }

    /// Constant speed ‖dβ/dt‖ = (Σ (2πn)²)^{1/2}.
    pub fn speed(&self) -> f64 {
        self.frequencies()
            .map(|k| (2.0 * PI * k).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// Constant acceleration ‖d²β/dt²‖ = (Σ (2πn)⁴)^{1/2}.
    pub fn acceleration(&self) -> f64 {
        self.frequencies()
            .map(|k| (2.0 * PI * k).powi(4))
            .sum::<f64>()
            .sqrt()
    }
}

impl Manifold for ComplexExponential {
    fn name(&self) -> &str {
        "complex-exponential"
    }

    fn domain(&self) -> &ParameterDomain {
        &self.domain
    }

    fn ambient_dim(&self) -> usize {
        2 * self.complex_dim()
    }

    fn chart_into(&self, theta: &[f64], out: &mut [f64]) {
        for (i, k) in self.frequencies().enumerate() {
            let (s, c) = (2.0 * PI * k * theta[0]).sin_cos();
            out[2 * i] = c;
            out[2 * i + 1] = s;
        }
    }

    fn tangent(&self, theta: &[f64]) -> Option<Vec<Vec<f64>>> {
        let mut t = vec![0.0; self.ambient_dim()];
        for (i, k) in self.frequencies().enumerate() {
            let w = 2.0 * PI * k;
            let (s, c) = (w * theta[0]).sin_cos();
            t[2 * i] = -w * s;
            t[2 * i + 1] = w * c;
        }
        Some(vec![t])
    }

    fn reach(&self) -> KnownReach {
        KnownReach::UpperBound((self.complex_dim() as f64).sqrt())
    }

    fn volume(&self) -> Option<f64> {
        Some(self.speed())
    }
}

/// Segment from the origin to e₁.
#[derive(Debug, Clone)]
pub struct LineSegment {
    n: usize,
    domain: ParameterDomain,
}

pub fn make_line_segment(n: usize) -> Result<LineSegment> {
    if n < 1 {
        return Err(invalid("line segment needs N >= 1"));
    }
    Ok(LineSegment {
        n,
        domain: ParameterDomain::interval(0.0, 1.0)?,
    })
}

impl Manifold for LineSegment {
    fn name(&self) -> &str {
        "line-segment"
    }

    fn domain(&self) -> &ParameterDomain {
        &self.domain
    }

    fn ambient_dim(&self) -> usize {
        self.n
    }

    fn chart_into(&self, theta: &[f64], out: &mut [f64]) {
        out.fill(0.0);
        out[0] = theta[0];
    }

    fn tangent(&self, _theta: &[f64]) -> Option<Vec<Vec<f64>>> {
        let mut t = vec![0.0; self.n];
        t[0] = 1.0;
        Some(vec![t])
    }

    fn reach(&self) -> KnownReach {
        KnownReach::Exact(f64::INFINITY)
    }

    fn volume(&self) -> Option<f64> {
        Some(1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{distance, norm};
    use crate::manifold::finite_difference_tangent;
    use crate::rng::CounterStream;

    #[test]
    fn circle_chart_values() {
        let c = make_circle(2.0, 4).unwrap();
        assert_eq!(c.chart(&[0.0]), vec![2.0, 0.0, 0.0, 0.0]);
        let u = make_circle(1.0, 3).unwrap();
        let q = u.chart(&[PI / 2.0]);
        assert!(q[0].abs() < 1e-15 && (q[1] - 1.0).abs() < 1e-15 && q[2] == 0.0);
        assert_eq!(u.reach(), KnownReach::Exact(1.0));
        assert!((u.volume().unwrap() - 2.0 * PI).abs() < 1e-15);
        assert_eq!(u.intrinsic_dim(), 1);
    }

    #[test]
    fn circle_rejects_bad_arguments() {
        assert!(make_circle(0.0, 3).is_err());
        assert!(make_circle(-1.0, 3).is_err());
        assert!(make_circle(1.0, 1).is_err());
    }

    #[test]
    fn pulse_peaks_at_shift() {
        let p = make_gaussian_pulse(0.05, 1024).unwrap();
        let x = p.chart(&[0.5]);
        let argmax = x
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap()
            .0;
        assert_eq!(argmax, 512);
        assert_eq!(p.chart(&[0.2]), p.chart(&[0.2]));
    }

    #[test]
    fn pulse_distance_matches_direct_sum() {
        // 40-digit direct evaluation of the 1024-term sum.
        let p = make_gaussian_pulse(0.05, 1024).unwrap();
        let d = distance(&p.chart(&[0.3]), &p.chart(&[0.7]));
        assert!((d - 13.472_165_895_195_63).abs() < 1e-11, "{d}");
    }

    #[test]
    fn pulse_rejects_bad_arguments() {
        assert!(make_gaussian_pulse(0.0, 16).is_err());
        assert!(make_gaussian_pulse(0.1, 1).is_err());
    }

    #[test]
    fn complex_exponential_values() {
        let c = make_complex_exponential(1).unwrap();
        assert_eq!(c.ambient_dim(), 6);
        assert_eq!(c.chart(&[0.0]), vec![1.0, 0.0, 1.0, 0.0, 1.0, 0.0]);
        let mut s = CounterStream::new(3, 0);
        for _ in 0..20 {
            let t = s.uniform();
            assert!((norm(&c.chart(&[t])) - 3f64.sqrt()).abs() < 1e-14);
        }
        // (Σ_{n=-1}^{1} (2πn)²)^{1/2} = 2π√2
        assert!((c.speed() - 8.885_765_876_316_732).abs() < 1e-12);
        assert_eq!(c.reach(), KnownReach::UpperBound(3f64.sqrt()));
        assert!(make_complex_exponential(0).is_err());
    }

    #[test]
    fn line_segment_values() {
        let l = make_line_segment(3).unwrap();
        assert_eq!(l.chart(&[0.0]), vec![0.0, 0.0, 0.0]);
        assert_eq!(l.chart(&[1.0]), vec![1.0, 0.0, 0.0]);
        assert_eq!(l.chart(&[0.25]), vec![0.25, 0.0, 0.0]);
        assert_eq!(l.reach(), KnownReach::Exact(f64::INFINITY));
        assert!(make_line_segment(0).is_err());
    }

    #[test]
    fn analytic_tangents_match_finite_differences() {
        let models: Vec<Box<dyn Manifold>> = vec![
            Box::new(make_circle(1.7, 5).unwrap()),
            Box::new(make_complex_exponential(4).unwrap()),
            Box::new(make_line_segment(4).unwrap()),
        ];
        let mut s = CounterStream::new(11, 0);
        for m in &models {
            for _ in 0..25 {
                let t = m.domain().lower(0) + s.uniform() * m.domain().extent(0);
                let analytic = &m.tangent(&[t]).unwrap()[0];
                let fd = &finite_difference_tangent(m.as_ref(), &[t], 1e-5)[0];
                let rel = distance(analytic, fd) / norm(analytic);
                assert!(rel <= 1e-5, "{}: rel err {rel}", m.name());
            }
        }
    }
}
