//! Checks of the recovery-error inequalities on concrete instances.

use crate::error::{Error, Result};
use crate::linalg::{distance, norm};
use crate::manifold::ManifoldSample;
use serde::Serialize;

/// Slack allowance for floating-point noise in a passing check.
pub const BOUND_SLACK_ALLOWANCE: f64 = 1e-9;
/// `‖x − x*‖ + (10/9)‖n‖ ≤ 0.163τ` is required by the geodesic bound.
pub const GEODESIC_PRECONDITION: f64 = 0.163;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    /// `‖x−x̂‖ ≤ (1+2ε)(2σ_M+1)‖x−x*‖ + (2+4ε)‖n‖`
    Deterministic,
    /// Two-regime bound on ‖x−x̂‖ for an operator drawn independently of x.
    SignalRecovery,
    /// Two-regime bound on d_M(x̂, x*).
    Geodesic,
    /// `‖x−x̂‖/‖x−x*‖ ≥ σ_m / (2(1+ε))` on the adversarial segment instance.
    Adversarial,
}

impl BoundKind {
    pub fn id(self) -> &'static str {
        match self {
            BoundKind::Deterministic => "deterministic",
            BoundKind::SignalRecovery => "signal-recovery",
            BoundKind::Geodesic => "geodesic",
            BoundKind::Adversarial => "adversarial",
        }
    }
}

/// Which term of a two-regime minimum was smaller.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// `x` far from the manifold; the additive ετ term is cheaper.
    Far,
    /// `x` close to the manifold; the √(N/M) multiplicative term is cheaper.
    Near,
}

/// The ε fed into a bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "mode", content = "value", rename_all = "kebab-case")]
pub enum Epsilon {
    /// Stated isometry constant; must lie in (0, 1/3].
    Theorem(f64),
    /// Measured ε̂ of the operator on a secant sample. May exceed 1/3, in
    /// which case the check runs outside the theorem's range.
    Empirical(f64),
}

impl Epsilon {
    pub fn value(self) -> f64 {
        match self {
            Epsilon::Theorem(e) | Epsilon::Empirical(e) => e,
        }
    }

    pub fn is_empirical(self) -> bool {
        matches!(self, Epsilon::Empirical(_))
    }

    fn validate(self) -> Result<f64> {
        match self {
            Epsilon::Theorem(e) if e > 0.0 && e <= 1.0 / 3.0 => Ok(e),
            Epsilon::Theorem(e) => Err(Error::OutOfRange(format!("epsilon must lie in (0, 1/3], got {e}"))),
            Epsilon::Empirical(e) if e >= 0.0 && e.is_finite() => Ok(e),
            Epsilon::Empirical(e) => Err(Error::OutOfRange(format!("measured epsilon must be finite and >= 0, got {e}"))),
        }
    }
}

/// Vectors of one recovery instance `y = Φx + n`.
#[derive(Debug, Clone, Copy)]
pub struct Instance<'a> {
    pub x: &'a [f64],
    pub x_hat: &'a [f64],
    pub x_star: &'a [f64],
    pub noise: &'a [f64],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCheckRecord {
    pub kind: BoundKind,
    pub epsilon: Epsilon,
    /// ‖x − x*‖
    pub optimal_error: f64,
    /// ‖x − x̂‖
    pub recovery_error: f64,
    /// d_M(x̂, x*) from the neighbor graph, when the bound needs it.
    pub geodesic: Option<f64>,
    pub noise_norm: f64,
    pub sigma: Option<f64>,
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub tau: Option<f64>,
    pub regime: Option<Regime>,
    /// Square-root argument of the chord-to-geodesic conversion,
    /// `1 − 2‖x̂ − x*‖_bound / τ`; nonnegative whenever the precondition holds.
    pub sqrt_argument: Option<f64>,
    /// False when a precondition fails; such records are not failures.
    pub applicable: bool,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub pass: bool,
}

impl BoundCheckRecord {
    fn new(kind: BoundKind, epsilon: Epsilon, inst: &Instance<'_>, lhs: f64, rhs: f64) -> Self {
        let slack = rhs - lhs;
        BoundCheckRecord {
            kind,
            epsilon,
            optimal_error: distance(inst.x, inst.x_star),
            recovery_error: distance(inst.x, inst.x_hat),
            geodesic: None,
            noise_norm: norm(inst.noise),
            sigma: None,
            n: None,
            m: None,
            tau: None,
            regime: None,
            sqrt_argument: None,
            applicable: true,
            lhs,
            rhs,
            slack,
            pass: slack >= -BOUND_SLACK_ALLOWANCE,
        }
    }

    /// Counted as a failure: applicable and out of slack.
    pub fn failed(&self) -> bool {
        self.applicable && !self.pass
    }
}

fn check_lengths(inst: &Instance<'_>) -> Result<()> {
    let n = inst.x.len();
    if inst.x_hat.len() != n || inst.x_star.len() != n {
        return Err(crate::error::invalid("x, x_hat and x_star must share a length"));
    }
    Ok(())
}

fn check_dims(n: usize, m: usize) -> Result<f64> {
    if m == 0 || n == 0 {
        return Err(crate::error::invalid(format!("need N, M >= 1, got N = {n}, M = {m}")));
    }
    Ok((n as f64 / m as f64).sqrt())
}

fn check_tau(tau: f64) -> Result<()> {
    if !(tau > 0.0) {
        return Err(Error::OutOfRange(format!("reach must be positive, got {tau}")));
    }
    Ok(())
}

/// Right-hand side of the deterministic bound.
pub fn deterministic_rhs(eps: f64, sigma_max: f64, optimal_error: f64, noise_norm: f64) -> f64 {
    (1.0 + 2.0 * eps) * (2.0 * sigma_max + 1.0) * optimal_error + (2.0 + 4.0 * eps) * noise_norm
}

/// Right-hand side of the signal-recovery bound and its active regime.
pub fn signal_recovery_rhs(eps: f64, n: usize, m: usize, tau: f64, optimal_error: f64, noise_norm: f64) -> (f64, Regime) {
    let ratio = (n as f64 / m as f64).sqrt();
    let far = (1.0 + 3.0 * eps) * optimal_error + eps * tau / 40.0;
    let near = (1.0 + 2.0 * eps) * (2.0 * ratio + 5.0) * optimal_error;
    let (term, regime) = if near < far { (near, Regime::Near) } else { (far, Regime::Far) };
    (term + (2.0 + 4.0 * eps) * noise_norm, regime)
}

/// Right-hand side of the geodesic bound and its active regime.
pub fn geodesic_rhs(eps: f64, n: usize, m: usize, tau: f64, optimal_error: f64, noise_norm: f64) -> (f64, Regime) {
    let ratio = (n as f64 / m as f64).sqrt();
    let far = (4.0 + 6.0 * eps) * optimal_error + eps * tau / 20.0;
    let near = ((4.0 + 8.0 * eps) * ratio + 12.0 + 20.0 * eps) * optimal_error;
    let (term, regime) = if near < far { (near, Regime::Near) } else { (far, Regime::Far) };
    (term + (4.0 + 8.0 * eps) * noise_norm, regime)
}

pub fn check_deterministic_bound(inst: &Instance<'_>, epsilon: Epsilon, sigma_max: f64) -> Result<BoundCheckRecord> {
    check_lengths(inst)?;
    let eps = epsilon.validate()?;
    let opt = distance(inst.x, inst.x_star);
    let rhs = deterministic_rhs(eps, sigma_max, opt, norm(inst.noise));
    let mut rec = BoundCheckRecord::new(BoundKind::Deterministic, epsilon, inst, distance(inst.x, inst.x_hat), rhs);
    rec.sigma = Some(sigma_max);
    Ok(rec)
}

pub fn check_probabilistic_bound(
    inst: &Instance<'_>,
    epsilon: Epsilon,
    n: usize,
    m: usize,
    tau: f64,
) -> Result<BoundCheckRecord> {
    check_lengths(inst)?;
    let eps = epsilon.validate()?;
    check_dims(n, m)?;
    check_tau(tau)?;
    let (rhs, regime) = signal_recovery_rhs(eps, n, m, tau, distance(inst.x, inst.x_star), norm(inst.noise));
    let mut rec = BoundCheckRecord::new(BoundKind::SignalRecovery, epsilon, inst, distance(inst.x, inst.x_hat), rhs);
    rec.n = Some(n);
    rec.m = Some(m);
    rec.tau = Some(tau);
    rec.regime = Some(regime);
    Ok(rec)
}

/// Whether `‖x − x*‖ + (10/9)‖n‖ ≤ 0.163τ`.
pub fn geodesic_precondition_holds(optimal_error: f64, noise_norm: f64, tau: f64) -> bool {
    optimal_error + 10.0 / 9.0 * noise_norm <= GEODESIC_PRECONDITION * tau
}

/// Geodesic bound with d_M(x̂, x*) measured on the sample's neighbor graph.
pub fn check_geodesic_bound(
    sample: &ManifoldSample,
    inst: &Instance<'_>,
    epsilon: Epsilon,
    n: usize,
    m: usize,
    tau: f64,
) -> Result<BoundCheckRecord> {
    check_lengths(inst)?;
    let eps = epsilon.validate()?;
    check_dims(n, m)?;
    check_tau(tau)?;
    let opt = distance(inst.x, inst.x_star);
    let noise = norm(inst.noise);
    let geodesic = sample.geodesic_between_points(inst.x_hat, inst.x_star)?;
    let (rhs, regime) = geodesic_rhs(eps, n, m, tau, opt, noise);
    let mut rec = BoundCheckRecord::new(BoundKind::Geodesic, epsilon, inst, geodesic, rhs);
    rec.geodesic = Some(geodesic);
    rec.n = Some(n);
    rec.m = Some(m);
    rec.tau = Some(tau);
    rec.regime = Some(regime);
    rec.sqrt_argument = Some(1.0 - rhs / tau);
    rec.applicable = geodesic_precondition_holds(opt, noise, tau);
    Ok(rec)
}
