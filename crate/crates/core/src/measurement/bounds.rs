//! Sufficient number of Gaussian measurements for a stable embedding.

use crate::error::{invalid, Error, Result};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundBranch {
    /// `24K + 2K ln(√K/(τε²)) + ln(2V²)` dominates.
    Geometry,
    /// `ln(8/ρ)` dominates.
    Confidence,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub k: usize,
    pub tau: f64,
    pub volume: f64,
    pub epsilon: f64,
    pub rho: f64,
    /// `V/τ^K ≥ (21/(2√K))^K`
    pub assumption_holds: bool,
    pub geometry_term: f64,
    pub confidence_term: f64,
    pub branch: BoundBranch,
    /// Unrounded right-hand side.
    pub raw: f64,
    pub m_min: u64,
}

impl BoundReport {
    /// Error when the volume condition fails (the bound is then only
    /// indicative).
    pub fn require_assumption(&self) -> Result<()> {
        if self.assumption_holds {
            Ok(())
        } else {
            Err(Error::AssumptionViolated(format!(
                "V/tau^K = {} is below (21/(2 sqrt K))^K = {}",
                self.volume / self.tau.powi(self.k as i32),
                assumption_threshold(self.k)
            )))
        }
    }
}

pub(crate) fn assumption_threshold(k: usize) -> f64 {
    (21.0 / (2.0 * (k as f64).sqrt())).powi(k as i32)
}

pub(crate) fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon <= 1.0 / 3.0) {
        return Err(Error::OutOfRange(format!("epsilon must lie in (0, 1/3], got {epsilon}")));
    }
    Ok(())
}

pub(crate) fn check_geometry(k: usize, tau: f64, volume: f64) -> Result<()> {
    if k == 0 {
        return Err(invalid("manifold dimension K must be >= 1"));
    }
    if !(tau > 0.0) {
        return Err(invalid(format!("reach must be positive, got {tau}")));
    }
    if !(volume > 0.0 && volume.is_finite()) {
        return Err(invalid(format!("volume must be positive and finite, got {volume}")));
    }
    Ok(())
}

/// `M_min = ⌈18ε⁻² · max(24K + 2K ln(√K/(τε²)) + ln(2V²), ln(8/ρ))⌉`.
pub fn required_measurements(k: usize, tau: f64, volume: f64, epsilon: f64, rho: f64) -> Result<BoundReport> {
    check_epsilon(epsilon)?;
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::OutOfRange(format!("rho must lie in (0, 1), got {rho}")));
    }
    check_geometry(k, tau, volume)?;
    let kf = k as f64;
    let geometry_term = 24.0 * kf
        + 2.0 * kf * (kf.sqrt() / (tau * epsilon * epsilon)).ln()
        + (2.0 * volume * volume).ln();
    let confidence_term = (8.0 / rho).ln();
    let (branch, dominant) = if geometry_term >= confidence_term {
        (BoundBranch::Geometry, geometry_term)
    } else {
        (BoundBranch::Confidence, confidence_term)
    };
    let raw = 18.0 / (epsilon * epsilon) * dominant;
    Ok(BoundReport {
        k,
        tau,
        volume,
        epsilon,
        rho,
        assumption_holds: volume / tau.powi(k as i32) >= assumption_threshold(k),
        geometry_term,
        confidence_term,
        branch,
        raw,
        m_min: raw.ceil().max(1.0) as u64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn circle_bound() {
        let r = required_measurements(1, 1.0, 2.0 * PI, 1.0 / 3.0, 0.01).unwrap();
        assert_eq!(r.m_min, 5308);
        assert!(!r.assumption_holds);
        assert!(r.require_assumption().is_err());
        assert_eq!(r.branch, BoundBranch::Geometry);
        assert!((r.geometry_term - 32.763_35).abs() < 1e-5);
        assert!((r.confidence_term - 6.684_61).abs() < 1e-5);
    }

    #[test]
    fn confidence_branch() {
        let r = required_measurements(1, 1.0, 2.0 * PI, 1.0 / 3.0, 1e-20).unwrap();
        assert_eq!(r.m_min, 7798);
        assert_eq!(r.branch, BoundBranch::Confidence);
    }

    #[test]
    fn large_volume_bound() {
        let r = required_measurements(1, 1.0, 100.0, 1.0 / 3.0, 0.1).unwrap();
        assert_eq!(r.m_min, 6205);
        assert!(r.assumption_holds);
    }

    #[test]
    fn unit_volume_flags_assumption() {
        assert!(!required_measurements(1, 1.0, 1.0, 0.2, 0.1).unwrap().assumption_holds);
    }

    #[test]
    fn argument_errors() {
        assert!(matches!(
            required_measurements(1, 1.0, 10.0, 0.34, 0.1),
            Err(Error::OutOfRange(_))
        ));
        assert!(matches!(
            required_measurements(1, 1.0, 10.0, 0.3, 1.0),
            Err(Error::OutOfRange(_))
        ));
        assert!(required_measurements(0, 1.0, 10.0, 0.3, 0.1).is_err());
        assert!(required_measurements(1, 0.0, 10.0, 0.3, 0.1).is_err());
        assert!(required_measurements(1, 1.0, -1.0, 0.3, 0.1).is_err());
    }

    proptest! {
        #[test]
        fn monotone_in_each_argument(
            k in 1usize..4,
            tau in 0.1f64..10.0,
            v in 1.0f64..1e4,
            eps in 0.01f64..0.33,
            rho in 1e-6f64..0.5,
            bump in 1.0f64..3.0,
        ) {
            let base = required_measurements(k, tau, v, eps, rho).unwrap().m_min;
            prop_assert!(required_measurements(k, tau, v * bump, eps, rho).unwrap().m_min >= base);
            prop_assert!(required_measurements(k + 1, tau, v, eps, rho).unwrap().m_min >= base);
            prop_assert!(required_measurements(k, tau * bump, v, eps, rho).unwrap().m_min <= base);
            prop_assert!(required_measurements(k, tau, v, (eps * bump).min(1.0 / 3.0), rho).unwrap().m_min <= base);
            prop_assert!(required_measurements(k, tau, v, eps, (rho * bump).min(0.99)).unwrap().m_min <= base);
        }
    }
}
