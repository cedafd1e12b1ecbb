//! Numeric chaining bound on the probability that a Gaussian operator
//! fails to be an ε-stable embedding of a manifold.

use super::bounds::{assumption_threshold, check_epsilon, check_geometry};
use crate::error::{invalid, Error, Result};
use crate::geometry::ln_direction_net_bound;
use serde::Serialize;

pub const DEFAULT_TRUNCATION: usize = 60;

/// `Σ_{j=0}^{J} (j+1) 2^{−j−2}`, which tends to 1.
pub fn chain_weight_sum(levels: usize) -> f64 {
    (0..=levels)
        .map(|j| (j as f64 + 1.0) * 0.5f64.powi(j as i32 + 2))
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainCertificate {
    pub k: usize,
    pub tau: f64,
    pub volume: f64,
    pub m: u64,
    pub epsilon: f64,
    /// ε₁ = 9ε/10
    pub epsilon1: f64,
    /// δ = ε/160
    pub delta: f64,
    /// √(6/7)
    pub c1: f64,
    /// 16
    pub c2: f64,
    pub truncation: usize,
    /// ln Ñ₀(δ)
    pub ln_n0: f64,
    /// `2Ñ₀ · min(1, 2e^{−M(c₁ε₁)²/6})`
    pub first_term: f64,
    /// `2Ñ²_{j+1} · min(1, e^{−(2j+1)M/7})` for j = 0..=J.
    pub level_terms: Vec<f64>,
    /// Bound on the levels beyond J (+∞ when the series diverges).
    pub remainder: f64,
    /// Sum of all terms; may exceed 1 or be +∞.
    pub total: f64,
    pub weight_sum: f64,
    /// `8e^{−Mε₁²/14}`
    pub closed_form: f64,
}

impl ChainCertificate {
    /// Failure-probability bound, capped at 1.
    pub fn failure_probability(&self) -> f64 {
        self.total.min(1.0)
    }

    /// False when the bound says nothing (total ≥ 1).
    pub fn informative(&self) -> bool {
        self.total < 1.0
    }
}

fn log_sum_exp(logs: &[f64]) -> f64 {
    let max = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::INFINITY {
        return f64::INFINITY;
    }
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    max + logs.iter().map(|l| (l - max).exp()).sum::<f64>().ln()
}

/// Evaluate the chaining bound for `M` measurements, summing levels
/// `0..=truncation` explicitly and the rest as a geometric tail.
pub fn chaining_failure_bound(
    k: usize,
    tau: f64,
    volume: f64,
    epsilon: f64,
    m: u64,
    truncation: usize,
) -> Result<ChainCertificate> {
    check_epsilon(epsilon)?;
    check_geometry(k, tau, volume)?;
    if m == 0 {
        return Err(invalid("M must be >= 1"));
    }
    if !tau.is_finite() {
        return Err(invalid("chaining bound needs a finite reach"));
    }
    let ratio = volume / tau.powi(k as i32);
    if ratio < assumption_threshold(k) {
        return Err(Error::AssumptionViolated(format!(
            "V/tau^K = {ratio} is below (21/(2 sqrt K))^K = {}",
            assumption_threshold(k)
        )));
    }
    let kf = k as f64;
    let mf = m as f64;
    let epsilon1 = 0.9 * epsilon;
    let delta = epsilon / 160.0;
    let c1 = (6.0f64 / 7.0).sqrt();
    let c2 = 16.0;
    let ln_n = |j: usize| ln_direction_net_bound(j, k, delta, ratio);
    let ln_2 = std::f64::consts::LN_2;

    let lambda0 = c1 * epsilon1;
    let ln_first = ln_2 + ln_n(0) + (ln_2 - mf * lambda0 * lambda0 / 6.0).min(0.0);
    // One-sided deviation 8⁻¹c₂(j+1) − 1 = 2j + 1 at level j.
    let ln_level = |j: usize| {
        let lambda = c2 * (j as f64 + 1.0) / 8.0 - 1.0;
        ln_2 + 2.0 * ln_n(j + 1) + (-mf * lambda / 7.0).min(0.0)
    };
    let ln_levels: Vec<f64> = (0..=truncation).map(ln_level).collect();
    // Beyond J the ratio of consecutive terms is 4^{4K} e^{−2M/7}.
    let ln_r = 4.0 * kf * 4f64.ln() - 2.0 * mf / 7.0;
    let ln_remainder = if ln_r < 0.0 {
        ln_level(truncation + 1) - (-ln_r.exp()).ln_1p()
    } else {
        f64::INFINITY
    };
    let mut all = vec![ln_first];
    all.extend(&ln_levels);
    all.push(ln_remainder);
    let total = log_sum_exp(&all).exp();
    Ok(ChainCertificate {
        k,
        tau,
        volume,
        m,
        epsilon,
        epsilon1,
        delta,
        c1,
        c2,
        truncation,
        ln_n0: ln_n(0),
        first_term: ln_first.exp(),
        level_terms: ln_levels.iter().map(|l| l.exp()).collect(),
        remainder: ln_remainder.exp(),
        total,
        weight_sum: chain_weight_sum(truncation),
        closed_form: 8.0 * (-mf * epsilon1 * epsilon1 / 14.0).exp(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurement::required_measurements;
    use proptest::prelude::*;

    #[test]
    fn weight_identity() {
        assert!((chain_weight_sum(60) - 1.0).abs() < 1e-12);
        assert!((chain_weight_sum(0) - 0.25).abs() < 1e-16);
    }

    #[test]
    fn certificate_at_sufficient_measurements() {
        let m = required_measurements(1, 1.0, 100.0, 1.0 / 3.0, 0.1).unwrap().m_min;
        assert_eq!(m, 6205);
        let c = chaining_failure_bound(1, 1.0, 100.0, 1.0 / 3.0, m, DEFAULT_TRUNCATION).unwrap();
        assert!(c.total <= 0.1);
        assert!(c.total <= c.closed_form);
        assert!(c.remainder < 1e-12);
        assert!(c.informative());
        assert!((c.epsilon1 - 0.3).abs() < 1e-15);
        assert!((c.delta - 1.0 / 480.0).abs() < 1e-18);
    }

    #[test]
    fn single_measurement_is_vacuous() {
        let c = chaining_failure_bound(1, 1.0, 100.0, 1.0 / 3.0, 1, DEFAULT_TRUNCATION).unwrap();
        assert!(c.total >= 1.0);
        assert!(!c.informative());
        assert_eq!(c.failure_probability(), 1.0);
    }

    #[test]
    fn first_term_matches_closed_form() {
        // 2Ñ₀ · 2e^{−Mε₁²/7} once the minimum is inactive.
        let c = chaining_failure_bound(1, 1.0, 100.0, 0.3, 8000, 10).unwrap();
        let expected = 4.0 * (c.ln_n0 - 8000.0 * 0.27f64.powi(2) / 7.0).exp();
        assert!((c.first_term - expected).abs() <= 1e-12 * expected);
    }

    #[test]
    fn argument_errors() {
        assert!(matches!(
            chaining_failure_bound(1, 1.0, 2.0 * std::f64::consts::PI, 0.3, 100, 10),
            Err(Error::AssumptionViolated(_))
        ));
        assert!(matches!(
            chaining_failure_bound(1, 1.0, 100.0, 0.5, 100, 10),
            Err(Error::OutOfRange(_))
        ));
        assert!(chaining_failure_bound(1, 1.0, 100.0, 0.3, 0, 10).is_err());
    }

    proptest! {
        #[test]
        fn total_nonincreasing_in_m(m in 1u64..20_000, step in 1u64..5_000) {
            let a = chaining_failure_bound(1, 1.0, 100.0, 1.0 / 3.0, m, 60).unwrap();
            let b = chaining_failure_bound(1, 1.0, 100.0, 1.0 / 3.0, m + step, 60).unwrap();
            prop_assert!(b.total <= a.total);
            prop_assert!(b.failure_probability() <= a.failure_probability());
        }

        #[test]
        fn total_dominates_partial_sums(m in 30u64..10_000) {
            let c = chaining_failure_bound(1, 1.0, 100.0, 1.0 / 3.0, m, 20).unwrap();
            let mut partial = c.first_term;
            prop_assert!(c.total >= partial * (1.0 - 1e-12));
            for t in &c.level_terms {
                prop_assert!(*t >= 0.0);
                partial += t;
                prop_assert!(c.total >= partial * (1.0 - 1e-12));
            }
            prop_assert!(c.remainder.is_finite());
        }
    }
}
