//! Monte Carlo check of the Gaussian norm-concentration tail bounds.

use crate::error::{invalid, Error, Result};
use crate::exec::map_range;
use crate::rng::Philox4x32;
use serde::Serialize;

pub const MIN_TAIL_TRIALS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailComparison {
    pub threshold: f64,
    pub frequency: f64,
    pub bound: f64,
    /// Binomial standard error `√(p₀(1−p₀)/trials)` with `p₀ = min(bound, 1)`.
    pub standard_error: f64,
    pub pass: bool,
}

impl TailComparison {
    fn new(threshold: f64, exceed: usize, trials: usize, bound: f64) -> Self {
        let frequency = exceed as f64 / trials as f64;
        let p0 = bound.min(1.0);
        let standard_error = (p0 * (1.0 - p0) / trials as f64).sqrt();
        Self {
            threshold,
            frequency,
            bound,
            standard_error,
            pass: frequency <= bound + 3.0 * standard_error,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailReport {
    pub m: usize,
    pub trials: usize,
    pub seed: u64,
    /// `P(|‖Φy‖ − 1| > λ) ≤ 2e^{−Mλ²/6}`
    pub two_sided: TailComparison,
    /// `P(‖Φy‖ > 1 + λ′) ≤ e^{−Mλ′/7}`
    pub upper: TailComparison,
}

impl TailReport {
    pub fn pass(&self) -> bool {
        self.two_sided.pass && self.upper.pass
    }
}

/// Draw `trials` independent operators and record how often `‖Φe₁‖`
/// deviates from 1 beyond the given thresholds.
///
/// Only the first column of each operator is generated; with counter
/// addressing it equals the first column of the full draw for that trial.
pub fn empirical_tail_check(m: usize, lambda: f64, lambda_prime: f64, trials: usize, seed: u64) -> Result<TailReport> {
    if m == 0 {
        return Err(invalid("M must be >= 1"));
    }
    if !(lambda > 0.0 && lambda <= 1.0 / 3.0) {
        return Err(Error::OutOfRange(format!("lambda must lie in (0, 1/3], got {lambda}")));
    }
    if !(lambda_prime >= 0.2 && lambda_prime.is_finite()) {
        return Err(Error::OutOfRange(format!("lambda' must be >= 1/5, got {lambda_prime}")));
    }
    if trials < MIN_TAIL_TRIALS {
        return Err(invalid(format!("need at least {MIN_TAIL_TRIALS} trials, got {trials}")));
    }
    let philox = Philox4x32::new(seed);
    let scale = 1.0 / (m as f64).sqrt();
    let norms = map_range(trials, |t| {
        (0..m)
            .map(|i| philox.gaussian_at(t as u64, i as u32, 0).powi(2))
            .sum::<f64>()
            .sqrt()
            * scale
    });
    let two_sided = norms.iter().filter(|&&r| (r - 1.0).abs() > lambda).count();
    let upper = norms.iter().filter(|&&r| r > 1.0 + lambda_prime).count();
    let mf = m as f64;
    Ok(TailReport {
        m,
        trials,
        seed,
        two_sided: TailComparison::new(lambda, two_sided, trials, 2.0 * (-mf * lambda * lambda / 6.0).exp()),
        upper: TailComparison::new(lambda_prime, upper, trials, (-mf * lambda_prime / 7.0).exp()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurement::MeasurementOperator;

    #[test]
    fn vacuous_bound_always_passes() {
        let r = empirical_tail_check(24, 1.0 / 3.0, 0.2, 1000, 1).unwrap();
        assert!((r.two_sided.bound - 1.282_360_776_859_909_2).abs() < 1e-12);
        assert_eq!(r.two_sided.standard_error, 0.0);
        assert!(r.two_sided.pass);
    }

    #[test]
    fn bound_values() {
        let r = empirical_tail_check(600, 0.3, 0.5, 1000, 2).unwrap();
        assert!((r.two_sided.bound - 2.468_196_081_733_591e-4).abs() < 1e-16);
        let r = empirical_tail_check(100, 0.3, 0.5, 1000, 2).unwrap();
        assert!((r.upper.bound - 7.904_903_231_199_665e-4).abs() < 1e-16);
    }

    #[test]
    fn ranges_enforced() {
        assert!(matches!(empirical_tail_check(10, 0.0, 0.5, 1000, 1), Err(Error::OutOfRange(_))));
        assert!(matches!(empirical_tail_check(10, 0.34, 0.5, 1000, 1), Err(Error::OutOfRange(_))));
        assert!(matches!(empirical_tail_check(10, 0.3, 0.19, 1000, 1), Err(Error::OutOfRange(_))));
        assert!(empirical_tail_check(10, 0.3, 0.5, 999, 1).is_err());
    }

    #[test]
    fn column_matches_full_draw() {
        let philox = Philox4x32::new(77);
        let op = MeasurementOperator::draw_trial(5, 4, 77, 3).unwrap();
        for i in 0..5 {
            let v = philox.gaussian_at(3, i as u32, 0) * (1.0 / 5f64.sqrt());
            assert_eq!(v, op.entry(i, 0));
        }
    }

    #[test]
    fn moderate_deviation_frequency() {
        // M = 50, λ = 0.2: bound 2e^{-1/3} ≈ 1.43 is vacuous, but the
        // frequency itself should be near P(|χ_50/√50 − 1| > 0.2) ≈ 0.046.
        let r = empirical_tail_check(50, 0.2, 0.5, 20_000, 3).unwrap();
        assert!((0.03..0.065).contains(&r.two_sided.frequency), "{}", r.two_sided.frequency);
    }
}
