//! Dirichlet kernel and unit-ball volumes.

use crate::error::{invalid, Result};
use crate::exec::map_range;
use std::f64::consts::{E, PI};

/// `D_N(z) = sin(πNz) / sin(πz)` for odd `N ≥ 3`, with `D_N(0) = N`.
pub fn dirichlet_kernel(n: usize, z: f64) -> Result<f64> {
    if n < 3 || n.is_multiple_of(2) {
        return Err(invalid(format!("Dirichlet kernel needs odd N >= 3, got {n}")));
    }
    if !(-0.5..=0.5).contains(&z) {
        return Err(invalid(format!("z = {z} outside [-1/2, 1/2]")));
    }
    Ok(kernel(n as f64, z))
}

fn kernel(n: f64, z: f64) -> f64 {
    let den = (PI * z).sin();
    if den == 0.0 {
        n
    } else {
        (PI * n * z).sin() / den
    }
}

/// Largest `|D_N(z)|` over `2/N < |z| ≤ 1/2`, scanned on `points` evenly
/// spaced abscissae (the kernel is even, so only `z > 0` is visited).
pub fn side_lobe_peak(n: usize, points: usize) -> Result<f64> {
    dirichlet_kernel(n, 0.0)?;
    if points < 2 {
        return Err(invalid("side-lobe scan needs at least 2 points"));
    }
    let nf = n as f64;
    let lo = 2.0 / nf;
    if lo >= 0.5 {
        return Err(invalid(format!("no side-lobe region for N = {n}")));
    }
    let step = (0.5 - lo) / (points - 1) as f64;
    let chunk = 4096;
    let chunks = points.div_ceil(chunk);
    let peaks = map_range(chunks, |c| {
        let end = ((c + 1) * chunk).min(points);
        (c * chunk..end)
            .map(|i| {
                // First abscissa is nudged off the excluded endpoint.
                let z = if i == 0 { lo + step * 1e-6 } else { lo + step * i as f64 };
                kernel(nf, z.min(0.5)).abs()
            })
            .fold(0.0f64, f64::max)
    });
    Ok(peaks.into_iter().fold(0.0, f64::max))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallVolume {
    pub dim: usize,
    /// Volume of the unit ball in ℝᴷ.
    pub value: f64,
    /// `(4π/(K+2))^{K/2}`
    pub lower: f64,
    /// `(2eπ/(K+2))^{K/2}`
    pub upper: f64,
}

impl BallVolume {
    pub fn lower_holds(&self) -> bool {
        self.lower <= self.value
    }

    pub fn upper_holds(&self) -> bool {
        self.value <= self.upper
    }
}

/// Volume `π^{K/2} / Γ(K/2 + 1)` of the K-dimensional unit ball, with the
/// closed-form brackets reported alongside.
///
/// The lower bracket fails at K = 1 (2.0467 > 2); callers get the flag
/// rather than an error.
pub fn unit_ball_volume(k: usize) -> Result<BallVolume> {
    if k == 0 {
        return Err(invalid("ball dimension must be >= 1"));
    }
    // V_K = V_{K-2} · 2π/K with V_0 = 1, V_1 = 2.
    let mut v = if k.is_multiple_of(2) { 1.0 } else { 2.0 };
    let mut d = if k.is_multiple_of(2) { 2 } else { 3 };
    while d <= k {
        v *= 2.0 * PI / d as f64;
        d += 2;
    }
    let kf = k as f64;
    Ok(BallVolume {
        dim: k,
        value: v,
        lower: (4.0 * PI / (kf + 2.0)).powf(kf / 2.0),
        upper: (2.0 * E * PI / (kf + 2.0)).powf(kf / 2.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use statrs::function::gamma::gamma;

    #[test]
    fn kernel_special_values() {
        assert_eq!(dirichlet_kernel(7, 0.0).unwrap(), 7.0);
        assert!((dirichlet_kernel(7, 0.5).unwrap() + 1.0).abs() < 1e-14);
        assert!(dirichlet_kernel(8, 0.1).is_err());
        assert!(dirichlet_kernel(1, 0.1).is_err());
        assert!(dirichlet_kernel(7, 0.6).is_err());
    }

    #[test]
    fn side_lobe_below_quarter() {
        let peak = side_lobe_peak(31, 100_000).unwrap();
        assert!(peak <= 0.24 * 31.0, "{peak}");
        // The first side lobe (near 1.43/N) is excluded; the next one peaks
        // near 2.46/N at roughly N/(2.46π).
        assert!(peak >= 0.12 * 31.0);
    }

    #[test]
    fn ball_volumes() {
        assert_eq!(unit_ball_volume(1).unwrap().value, 2.0);
        assert!((unit_ball_volume(2).unwrap().value - PI).abs() < 1e-15);
        let v3 = unit_ball_volume(3).unwrap();
        assert!((v3.value - 4.188_790_204_786_39).abs() < 1e-13);
        let v5 = unit_ball_volume(5).unwrap();
        assert!((v5.value - 8.0 * PI * PI / 15.0).abs() < 1e-13);
        assert!((v5.value - 5.263_789_013_914_325).abs() < 1e-13);
        assert!(v5.lower_holds() && v5.upper_holds());
        assert!((v5.lower - 4.317_97).abs() < 1e-5);
        assert!((v5.upper - 9.299_10).abs() < 1e-5);
        assert!(unit_ball_volume(0).is_err());
    }

    #[test]
    fn lower_bracket_fails_in_one_dimension() {
        let v1 = unit_ball_volume(1).unwrap();
        assert!(!v1.lower_holds());
        assert!(v1.upper_holds());
        for k in 2..=40 {
            let v = unit_ball_volume(k).unwrap();
            assert!(v.lower_holds() && v.upper_holds(), "K = {k}");
        }
    }

    #[test]
    fn recursion_matches_gamma_formula() {
        for k in 1..=30 {
            let kf = k as f64;
            let closed = PI.powf(kf / 2.0) / gamma(kf / 2.0 + 1.0);
            let v = unit_ball_volume(k).unwrap().value;
            assert!((v - closed).abs() <= 1e-12 * closed, "K = {k}");
        }
    }

    proptest! {
        #[test]
        fn kernel_even_and_bounded(half in 1usize..60, z in 0.0f64..0.5) {
            let n = 2 * half + 1;
            let a = dirichlet_kernel(n, z).unwrap();
            let b = dirichlet_kernel(n, -z).unwrap();
            prop_assert_eq!(a, b);
            prop_assert!(a.abs() <= n as f64 * (1.0 + 1e-12));
        }
    }
}
