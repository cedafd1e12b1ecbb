//! Secant (chord) directions split into long and short chords.

use super::reach::COINCIDENT_FLOOR;
use super::nets::THRESHOLD_CONSTANT;
use crate::error::{invalid, Result};
use crate::linalg::{norm, normalized, project, sub};
use crate::manifold::ManifoldSample;
use crate::rng::CounterStream;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecantPair {
    pub a: usize,
    pub b: usize,
    pub length: f64,
    pub long: bool,
}

/// Unordered sample pairs with their chord class. Directions are
/// materialized on demand so large samples stay cheap.
#[derive(Debug, Clone)]
pub struct SecantSample {
    pub delta1: f64,
    pub tau: f64,
    /// Chords strictly longer than this are long: `1.6 √(δ₁/τ) · τ`.
    pub threshold: f64,
    pub pairs: Vec<SecantPair>,
}

impl SecantSample {
    pub fn long(&self) -> impl Iterator<Item = &SecantPair> {
        self.pairs.iter().filter(|p| p.long)
    }

    pub fn short(&self) -> impl Iterator<Item = &SecantPair> {
        self.pairs.iter().filter(|p| !p.long)
    }

    pub fn long_count(&self) -> usize {
        self.long().count()
    }

    pub fn short_count(&self) -> usize {
        self.short().count()
    }
}

/// Unit chord direction `U(x_a, x_b)`.
pub fn chord_direction(sample: &ManifoldSample, pair: &SecantPair) -> Vec<f64> {
    let v = sub(sample.point(pair.b), sample.point(pair.a));
    v.iter().map(|x| x / pair.length).collect()
}

/// Tangent surrogate `P_a U / ‖P_a U‖` of a short chord, or `None` when
/// the chord is normal to the tangent space at `x_a`.
pub fn tangent_surrogate(sample: &ManifoldSample, pair: &SecantPair) -> Option<Vec<f64>> {
    let u = chord_direction(sample, pair);
    normalized(&project(sample.frame(pair.a), &u))
}

fn threshold(delta1: f64, tau: f64) -> Result<f64> {
    if !(tau > 0.0) {
        return Err(invalid(format!("reach must be positive, got {tau}")));
    }
    if !(delta1 > 0.0) {
        return Err(invalid(format!("net resolution must be positive, got {delta1}")));
    }
    Ok(THRESHOLD_CONSTANT * (delta1 / tau).sqrt() * tau)
}

fn make_pair(sample: &ManifoldSample, a: usize, b: usize, threshold: f64) -> Option<SecantPair> {
    let (pa, pb) = (sample.point(a), sample.point(b));
    let length = norm(&sub(pb, pa));
    let scale = norm(pa).max(norm(pb)).max(1.0);
    (length > COINCIDENT_FLOOR * scale).then_some(SecantPair {
        a,
        b,
        length,
        long: length > threshold,
    })
}

/// All unordered pairs `a < b` of the sample.
pub fn sample_secants(sample: &ManifoldSample, delta1: f64, tau: f64) -> Result<SecantSample> {
    let t = threshold(delta1, tau)?;
    let n = sample.len();
    let pairs = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .filter_map(|(a, b)| make_pair(sample, a, b, t))
        .collect();
    Ok(SecantSample {
        delta1,
        tau,
        threshold: t,
        pairs,
    })
}

/// At most `budget` pairs drawn uniformly (with replacement over distinct
/// index pairs) from a seeded stream; all pairs when the budget covers them.
pub fn sample_secants_budget(
    sample: &ManifoldSample,
    delta1: f64,
    tau: f64,
    budget: usize,
    seed: u64,
) -> Result<SecantSample> {
    let n = sample.len();
    if budget >= n * (n - 1) / 2 {
        return sample_secants(sample, delta1, tau);
    }
    let t = threshold(delta1, tau)?;
    let mut rng = CounterStream::new(seed, 0x5ec);
    let mut pairs = Vec::with_capacity(budget);
    let mut attempts = 0usize;
    while pairs.len() < budget && attempts < 100 * budget.max(1) {
        attempts += 1;
        let a = rng.below(n);
        let b = rng.below(n);
        if a == b {
            continue;
        }
        if let Some(p) = make_pair(sample, a.min(b), a.max(b), t) {
            pairs.push(p);
        }
    }
    Ok(SecantSample {
        delta1,
        tau,
        threshold: t,
        pairs,
    })
}
