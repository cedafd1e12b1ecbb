//! Reach estimation from a sampled manifold with tangent frames.

use crate::error::{Error, Result};
use crate::exec::map_range;
use crate::linalg::{norm, normal_norm, sub};
use crate::manifold::{KnownReach, ManifoldSample};

/// Minimum number of sample points accepted by [`estimate_reach`].
pub const MIN_REACH_SAMPLE: usize = 10;

/// Pairs closer than this fraction of the point scale count as coincident.
pub(crate) const COINCIDENT_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct ReachEstimate {
    /// Estimated reach τ̂; `f64::INFINITY` when every pair is flat.
    pub tau: f64,
    /// Ordered pair (p, q) attaining the minimum quotient.
    pub pair: Option<(usize, usize)>,
    /// Number of pairs that contributed a finite quotient.
    pub quotients: usize,
}

impl ReachEstimate {
    pub fn is_flat(&self) -> bool {
        self.tau.is_infinite()
    }
}

/// Federer quotient `‖q−p‖² / (2‖(q−p) − P_p(q−p)‖)` for one ordered pair,
/// or `None` when the pair is coincident or its normal part is negligible.
pub fn federer_quotient(p: &[f64], frame_p: &[Vec<f64>], q: &[f64]) -> Option<f64> {
    let v = sub(q, p);
    let len = norm(&v);
    let scale = norm(p).max(norm(q)).max(1.0);
    if len <= COINCIDENT_FLOOR * scale {
        return None;
    }
    let normal = normal_norm(frame_p, &v);
    if normal < 1e-12 * len {
        return None;
    }
    Some(len * len / (2.0 * normal))
}

/// Estimate the reach as the minimum Federer quotient over ordered pairs.
pub fn estimate_reach(sample: &ManifoldSample) -> Result<ReachEstimate> {
    let n = sample.len();
    if n < MIN_REACH_SAMPLE {
        return Err(Error::InsufficientSample {
            required: MIN_REACH_SAMPLE,
            actual: n,
        });
    }
    let rows = map_range(n, |i| {
        let p = sample.point(i);
        let frame = sample.frame(i);
        let mut best = (f64::INFINITY, usize::MAX);
        let mut count = 0usize;
        for j in 0..n {
            if j == i {
                continue;
            }
            if let Some(t) = federer_quotient(p, frame, sample.point(j)) {
                count += 1;
                if t < best.0 {
                    best = (t, j);
                }
            }
        }
        (best, count)
    });
    let mut tau = f64::INFINITY;
    let mut pair = None;
    let mut quotients = 0;
    for (i, ((t, j), c)) in rows.into_iter().enumerate() {
        quotients += c;
        if t < tau {
            tau = t;
            pair = Some((i, j));
        }
    }
    Ok(ReachEstimate {
        tau,
        pair,
        quotients,
    })
}

/// Reach used by downstream checks: the model's exact value when known,
/// otherwise the sample estimate.
pub fn resolve_reach(sample: &ManifoldSample) -> Result<f64> {
    match sample.model().reach() {
        KnownReach::Exact(t) => Ok(t),
        KnownReach::UpperBound(_) | KnownReach::Unknown => Ok(estimate_reach(sample)?.tau),
    }
}
