//! Greedy δ-nets on samples and the multiscale net hierarchy for secant
//! directions.

use super::dirichlet::unit_ball_volume;
use super::reach::resolve_reach;
use crate::csvout::write_row;
use crate::error::{invalid, Error, Result};
use crate::exec::map_range;
use crate::linalg::{distance, dot, norm};
use crate::manifold::{ManifoldSample, Topology};
use std::io::Write;

/// Net-resolution constant relating δ₁ to δ: δ₁ = c_η² τ δ².
pub const C_ETA: f64 = 0.4;
/// Tangent-ball resolution constant: δ_T = c_η c_η' δ.
pub const C_ETA_PRIME: f64 = 1.7 - std::f64::consts::SQRT_2;
/// Long/short chord split constant.
pub const THRESHOLD_CONSTANT: f64 = 1.6;

/// Greedy farthest-point net on a sample.
#[derive(Debug, Clone)]
pub struct GreedyNet {
    pub delta: f64,
    /// Sample indices of the centers, in selection order.
    pub centers: Vec<usize>,
    /// Position in `centers` of the nearest center, per sample point.
    pub assignment: Vec<usize>,
    /// Largest distance from a sample point to its nearest center.
    pub covering_radius: f64,
    /// Covering-number bound, when δ ≤ τ/2 and (τ, V) are known.
    pub bound: Option<f64>,
}

impl GreedyNet {
    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn within_bound(&self) -> Option<bool> {
        self.bound.map(|b| self.len() as f64 <= b)
    }
}

/// `(2 / (θ(δ/4τ) δ))^K · V / V_{B_K}` with `θ(α) = √(1−α²)`; `None`
/// unless `δ ≤ τ/2`.
pub fn covering_number_bound(delta: f64, tau: f64, volume: f64, k: usize) -> Option<f64> {
    if !(delta > 0.0) || !(delta <= tau / 2.0) {
        return None;
    }
    let alpha = delta / (4.0 * tau);
    let theta = (1.0 - alpha * alpha).sqrt();
    let ball = unit_ball_volume(k).ok()?.value;
    Some((2.0 / (theta * delta)).powi(k as i32) * volume / ball)
}

/// Model volume when known; for K = 1 samples, the polyline length.
pub fn resolve_volume(sample: &ManifoldSample) -> Option<f64> {
    if let Some(v) = sample.model().volume() {
        return Some(v);
    }
    if sample.model().intrinsic_dim() != 1 {
        return None;
    }
    let order = sample.ordered_indices();
    let mut len: f64 = order
        .windows(2)
        .map(|w| distance(sample.point(w[0]), sample.point(w[1])))
        .sum();
    if sample.model().domain().topology() == Topology::Circle {
        len += distance(
            sample.point(order[0]),
            sample.point(order[order.len() - 1]),
        );
    }
    Some(len)
}

/// Farthest-point greedy net starting from sample index 0.
pub fn greedy_net(sample: &ManifoldSample, delta: f64) -> Result<GreedyNet> {
    if !(delta > 0.0) {
        return Err(invalid(format!("net resolution must be positive, got {delta}")));
    }
    let n = sample.len();
    let pts = sample.points();
    let mut centers = vec![0usize];
    let mut dist = map_range(n, |i| distance(&pts[i], &pts[0]));
    let mut assignment = vec![0usize; n];
    loop {
        let (far, &radius) = dist
            .iter()
            .enumerate()
            .fold((0, &f64::NEG_INFINITY), |acc, (i, d)| {
                if *d > *acc.1 {
                    (i, d)
                } else {
                    acc
                }
            });
        if radius <= delta {
            break;
        }
        let slot = centers.len();
        centers.push(far);
        let fresh = map_range(n, |i| distance(&pts[i], &pts[far]));
        for i in 0..n {
            if fresh[i] < dist[i] {
                dist[i] = fresh[i];
                assignment[i] = slot;
            }
        }
    }
    let covering_radius = dist.iter().cloned().fold(0.0, f64::max);
    let bound = match (resolve_reach(sample), sample.model().volume()) {
        (Ok(tau), Some(v)) => covering_number_bound(delta, tau, v, sample.model().intrinsic_dim()),
        _ => None,
    };
    Ok(GreedyNet {
        delta,
        centers,
        assignment,
        covering_radius,
        bound,
    })
}

/// `ln Ñ_j(δ) = ln 2 + 2jK ln 4 + 2K ln(6.12√K/δ²) + 2 ln(V/τ^K)`.
pub fn ln_direction_net_bound(j: usize, k: usize, delta: f64, v_over_tau_k: f64) -> f64 {
    let kf = k as f64;
    std::f64::consts::LN_2
        + 2.0 * j as f64 * kf * 4f64.ln()
        + 2.0 * kf * (6.12 * kf.sqrt() / (delta * delta)).ln()
        + 2.0 * v_over_tau_k.ln()
}

/// Volume condition `V/τ^K ≥ (21/(2√K))^K` under which the direction-net
/// cardinality bound holds.
pub fn volume_assumption_holds(k: usize, volume: f64, tau: f64) -> bool {
    let kf = k as f64;
    volume / tau.powi(k as i32) >= (21.0 / (2.0 * kf.sqrt())).powi(k as i32)
}

/// Grid net for the unit ball in ℝᴷ: lattice `hℤᴷ` with `h = 2r/√K`,
/// restricted to points of norm ≤ 1 + r.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallGrid {
    pub k: usize,
    pub resolution: f64,
    pub spacing: f64,
}

impl BallGrid {
    pub fn new(k: usize, resolution: f64) -> Self {
        Self {
            k,
            resolution,
            spacing: 2.0 * resolution / (k as f64).sqrt(),
        }
    }

    /// Nearest grid point to `a` (any `a` in the unit ball maps inside the net).
    pub fn nearest(&self, a: &[f64]) -> Vec<f64> {
        a.iter()
            .map(|x| (x / self.spacing).round() * self.spacing)
            .collect()
    }

    /// Number of retained lattice points.
    pub fn count(&self) -> u64 {
        let limit = 1.0 + self.resolution;
        let m = (limit / self.spacing).floor() as i64;
        fn rec(dim: usize, budget: f64, m: i64, h: f64) -> u64 {
            if dim == 0 {
                return 1;
            }
            (-m..=m)
                .filter_map(|i| {
                    let r = budget - (i as f64 * h).powi(2);
                    (r >= -1e-12).then(|| rec(dim - 1, r, m, h))
                })
                .sum()
        }
        rec(self.k, limit * limit, m, self.spacing)
    }
}

#[derive(Debug, Clone)]
pub struct NetLevel {
    pub level: usize,
    pub net: GreedyNet,
    pub tangent_grid: BallGrid,
    /// |T_j| = |C_j|(|C_j| − 1) chord directions + |C_j|·|grid| tangent vectors.
    pub direction_count: f64,
    /// ln Ñ_j(δ), when V is known.
    pub ln_bound: Option<f64>,
    /// 4^{jK} Ñ₀(δ₁) center-count bound, when δ₁ ≤ τ/2 and V is known.
    pub center_bound: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct NetHierarchy {
    pub delta: f64,
    pub delta1: f64,
    pub delta_t: f64,
    pub tau: f64,
    pub volume: Option<f64>,
    pub k: usize,
    pub levels: Vec<NetLevel>,
    /// Whether the volume condition holds (None when V is unknown).
    pub assumption_holds: Option<bool>,
}

impl NetHierarchy {
    pub fn certificate_available(&self) -> bool {
        self.assumption_holds == Some(true)
    }

    /// Error unless the cardinality certificate applies.
    pub fn require_certificate(&self) -> Result<()> {
        match (self.assumption_holds, self.volume) {
            (Some(true), _) => Ok(()),
            (_, Some(v)) => Err(Error::AssumptionViolated(format!(
                "V/tau^K = {} is below (21/(2 sqrt K))^K = {}",
                v / self.tau.powi(self.k as i32),
                (21.0 / (2.0 * (self.k as f64).sqrt())).powi(self.k as i32)
            ))),
            _ => Err(Error::AssumptionViolated(
                "manifold volume is unknown".into(),
            )),
        }
    }

    /// Distance from `U(x_a, x_b)` to the nearest candidate element of T_j:
    /// the chord direction between the nearest centers and the tangent-ball
    /// net vectors at those centers.
    pub fn cover_distance(&self, sample: &ManifoldSample, a: usize, b: usize, level: usize) -> f64 {
        let lv = &self.levels[level];
        let xa = sample.point(a);
        let xb = sample.point(b);
        let chord: Vec<f64> = xb.iter().zip(xa).map(|(q, p)| q - p).collect();
        let len = norm(&chord);
        let u: Vec<f64> = chord.iter().map(|c| c / len).collect();
        let ca = lv.net.centers[lv.net.assignment[a]];
        let cb = lv.net.centers[lv.net.assignment[b]];
        let mut best = f64::INFINITY;
        if ca != cb {
            let pa = sample.point(ca);
            let pb = sample.point(cb);
            let cd = distance(pa, pb);
            let d = u
                .iter()
                .zip(pa.iter().zip(pb))
                .map(|(ui, (p, q))| (ui - (q - p) / cd).powi(2))
                .sum::<f64>()
                .sqrt();
            best = best.min(d);
        }
        for c in [ca, cb] {
            let frame = sample.frame(c);
            let coeff: Vec<f64> = frame.iter().map(|f| dot(f, &u)).collect();
            let g = lv.tangent_grid.nearest(&coeff);
            let in_plane: f64 = coeff.iter().map(|x| x * x).sum();
            let off: f64 = coeff.iter().zip(&g).map(|(x, y)| (x - y).powi(2)).sum();
            best = best.min(((1.0 - in_plane).max(0.0) + off).sqrt());
        }
        best
    }

    /// CSV of center indices: `level,center_index`.
    pub fn write_centers_csv<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        write_row(w, &["level", "center_index"])?;
        for lv in &self.levels {
            for c in &lv.net.centers {
                write_row(w, &[lv.level.to_string(), c.to_string()])?;
            }
        }
        Ok(())
    }
}

/// Build levels `j = 0..=levels` of the net hierarchy for base resolution δ.
pub fn build_net_hierarchy(sample: &ManifoldSample, delta: f64, levels: usize) -> Result<NetHierarchy> {
    if !(delta > 0.0 && delta <= 0.5) {
        return Err(invalid(format!("base resolution must lie in (0, 1/2], got {delta}")));
    }
    let tau = resolve_reach(sample)?;
    if !tau.is_finite() {
        return Err(invalid("net hierarchy needs a finite reach"));
    }
    let k = sample.model().intrinsic_dim();
    let volume = sample.model().volume();
    let delta1 = C_ETA * C_ETA * tau * delta * delta;
    let delta_t = C_ETA * C_ETA_PRIME * delta;
    let v_ratio = volume.map(|v| v / tau.powi(k as i32));
    let base_bound = volume.and_then(|v| covering_number_bound(delta1, tau, v, k));
    let mut out = Vec::with_capacity(levels + 1);
    for j in 0..=levels {
        let scale = 4f64.powi(j as i32);
        let mut net = greedy_net(sample, delta1 / scale)?;
        net.bound = volume.and_then(|v| covering_number_bound(delta1 / scale, tau, v, k));
        let grid = BallGrid::new(k, delta_t / 2f64.powi(j as i32));
        let c = net.len() as f64;
        out.push(NetLevel {
            level: j,
            tangent_grid: grid,
            direction_count: c * (c - 1.0) + c * grid.count() as f64,
            ln_bound: v_ratio.map(|r| ln_direction_net_bound(j, k, delta, r)),
            center_bound: base_bound.map(|b| scale.powi(k as i32) * b),
            net,
        });
    }
    Ok(NetHierarchy {
        delta,
        delta1,
        delta_t,
        tau,
        volume,
        k,
        levels: out,
        assumption_holds: volume.map(|v| volume_assumption_holds(k, v, tau)),
    })
}
