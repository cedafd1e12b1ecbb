//! Pairwise property checks for the differential-geometry lemmas used by
//! the embedding and recovery arguments.
//!
//! Each check evaluates `slack = bound − observed` over deterministically
//! selected sample pairs and passes when the worst slack is ≥ −1e−9.

use super::angles::principal_angle;
use super::reach::{resolve_reach, COINCIDENT_FLOOR};
use crate::error::{invalid, Error, Result};
use crate::exec::map_range;
use crate::linalg::{distance, dot, norm, normal_norm, sub};
use crate::manifold::{ManifoldSample, Topology};
use serde::Serialize;
use std::fmt;
use std::str::FromStr;

/// Numerical allowance on the worst slack.
pub const SLACK_ALLOWANCE: f64 = 1e-9;
/// Discretization allowance for the polyline curvature check.
pub const CURVATURE_ALLOWANCE: f64 = 0.05;
/// Projected points closer than this count as a collision in the
/// injectivity check.
pub const INJECTIVITY_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PropertyId {
    /// Chord-to-tangent angle ≤ asin(‖q−p‖/2τ).
    ChordAngle,
    /// Unit-speed curve acceleration ≤ 1/τ.
    Curvature,
    /// cos ∠[T_p, T_q] ≥ 1 − d_M(p,q)/τ.
    TangentAngle,
    /// d_M(p,q) ≤ τ − τ√(1 − 2‖q−p‖/τ) for ‖q−p‖ ≤ τ/2.
    GeodesicBound,
    /// Tangent projection is injective on τ/4 neighborhoods.
    LocalInjectivity,
    /// Perturbed chord directions move by at most 4r/‖a₁−a₂‖.
    ChordPerturbation,
    /// ‖P_a − P_b‖ ≤ √(2‖a−b‖/τ).
    ProjectorGap,
    /// ‖U − P_p U‖ ≤ √(2l₁/τ) + l₂/(2τ).
    ShortChordTangent,
    /// Length of M ∩ B(p, r) ≥ 2r√(1 − r²/4τ²), K = 1.
    BallVolume,
}

impl PropertyId {
    pub const ALL: [PropertyId; 9] = [
        PropertyId::ChordAngle,
        PropertyId::Curvature,
        PropertyId::TangentAngle,
        PropertyId::GeodesicBound,
        PropertyId::LocalInjectivity,
        PropertyId::ChordPerturbation,
        PropertyId::ProjectorGap,
        PropertyId::ShortChordTangent,
        PropertyId::BallVolume,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            PropertyId::ChordAngle => "A.2",
            PropertyId::Curvature => "A.4",
            PropertyId::TangentAngle => "A.5",
            PropertyId::GeodesicBound => "A.6",
            PropertyId::LocalInjectivity => "A.7",
            PropertyId::ChordPerturbation => "A.8",
            PropertyId::ProjectorGap => "A.9",
            PropertyId::ShortChordTangent => "A.10",
            PropertyId::BallVolume => "A.11",
        }
    }
}

impl fmt::Display for PropertyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PropertyId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PropertyId::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| invalid(format!("unknown property id {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyReport {
    pub property_id: String,
    pub pairs_tested: usize,
    pub worst_slack: f64,
    pub pass: bool,
    /// Sample indices of the worst case (second index repeats the first for
    /// single-point checks).
    #[serde(skip)]
    pub worst_case: Option<(usize, usize)>,
    #[serde(skip)]
    pub tau: f64,
}

/// Angle between `v` and its projection onto the frame against the bound
/// `asin(‖v‖/2τ)`, compared as sines: `min(1, ‖v‖/2τ) − sin∠`.
///
/// Both angles lie in [0, π/2], so the sine comparison is equivalent and
/// avoids amplifying rounding in `asin` near antipodal chords.
pub fn chord_angle_slack(frame_p: &[Vec<f64>], v: &[f64], tau: f64) -> f64 {
    let len = norm(v);
    let observed = normal_norm(frame_p, v) / len;
    let bound = (len / (2.0 * tau)).min(1.0);
    bound - observed
}

/// `τ − τ√(1 − 2c/τ) − d_M`, with the flat limit `c − d_M` for τ = ∞.
pub fn geodesic_bound_slack(chord: f64, geodesic: f64, tau: f64) -> f64 {
    let bound = if tau.is_infinite() {
        chord
    } else {
        // τ(1 − √(1−x)) written as τx/(1 + √(1−x)) to avoid cancellation.
        let x = 2.0 * chord / tau;
        tau * x / (1.0 + (1.0 - x).sqrt())
    };
    bound - geodesic
}

/// `cos ∠[T_p, T_q] − (1 − d_M/τ)`.
pub fn tangent_angle_slack(frame_p: &[Vec<f64>], frame_q: &[Vec<f64>], geodesic: f64, tau: f64) -> Result<f64> {
    let angle = principal_angle(frame_p, frame_q)?.angle;
    Ok(angle.cos() - (1.0 - geodesic / tau))
}

/// `√(2‖a−b‖/τ) − ‖P_a − P_b‖`.
pub fn projector_gap_slack(frame_a: &[Vec<f64>], frame_b: &[Vec<f64>], separation: f64, tau: f64) -> Result<f64> {
    let gap = principal_angle(frame_a, frame_b)?.projector_gap;
    Ok((2.0 * separation / tau).sqrt() - gap)
}

/// `4r/‖a₁−a₂‖ − ‖U(a₁,a₂) − U(b₁,b₂)‖` with `r = max(‖a₁−b₁‖, ‖a₂−b₂‖)`.
pub fn chord_perturbation_slack(a1: &[f64], a2: &[f64], b1: &[f64], b2: &[f64]) -> f64 {
    let r = distance(a1, b1).max(distance(a2, b2));
    let la = distance(a1, a2);
    let lb = distance(b1, b2);
    let observed = a1
        .iter()
        .zip(a2)
        .zip(b1.iter().zip(b2))
        .map(|((x1, x2), (y1, y2))| ((x2 - x1) / la - (y2 - y1) / lb).powi(2))
        .sum::<f64>()
        .sqrt();
    4.0 * r / la - observed
}

/// `√(2l₁/τ) + l₂/(2τ) − ‖U − P_p U‖` for `U = U(x₁, x₂)`.
pub fn short_chord_slack(p: &[f64], frame_p: &[Vec<f64>], x1: &[f64], x2: &[f64], tau: f64) -> f64 {
    let l1 = distance(x1, p);
    let chord = sub(x2, x1);
    let l2 = norm(&chord);
    let u: Vec<f64> = chord.iter().map(|c| c / l2).collect();
    let observed = normal_norm(frame_p, &u);
    (2.0 * l1 / tau).sqrt() + l2 / (2.0 * tau) - observed
}

/// Check one property with the reach resolved from the sample's model
/// (exact when known, estimated otherwise).
pub fn check_toolbox_property(sample: &ManifoldSample, property_id: &str, pair_budget: usize) -> Result<PropertyReport> {
    let id: PropertyId = property_id.parse()?;
    let tau = resolve_reach(sample)?;
    check_property(sample, id, pair_budget, tau)
}

/// Check one property against a caller-supplied reach.
pub fn check_property(sample: &ManifoldSample, id: PropertyId, pair_budget: usize, tau: f64) -> Result<PropertyReport> {
    if pair_budget == 0 {
        return Err(invalid("pair budget must be >= 1"));
    }
    if !(tau > 0.0) {
        return Err(invalid(format!("reach must be positive, got {tau}")));
    }
    let cases = match id {
        PropertyId::ChordAngle => chord_angle(sample, pair_budget, tau),
        PropertyId::Curvature => curvature(sample, pair_budget, tau)?,
        PropertyId::TangentAngle => tangent_angle(sample, pair_budget, tau)?,
        PropertyId::GeodesicBound => geodesic_bound(sample, pair_budget, tau)?,
        PropertyId::LocalInjectivity => injectivity(sample, pair_budget, tau),
        PropertyId::ChordPerturbation => chord_perturbation(sample, pair_budget),
        PropertyId::ProjectorGap => projector_gap(sample, pair_budget, tau)?,
        PropertyId::ShortChordTangent => short_chord(sample, pair_budget, tau),
        PropertyId::BallVolume => ball_volume(sample, pair_budget, tau)?,
    };
    if cases.count == 0 {
        return Err(Error::NoApplicablePairs(format!(
            "no sample pairs satisfy the preconditions of {id}"
        )));
    }
    Ok(PropertyReport {
        property_id: id.as_str().to_string(),
        pairs_tested: cases.count,
        worst_slack: cases.worst,
        pass: cases.worst >= -SLACK_ALLOWANCE,
        worst_case: cases.at,
        tau,
    })
}

#[derive(Debug, Clone, Copy)]
struct Cases {
    count: usize,
    worst: f64,
    at: Option<(usize, usize)>,
}

impl Cases {
    fn empty() -> Self {
        Cases {
            count: 0,
            worst: f64::INFINITY,
            at: None,
        }
    }

    fn add(&mut self, slack: f64, at: (usize, usize)) {
        self.count += 1;
        // NaN slack is treated as a failure.
        if slack < self.worst || slack.is_nan() && !self.worst.is_nan() {
            self.worst = slack;
            self.at = Some(at);
        }
    }

    fn merge(parts: Vec<Cases>) -> Cases {
        let mut out = Cases::empty();
        for c in parts.into_iter().filter(|c| c.count > 0) {
            if c.worst < out.worst || c.worst.is_nan() && !out.worst.is_nan() {
                out.worst = c.worst;
                out.at = c.at;
            }
            out.count += c.count;
        }
        out
    }
}

/// Evenly spaced source indices and per-source quota for a pair budget.
fn sources(n: usize, budget: usize) -> (Vec<usize>, usize) {
    let count = ((budget as f64).sqrt().ceil() as usize).clamp(1, n);
    let quota = budget.div_ceil(count);
    ((0..count).map(|s| s * n / count).collect(), quota)
}

/// Take `quota` entries evenly strided from `items`.
fn strided<T: Copy>(items: &[T], quota: usize) -> Vec<T> {
    if items.len() <= quota {
        return items.to_vec();
    }
    (0..quota).map(|k| items[k * items.len() / quota]).collect()
}

fn is_coincident(p: &[f64], q: &[f64]) -> bool {
    distance(p, q) <= COINCIDENT_FLOOR * norm(p).max(norm(q)).max(1.0)
}

/// Run `eval(i, j, chord)` over selected pairs whose chord length passes
/// `admit`.
fn scan_pairs<A, E>(sample: &ManifoldSample, budget: usize, admit: A, eval: E) -> Result<Cases>
where
    A: Fn(f64) -> bool + Sync + Send,
    E: Fn(usize, usize, f64) -> Result<f64> + Sync + Send,
{
    let n = sample.len();
    let (src, quota) = sources(n, budget);
    let parts = map_range(src.len(), |s| -> Result<Cases> {
        let i = src[s];
        let p = sample.point(i);
        let candidates: Vec<(usize, f64)> = (0..n)
            .filter(|&j| j != i && !is_coincident(p, sample.point(j)))
            .map(|j| (j, distance(p, sample.point(j))))
            .filter(|&(_, c)| admit(c))
            .collect();
        let mut cases = Cases::empty();
        for (j, c) in strided(&candidates, quota) {
            cases.add(eval(i, j, c)?, (i, j));
        }
        Ok(cases)
    });
    Ok(Cases::merge(parts.into_iter().collect::<Result<Vec<_>>>()?))
}

fn chord_angle(sample: &ManifoldSample, budget: usize, tau: f64) -> Cases {
    scan_pairs(
        sample,
        budget,
        |c| c < 2.0 * tau,
        |i, j, _| {
            let v = sub(sample.point(j), sample.point(i));
            Ok(chord_angle_slack(sample.frame(i), &v, tau))
        },
    )
    .expect("chord angle evaluation is infallible")
}

fn require_curve(sample: &ManifoldSample, id: PropertyId) -> Result<()> {
    let k = sample.model().intrinsic_dim();
    if k != 1 {
        return Err(Error::UnsupportedShape(format!(
            "{id} is checked for one-dimensional manifolds only (K = {k})"
        )));
    }
    Ok(())
}

fn curvature(sample: &ManifoldSample, budget: usize, tau: f64) -> Result<Cases> {
    require_curve(sample, PropertyId::Curvature)?;
    let order = sample.ordered_indices();
    let triples: Vec<usize> = (1..order.len() - 1).collect();
    let bound = (1.0 + CURVATURE_ALLOWANCE) / tau;
    let mut cases = Cases::empty();
    for m in strided(&triples, budget) {
        let (a, b, c) = (order[m - 1], order[m], order[m + 1]);
        let (pa, pb, pc) = (sample.point(a), sample.point(b), sample.point(c));
        let h1 = distance(pa, pb);
        let h2 = distance(pb, pc);
        if h1 == 0.0 || h2 == 0.0 {
            continue;
        }
        // Second difference of the chord-length parametrized polyline.
        let kappa = pa
            .iter()
            .zip(pb)
            .zip(pc)
            .map(|((x, y), z)| (2.0 * ((z - y) / h2 - (y - x) / h1) / (h1 + h2)).powi(2))
            .sum::<f64>()
            .sqrt();
        cases.add(bound - kappa, (b, b));
    }
    Ok(cases)
}

fn geodesic_rows(sample: &ManifoldSample, src: &[usize]) -> Result<Vec<Vec<f64>>> {
    map_range(src.len(), |s| sample.geodesic_row(src[s]))
        .into_iter()
        .collect()
}

fn geodesic_scan<A, E>(sample: &ManifoldSample, budget: usize, admit: A, eval: E) -> Result<Cases>
where
    A: Fn(f64) -> bool + Sync + Send,
    E: Fn(usize, usize, f64, f64) -> Result<f64> + Sync + Send,
{
    let n = sample.len();
    let (src, quota) = sources(n, budget);
    let rows = geodesic_rows(sample, &src)?;
    let parts = map_range(src.len(), |s| -> Result<Cases> {
        let i = src[s];
        let p = sample.point(i);
        let candidates: Vec<(usize, f64)> = (0..n)
            .filter(|&j| j != i && !is_coincident(p, sample.point(j)))
            .map(|j| (j, distance(p, sample.point(j))))
            .filter(|&(_, c)| admit(c))
            .collect();
        let mut cases = Cases::empty();
        for (j, c) in strided(&candidates, quota) {
            cases.add(eval(i, j, c, rows[s][j])?, (i, j));
        }
        Ok(cases)
    });
    Ok(Cases::merge(parts.into_iter().collect::<Result<Vec<_>>>()?))
}

fn tangent_angle(sample: &ManifoldSample, budget: usize, tau: f64) -> Result<Cases> {
    geodesic_scan(
        sample,
        budget,
        |_| true,
        |i, j, _, d| tangent_angle_slack(sample.frame(i), sample.frame(j), d, tau),
    )
}

fn geodesic_bound(sample: &ManifoldSample, budget: usize, tau: f64) -> Result<Cases> {
    geodesic_scan(
        sample,
        budget,
        |c| c <= tau / 2.0,
        |_, _, c, d| Ok(geodesic_bound_slack(c, d, tau)),
    )
}

fn projector_gap(sample: &ManifoldSample, budget: usize, tau: f64) -> Result<Cases> {
    scan_pairs(
        sample,
        budget,
        |c| c < tau / 2.0,
        |i, j, c| projector_gap_slack(sample.frame(i), sample.frame(j), c, tau),
    )
}

fn chord_perturbation(sample: &ManifoldSample, budget: usize) -> Cases {
    // Each endpoint is perturbed to its farthest graph neighbor.
    let partner = |i: usize| {
        sample
            .neighbors(i)
            .iter()
            .max_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0)))
            .map(|&(j, _)| j)
            .unwrap_or(i)
    };
    scan_pairs(
        sample,
        budget,
        |_| true,
        |i, j, _| {
            let (bi, bj) = (partner(i), partner(j));
            let (b1, b2) = (sample.point(bi), sample.point(bj));
            if is_coincident(b1, b2) {
                return Ok(f64::INFINITY);
            }
            Ok(chord_perturbation_slack(sample.point(i), sample.point(j), b1, b2))
        },
    )
    .expect("chord perturbation evaluation is infallible")
}

fn short_chord(sample: &ManifoldSample, budget: usize, tau: f64) -> Cases {
    // Triples (p, x₁, x₂) with x₁, x₂ consecutive picks within τ/4 of p,
    // so that both l₁ and l₂ stay below τ/2.
    let n = sample.len();
    let (src, quota) = sources(n, budget);
    let parts = map_range(src.len(), |s| {
        let i = src[s];
        let p = sample.point(i);
        let near: Vec<usize> = (0..n)
            .filter(|&j| distance(p, sample.point(j)) < tau / 4.0)
            .collect();
        let picks = strided(&near, quota + 1);
        let mut cases = Cases::empty();
        for w in picks.windows(2) {
            let (x1, x2) = (sample.point(w[0]), sample.point(w[1]));
            if is_coincident(x1, x2) {
                continue;
            }
            cases.add(short_chord_slack(p, sample.frame(i), x1, x2, tau), (w[0], w[1]));
        }
        cases
    });
    Cases::merge(parts)
}

fn injectivity(sample: &ManifoldSample, budget: usize, tau: f64) -> Cases {
    let n = sample.len();
    let (src, _) = sources(n, budget);
    let parts = map_range(src.len(), |s| {
        let i = src[s];
        let p = sample.point(i);
        let frame = sample.frame(i);
        let coords: Vec<(usize, Vec<f64>)> = (0..n)
            .filter(|&j| distance(p, sample.point(j)) < tau / 4.0)
            .map(|j| {
                let v = sub(sample.point(j), p);
                (j, frame.iter().map(|f| dot(f, &v)).collect())
            })
            .collect();
        let mut cases = Cases::empty();
        let mut closest = (f64::INFINITY, (i, i));
        for a in 0..coords.len() {
            for b in a + 1..coords.len() {
                if is_coincident(sample.point(coords[a].0), sample.point(coords[b].0)) {
                    continue;
                }
                let d = distance(&coords[a].1, &coords[b].1);
                cases.count += 1;
                if d < closest.0 {
                    closest = (d, (coords[a].0, coords[b].0));
                }
            }
        }
        if cases.count > 0 {
            cases.worst = closest.0 - INJECTIVITY_FLOOR;
            cases.at = Some(closest.1);
        }
        cases
    });
    Cases::merge(parts)
}

fn ball_volume(sample: &ManifoldSample, budget: usize, tau: f64) -> Result<Cases> {
    require_curve(sample, PropertyId::BallVolume)?;
    let order = sample.ordered_indices();
    let n = order.len();
    let closed = sample.model().domain().topology() == Topology::Circle;
    let r_max = if tau.is_finite() {
        tau / 4.0
    } else {
        distance(sample.point(order[0]), sample.point(order[n - 1])) / 4.0
    };
    const RADII: usize = 4;
    let centers = strided(&(0..n).collect::<Vec<_>>(), budget.div_ceil(RADII).max(1));
    let parts = map_range(centers.len(), |s| {
        let pos = centers[s];
        let p = sample.point(order[pos]);
        let mut cases = Cases::empty();
        for k in 1..=RADII {
            let r = r_max * k as f64 / RADII as f64;
            let walk = |step: isize| -> Option<f64> {
                let mut length = 0.0;
                let mut cur = pos;
                for _ in 0..n {
                    let next = cur as isize + step;
                    let next = if closed {
                        next.rem_euclid(n as isize) as usize
                    } else if next < 0 || next >= n as isize {
                        return None;
                    } else {
                        next as usize
                    };
                    let a = sample.point(order[cur]);
                    let b = sample.point(order[next]);
                    let seg = distance(a, b);
                    if distance(b, p) < r {
                        length += seg;
                        cur = next;
                        continue;
                    }
                    // Boundary crossing: solve ‖a + t(b−a) − p‖ = r for t.
                    let d = sub(b, a);
                    let w = sub(a, p);
                    let qa = dot(&d, &d);
                    let qb = 2.0 * dot(&d, &w);
                    let qc = dot(&w, &w) - r * r;
                    let t = (-qb + (qb * qb - 4.0 * qa * qc).max(0.0).sqrt()) / (2.0 * qa);
                    return Some(length + t.clamp(0.0, 1.0) * seg);
                }
                None
            };
            let (Some(fwd), Some(bwd)) = (walk(1), walk(-1)) else {
                continue;
            };
            let bound = if tau.is_finite() {
                (1.0 - r * r / (4.0 * tau * tau)).sqrt() * 2.0 * r
            } else {
                2.0 * r
            };
            cases.add(fwd + bwd - bound, (order[pos], order[pos]));
        }
        cases
    });
    Ok(Cases::merge(parts))
}
