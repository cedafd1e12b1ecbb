//! Empirical isometry constant of an operator on secant directions.

use super::operator::MeasurementOperator;
use crate::error::{invalid, Result};
use crate::exec::map_range;
use crate::geometry::SecantSample;
use crate::linalg::{dot, norm};
use crate::manifold::ManifoldSample;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistortionPart {
    /// Largest |‖Φu‖ − 1|, or 0 when `count` is 0.
    pub epsilon_hat: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistortionReport {
    /// max |‖Φu‖ − 1| over every tested direction.
    pub epsilon_hat: f64,
    pub count: usize,
    /// Pair (a, b) attaining the maximum.
    pub argmax: Option<(usize, usize)>,
    /// Whether the maximum came from a tangent surrogate.
    pub argmax_is_surrogate: bool,
    /// True chord directions (long and short).
    pub chords: DistortionPart,
    /// Tangent surrogates of short chords.
    pub surrogates: DistortionPart,
}

#[derive(Clone, Copy)]
struct Worst {
    value: f64,
    count: usize,
    at: Option<(usize, usize)>,
}

impl Worst {
    const EMPTY: Worst = Worst {
        value: 0.0,
        count: 0,
        at: None,
    };

    fn add(&mut self, value: f64, at: (usize, usize)) {
        self.count += 1;
        if self.at.is_none() || value > self.value {
            self.value = value;
            self.at = Some(at);
        }
    }

    fn merge(&mut self, other: Worst) {
        if let Some(at) = other.at {
            if self.at.is_none() || other.value > self.value {
                self.value = other.value;
                self.at = Some(at);
            }
        }
        self.count += other.count;
    }
}

/// ε̂ over the chord directions of `secants` and the tangent surrogates of
/// its short chords.
///
/// Images are computed once per sample point, so a pair costs O(M) for the
/// chord and O(KN + KM) for the surrogate.
pub fn embedding_distortion(
    op: &MeasurementOperator,
    sample: &ManifoldSample,
    secants: &SecantSample,
) -> Result<DistortionReport> {
    if secants.pairs.is_empty() {
        return Err(invalid("secant set is empty"));
    }
    if op.cols() != sample.model().ambient_dim() {
        return Err(invalid(format!(
            "operator has {} columns but the ambient dimension is {}",
            op.cols(),
            sample.model().ambient_dim()
        )));
    }
    let n = sample.len();
    let images = map_range(n, |i| op.apply_unchecked(sample.point(i)));
    let need_frames = secants.pairs.iter().any(|p| !p.long);
    let frame_images: Vec<Vec<Vec<f64>>> = if need_frames {
        map_range(n, |i| {
            sample
                .frame(i)
                .iter()
                .map(|f| op.apply_unchecked(f))
                .collect()
        })
    } else {
        Vec::new()
    };

    let chunk = 1024;
    let chunks = secants.pairs.len().div_ceil(chunk);
    let parts = map_range(chunks, |c| {
        let mut chords = Worst::EMPTY;
        let mut surrogates = Worst::EMPTY;
        let end = ((c + 1) * chunk).min(secants.pairs.len());
        for pair in &secants.pairs[c * chunk..end] {
            let (ya, yb) = (&images[pair.a], &images[pair.b]);
            let img = ya
                .iter()
                .zip(yb)
                .map(|(p, q)| (q - p).powi(2))
                .sum::<f64>()
                .sqrt()
                / pair.length;
            chords.add((img - 1.0).abs(), (pair.a, pair.b));
            if !pair.long {
                let (xa, xb) = (sample.point(pair.a), sample.point(pair.b));
                let frame = sample.frame(pair.a);
                let coeff: Vec<f64> = frame
                    .iter()
                    .map(|f| {
                        f.iter()
                            .zip(xa.iter().zip(xb))
                            .map(|(fi, (p, q))| fi * (q - p))
                            .sum::<f64>()
                    })
                    .collect();
                let cn = norm(&coeff);
                if cn == 0.0 {
                    continue;
                }
                let mut y = vec![0.0; op.rows()];
                for (ci, fimg) in coeff.iter().zip(&frame_images[pair.a]) {
                    crate::linalg::axpy(ci / cn, fimg, &mut y);
                }
                surrogates.add((norm(&y) - 1.0).abs(), (pair.a, pair.b));
            }
        }
        (chords, surrogates)
    });
    let mut chords = Worst::EMPTY;
    let mut surrogates = Worst::EMPTY;
    for (c, s) in parts {
        chords.merge(c);
        surrogates.merge(s);
    }
    let surrogate_wins = surrogates.at.is_some() && surrogates.value > chords.value;
    let best = if surrogate_wins { surrogates } else { chords };
    Ok(DistortionReport {
        epsilon_hat: best.value,
        count: chords.count + surrogates.count,
        argmax: best.at,
        argmax_is_surrogate: surrogate_wins,
        chords: DistortionPart {
            epsilon_hat: chords.value,
            count: chords.count,
        },
        surrogates: DistortionPart {
            epsilon_hat: surrogates.value,
            count: surrogates.count,
        },
    })
}

/// ε̂ over explicit unit directions.
pub fn direction_distortion(op: &MeasurementOperator, directions: &[Vec<f64>]) -> Result<f64> {
    if directions.is_empty() {
        return Err(invalid("direction set is empty"));
    }
    let mut worst = 0.0f64;
    for u in directions {
        if u.len() != op.cols() {
            return Err(invalid("direction length does not match operator columns"));
        }
        let un = dot(u, u).sqrt();
        if (un - 1.0).abs() > 1e-9 {
            return Err(invalid(format!("direction is not unit norm (norm {un})")));
        }
        worst = worst.max((norm(&op.apply_unchecked(u)) - 1.0).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{chord_direction, sample_secants, sample_secants_budget, tangent_surrogate};
    use crate::manifold::{make_circle, sample_manifold, ModelRef};
    use crate::measurement::draw_gaussian_operator;
    use std::sync::Arc;

    fn circle(n: usize, count: usize) -> ManifoldSample {
        let m: ModelRef = Arc::new(make_circle(1.0, n).unwrap());
        sample_manifold(m, count, 16.0 / count as f64).unwrap()
    }

    #[test]
    fn identity_has_no_distortion() {
        let s = circle(3, 60);
        let sec = sample_secants(&s, 0.01, 1.0).unwrap();
        let op = MeasurementOperator::identity(3).unwrap();
        let r = embedding_distortion(&op, &s, &sec).unwrap();
        assert!(r.epsilon_hat < 1e-12);
        assert!(r.surrogates.count > 0 && r.chords.count == sec.pairs.len());
    }

    #[test]
    fn zero_operator_has_unit_distortion() {
        let op = MeasurementOperator::from_rows(vec![vec![0.0, 0.0]]).unwrap();
        assert_eq!(direction_distortion(&op, &[vec![0.6, 0.8]]).unwrap(), 1.0);
        assert!(direction_distortion(&op, &[]).is_err());
        assert!(direction_distortion(&op, &[vec![1.0, 1.0]]).is_err());
    }

    #[test]
    fn matches_direct_evaluation() {
        let s = circle(16, 80);
        let sec = sample_secants(&s, 0.01, 1.0).unwrap();
        let op = draw_gaussian_operator(8, 16, 5).unwrap();
        let r = embedding_distortion(&op, &s, &sec).unwrap();
        let mut dirs: Vec<Vec<f64>> = sec.pairs.iter().map(|p| chord_direction(&s, p)).collect();
        let chords_only = direction_distortion(&op, &dirs).unwrap();
        assert!((r.chords.epsilon_hat - chords_only).abs() < 1e-12);
        dirs.extend(sec.short().filter_map(|p| tangent_surrogate(&s, p)));
        let all = direction_distortion(&op, &dirs).unwrap();
        assert!((r.epsilon_hat - all).abs() < 1e-12);
    }

    #[test]
    fn more_secants_never_lower_distortion() {
        let s = circle(32, 300);
        let op = draw_gaussian_operator(10, 32, 1).unwrap();
        let small = sample_secants_budget(&s, 0.01, 1.0, 500, 3).unwrap();
        let mut big = small.clone();
        big.pairs
            .extend(sample_secants_budget(&s, 0.01, 1.0, 2000, 4).unwrap().pairs);
        let a = embedding_distortion(&op, &s, &small).unwrap().epsilon_hat;
        let b = embedding_distortion(&op, &s, &big).unwrap().epsilon_hat;
        assert!(b >= a);
    }

    #[test]
    fn empty_and_mismatched_inputs() {
        let s = circle(3, 20);
        let mut sec = sample_secants(&s, 0.01, 1.0).unwrap();
        let op = draw_gaussian_operator(2, 4, 1).unwrap();
        assert!(embedding_distortion(&op, &s, &sec).is_err());
        sec.pairs.clear();
        let op = draw_gaussian_operator(2, 3, 1).unwrap();
        assert!(embedding_distortion(&op, &s, &sec).is_err());
    }
}
