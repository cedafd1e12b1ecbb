//! Principal angles between tangent spaces and projector norms.

use crate::error::{invalid, Error, Result};
use crate::linalg::{axpy, dot, norm, orthonormality_error, project};
use crate::rng::CounterStream;
use nalgebra::DMatrix;

/// Allowed disagreement between sin(angle) and the projector gap.
pub const PROJECTOR_GAP_TOLERANCE: f64 = 1e-8;

/// Orthogonal projector onto the span of an orthonormal frame.
#[derive(Debug, Clone)]
pub struct TangentProjector {
    base: usize,
    frame: Vec<Vec<f64>>,
}

impl TangentProjector {
    pub fn new(base: usize, frame: Vec<Vec<f64>>) -> Result<Self> {
        check_frame(&frame)?;
        Ok(Self { base, frame })
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn frame(&self) -> &[Vec<f64>] {
        &self.frame
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        project(&self.frame, v)
    }

    /// Power-iteration estimate of ‖P² − P‖ (zero up to rounding).
    pub fn idempotence_defect(&self) -> f64 {
        let n = self.frame[0].len();
        operator_norm(n, 7, |v| {
            let pv = self.apply(v);
            let ppv = self.apply(&pv);
            ppv.iter().zip(&pv).map(|(a, b)| a - b).collect()
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrincipalAngle {
    /// Largest principal angle in [0, π/2].
    pub angle: f64,
    /// Power-iteration estimate of ‖P_p − P_q‖₂.
    pub projector_gap: f64,
}

fn check_frame(frame: &[Vec<f64>]) -> Result<()> {
    if frame.is_empty() || frame[0].is_empty() {
        return Err(invalid("empty tangent frame"));
    }
    let n = frame[0].len();
    if frame.iter().any(|v| v.len() != n) {
        return Err(invalid("frame vectors have different lengths"));
    }
    let err = orthonormality_error(frame);
    if err > 1e-8 {
        return Err(invalid(format!("frame is not orthonormal (error {err:e})")));
    }
    Ok(())
}

fn gram(a: &[Vec<f64>], b: &[Vec<f64>]) -> DMatrix<f64> {
    DMatrix::from_fn(a.len(), b.len(), |i, j| dot(&a[i], &b[j]))
}

/// Largest principal angle between span(frame_p) and span(frame_q), with
/// the operator norm of the projector difference as a cross-check.
pub fn principal_angle(frame_p: &[Vec<f64>], frame_q: &[Vec<f64>]) -> Result<PrincipalAngle> {
    check_frame(frame_p)?;
    check_frame(frame_q)?;
    if frame_p.len() != frame_q.len() || frame_p[0].len() != frame_q[0].len() {
        return Err(invalid(format!(
            "frame shapes differ: {}x{} vs {}x{}",
            frame_p.len(),
            frame_p[0].len(),
            frame_q.len(),
            frame_q[0].len()
        )));
    }
    let n = frame_p[0].len();
    // cos of the largest angle: smallest singular value of Fpᵀ Fq.
    let cos = gram(frame_p, frame_q)
        .singular_values()
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
        .clamp(0.0, 1.0);
    // sin of the largest angle: largest singular value of (I − Pp) Fq.
    let residual: Vec<Vec<f64>> = frame_q
        .iter()
        .map(|q| {
            let mut r = q.clone();
            axpy(-1.0, &project(frame_p, q), &mut r);
            r
        })
        .collect();
    let sin = gram(&residual, &residual)
        .symmetric_eigenvalues()
        .iter()
        .cloned()
        .fold(0.0f64, f64::max)
        .max(0.0)
        .sqrt()
        .min(1.0);
    let angle = sin.atan2(cos);

    let projector_gap = operator_norm(n, 1, |v| {
        let mut d = project(frame_p, v);
        axpy(-1.0, &project(frame_q, v), &mut d);
        d
    });
    if (angle.sin() - projector_gap).abs() > PROJECTOR_GAP_TOLERANCE {
        return Err(Error::Consistency(format!(
            "sin(angle) = {} but projector gap = {projector_gap}",
            angle.sin()
        )));
    }
    Ok(PrincipalAngle {
        angle,
        projector_gap,
    })
}

/// Operator norm of a symmetric linear map `a` on ℝⁿ by power iteration on
/// `a²` from a fixed pseudo-random start.
fn operator_norm<F>(n: usize, seed: u64, a: F) -> f64
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let mut v = CounterStream::new(seed, 0x5eed).unit_vec(n);
    let mut previous = 0.0;
    for _ in 0..10_000 {
        let w = a(&a(&v));
        let wn = norm(&w);
        if wn == 0.0 {
            return 0.0;
        }
        v = w.iter().map(|x| x / wn).collect();
        if (wn - previous).abs() <= 1e-15 * wn {
            break;
        }
        previous = wn;
    }
    norm(&a(&v))
}
