//! Small dense vector helpers shared across modules.

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

#[inline]
pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

#[inline]
pub fn scale(a: &mut [f64], s: f64) {
    a.iter_mut().for_each(|x| *x *= s);
}

/// `y += alpha * x`
#[inline]
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    y.iter_mut().zip(x).for_each(|(yi, xi)| *yi += alpha * xi);
}

/// Unit vector along `v`, or `None` when `v` is zero.
pub fn normalized(v: &[f64]) -> Option<Vec<f64>> {
    let n = norm(v);
    if n > 0.0 && n.is_finite() {
        Some(v.iter().map(|x| x / n).collect())
    } else {
        None
    }
}

/// Orthonormalize a set of vectors with two passes of modified Gram-Schmidt.
///
/// Returns `None` if the vectors are numerically dependent.
pub fn orthonormalize(vectors: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let mut w = v.clone();
        let original = norm(&w);
        if original == 0.0 {
            return None;
        }
        for _ in 0..2 {
            for b in &basis {
                let c = dot(&w, b);
                axpy(-c, b, &mut w);
            }
        }
        let n = norm(&w);
        if n <= 1e-12 * original {
            return None;
        }
        scale(&mut w, 1.0 / n);
        basis.push(w);
    }
    Some(basis)
}

/// Orthogonal projection of `v` onto the span of an orthonormal frame.
pub fn project(frame: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; v.len()];
    for b in frame {
        axpy(dot(b, v), b, &mut out);
    }
    out
}

/// Norm of the component of `v` orthogonal to an orthonormal frame.
pub fn normal_norm(frame: &[Vec<f64>], v: &[f64]) -> f64 {
    norm(&sub(v, &project(frame, v)))
}

/// Largest deviation of `FᵀF` from the identity.
pub fn orthonormality_error(frame: &[Vec<f64>]) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, a) in frame.iter().enumerate() {
        for (j, b) in frame.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((dot(a, b) - target).abs());
        }
    }
    worst
}
