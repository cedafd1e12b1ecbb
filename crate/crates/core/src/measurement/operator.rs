//! Seeded Gaussian measurement operators.

use crate::csvout::{fmt_f64, write_row};
use crate::error::{invalid, Result};
use crate::exec::map_range;
use crate::rng::Philox4x32;
use std::io::Write;

/// Dense M×N matrix, row-major. Random operators have i.i.d. N(0, 1/M)
/// entries; entry (i, j) of trial t is the Gaussian at counter
/// `[j, i, t_lo, t_hi]` under key `seed`, scaled by 1/√M.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementOperator {
    m: usize,
    n: usize,
    seed: Option<u64>,
    trial: u64,
    data: Vec<f64>,
}

/// Draw trial 0 of the operator family for `seed`.
pub fn draw_gaussian_operator(m: usize, n: usize, seed: u64) -> Result<MeasurementOperator> {
    MeasurementOperator::draw_trial(m, n, seed, 0)
}

fn check_shape(m: usize, n: usize) -> Result<()> {
    if m == 0 || n == 0 {
        return Err(invalid(format!("operator dimensions must be positive, got {m}x{n}")));
    }
    if m > u32::MAX as usize || n > u32::MAX as usize {
        return Err(invalid("operator dimensions exceed the counter address space"));
    }
    Ok(())
}

impl MeasurementOperator {
    /// Independent operator number `trial` for `seed`.
    pub fn draw_trial(m: usize, n: usize, seed: u64, trial: u64) -> Result<Self> {
        check_shape(m, n)?;
        let philox = Philox4x32::new(seed);
        let scale = 1.0 / (m as f64).sqrt();
        let rows = map_range(m, |i| {
            (0..n)
                .map(|j| philox.gaussian_at(trial, i as u32, j as u32) * scale)
                .collect::<Vec<f64>>()
        });
        Ok(Self {
            m,
            n,
            seed: Some(seed),
            trial,
            data: rows.concat(),
        })
    }

    /// Operator with explicit entries (identity or zero matrices in tests,
    /// externally supplied matrices otherwise).
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        check_shape(m, n)?;
        if rows.iter().any(|r| r.len() != n) {
            return Err(invalid("operator rows have different lengths"));
        }
        Ok(Self {
            m,
            n,
            seed: None,
            trial: 0,
            data: rows.concat(),
        })
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::from_rows(
            (0..n)
                .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.m
    }

    pub fn cols(&self) -> usize {
        self.n
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn trial(&self) -> u64 {
        self.trial
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn entries(&self) -> &[f64] {
        &self.data
    }

    /// `y = Φx`.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n {
            return Err(invalid(format!(
                "vector of length {} for an operator with {} columns",
                x.len(),
                self.n
            )));
        }
        Ok(self.apply_unchecked(x))
    }

    pub(crate) fn apply_unchecked(&self, x: &[f64]) -> Vec<f64> {
        (0..self.m)
            .map(|i| crate::linalg::dot(self.row(i), x))
            .collect()
    }

    /// `Φᵀy`.
    pub fn apply_transpose(&self, y: &[f64]) -> Result<Vec<f64>> {
        if y.len() != self.m {
            return Err(invalid(format!(
                "vector of length {} for an operator with {} rows",
                y.len(),
                self.m
            )));
        }
        let mut out = vec![0.0; self.n];
        for (i, &yi) in y.iter().enumerate() {
            crate::linalg::axpy(yi, self.row(i), &mut out);
        }
        Ok(out)
    }

    /// Gram matrix `ΦΦᵀ` (M×M, row-major).
    pub fn gram(&self) -> Vec<f64> {
        let m = self.m;
        let rows = map_range(m, |i| {
            (0..m)
                .map(|k| crate::linalg::dot(self.row(i), self.row(k)))
                .collect::<Vec<f64>>()
        });
        rows.concat()
    }

    /// Matrix as CSV: header `c_0..c_{N-1}`, one line per row.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        let header: Vec<String> = (0..self.n).map(|j| format!("c_{j}")).collect();
        write_row(w, &header)?;
        for i in 0..self.m {
            let row: Vec<String> = self.row(i).iter().map(|&v| fmt_f64(v)).collect();
            write_row(w, &row)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{axpy, norm};
    use crate::rng::CounterStream;

    #[test]
    fn same_seed_same_matrix() {
        let a = draw_gaussian_operator(3, 1024, 7).unwrap();
        let b = draw_gaussian_operator(3, 1024, 7).unwrap();
        assert_eq!(a, b);
        let c = draw_gaussian_operator(3, 1024, 8).unwrap();
        assert_ne!(a.entries(), c.entries());
        let t1 = MeasurementOperator::draw_trial(3, 1024, 7, 1).unwrap();
        assert_ne!(a.entries(), t1.entries());
    }

    #[test]
    fn entry_moments() {
        let op = draw_gaussian_operator(100, 1000, 12345).unwrap();
        let n = op.entries().len() as f64;
        let mean = op.entries().iter().sum::<f64>() / n;
        let var = op.entries().iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        assert!(mean.abs() < 0.01 * 0.1);
        assert!((var - 0.01).abs() <= 0.05 * 0.01, "{var}");
    }

    #[test]
    fn zero_dimensions_rejected() {
        assert!(draw_gaussian_operator(0, 5, 1).is_err());
        assert!(draw_gaussian_operator(5, 0, 1).is_err());
        assert!(MeasurementOperator::from_rows(vec![]).is_err());
        assert!(MeasurementOperator::from_rows(vec![vec![1.0], vec![1.0, 2.0]]).is_err());
    }

    #[test]
    fn apply_basics() {
        let op = draw_gaussian_operator(4, 6, 3).unwrap();
        assert_eq!(op.apply(&[0.0; 6]).unwrap(), vec![0.0; 4]);
        assert!(op.apply(&[0.0; 5]).is_err());
        let single = MeasurementOperator::from_rows(vec![
            vec![0.0, 2.0, 0.0],
            vec![0.0, -1.0, 0.0],
        ])
        .unwrap();
        assert_eq!(single.apply(&[5.0, 3.0, 7.0]).unwrap(), vec![6.0, -3.0]);
    }

    #[test]
    fn apply_is_linear() {
        let op = draw_gaussian_operator(20, 50, 9).unwrap();
        let mut rng = CounterStream::new(4, 0);
        for _ in 0..20 {
            let x1 = rng.gaussian_vec(50);
            let x2 = rng.gaussian_vec(50);
            let (a, b) = (rng.gaussian(), rng.gaussian());
            let mut comb = vec![0.0; 50];
            axpy(a, &x1, &mut comb);
            axpy(b, &x2, &mut comb);
            let lhs = op.apply(&comb).unwrap();
            let mut rhs = op.apply(&x1).unwrap();
            rhs.iter_mut().for_each(|v| *v *= a);
            axpy(b, &op.apply(&x2).unwrap(), &mut rhs);
            let diff: Vec<f64> = lhs.iter().zip(&rhs).map(|(p, q)| p - q).collect();
            assert!(norm(&diff) <= 1e-12 * norm(&rhs).max(1.0));
            let twice: Vec<f64> = x1.iter().map(|v| 2.0 * v).collect();
            let y2 = op.apply(&twice).unwrap();
            let y1 = op.apply(&x1).unwrap();
            assert!(y2.iter().zip(&y1).all(|(p, q)| (p - 2.0 * q).abs() <= 1e-12 * p.abs().max(1.0)));
        }
    }

    #[test]
    fn transpose_is_adjoint() {
        let op = draw_gaussian_operator(7, 11, 2).unwrap();
        let mut rng = CounterStream::new(1, 0);
        let x = rng.gaussian_vec(11);
        let y = rng.gaussian_vec(7);
        let lhs = crate::linalg::dot(&op.apply(&x).unwrap(), &y);
        let rhs = crate::linalg::dot(&x, &op.apply_transpose(&y).unwrap());
        assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn csv_dump_shape() {
        let op = MeasurementOperator::identity(2).unwrap();
        let mut buf = Vec::new();
        op.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "c_0,c_1\n1.0000000000000000e0,0.0000000000000000e0\n0.0000000000000000e0,1.0000000000000000e0\n"
        );
    }
}
