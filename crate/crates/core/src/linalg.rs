//! Small direct solvers: tridiagonal, banded SPD, and truncated-SVD least squares.

use alloc::vec;
use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Solve a tridiagonal system with the Thomas algorithm.
///
/// `lower[0]` and `upper[n-1]` are ignored.
pub fn solve_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut beta = diag[0];
    if beta == 0.0 {
        return Err(Error::Singular("zero pivot in tridiagonal solve".into()));
    }
    c[0] = upper[0] / beta;
    d[0] = rhs[0] / beta;
    for i in 1..n {
        beta = diag[i] - lower[i] * c[i - 1];
        if beta == 0.0 || !beta.is_finite() {
            return Err(Error::Singular(alloc::format!("zero pivot at row {i} in tridiagonal solve")));
        }
        if i + 1 < n {
            c[i] = upper[i] / beta;
        }
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / beta;
    }
    for i in (0..n - 1).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    Ok(d)
}

/// Symmetric positive definite banded matrix stored by diagonals:
/// `bands[k][i]` is entry `(i, i+k)`.
#[derive(Debug, Clone)]
pub struct SymBanded {
    pub bands: Vec<Vec<f64>>,
}

impl SymBanded {
    pub fn zeros(n: usize, bandwidth: usize) -> Self {
        Self { bands: (0..=bandwidth).map(|k| vec![0.0; n.saturating_sub(k)]).collect() }
    }

    pub fn n(&self) -> usize {
        self.bands[0].len()
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let (r, c) = if i <= j { (i, j) } else { (j, i) };
        self.bands[c - r][r] += v;
    }

    /// Banded Cholesky solve.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.n();
        let p = self.bands.len() - 1;
        // l[k][i] = L(i+k, i)
        let mut l: Vec<Vec<f64>> = self.bands.clone();
        for j in 0..n {
            let mut djj = l[0][j];
            for k in 1..=p.min(j) {
                let v = l[k][j - k];
                djj -= v * v;
            }
            if !(djj > 0.0) {
                return Err(Error::Singular(alloc::format!("banded matrix not positive definite at row {j}")));
            }
            let djj = libm::sqrt(djj);
            l[0][j] = djj;
            for k in 1..=p {
                let i = j + k;
                if i >= n {
                    break;
                }
                let mut s = l[k][j];
                for m in 1..=p {
                    if m > j || k + m > p {
                        break;
                    }
                    s -= l[k + m][j - m] * l[m][j - m];
                }
                l[k][j] = s / djj;
            }
        }
        let mut y = rhs.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in 1..=p.min(i) {
                s -= l[k][i - k] * y[i - k];
            }
            y[i] = s / l[0][i];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in 1..=p {
                if i + k >= n {
                    break;
                }
                s -= l[k][i] * y[i + k];
            }
            y[i] = s / l[0][i];
        }
        Ok(y)
    }
}

/// Result of a truncated-SVD least-squares solve.
#[derive(Debug, Clone)]
pub struct TsvdSolution {
    pub coefficients: Vec<f64>,
    pub singular_values: Vec<f64>,
    /// Number of singular triplets kept.
    pub rank: usize,
}

/// Minimise `‖A c - b‖₂` keeping singular values above `rel_cutoff · σ_max`.
pub fn tsvd_solve(a: &DMatrix<f64>, b: &[f64], rel_cutoff: f64) -> Result<TsvdSolution> {
    if a.nrows() != b.len() {
        return Err(Error::InvalidInput(alloc::format!(
            "least squares: {} rows but rhs has {} entries",
            a.nrows(),
            b.len()
        )));
    }
    let svd = a.clone().svd(true, true);
    let u = svd.u.as_ref().ok_or_else(|| Error::Singular("svd failed".into()))?;
    let vt = svd.v_t.as_ref().ok_or_else(|| Error::Singular("svd failed".into()))?;
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let smax = svd.singular_values[order[0]];
    if !(smax > 0.0) {
        return Err(Error::Singular("least-squares matrix is zero".into()));
    }
    let bv = DVector::from_column_slice(b);
    let mut coef = DVector::zeros(a.ncols());
    let mut rank = 0;
    for &k in &order {
        let s = svd.singular_values[k];
        if s <= rel_cutoff * smax {
            break;
        }
        let beta = u.column(k).dot(&bv) / s;
        coef += vt.row(k).transpose() * beta;
        rank += 1;
    }
    Ok(TsvdSolution {
        coefficients: coef.iter().copied().collect(),
        singular_values: order.iter().map(|&k| svd.singular_values[k]).collect(),
        rank,
    })
}

/// Singular values in descending order.
pub fn singular_values(a: &DMatrix<f64>) -> Vec<f64> {
    let mut s: Vec<f64> = a.singular_values().iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tridiagonal_matches_dense() {
        let n = 6;
        let lower = [0.0, -1.0, -2.0, -1.0, -0.5, -1.0];
        let diag = [4.0, 5.0, 6.0, 4.0, 3.0, 5.0];
        let upper = [-1.0, -1.5, -1.0, -1.0, -1.0, 0.0];
        let rhs = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let x = solve_tridiagonal(&lower, &diag, &upper, &rhs).unwrap();
        for i in 0..n {
            let mut r = diag[i] * x[i];
            if i > 0 {
                r += lower[i] * x[i - 1];
            }
            if i + 1 < n {
                r += upper[i] * x[i + 1];
            }
            assert!((r - rhs[i]).abs() < 1e-13);
        }
    }

    #[test]
    fn banded_cholesky_matches_dense() {
        let n = 9;
        let mut m = SymBanded::zeros(n, 2);
        let mut dense = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            for k in 0..=2 {
                if i + k < n {
                    let v = if k == 0 { 6.0 + i as f64 } else { -1.0 / k as f64 };
                    m.add(i, i + k, v);
                    dense[(i, i + k)] += v;
                    if k > 0 {
                        dense[(i + k, i)] += v;
                    }
                }
            }
        }
        let rhs: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let x = m.solve(&rhs).unwrap();
        let r = &dense * DVector::from_column_slice(&x) - DVector::from_column_slice(&rhs);
        assert!(r.amax() < 1e-13);
    }

    #[test]
    fn tsvd_truncates_null_direction() {
        // second column duplicates the first; minimum-norm solution splits evenly
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 1.0, 2.0, 2.0, 3.0, 3.0]);
        let sol = tsvd_solve(&a, &[2.0, 4.0, 6.0], 1e-10).unwrap();
        assert_eq!(sol.rank, 1);
        assert!((sol.coefficients[0] - 1.0).abs() < 1e-12);
        assert!((sol.coefficients[1] - 1.0).abs() < 1e-12);
    }
}
