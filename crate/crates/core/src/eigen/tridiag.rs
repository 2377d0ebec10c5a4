//! Lowest eigenpairs of a symmetric tridiagonal matrix by Sturm-sequence
//! bisection and inverse iteration.

use alloc::vec;
use alloc::vec::Vec;

/// Number of eigenvalues strictly below `x`.
fn sturm_count(d: &[f64], e: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = d[0] - x;
    if q < 0.0 {
        count += 1;
    }
    for i in 1..d.len() {
        let denom = if q == 0.0 { f64::EPSILON * (e[i - 1].abs() + 1.0) } else { q };
        q = d[i] - x - e[i - 1] * e[i - 1] / denom;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// The `k`-th smallest eigenvalue (0-based) by bisection inside the
/// Gershgorin interval.
pub(crate) fn kth_eigenvalue(d: &[f64], e: &[f64], k: usize) -> f64 {
    let n = d.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = if i > 0 { e[i - 1].abs() } else { 0.0 } + if i + 1 < n { e[i].abs() } else { 0.0 };
        lo = lo.min(d[i] - r);
        hi = hi.max(d[i] + r);
    }
    let scale = lo.abs().max(hi.abs()).max(1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= 2.0 * f64::EPSILON * scale {
            break;
        }
        if sturm_count(d, e, mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Solve `(T - shift) y = b` by Gaussian elimination with partial pivoting.
fn shifted_solve(d: &[f64], e: &[f64], shift: f64, b: &mut [f64]) {
    let n = d.len();
    // rows carry (diag, super, super2) after pivoting
    let mut dd: Vec<f64> = d.iter().map(|v| v - shift).collect();
    let mut du: Vec<f64> = e.to_vec();
    du.push(0.0);
    let mut dl: Vec<f64> = e.to_vec();
    let mut du2 = vec![0.0; n];
    let mut swapped = vec![false; n];
    let tiny = f64::EPSILON * d.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    for i in 0..n.saturating_sub(1) {
        if dd[i].abs() >= dl[i].abs() {
            let piv = if dd[i] == 0.0 { tiny } else { dd[i] };
            dd[i] = piv;
            let f = dl[i] / piv;
            dl[i] = f;
            dd[i + 1] -= f * du[i];
        } else {
            swapped[i] = true;
            let f = dd[i] / dl[i];
            dd[i] = dl[i];
            dl[i] = f;
            let tmp = du[i];
            du[i] = dd[i + 1];
            dd[i + 1] = tmp - f * dd[i + 1];
            if i + 1 < n - 1 {
                du2[i] = du[i + 1];
                du[i + 1] = -f * du[i + 1];
            }
        }
    }
    if dd[n - 1] == 0.0 {
        dd[n - 1] = tiny;
    }
    for i in 0..n.saturating_sub(1) {
        if swapped[i] {
            b.swap(i, i + 1);
        }
        b[i + 1] -= dl[i] * b[i];
    }
    b[n - 1] /= dd[n - 1];
    if n > 1 {
        b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / dd[n - 2];
    }
    for i in (0..n.saturating_sub(2)).rev() {
        b[i] = (b[i] - du[i] * b[i + 1] - du2[i] * b[i + 2]) / dd[i];
    }
}

/// Unit eigenvector for an accurately known eigenvalue.
pub(crate) fn eigenvector(d: &[f64], e: &[f64], lambda: f64) -> Vec<f64> {
    let n = d.len();
    let mut y: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * libm::sin(1.0 + i as f64)).collect();
    for _ in 0..3 {
        shifted_solve(d, e, lambda, &mut y);
        let norm = libm::sqrt(y.iter().map(|v| v * v).sum::<f64>());
        for v in &mut y {
            *v /= norm;
        }
    }
    y
}

/// Lowest `k` eigenpairs (ascending) of the symmetric tridiagonal matrix with
/// diagonal `d` and off-diagonal `e`.
pub(crate) fn lowest_eigenpairs(d: &[f64], e: &[f64], k: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
    let values: Vec<f64> = (0..k).map(|j| kth_eigenvalue(d, e, j)).collect();
    let vectors = values.iter().map(|&l| eigenvector(d, e, l)).collect();
    (values, vectors)
}
