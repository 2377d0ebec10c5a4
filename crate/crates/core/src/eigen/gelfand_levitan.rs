use alloc::vec;
use alloc::vec::Vec;

use crate::discretization::{integrate_cumulative, SampledField};
use crate::error::{Error, Result};

const TOL: f64 = 1e-10;
const MAX_SWEEPS: usize = 200;

/// Transformation kernel `K(x, t)` carrying solutions of `-v'' + P v = λ v`
/// to solutions of `-u'' + Q u = λ u`:
///
/// ```text
/// u(x) = v(x) + ∫_0^x K(x, t) v(t) dt.
/// ```
///
/// `K` is stored on the characteristic grid `ξ = (x+t)/2`, `η = (x-t)/2`
/// with step `h` equal to the potential grid spacing, covering
/// `-x ≤ t ≤ x ≤ L`. Grid point `(p, m)` is `x = (p+m) h`, `t = (p-m) h`.
#[derive(Debug, Clone)]
pub struct GLKernel {
    h: f64,
    steps: usize,
    // rows[p][m] for p + m ≤ steps
    rows: Vec<Vec<f64>>,
    pub sweeps: usize,
    pub residual: f64,
}

impl GLKernel {
    pub fn spacing(&self) -> f64 {
        self.h
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Value at characteristic indices `(p, m)`.
    pub fn at_characteristic(&self, p: usize, m: usize) -> f64 {
        self.rows[p][m]
    }

    /// `K(x_i, t_j)` for grid indices with `i ± j` even and `|j| ≤ i`.
    pub fn at(&self, i: usize, j: isize) -> Option<f64> {
        let i = i as isize;
        if j.abs() > i || (i + j) % 2 != 0 || i as usize > self.steps {
            return None;
        }
        let p = ((i + j) / 2) as usize;
        let m = ((i - j) / 2) as usize;
        Some(self.rows[p][m])
    }

    /// `K(x, x)` at every grid node.
    pub fn diagonal(&self) -> Vec<f64> {
        (0..=self.steps).map(|p| self.rows[p][0]).collect()
    }

    /// Samples `(x, t, K)` with `0 ≤ t ≤ x`, ordered by `x` then `t`.
    pub fn triangle(&self) -> Vec<(f64, f64, f64)> {
        let mut out = Vec::new();
        for i in 0..=self.steps {
            for j in (i % 2..=i).step_by(2) {
                let k = self.at(i, j as isize).unwrap_or(0.0);
                out.push((i as f64 * self.h, j as f64 * self.h, k));
            }
        }
        out
    }

    /// Sup-norm distance over `0 ≤ t ≤ x` to a kernel on the same grid.
    pub fn sup_distance(&self, other: &GLKernel) -> Result<f64> {
        if self.steps != other.steps {
            return Err(Error::GridMismatch("kernels on different characteristic grids".into()));
        }
        let mut d = 0.0f64;
        for p in 0..=self.steps {
            for m in 0..=p.min(self.steps - p) {
                d = d.max((self.rows[p][m] - other.rows[p][m]).abs());
            }
        }
        Ok(d)
    }
}

/// Product-trapezoid cumulative integral over `[0, ξ_p] × [0, η_m]`.
fn cumulative_2d(g: &[Vec<f64>], h: f64) -> Vec<Vec<f64>> {
    let n = g.len() - 1;
    let w = 0.25 * h * h;
    let mut s: Vec<Vec<f64>> = (0..=n).map(|p| vec![0.0; n - p + 1]).collect();
    for p in 1..=n {
        for m in 1..=n - p {
            s[p][m] = s[p - 1][m] + s[p][m - 1] - s[p - 1][m - 1]
                + w * (g[p][m] + g[p - 1][m] + g[p][m - 1] + g[p - 1][m - 1]);
        }
    }
    s
}

/// Solve the Goursat problem
///
/// ```text
/// K_tt - K_xx + (Q(x) - P(t)) K = 0,   K(x, ±x) = F(±x)
/// ```
///
/// in its Volterra form `K = F₊(ξ) + F₋(η) - F(0) + ∫_0^ξ ∫_0^η V K` by
/// Picard iteration. Without `boundary_h` the Dirichlet data
/// `F(±x) = ±½∫_0^x (Q - P)` is used; with it, `F(±x) = h + ½∫_0^x (Q - P)`.
pub fn gl_kernel(q: &SampledField, p: &SampledField, boundary_h: Option<f64>) -> Result<GLKernel> {
    q.grid().check_same(p.grid(), "reference potential")?;
    let grid = *q.grid();
    let n = grid.n_nodes() - 1;
    let h = grid.spacing();
    let half = integrate_cumulative(&q.sub(p)?).map(|v| 0.5 * v);
    let hv = half.values();
    let (f_plus, f_minus, f0): (Vec<f64>, Vec<f64>, f64) = match boundary_h {
        None => (hv.to_vec(), hv.iter().map(|v| -v).collect(), 0.0),
        Some(b) => {
            let f: Vec<f64> = hv.iter().map(|v| b + v).collect();
            (f.clone(), f, b)
        }
    };
    let qv = q.values();
    let pv = p.values();
    let pot: Vec<Vec<f64>> = (0..=n)
        .map(|i| (0..=n - i).map(|m| qv[i + m] - pv[i.abs_diff(m)]).collect())
        .collect();
    let base: Vec<Vec<f64>> = (0..=n)
        .map(|i| (0..=n - i).map(|m| f_plus[i] + f_minus[m] - f0).collect())
        .collect();
    let mut k = base.clone();
    let mut change = f64::INFINITY;
    let mut sweeps = 0;
    while sweeps < MAX_SWEEPS {
        sweeps += 1;
        let g: Vec<Vec<f64>> = k
            .iter()
            .zip(&pot)
            .map(|(kr, vr)| kr.iter().zip(vr).map(|(a, b)| a * b).collect())
            .collect();
        let s = cumulative_2d(&g, h);
        change = 0.0;
        let scale = k.iter().flatten().fold(1.0f64, |m, v| m.max(v.abs()));
        for ((kr, br), sr) in k.iter_mut().zip(&base).zip(&s) {
            for ((kv, bv), sv) in kr.iter_mut().zip(br).zip(sr) {
                let new = bv + sv;
                change = change.max((new - *kv).abs());
                *kv = new;
            }
        }
        if change <= TOL * scale {
            return Ok(GLKernel { h, steps: n, rows: k, sweeps, residual: change });
        }
    }
    Err(Error::NoConvergence { context: "Gel'fand-Levitan kernel".into(), iterations: sweeps, residual: change })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretization::Grid;

    #[test]
    fn equal_potentials_give_zero_kernel() {
        let g = Grid::unit(65).unwrap();
        let q = SampledField::from_fn(g, |x| 2.0 + x);
        let k = gl_kernel(&q, &q, None).unwrap();
        assert!(k.triangle().iter().all(|(_, _, v)| *v == 0.0));
    }

    #[test]
    fn diagonal_of_constant_potential() {
        let g = Grid::unit(129).unwrap();
        let c = 3.0;
        let q = SampledField::constant(g, c);
        let zero = SampledField::constant(g, 0.0);
        let k = gl_kernel(&q, &zero, None).unwrap();
        for (x, d) in g.nodes().iter().zip(k.diagonal()) {
            assert!((d - c * x / 2.0).abs() < 1e-13);
        }
        // odd in t for Dirichlet data
        assert!(k.at(10, 0).unwrap().abs() < 1e-12);
    }

    #[test]
    fn impedance_shift() {
        let g = Grid::unit(65).unwrap();
        let zero = SampledField::constant(g, 0.0);
        let k = gl_kernel(&zero, &zero, Some(0.7)).unwrap();
        assert!(k.diagonal().iter().all(|v| (v - 0.7).abs() < 1e-14));
    }
}
