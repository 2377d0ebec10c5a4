use alloc::vec;
use alloc::vec::Vec;

use super::grid::{BoundaryCondition, BoundaryKind, Grid, SampledField};
use crate::error::{domain, Result};
use crate::linalg::solve_tridiagonal;

/// Conservative finite-difference form of `𝕃w = -(a w')' + q w` with the
/// boundary conditions folded into the first and last rows.
///
/// Interior rows use the arithmetic half-node mean `a_{i+1/2}`. Dirichlet
/// rows are identity rows. Impedance rows come from the half cell next to
/// the boundary (equivalently, ghost-node elimination), so the matrix stays
/// tridiagonal and has unit "mass" in every row:
///
/// ```text
/// (2a_{1/2}/h² + 2γ/h + q_0) w_0 - 2a_{1/2}/h² w_1 = f_0 + 2 s/h
/// ```
///
/// Rows are symmetric up to the diagonal mass weights `m = (½, 1, …, 1, ½)`
/// carried by impedance end rows.
#[derive(Debug, Clone)]
pub struct EllipticOperator {
    grid: Grid,
    lower: Vec<f64>,
    diag: Vec<f64>,
    upper: Vec<f64>,
    a_half: Vec<f64>,
    q: Vec<f64>,
    left: BoundaryCondition,
    right: BoundaryCondition,
}

impl EllipticOperator {
    pub fn assemble(
        grid: &Grid,
        a: &SampledField,
        q: &SampledField,
        left: &BoundaryCondition,
        right: &BoundaryCondition,
    ) -> Result<Self> {
        grid.check_same(a.grid(), "diffusion coefficient")?;
        grid.check_same(q.grid(), "potential")?;
        left.validate()?;
        right.validate()?;
        if let Some((i, v)) = a.values().iter().enumerate().find(|(_, v)| !(**v > 0.0)) {
            return Err(domain!("diffusion coefficient must be positive, a[{i}] = {v}"));
        }
        let n = grid.n_nodes();
        let h = grid.spacing();
        let h2 = h * h;
        let av = a.values();
        let a_half: Vec<f64> = av.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        let qv = q.values().to_vec();
        let mut lower = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut upper = vec![0.0; n];
        for i in 1..n - 1 {
            lower[i] = -a_half[i - 1] / h2;
            upper[i] = -a_half[i] / h2;
            diag[i] = (a_half[i - 1] + a_half[i]) / h2 + qv[i];
        }
        match left.kind {
            BoundaryKind::Dirichlet => diag[0] = 1.0,
            BoundaryKind::Impedance { gamma } => {
                diag[0] = 2.0 * a_half[0] / h2 + 2.0 * gamma / h + qv[0];
                upper[0] = -2.0 * a_half[0] / h2;
            }
        }
        match right.kind {
            BoundaryKind::Dirichlet => diag[n - 1] = 1.0,
            BoundaryKind::Impedance { gamma } => {
                diag[n - 1] = 2.0 * a_half[n - 2] / h2 + 2.0 * gamma / h + qv[n - 1];
                lower[n - 1] = -2.0 * a_half[n - 2] / h2;
            }
        }
        Ok(Self { grid: *grid, lower, diag, upper, a_half, q: qv, left: left.clone(), right: right.clone() })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn a_half(&self) -> &[f64] {
        &self.a_half
    }

    pub fn potential(&self) -> &[f64] {
        &self.q
    }

    pub fn left(&self) -> &BoundaryCondition {
        &self.left
    }

    pub fn right(&self) -> &BoundaryCondition {
        &self.right
    }

    /// Whether row `i` is a Dirichlet (identity) row.
    pub fn is_dirichlet_row(&self, i: usize) -> bool {
        (i == 0 && self.left.is_dirichlet()) || (i + 1 == self.grid.n_nodes() && self.right.is_dirichlet())
    }

    /// Matrix-vector product with the assembled rows.
    pub fn matvec(&self, w: &[f64]) -> Vec<f64> {
        let n = w.len();
        (0..n)
            .map(|i| {
                let mut r = self.diag[i] * w[i];
                if i > 0 {
                    r += self.lower[i] * w[i - 1];
                }
                if i + 1 < n {
                    r += self.upper[i] * w[i + 1];
                }
                r
            })
            .collect()
    }

    /// `𝕃w` on every row that carries the differential equation; Dirichlet
    /// rows are zero. Boundary data of impedance rows is *not* included.
    pub fn apply(&self, w: &[f64]) -> Vec<f64> {
        let mut r = self.matvec(w);
        for (i, v) in r.iter_mut().enumerate() {
            if self.is_dirichlet_row(i) {
                *v = 0.0;
            }
        }
        r
    }

    /// Boundary contribution to the right-hand side at time `t`: Dirichlet
    /// values in identity rows, `2 s(t)/h` in impedance rows.
    pub fn boundary_rhs(&self, t: f64) -> Vec<f64> {
        let n = self.grid.n_nodes();
        let h = self.grid.spacing();
        let mut b = vec![0.0; n];
        b[0] = match self.left.kind {
            BoundaryKind::Dirichlet => self.left.data.eval(t),
            BoundaryKind::Impedance { .. } => 2.0 * self.left.data.eval(t) / h,
        };
        b[n - 1] = match self.right.kind {
            BoundaryKind::Dirichlet => self.right.data.eval(t),
            BoundaryKind::Impedance { .. } => 2.0 * self.right.data.eval(t) / h,
        };
        b
    }

    /// Solve `(shift·I_free + A) w = rhs`, where `I_free` is the identity on
    /// non-Dirichlet rows. Dirichlet rows of `rhs` carry the boundary value.
    pub fn solve_shifted(&self, shift: f64, rhs: &[f64]) -> Result<Vec<f64>> {
        let mut d = self.diag.clone();
        for (i, v) in d.iter_mut().enumerate() {
            if !self.is_dirichlet_row(i) {
                *v += shift;
            }
        }
        solve_tridiagonal(&self.lower, &d, &self.upper, rhs)
    }

    /// Mass weight of row `i` (½ for impedance end rows, 1 otherwise).
    pub fn mass(&self, i: usize) -> f64 {
        let n = self.grid.n_nodes();
        if (i == 0 && !self.left.is_dirichlet()) || (i + 1 == n && !self.right.is_dirichlet()) {
            0.5
        } else {
            1.0
        }
    }

    /// Indices of the rows that are unknowns of the eigenproblem.
    pub fn free_rows(&self) -> core::ops::Range<usize> {
        let n = self.grid.n_nodes();
        let start = usize::from(self.left.is_dirichlet());
        let end = if self.right.is_dirichlet() { n - 1 } else { n };
        start..end
    }

    /// Symmetric tridiagonal `M^{1/2} A M^{-1/2}` restricted to the free rows,
    /// as `(diagonal, off-diagonal)`.
    pub fn symmetric_tridiagonal(&self) -> (Vec<f64>, Vec<f64>) {
        let rows = self.free_rows();
        let d: Vec<f64> = rows.clone().map(|i| self.diag[i]).collect();
        let e: Vec<f64> = rows
            .clone()
            .take(rows.len() - 1)
            .map(|i| {
                // S_{i,i+1} = sqrt(m_i/m_{i+1}) A_{i,i+1}; equals sqrt(A_{i,i+1} A_{i+1,i})
                let s = libm::sqrt(self.mass(i) / self.mass(i + 1));
                s * self.upper[i]
            })
            .collect();
        (d, e)
    }
}
