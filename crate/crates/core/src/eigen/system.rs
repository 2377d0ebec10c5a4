use alloc::vec;
use alloc::vec::Vec;

use super::tridiag::lowest_eigenpairs;
use crate::discretization::{derivative_values, BoundaryCondition, EllipticOperator, Grid, SampledField};
use crate::error::{Error, Result};

/// Lowest eigenpairs of `-(a φ')' + q φ = λ φ` with homogeneous boundary
/// conditions.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub eigenvalues: Vec<f64>,
    /// Eigenfunctions scaled so that `φ'(0) = 1` (Dirichlet at `x = 0`) or
    /// `φ(0) = 1` (impedance at `x = 0`).
    pub eigenfunctions: Vec<SampledField>,
    /// The same eigenfunctions, orthonormal in the mass-weighted discrete
    /// `L²` inner product.
    pub orthonormal: Vec<SampledField>,
}

impl EigenSystem {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }
}

/// Discrete inner product matching the operator's mass weights
/// (trapezoidal weights on the grid).
pub fn mass_inner(f: &SampledField, g: &SampledField) -> f64 {
    let h = f.grid().spacing();
    let n = f.len();
    let s: f64 = f.values().iter().zip(g.values()).map(|(a, b)| a * b).sum();
    h * (s - 0.5 * (f.values()[0] * g.values()[0] + f.values()[n - 1] * g.values()[n - 1]))
}

pub fn solve_eigen(
    grid: &Grid,
    a: &SampledField,
    q: &SampledField,
    left: &BoundaryCondition,
    right: &BoundaryCondition,
    n_modes: usize,
) -> Result<EigenSystem> {
    let op = EllipticOperator::assemble(grid, a, q, &left.homogeneous(), &right.homogeneous())?;
    eigen_of_operator(&op, n_modes)
}

/// Eigenpairs of an assembled operator (boundary data is ignored).
pub fn eigen_of_operator(op: &EllipticOperator, n_modes: usize) -> Result<EigenSystem> {
    let grid = *op.grid();
    let n = grid.n_nodes();
    if n_modes == 0 || 8 * n_modes > n {
        return Err(Error::UnderResolved(alloc::format!(
            "{n_modes} modes requested on {n} nodes (at most n/8 allowed)"
        )));
    }
    let (d, e) = op.symmetric_tridiagonal();
    let rows = op.free_rows();
    let (values, vectors) = lowest_eigenpairs(&d, &e, n_modes);
    let h = grid.spacing();
    let mut orthonormal = Vec::with_capacity(n_modes);
    let mut normalized = Vec::with_capacity(n_modes);
    for y in vectors {
        let mut phi = vec![0.0; n];
        for (k, i) in rows.clone().enumerate() {
            phi[i] = y[k] / libm::sqrt(op.mass(i) * h);
        }
        // fix the sign so that the normalizing quantity is positive
        let lead = if op.left().is_dirichlet() { derivative_values(&phi, h)[0] } else { phi[0] };
        if lead == 0.0 {
            return Err(Error::Singular("eigenfunction vanishes in its normalization".into()));
        }
        let sign = lead.signum();
        let ortho: Vec<f64> = phi.iter().map(|v| sign * v).collect();
        let scaled: Vec<f64> = phi.iter().map(|v| v / lead).collect();
        orthonormal.push(SampledField::from_parts_unchecked(grid, ortho));
        normalized.push(SampledField::from_parts_unchecked(grid, scaled));
    }
    Ok(EigenSystem { eigenvalues: values, eigenfunctions: normalized, orthonormal })
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn laplacian_modes() {
        let g = Grid::unit(257).unwrap();
        let one = SampledField::constant(g, 1.0);
        let zero = SampledField::constant(g, 0.0);
        let bc = BoundaryCondition::dirichlet(0.0);
        let sys = solve_eigen(&g, &one, &zero, &bc, &bc, 5).unwrap();
        let h = g.spacing();
        for (k, lam) in sys.eigenvalues.iter().enumerate() {
            let n = (k + 1) as f64;
            let exact = 4.0 / (h * h) * libm::sin(n * PI * h / 2.0).powi(2);
            assert!((lam - exact).abs() < 1e-9 * exact);
            let reference = SampledField::from_fn(g, |x| libm::sin(n * PI * x) / (n * PI));
            assert!(sys.eigenfunctions[k].sub(&reference).unwrap().sup_norm() < 1e-4);
        }
        for i in 0..5 {
            for j in 0..5 {
                let ip = mass_inner(&sys.orthonormal[i], &sys.orthonormal[j]);
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((ip - expected).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn impedance_normalization_and_orthogonality() {
        let g = Grid::unit(129).unwrap();
        let a = SampledField::from_fn(g, |x| 1.0 + x);
        let q = SampledField::from_fn(g, |x| x * x);
        let left = BoundaryCondition::impedance(0.5, 0.0).unwrap();
        let right = BoundaryCondition::neumann(0.0);
        let sys = solve_eigen(&g, &a, &q, &left, &right, 6).unwrap();
        for (k, f) in sys.eigenfunctions.iter().enumerate() {
            assert!((f.values()[0] - 1.0).abs() < 1e-14, "mode {k}");
        }
        for i in 0..6 {
            for j in 0..i {
                assert!(mass_inner(&sys.orthonormal[i], &sys.orthonormal[j]).abs() < 1e-8);
            }
        }
        assert!(sys.eigenvalues.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn resolution_guard() {
        let g = Grid::unit(33).unwrap();
        let one = SampledField::constant(g, 1.0);
        let bc = BoundaryCondition::dirichlet(0.0);
        assert!(matches!(
            solve_eigen(&g, &one, &one, &bc, &bc, 5),
            Err(Error::UnderResolved(_))
        ));
    }
}
