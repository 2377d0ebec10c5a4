use alloc::vec::Vec;
use core::f64::consts::PI;

use super::gelfand_levitan::gl_kernel;
use super::system::{solve_eigen, EigenSystem};
use crate::discretization::{integrate, BoundaryCondition, SampledField};
use crate::error::Result;

/// Number of modes used by the spectral diagnostics.
pub const DIAGNOSTIC_MODES: usize = 10;

/// Remainders `t_n = λ_n - n²π² - ∫Q + ∫Q cos(2nπt)` of the Dirichlet
/// eigenvalue asymptotics for `-v'' + Q v` on the unit interval.
pub fn eigenvalue_asymptotics_check(q: &SampledField, system: &EigenSystem) -> Vec<f64> {
    let mean = integrate(q);
    system
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(k, lam)| {
            let n = (k + 1) as f64;
            let c = q.zip_with(&SampledField::from_fn(*q.grid(), |t| libm::cos(2.0 * n * PI * t)), |a, b| a * b);
            let moment = integrate(&c.expect("same grid"));
            lam - n * n * PI * PI - mean + moment
        })
        .collect()
}

/// Empirical Lipschitz ratios between two potentials on the unit interval
/// (Dirichlet conditions, `N = 10` modes). All ratios are `None` when the
/// potentials coincide.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LipschitzReport {
    pub eig_gap_ratio: Option<f64>,
    pub kernel_gap_ratio: Option<f64>,
    pub efunc_gap_ratio: Option<f64>,
}

pub fn lipschitz_diagnostics(q1: &SampledField, q2: &SampledField) -> Result<LipschitzReport> {
    let dist = q1.sub(q2)?.l2_norm();
    if dist == 0.0 {
        return Ok(LipschitzReport { eig_gap_ratio: None, kernel_gap_ratio: None, efunc_gap_ratio: None });
    }
    let g = *q1.grid();
    let one = SampledField::constant(g, 1.0);
    let zero = SampledField::constant(g, 0.0);
    let bc = BoundaryCondition::dirichlet(0.0);
    let s1 = solve_eigen(&g, &one, q1, &bc, &bc, DIAGNOSTIC_MODES)?;
    let s2 = solve_eigen(&g, &one, q2, &bc, &bc, DIAGNOSTIC_MODES)?;
    let eig_gap = s1.eigenvalues.iter().zip(&s2.eigenvalues).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    // φ_n = sqrt(2 λ_n) φ̂_n with φ̂_n'(0) = 1
    let mut efunc_gap = 0.0f64;
    for k in 0..DIAGNOSTIC_MODES {
        let f1 = s1.eigenfunctions[k].map(|v| v * libm::sqrt(2.0 * s1.eigenvalues[k].abs()));
        let f2 = s2.eigenfunctions[k].map(|v| v * libm::sqrt(2.0 * s2.eigenvalues[k].abs()));
        efunc_gap = efunc_gap.max(f1.sub(&f2)?.sup_norm());
    }
    let k1 = gl_kernel(q1, &zero, None)?;
    let k2 = gl_kernel(q2, &zero, None)?;
    let kernel_gap = k1.sup_distance(&k2)?;
    Ok(LipschitzReport {
        eig_gap_ratio: Some(eig_gap / dist),
        kernel_gap_ratio: Some(kernel_gap / dist),
        efunc_gap_ratio: Some(efunc_gap / dist),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretization::Grid;

    #[test]
    fn identical_potentials_are_skipped() {
        let g = Grid::unit(129).unwrap();
        let q = SampledField::from_fn(g, |x| x);
        let r = lipschitz_diagnostics(&q, &q).unwrap();
        assert_eq!(r.eig_gap_ratio, None);
    }

    #[test]
    fn constant_shift_ratio_is_one() {
        let g = Grid::unit(129).unwrap();
        let q1 = SampledField::constant(g, 0.0);
        let q2 = SampledField::constant(g, 0.1);
        let r = lipschitz_diagnostics(&q1, &q2).unwrap();
        assert!((r.eig_gap_ratio.unwrap() - 1.0).abs() < 1e-3);
    }

    #[test]
    fn constant_potential_residuals_are_discretization_error() {
        let g = Grid::unit(513).unwrap();
        let one = SampledField::constant(g, 1.0);
        let bc = BoundaryCondition::dirichlet(0.0);
        let c = SampledField::constant(g, 2.5);
        let sys = solve_eigen(&g, &one, &c, &bc, &bc, 10).unwrap();
        let r = eigenvalue_asymptotics_check(&c, &sys);
        let h = g.spacing();
        for (k, v) in r.iter().enumerate() {
            let n = (k + 1) as f64;
            let disc = (n * PI).powi(4) * h * h / 12.0;
            assert!(v.abs() <= 1.01 * disc + 1e-9, "mode {}: {v} vs {disc}", k + 1);
        }
    }
}
