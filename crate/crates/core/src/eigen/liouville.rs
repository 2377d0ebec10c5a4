use alloc::vec::Vec;

use crate::discretization::{differentiate, integrate_cumulative, second_derivative, Grid, SampledField};
use crate::error::{domain, Result};

/// Canonical (Schrödinger) form `-v'' + Q v = μ v` on `(0, L)` of
/// `-(a u')' + q u = λ u` on the unit interval.
#[derive(Debug, Clone)]
pub struct CanonicalForm {
    pub length: f64,
    /// `Q(y)` on a uniform grid of `(0, L)`.
    pub potential: SampledField,
    /// `ℓ(x) = ∫_0^x a^{-1/2}` on the original grid.
    pub ell: SampledField,
    /// `ℓ^{-1}(y)` on the grid of `potential`.
    pub inverse: SampledField,
}

impl CanonicalForm {
    /// Potential of the problem rescaled to the unit interval, `L² Q(L z)`;
    /// its eigenvalues are `L² λ`.
    pub fn unit_potential(&self) -> SampledField {
        let l2 = self.length * self.length;
        let g = Grid::unit(self.potential.len()).expect("grid has at least two nodes");
        SampledField::from_parts_unchecked(g, self.potential.values().iter().map(|v| l2 * v).collect())
    }
}

/// Cubic Hermite value on `[x0, x0 + h]` at local coordinate `s ∈ [0, 1]`.
fn hermite(s: f64, h: f64, f0: f64, f1: f64, d0: f64, d1: f64) -> f64 {
    let s2 = s * s;
    let s3 = s2 * s;
    (2.0 * s3 - 3.0 * s2 + 1.0) * f0 + (s3 - 2.0 * s2 + s) * h * d0 + (-2.0 * s3 + 3.0 * s2) * f1 + (s3 - s2) * h * d1
}

/// Liouville transformation with unit specific heat.
///
/// `Q = q + a''/4 - a'²/(16 a)` is evaluated on the original grid and moved
/// to a uniform grid in `y = ℓ(x)` by Hermite interpolation.
pub fn liouville_transform(a: &SampledField, q: &SampledField) -> Result<CanonicalForm> {
    a.grid().check_same(q.grid(), "potential")?;
    if let Some((i, v)) = a.values().iter().enumerate().find(|(_, v)| !(**v > 0.0)) {
        return Err(domain!("diffusion coefficient must be positive, a[{i}] = {v}"));
    }
    let grid = *a.grid();
    let n = grid.n_nodes();
    let h = grid.spacing();
    let da = differentiate(a);
    let d2a = second_derivative(a);
    let qx: Vec<f64> = (0..n)
        .map(|i| {
            let (av, d1, d2) = (a.values()[i], da.values()[i], d2a.values()[i]);
            q.values()[i] + 0.25 * d2 - d1 * d1 / (16.0 * av)
        })
        .collect();
    let qx = SampledField::from_parts_unchecked(grid, qx);
    let dqx = differentiate(&qx);
    let slope = a.map(|v| 1.0 / libm::sqrt(v));
    let ell = integrate_cumulative(&slope);
    let length = ell.values()[n - 1];
    let ygrid = Grid::new(n, length)?;
    let ev = ell.values();
    let sv = slope.values();
    let mut inverse = Vec::with_capacity(n);
    let mut potential = Vec::with_capacity(n);
    let mut j = 0;
    for k in 0..n {
        let y = if k + 1 == n { length } else { ygrid.node(k) };
        while j + 2 < n && ev[j + 1] < y {
            j += 1;
        }
        // Newton on the Hermite model of ℓ over [x_j, x_{j+1}]
        let (f0, f1, d0, d1) = (ev[j], ev[j + 1], sv[j], sv[j + 1]);
        let mut s = ((y - f0) / (f1 - f0)).clamp(0.0, 1.0);
        for _ in 0..30 {
            let val = hermite(s, h, f0, f1, d0, d1) - y;
            let s2 = s * s;
            let der = (6.0 * s2 - 6.0 * s) * f0
                + (3.0 * s2 - 4.0 * s + 1.0) * h * d0
                + (-6.0 * s2 + 6.0 * s) * f1
                + (3.0 * s2 - 2.0 * s) * h * d1;
            let step = val / der;
            s = (s - step).clamp(0.0, 1.0);
            if step.abs() < 1e-15 {
                break;
            }
        }
        inverse.push(grid.node(j) + s * h);
        let (q0, q1, g0, g1) = (qx.values()[j], qx.values()[j + 1], dqx.values()[j], dqx.values()[j + 1]);
        potential.push(hermite(s, h, q0, q1, g0, g1));
    }
    Ok(CanonicalForm {
        length,
        potential: SampledField::new(ygrid, potential)?,
        ell,
        inverse: SampledField::new(ygrid, inverse)?,
    })
}
