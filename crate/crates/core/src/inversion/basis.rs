use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::discretization::{Grid, SampledField};
use crate::error::{invalid, Result};
use crate::linalg::tsvd_solve;

/// Gaussian radial basis `b_j(x) = exp(-(x - x_j)² / σ)` with uniformly
/// spaced centres on `[0, L]`, sampled on a grid.
#[derive(Debug, Clone)]
pub struct RbfBasis {
    grid: Grid,
    centers: Vec<f64>,
    width: f64,
    // values[j][i] = b_j(x_i)
    values: Vec<Vec<f64>>,
}

impl RbfBasis {
    /// `n_centers` uniform centres and `σ = (width_factor · Δc)²`.
    pub fn uniform(grid: &Grid, n_centers: usize, width_factor: f64) -> Result<Self> {
        if n_centers < 2 {
            return Err(invalid!("need at least two basis functions, got {n_centers}"));
        }
        if 4 * n_centers > grid.n_nodes() {
            return Err(invalid!(
                "{n_centers} basis functions on {} nodes (at most a quarter of the nodes)",
                grid.n_nodes()
            ));
        }
        if !(width_factor > 0.0) {
            return Err(invalid!("width factor must be positive, got {width_factor}"));
        }
        let dc = grid.length() / (n_centers - 1) as f64;
        let centers: Vec<f64> = (0..n_centers).map(|j| j as f64 * dc).collect();
        Self::with_centers(grid, centers, (width_factor * dc) * (width_factor * dc))
    }

    pub fn with_centers(grid: &Grid, centers: Vec<f64>, width: f64) -> Result<Self> {
        if !(width > 0.0) {
            return Err(invalid!("basis width must be positive, got {width}"));
        }
        if let Some(c) = centers.iter().find(|c| !(**c >= 0.0 && **c <= grid.length())) {
            return Err(invalid!("centre {c} outside [0, {}]", grid.length()));
        }
        let nodes = grid.nodes();
        let values = centers
            .iter()
            .map(|c| nodes.iter().map(|x| libm::exp(-(x - c) * (x - c) / width)).collect())
            .collect();
        Ok(Self { grid: *grid, centers, width, values })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn centers(&self) -> &[f64] {
        &self.centers
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    /// Nodal samples of `b_j`.
    pub fn column(&self, j: usize) -> &[f64] {
        &self.values[j]
    }

    /// Analytic derivative `b_j'` at the nodes.
    pub fn derivative(&self, j: usize) -> Vec<f64> {
        let c = self.centers[j];
        self.grid
            .nodes()
            .iter()
            .zip(&self.values[j])
            .map(|(x, b)| -2.0 * (x - c) / self.width * b)
            .collect()
    }

    /// `Σ c_j b_j` on the grid.
    pub fn evaluate(&self, coefficients: &[f64]) -> SampledField {
        let n = self.grid.n_nodes();
        let mut out = alloc::vec![0.0; n];
        for (c, col) in coefficients.iter().zip(&self.values) {
            for (o, b) in out.iter_mut().zip(col) {
                *o += c * b;
            }
        }
        SampledField::from_parts_unchecked(self.grid, out)
    }

    /// Least-squares coefficients fitting `field` on the nodes where `mask`
    /// is true (all nodes when `mask` is `None`).
    pub fn fit(&self, field: &SampledField, mask: Option<&[bool]>, rel_cutoff: f64) -> Result<Vec<f64>> {
        self.grid.check_same(field.grid(), "fitted field")?;
        let rows: Vec<usize> = match mask {
            Some(m) => (0..m.len()).filter(|&i| m[i]).collect(),
            None => (0..self.grid.n_nodes()).collect(),
        };
        if rows.is_empty() {
            return Err(invalid!("no nodes selected for the basis fit"));
        }
        let m = DMatrix::from_fn(rows.len(), self.len(), |r, j| self.values[j][rows[r]]);
        let b: Vec<f64> = rows.iter().map(|&i| field.values()[i]).collect();
        Ok(tsvd_solve(&m, &b, rel_cutoff)?.coefficients)
    }

    /// Best-approximation error `‖f - Π f‖∞` of a field in this basis.
    pub fn approximation_error(&self, field: &SampledField) -> Result<f64> {
        let c = self.fit(field, None, 1e-12)?;
        Ok(self.evaluate(&c).sub(field)?.sup_norm())
    }
}
