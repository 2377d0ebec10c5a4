use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{invalid, Error, Result};

/// Uniform mesh `x_i = i h` on `[0, L]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    n_nodes: usize,
    length: f64,
}

impl Grid {
    pub fn new(n_nodes: usize, length: f64) -> Result<Self> {
        if n_nodes < 3 {
            return Err(invalid!("grid needs at least 3 nodes, got {n_nodes}"));
        }
        if !(length > 0.0) || !length.is_finite() {
            return Err(invalid!("grid length must be positive, got {length}"));
        }
        Ok(Self { n_nodes, length })
    }

    /// The unit interval with `n_nodes` nodes.
    pub fn unit(n_nodes: usize) -> Result<Self> {
        Self::new(n_nodes, 1.0)
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn spacing(&self) -> f64 {
        self.length / (self.n_nodes - 1) as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        if i + 1 == self.n_nodes {
            self.length
        } else {
            i as f64 * self.spacing()
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n_nodes).map(|i| self.node(i)).collect()
    }

    /// Index of the node nearest to `x`, clamped to the grid.
    pub fn nearest(&self, x: f64) -> usize {
        let i = libm::round(x / self.spacing());
        if i <= 0.0 {
            0
        } else {
            (i as usize).min(self.n_nodes - 1)
        }
    }

    pub(crate) fn check_same(&self, other: &Grid, what: &str) -> Result<()> {
        if self != other {
            return Err(Error::GridMismatch(alloc::format!(
                "{what}: {} nodes on [0,{}] vs {} nodes on [0,{}]",
                self.n_nodes,
                self.length,
                other.n_nodes,
                other.length
            )));
        }
        Ok(())
    }
}

/// Values of a scalar function at the nodes of a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct SampledField {
    grid: Grid,
    values: Vec<f64>,
}

impl SampledField {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n_nodes() {
            return Err(invalid!(
                "field has {} values but the grid has {} nodes",
                values.len(),
                grid.n_nodes()
            ));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(invalid!("non-finite field value at node {i}"));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Self {
        let values = (0..grid.n_nodes()).map(|i| f(grid.node(i))).collect();
        Self { grid, values }
    }

    pub fn constant(grid: Grid, c: f64) -> Self {
        Self { grid, values: alloc::vec![c; grid.n_nodes()] }
    }

    pub(crate) fn from_parts_unchecked(grid: Grid, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.n_nodes());
        Self { grid, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self { grid: self.grid, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    /// Pointwise combination of two fields on the same grid.
    pub fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.grid.check_same(&other.grid, "zip_with")?;
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Ok(Self { grid: self.grid, values })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Trapezoidal L² norm on `[0, L]`.
    pub fn l2_norm(&self) -> f64 {
        let h = self.grid.spacing();
        let n = self.values.len();
        let mut s = 0.0;
        for (i, v) in self.values.iter().enumerate() {
            let w = if i == 0 || i + 1 == n { 0.5 } else { 1.0 };
            s += w * v * v;
        }
        libm::sqrt(s * h)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Time-dependent boundary data (the `h` or `s` of the boundary condition).
#[derive(Clone)]
pub enum BoundaryData {
    Constant(f64),
    Function(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl BoundaryData {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Self::Constant(c) => *c,
            Self::Function(f) => f(t),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Self::Constant(c) if *c == 0.0)
    }
}

impl fmt::Debug for BoundaryData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Constant(c) => write!(f, "Constant({c})"),
            Self::Function(_) => f.write_str("Function(..)"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryKind {
    Dirichlet,
    /// `a ∂_ν w + γ w = data`; `γ = 0` is the Neumann condition.
    Impedance { gamma: f64 },
}

#[derive(Debug, Clone)]
pub struct BoundaryCondition {
    pub kind: BoundaryKind,
    pub data: BoundaryData,
}

impl BoundaryCondition {
    pub fn dirichlet(value: f64) -> Self {
        Self { kind: BoundaryKind::Dirichlet, data: BoundaryData::Constant(value) }
    }

    pub fn neumann(flux: f64) -> Self {
        Self { kind: BoundaryKind::Impedance { gamma: 0.0 }, data: BoundaryData::Constant(flux) }
    }

    pub fn impedance(gamma: f64, data: f64) -> Result<Self> {
        let bc = Self { kind: BoundaryKind::Impedance { gamma }, data: BoundaryData::Constant(data) };
        bc.validate()?;
        Ok(bc)
    }

    pub fn with_data(kind: BoundaryKind, data: BoundaryData) -> Result<Self> {
        let bc = Self { kind, data };
        bc.validate()?;
        Ok(bc)
    }

    pub fn validate(&self) -> Result<()> {
        if let BoundaryKind::Impedance { gamma } = self.kind {
            if !(gamma >= 0.0) || !gamma.is_finite() {
                return Err(invalid!("impedance coefficient must be >= 0, got {gamma}"));
            }
        }
        Ok(())
    }

    pub fn is_dirichlet(&self) -> bool {
        matches!(self.kind, BoundaryKind::Dirichlet)
    }

    /// Same condition with zero data.
    pub fn homogeneous(&self) -> Self {
        Self { kind: self.kind, data: BoundaryData::Constant(0.0) }
    }
}
