//! Uniform 1D grids, the discrete elliptic operator, numerical calculus and
//! data smoothing.

mod calculus;
mod grid;
mod operator;
mod smoothing;

pub use calculus::{differentiate, h1_seminorm, integrate, integrate_cumulative, second_derivative};
#[allow(unused_imports)]
pub(crate) use calculus::derivative_values;
pub use grid::{BoundaryCondition, BoundaryData, BoundaryKind, Grid, SampledField};
pub use operator::EllipticOperator;
pub use smoothing::{excise_and_interpolate, penalized_fit, smooth_to_h2, spline_fit, SmoothingReport};
