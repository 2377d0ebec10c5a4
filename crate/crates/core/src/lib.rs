//! Forward and inverse solvers for the one-dimensional time-fractional
//! reaction–diffusion equation
//!
//! ```text
//! D_t^α u - (a u')' + q f(u) = r,   0 < x < L, 0 < t ≤ T,
//! ```
//!
//! and fixed-point reconstruction of the coefficient pair `(a, q)` from
//! final-time observations.
//!
//! The crate is `no_std` and needs only `alloc`; file formats, plotting and
//! the command-line driver live in the `invdiff` crate.
#![no_std]
#![cfg_attr(test, allow(unused_imports))]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod discretization;
pub mod eigen;
pub mod error;
pub mod forward;
pub mod inversion;
pub mod linalg;
pub mod noise;
pub mod quad;
pub mod special;

pub use error::{Error, Result};
