//! Sturm–Liouville spectra, the Liouville transformation and the
//! Gel'fand–Levitan transformation kernel.

mod diagnostics;
mod gelfand_levitan;
mod liouville;
mod system;
mod tridiag;

pub use diagnostics::{eigenvalue_asymptotics_check, lipschitz_diagnostics, LipschitzReport, DIAGNOSTIC_MODES};
pub use gelfand_levitan::{gl_kernel, GLKernel};
pub use liouville::{liouville_transform, CanonicalForm};
pub use system::{eigen_of_operator, mass_inner, solve_eigen, EigenSystem};
