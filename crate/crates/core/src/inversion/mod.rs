//! Fixed-point reconstruction of `(a, q)` from final-time data, the
//! discrepancy stopping rule and contractivity diagnostics.

mod admissible;
mod basis;
mod contraction;
mod data;
mod run;
mod schemes;

pub use admissible::{AdmissibleSet, Pin};
pub use basis::RbfBasis;
pub use contraction::{
    contraction_factor, phi_integral, phi_of_t, probe_pairs, triple_norm, ContractionReport, ProbePair, PHI_LATTICE,
};
pub use data::{
    compute_w, compute_w_tilde, data_rows, detect_zeros, flux_divergence, w_diagnostics, DataRow, ObservationSet,
    WDiagnostics, ILL_CONDITIONED_RATIO,
};
pub use run::{run_scheme, ErrorNorms, ReconstructionState, RunReport, StopRule};
pub use schemes::{
    apply_scheme, rhs_fields, step_eliminate_a, step_eliminate_q, step_parallel, step_potential_only, ForwardPair,
    InverseProblem, Scheme, SchemeSettings, StepDiagnostics, StepOutcome,
};
