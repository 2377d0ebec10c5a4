use alloc::vec::Vec;

use super::schemes::{apply_scheme, ForwardPair, InverseProblem, Scheme, StepDiagnostics};
use crate::discretization::SampledField;
use crate::error::Result;

/// Distances of an iterate from the true coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorNorms {
    pub a_sup: f64,
    pub q_sup: f64,
    pub a_l2: f64,
    pub q_l2: f64,
}

impl ErrorNorms {
    pub fn between(a: &SampledField, q: &SampledField, a_true: &SampledField, q_true: &SampledField) -> Result<Self> {
        let da = a.sub(a_true)?;
        let dq = q.sub(q_true)?;
        Ok(Self { a_sup: da.sup_norm(), q_sup: dq.sup_norm(), a_l2: da.l2_norm(), q_l2: dq.l2_norm() })
    }
}

#[derive(Debug, Clone)]
pub struct ReconstructionState {
    pub iterate: usize,
    pub a: SampledField,
    pub q: SampledField,
    /// `max_e ‖u_e(·, T; a, q) - g_e‖₂` over the experiments in use.
    pub residual: f64,
    pub errors: Option<ErrorNorms>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StopRule {
    /// Stop at the first iterate with residual below `τ δ ‖g‖₂`, or at `k_max`.
    Discrepancy,
    /// Run exactly this many steps; the discrepancy index is still recorded.
    Fixed(usize),
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub scheme: Scheme,
    /// Iterates `0..=k`, starting with the initial guess.
    pub states: Vec<ReconstructionState>,
    pub diagnostics: Vec<StepDiagnostics>,
    /// First iterate meeting the discrepancy principle, if any.
    pub stopping_index: Option<usize>,
    pub threshold: f64,
    pub k_max: usize,
    /// The residual grew on three consecutive iterations.
    pub diverging: bool,
}

impl RunReport {
    pub fn last(&self) -> &ReconstructionState {
        self.states.last().expect("a run always holds its starting state")
    }

    /// The iterate selected by the stopping rule, else the last one.
    pub fn selected(&self) -> &ReconstructionState {
        match self.stopping_index {
            Some(k) if k < self.states.len() => &self.states[k],
            _ => self.last(),
        }
    }
}

fn residual(problem: &InverseProblem, fwd: &ForwardPair) -> Result<f64> {
    let obs = &problem.observations;
    let mut r = fwd.u.final_state().sub(&obs.g_u)?.l2_norm();
    if let Some(v) = &fwd.v {
        r = r.max(v.final_state().sub(&obs.g_v)?.l2_norm());
    }
    Ok(r)
}

/// Iterate `scheme` from `(a0, q0)`.
///
/// The threshold is `τ · max(δ, residual_floor) · min_e ‖g_e‖₂`; with
/// `k_max` raised to at least `⌈ln(1/δ)⌉`.
pub fn run_scheme(
    problem: &InverseProblem,
    scheme: Scheme,
    a0: &SampledField,
    q0: &SampledField,
    truth: Option<(&SampledField, &SampledField)>,
    stop: StopRule,
) -> Result<RunReport> {
    let s = &problem.settings;
    let obs = &problem.observations;
    let both = scheme.uses_second_experiment();
    let delta = obs.noise_level;
    let mut k_max = s.k_max;
    if delta > 0.0 {
        k_max = k_max.max(libm::ceil(libm::log(1.0 / delta)) as usize);
    }
    let g_norm = if both { obs.g_u.l2_norm().min(obs.g_v.l2_norm()) } else { obs.g_u.l2_norm() };
    let threshold = s.tau * delta.max(s.residual_floor) * g_norm;
    let n_iter = match stop {
        StopRule::Discrepancy => k_max,
        StopRule::Fixed(k) => k,
    };

    let errors = |a: &SampledField, q: &SampledField| -> Result<Option<ErrorNorms>> {
        truth.map(|(at, qt)| ErrorNorms::between(a, q, at, qt)).transpose()
    };
    let (a, q) = if scheme == Scheme::PotentialOnly {
        (a0.clone(), q0.clone())
    } else {
        problem.admissible.project(a0, q0)
    };
    let mut fwd = problem.forward(&a, &q, both)?;
    let res0 = residual(problem, &fwd)?;
    let mut states = alloc::vec![ReconstructionState { iterate: 0, errors: errors(&a, &q)?, a, q, residual: res0 }];
    let mut diagnostics = Vec::new();
    let mut stopping_index = None;
    let mut increases = 0;
    let mut diverging = false;
    for k in 1..=n_iter {
        let prev = states.last().expect("nonempty");
        let out = apply_scheme(problem, scheme, &prev.a, &fwd)?;
        fwd = problem.forward(&out.a, &out.q, both)?;
        let res = residual(problem, &fwd)?;
        if res > prev.residual {
            increases += 1;
            diverging |= increases >= 3;
        } else {
            increases = 0;
        }
        diagnostics.push(out.diagnostics);
        states.push(ReconstructionState { iterate: k, errors: errors(&out.a, &out.q)?, a: out.a, q: out.q, residual: res });
        if stopping_index.is_none() && res <= threshold {
            stopping_index = Some(k);
            if stop == StopRule::Discrepancy {
                break;
            }
        }
    }
    Ok(RunReport { scheme, states, diagnostics, stopping_index, threshold, k_max, diverging })
}
