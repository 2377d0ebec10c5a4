//! Time stepping for `D_t^α u - (a u')' + q f(u) = r`.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::discretization::{BoundaryCondition, BoundaryKind, EllipticOperator, Grid, SampledField};
use crate::eigen::{eigen_of_operator, mass_inner};
use crate::error::{invalid, Error, Result};
use crate::special::{gamma, ml};

const SWEEP_TOL: f64 = 1e-10;
const MAX_SWEEPS: usize = 25;

/// Reaction nonlinearity `f(u)` multiplying the potential.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Reaction {
    #[default]
    Identity,
    /// `u (1 - u)`
    Fisher,
    /// `u² (1 - u)`
    Zeldovich,
}

impl Reaction {
    pub fn eval(self, u: f64) -> f64 {
        match self {
            Reaction::Identity => u,
            Reaction::Fisher => u * (1.0 - u),
            Reaction::Zeldovich => u * u * (1.0 - u),
        }
    }

    pub fn is_linear(self) -> bool {
        self == Reaction::Identity
    }

    pub fn apply(self, field: &SampledField) -> SampledField {
        field.map(|u| self.eval(u))
    }
}

pub type ForcingFn = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;

/// Source term `r(x, t, u)`.
#[derive(Clone, Default)]
pub enum Forcing {
    #[default]
    Zero,
    Function(ForcingFn),
}

impl Forcing {
    pub fn from_fn(f: impl Fn(f64, f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        Forcing::Function(Arc::new(f))
    }

    pub fn eval(&self, x: f64, t: f64, u: f64) -> f64 {
        match self {
            Forcing::Zero => 0.0,
            Forcing::Function(f) => f(x, t, u),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Forcing::Zero)
    }

    /// `r(·, t, u(·))` on the grid.
    pub fn sample(&self, grid: &Grid, t: f64, u: &[f64]) -> Vec<f64> {
        match self {
            Forcing::Zero => vec![0.0; u.len()],
            Forcing::Function(f) => (0..u.len()).map(|i| f(grid.node(i), t, u[i])).collect(),
        }
    }
}

impl fmt::Debug for Forcing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Forcing::Zero => f.write_str("Zero"),
            Forcing::Function(_) => f.write_str("Function(..)"),
        }
    }
}

/// Complete definition of one forward problem.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    pub alpha: f64,
    pub final_time: f64,
    pub grid: Grid,
    pub a: SampledField,
    pub q: SampledField,
    pub u0: SampledField,
    pub left: BoundaryCondition,
    pub right: BoundaryCondition,
    pub reaction: Reaction,
    pub forcing: Forcing,
}

impl ProblemSpec {
    /// Parabolic problem (`α = 1`, `T = 1`) with identity reaction and no source.
    pub fn new(
        a: SampledField,
        q: SampledField,
        u0: SampledField,
        left: BoundaryCondition,
        right: BoundaryCondition,
    ) -> Self {
        let grid = *a.grid();
        Self {
            alpha: 1.0,
            final_time: 1.0,
            grid,
            a,
            q,
            u0,
            left,
            right,
            reaction: Reaction::Identity,
            forcing: Forcing::Zero,
        }
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_final_time(mut self, t: f64) -> Self {
        self.final_time = t;
        self
    }

    pub fn with_reaction(mut self, reaction: Reaction) -> Self {
        self.reaction = reaction;
        self
    }

    pub fn with_forcing(mut self, forcing: Forcing) -> Self {
        self.forcing = forcing;
        self
    }

    /// Same problem with different coefficients.
    pub fn with_coefficients(&self, a: SampledField, q: SampledField) -> Self {
        Self { a, q, ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(invalid!("alpha must lie in (0, 1], got {}", self.alpha));
        }
        if !(self.final_time > 0.0 && self.final_time.is_finite()) {
            return Err(invalid!("final time must be positive, got {}", self.final_time));
        }
        self.grid.check_same(self.a.grid(), "diffusion coefficient")?;
        self.grid.check_same(self.q.grid(), "potential")?;
        self.grid.check_same(self.u0.grid(), "initial value")?;
        self.left.validate()?;
        self.right.validate()?;
        Ok(())
    }

    /// Largest mismatch between `u0` and Dirichlet data at `t = 0`.
    pub fn compatibility_gap(&self) -> f64 {
        let n = self.grid.n_nodes();
        let mut gap = 0.0f64;
        if self.left.is_dirichlet() {
            gap = gap.max((self.u0.values()[0] - self.left.data.eval(0.0)).abs());
        }
        if self.right.is_dirichlet() {
            gap = gap.max((self.u0.values()[n - 1] - self.right.data.eval(0.0)).abs());
        }
        gap
    }

    fn operator(&self) -> Result<EllipticOperator> {
        let q = if self.reaction.is_linear() { self.q.clone() } else { SampledField::constant(self.grid, 0.0) };
        EllipticOperator::assemble(&self.grid, &self.a, &q, &self.left, &self.right)
    }
}

/// Time integrator for `α = 1`; `α < 1` always uses the L1 scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TimeScheme {
    #[default]
    ImplicitEuler,
    /// Crank–Nicolson with four implicit-Euler half steps at start-up.
    CrankNicolson,
}

/// States of a forward solve and `D_t^α u(·, T)`.
#[derive(Debug, Clone)]
pub struct SolutionHistory {
    pub times: Vec<f64>,
    pub states: Vec<SampledField>,
    /// `D_t^α u(·, T)` from the equation: `(a u')' - q f(u) + r` at `T`.
    pub caputo_at_final: SampledField,
    /// `D_t^α u(·, T)` from the discrete time derivative.
    pub caputo_direct: SampledField,
    /// `‖caputo_at_final - caputo_direct‖∞`.
    pub caputo_discrepancy: f64,
    /// Mismatch between `u0` and Dirichlet data at `t = 0`.
    pub compatibility_gap: f64,
}

impl SolutionHistory {
    pub fn final_state(&self) -> &SampledField {
        self.states.last().expect("history has at least the initial state")
    }

    /// State at the stored time closest to `t`.
    pub fn state_near(&self, t: f64) -> &SampledField {
        let i = self
            .times
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - t).abs().total_cmp(&(b.1 - t).abs()))
            .map(|(i, _)| i)
            .unwrap_or(0);
        &self.states[i]
    }
}

/// L1 weights `b_k = (k+1)^{1-α} - k^{1-α}`.
pub fn l1_weights(alpha: f64, m: usize) -> Vec<f64> {
    let p = 1.0 - alpha;
    (0..m).map(|k| libm::pow(k as f64 + 1.0, p) - libm::pow(k as f64, p)).collect()
}

struct Stepper<'a> {
    spec: &'a ProblemSpec,
    op: EllipticOperator,
    grid: Grid,
}

impl Stepper<'_> {
    /// `q f(u)` on free rows, or zero for the linear case (folded into the operator).
    fn reaction_term(&self, u: &[f64]) -> Vec<f64> {
        if self.spec.reaction.is_linear() {
            return vec![0.0; u.len()];
        }
        let q = self.spec.q.values();
        u.iter().zip(q).map(|(v, qi)| qi * self.spec.reaction.eval(*v)).collect()
    }

    fn needs_sweeps(&self) -> bool {
        !self.spec.reaction.is_linear() || !self.spec.forcing.is_zero()
    }

    /// Solve `(shift + A) u = base + w_new (r(t, u) + b(t) - N(u))` with
    /// Dirichlet rows set from the data, iterating on the lagged terms.
    fn implicit_step(&self, shift: f64, base: &[f64], w_new: f64, t: f64, guess: &[f64], step: usize) -> Result<Vec<f64>> {
        let n = base.len();
        let b = self.op.boundary_rhs(t);
        let build = |u: &[f64]| -> Vec<f64> {
            let r = self.spec.forcing.sample(&self.grid, t, u);
            let nl = self.reaction_term(u);
            (0..n)
                .map(|i| {
                    if self.op.is_dirichlet_row(i) {
                        b[i]
                    } else {
                        base[i] + w_new * (r[i] + b[i] - nl[i])
                    }
                })
                .collect()
        };
        let mut u = self.op.solve_shifted(shift, &build(guess)).map_err(|e| step_err(step, e))?;
        if !self.needs_sweeps() {
            return Ok(u);
        }
        for _ in 0..MAX_SWEEPS {
            let next = self.op.solve_shifted(shift, &build(&u)).map_err(|e| step_err(step, e))?;
            let change = next.iter().zip(&u).fold(0.0f64, |m, (a, c)| m.max((a - c).abs()));
            let scale = next.iter().fold(1.0f64, |m, v| m.max(v.abs()));
            if !change.is_finite() {
                return Err(Error::TimeStep { step, reason: "nonlinear iteration produced non-finite values".into() });
            }
            u = next;
            if change <= SWEEP_TOL * scale {
                return Ok(u);
            }
        }
        Err(Error::TimeStep { step, reason: alloc::format!("nonlinear iteration did not converge in {MAX_SWEEPS} sweeps") })
    }

    /// `-(A u) - N(u) + r + b` on equation rows.
    fn residual_rate(&self, u: &[f64], t: f64) -> Vec<f64> {
        let au = self.op.matvec(u);
        let b = self.op.boundary_rhs(t);
        let r = self.spec.forcing.sample(&self.grid, t, u);
        let nl = self.reaction_term(u);
        (0..u.len()).map(|i| -au[i] - nl[i] + r[i] + b[i]).collect()
    }
}

fn step_err(step: usize, e: Error) -> Error {
    Error::TimeStep { step, reason: alloc::format!("{e}") }
}

/// Solve with the default scheme (implicit Euler for `α = 1`, L1 otherwise).
pub fn solve_forward(spec: &ProblemSpec, n_steps: usize) -> Result<SolutionHistory> {
    solve_forward_with(spec, n_steps, TimeScheme::ImplicitEuler)
}

pub fn solve_forward_with(spec: &ProblemSpec, n_steps: usize, scheme: TimeScheme) -> Result<SolutionHistory> {
    spec.validate()?;
    if n_steps < 8 {
        return Err(invalid!("need at least 8 time steps, got {n_steps}"));
    }
    let stepper = Stepper { spec, op: spec.operator()?, grid: spec.grid };
    let dt = spec.final_time / n_steps as f64;
    let times: Vec<f64> = (0..=n_steps).map(|m| m as f64 * dt).collect();
    let mut states: Vec<Vec<f64>> = Vec::with_capacity(n_steps + 1);
    states.push(spec.u0.values().to_vec());

    if spec.alpha < 1.0 {
        let c0 = libm::pow(dt, -spec.alpha) / gamma(2.0 - spec.alpha);
        let w = l1_weights(spec.alpha, n_steps);
        let n = spec.grid.n_nodes();
        for m in 1..=n_steps {
            let prev = &states[m - 1];
            let mut base: Vec<f64> = prev.iter().map(|v| c0 * v).collect();
            for k in 1..m {
                let (hi, lo) = (&states[m - k], &states[m - k - 1]);
                let wk = c0 * w[k];
                for i in 0..n {
                    base[i] -= wk * (hi[i] - lo[i]);
                }
            }
            let u = stepper.implicit_step(c0, &base, 1.0, times[m], prev, m)?;
            states.push(u);
        }
    } else {
        match scheme {
            TimeScheme::ImplicitEuler => {
                for m in 1..=n_steps {
                    let prev = &states[m - 1];
                    let base: Vec<f64> = prev.iter().map(|v| v / dt).collect();
                    let u = stepper.implicit_step(1.0 / dt, &base, 1.0, times[m], prev, m)?;
                    states.push(u);
                }
            }
            TimeScheme::CrankNicolson => {
                // four implicit-Euler half steps cover the first two steps
                let mut u = states[0].clone();
                for s in 1..=4usize {
                    let half = 0.5 * dt;
                    let base: Vec<f64> = u.iter().map(|v| v / half).collect();
                    u = stepper.implicit_step(1.0 / half, &base, 1.0, s as f64 * half, &u, s.div_ceil(2))?;
                    if s % 2 == 0 {
                        states.push(u.clone());
                    }
                }
                for m in 3..=n_steps {
                    let prev = &states[m - 1];
                    let rate = stepper.residual_rate(prev, times[m - 1]);
                    let base: Vec<f64> = prev.iter().zip(&rate).map(|(v, r)| 2.0 * v / dt + r).collect();
                    let u = stepper.implicit_step(2.0 / dt, &base, 1.0, times[m], prev, m)?;
                    states.push(u);
                }
            }
        }
    }

    let grid = spec.grid;
    let states: Vec<SampledField> = states.into_iter().map(|v| SampledField::from_parts_unchecked(grid, v)).collect();
    let direct = caputo_direct(spec, &states, dt);
    let residual = caputo_residual(&stepper, states.last().expect("nonempty").values(), spec.final_time, &direct);
    let discrepancy = residual.sub(&direct)?.sup_norm();
    Ok(SolutionHistory {
        times,
        states,
        caputo_at_final: residual,
        caputo_direct: direct,
        caputo_discrepancy: discrepancy,
        compatibility_gap: spec.compatibility_gap(),
    })
}

/// Discrete time derivative at the last step: L1 sum for `α < 1`, backward
/// difference for `α = 1`.
fn caputo_direct(spec: &ProblemSpec, states: &[SampledField], dt: f64) -> SampledField {
    let m = states.len() - 1;
    let n = spec.grid.n_nodes();
    let mut d = vec![0.0; n];
    if spec.alpha < 1.0 {
        let c0 = libm::pow(dt, -spec.alpha) / gamma(2.0 - spec.alpha);
        let w = l1_weights(spec.alpha, m);
        for k in 0..m {
            let (hi, lo) = (states[m - k].values(), states[m - k - 1].values());
            for i in 0..n {
                d[i] += c0 * w[k] * (hi[i] - lo[i]);
            }
        }
    } else {
        let (hi, lo) = (states[m].values(), states[m - 1].values());
        for i in 0..n {
            d[i] = (hi[i] - lo[i]) / dt;
        }
    }
    SampledField::from_parts_unchecked(spec.grid, d)
}

/// Equation route on rows carrying the PDE; Dirichlet rows take the direct value.
fn caputo_residual(stepper: &Stepper<'_>, u: &[f64], t: f64, direct: &SampledField) -> SampledField {
    let rate = stepper.residual_rate(u, t);
    let v: Vec<f64> = (0..u.len())
        .map(|i| if stepper.op.is_dirichlet_row(i) { direct.values()[i] } else { rate[i] })
        .collect();
    SampledField::from_parts_unchecked(stepper.grid, v)
}

/// Both routes for `D_t^α u(·, T)` and their sup-norm discrepancy.
pub fn caputo_at_final(history: &SolutionHistory, spec: &ProblemSpec) -> Result<(SampledField, SampledField, f64)> {
    let stepper = Stepper { spec, op: spec.operator()?, grid: spec.grid };
    let m = history.states.len() - 1;
    let dt = history.times[m] - history.times[m - 1];
    let direct = caputo_direct(spec, &history.states, dt);
    let residual = caputo_residual(&stepper, history.final_state().values(), spec.final_time, &direct);
    let gap = residual.sub(&direct)?.sup_norm();
    Ok((residual, direct, gap))
}

/// Truncated eigenfunction expansion
/// `u(t) = Σ ⟨u0, φ_n⟩ E_{α,1}(-λ_n t^α) φ_n` with discrete eigenpairs,
/// evaluated at `times`.
pub fn spectral_solution(spec: &ProblemSpec, n_modes: usize, times: &[f64]) -> Result<SolutionHistory> {
    spec.validate()?;
    if !spec.left.data.is_zero() || !spec.right.data.is_zero() {
        return Err(invalid!("spectral solution needs homogeneous boundary data"));
    }
    if !spec.reaction.is_linear() || !spec.forcing.is_zero() {
        return Err(invalid!("spectral solution needs f(u) = u and r = 0"));
    }
    let op = spec.operator()?;
    let sys = eigen_of_operator(&op, n_modes)?;
    let coeffs: Vec<f64> = sys.orthonormal.iter().map(|phi| mass_inner(&spec.u0, phi)).collect();
    let n = spec.grid.n_nodes();
    let eval = |t: f64, beta_scale: bool| -> Result<Vec<f64>> {
        let mut u = vec![0.0; n];
        for ((c, phi), lam) in coeffs.iter().zip(&sys.orthonormal).zip(&sys.eigenvalues) {
            let e = ml(spec.alpha, 1.0, -lam * libm::pow(t, spec.alpha))?;
            let factor = if beta_scale { -lam * c * e } else { c * e };
            for (ui, p) in u.iter_mut().zip(phi.values()) {
                *ui += factor * p;
            }
        }
        Ok(u)
    };
    let mut states = Vec::with_capacity(times.len());
    for &t in times {
        states.push(SampledField::from_parts_unchecked(spec.grid, eval(t, false)?));
    }
    // D_t^α of each mode is -λ_n times the mode
    let caputo = SampledField::from_parts_unchecked(spec.grid, eval(spec.final_time, true)?);
    Ok(SolutionHistory {
        times: times.to_vec(),
        states,
        caputo_direct: caputo.clone(),
        caputo_at_final: caputo,
        caputo_discrepancy: 0.0,
        compatibility_gap: spec.compatibility_gap(),
    })
}

/// Short description used in error messages and metadata.
pub fn describe(spec: &ProblemSpec) -> String {
    let kind = |b: &BoundaryCondition| match b.kind {
        BoundaryKind::Dirichlet => String::from("dirichlet"),
        BoundaryKind::Impedance { gamma } => alloc::format!("impedance(gamma={gamma})"),
    };
    alloc::format!(
        "alpha={} T={} n={} left={} right={} reaction={:?}",
        spec.alpha,
        spec.final_time,
        spec.grid.n_nodes(),
        kind(&spec.left),
        kind(&spec.right),
        spec.reaction
    )
}
