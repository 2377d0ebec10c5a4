use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;

use super::admissible::{AdmissibleSet, Pin};
use super::basis::RbfBasis;
use super::data::{
    compute_w, compute_w_tilde, data_rows, detect_zeros, w_diagnostics, DataRow, ObservationSet, WDiagnostics,
};
use crate::discretization::{differentiate, excise_and_interpolate, integrate_cumulative, SampledField};
use crate::error::{invalid, Error, Result};
use crate::forward::{solve_forward, ProblemSpec, SolutionHistory};
use crate::linalg::{singular_values, tsvd_solve};

/// The reconstruction schemes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// Solve for `a` and `q` together in the radial basis.
    Parallel,
    /// Eliminate `q`, integrate for `a`, then solve pointwise for `q`.
    EliminateQ,
    /// Eliminate `a'`, divide for `q`, then fit `a` in the radial basis.
    EliminateA,
    /// Recover `q` alone from one experiment with `a` known.
    PotentialOnly,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [Scheme::Parallel, Scheme::EliminateQ, Scheme::EliminateA, Scheme::PotentialOnly];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Parallel => "parallel",
            Scheme::EliminateQ => "eliminate-q",
            Scheme::EliminateA => "eliminate-a",
            Scheme::PotentialOnly => "potential-only",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }

    pub fn uses_second_experiment(self) -> bool {
        self != Scheme::PotentialOnly
    }
}

/// Numerical knobs shared by all schemes.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeSettings {
    /// Time steps of every forward solve.
    pub n_steps: usize,
    /// Relative singular-value cutoff; `None` picks `1e-12` for exact data
    /// and `10 δ` otherwise.
    pub tsvd_cutoff: Option<f64>,
    /// `|W| < zero_threshold · ‖W‖∞` counts as a zero.
    pub zero_threshold: f64,
    pub excision_half_width: usize,
    /// Smoothing parameter of the spline that refills excised segments.
    pub excision_lambda: f64,
    /// Pointwise division by `f(g)` only where `|f(g)| ≥ reaction_floor · ‖f(g)‖∞`.
    pub reaction_floor: f64,
    /// Warn in the eliminate-a scheme when `‖W̃‖∞ / min |W|` exceeds this.
    pub conditioning_threshold: f64,
    /// Lower bound on `|g|` for the potential-only scheme.
    pub potential_floor: f64,
    /// Discrepancy factor τ.
    pub tau: f64,
    pub k_max: usize,
    /// Effective noise level used by the stopping rule when δ = 0.
    pub residual_floor: f64,
}

impl Default for SchemeSettings {
    fn default() -> Self {
        Self {
            n_steps: 2048,
            tsvd_cutoff: None,
            zero_threshold: 1e-3,
            excision_half_width: 7,
            excision_lambda: 1e-8,
            reaction_floor: 0.05,
            conditioning_threshold: 1e4,
            potential_floor: 1e-3,
            tau: 1.1,
            k_max: 20,
            residual_floor: 1e-3,
        }
    }
}

/// Everything that stays fixed during a reconstruction.
#[derive(Debug, Clone)]
pub struct InverseProblem {
    /// First experiment; its `a`, `q` are placeholders replaced by iterates.
    pub u: ProblemSpec,
    /// Second experiment (unused by the potential-only scheme).
    pub v: ProblemSpec,
    pub observations: ObservationSet,
    pub basis: RbfBasis,
    pub admissible: AdmissibleSet,
    pub settings: SchemeSettings,
}

impl InverseProblem {
    pub fn new(
        u: ProblemSpec,
        v: ProblemSpec,
        observations: ObservationSet,
        basis: RbfBasis,
        admissible: AdmissibleSet,
        settings: SchemeSettings,
    ) -> Result<Self> {
        u.validate()?;
        v.validate()?;
        u.grid.check_same(&v.grid, "second experiment")?;
        u.grid.check_same(observations.g_u.grid(), "observation g_u")?;
        u.grid.check_same(basis.grid(), "radial basis")?;
        admissible.validate()?;
        if settings.n_steps < 8 {
            return Err(invalid!("need at least 8 time steps, got {}", settings.n_steps));
        }
        Ok(Self { u, v, observations, basis, admissible, settings })
    }

    pub fn tsvd_cutoff(&self) -> f64 {
        self.settings.tsvd_cutoff.unwrap_or(if self.observations.noise_level > 0.0 {
            10.0 * self.observations.noise_level
        } else {
            1e-12
        })
    }

    /// Forward solves of both experiments (or only the first) at `(a, q)`.
    pub fn forward(&self, a: &SampledField, q: &SampledField, both: bool) -> Result<ForwardPair> {
        let u = solve_forward(&self.u.with_coefficients(a.clone(), q.clone()), self.settings.n_steps)?;
        let v = if both {
            Some(solve_forward(&self.v.with_coefficients(a.clone(), q.clone()), self.settings.n_steps)?)
        } else {
            None
        };
        Ok(ForwardPair { u, v })
    }

    fn rows_u(&self) -> Vec<DataRow> {
        data_rows(&self.observations.filtered_u, &self.u.left, &self.u.right, self.u.reaction, self.u.final_time)
    }

    fn rows_v(&self) -> Vec<DataRow> {
        data_rows(&self.observations.filtered_v, &self.v.left, &self.v.right, self.v.reaction, self.v.final_time)
    }
}

/// Forward solutions at the current iterate.
#[derive(Debug, Clone)]
pub struct ForwardPair {
    pub u: SolutionHistory,
    pub v: Option<SolutionHistory>,
}

impl ForwardPair {
    fn v(&self) -> Result<&SolutionHistory> {
        self.v.as_ref().ok_or_else(|| invalid!("scheme needs the second experiment"))
    }
}

/// Outcome of one application of a scheme.
#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub a: SampledField,
    pub q: SampledField,
    pub diagnostics: StepDiagnostics,
}

#[derive(Debug, Clone, Default)]
pub struct StepDiagnostics {
    /// Singular values of the `a`-block for the first experiment (parallel).
    pub singular_values_a: Vec<f64>,
    /// Singular values of the `q`-block for the first experiment (parallel).
    pub singular_values_q: Vec<f64>,
    /// Singular triplets kept by the truncated SVD.
    pub rank: usize,
    pub w: Option<WDiagnostics>,
    /// Excised index ranges (inclusive).
    pub excised: Vec<(usize, usize)>,
    /// Nodes filled by fitting or extrapolation instead of pointwise division.
    pub basis_filled: usize,
    pub warnings: Vec<String>,
}

/// `r(x, T, u(x, T)) - D_t^α u(x, T)` for one experiment.
fn source_minus_rate(spec: &ProblemSpec, hist: &SolutionHistory) -> Vec<f64> {
    let r = spec.forcing.sample(&spec.grid, spec.final_time, hist.final_state().values());
    r.iter().zip(hist.caputo_at_final.values()).map(|(r, d)| r - d).collect()
}

/// The two elimination right-hand sides
///
/// ```text
/// φ = g_v (D_t^α u - r_u) - g_u (D_t^α v - r_v)
/// ψ = (r_u - D_t^α u) g_v' - (r_v - D_t^α v) g_u'
/// ```
///
/// with `(a W)' = φ` and `q W = a W̃ - ψ`, `W̃ = g_u' g_v'' - g_v' g_u''`.
pub fn rhs_fields(problem: &InverseProblem, fwd: &ForwardPair) -> Result<(SampledField, SampledField)> {
    let obs = &problem.observations;
    let ru = source_minus_rate(&problem.u, &fwd.u);
    let rv = source_minus_rate(&problem.v, fwd.v()?);
    let (gu, gv) = (obs.filtered_u.values(), obs.filtered_v.values());
    let du = differentiate(&obs.filtered_u);
    let dv = differentiate(&obs.filtered_v);
    let n = gu.len();
    let phi: Vec<f64> = (0..n).map(|i| -gv[i] * ru[i] + gu[i] * rv[i]).collect();
    let psi: Vec<f64> = (0..n).map(|i| ru[i] * dv.values()[i] - rv[i] * du.values()[i]).collect();
    let grid = *obs.filtered_u.grid();
    Ok((SampledField::new(grid, phi)?, SampledField::new(grid, psi)?))
}

/// Holes of half-width `hw` around interior zeros, merged when they touch;
/// zeros within `hw` of an end become one-sided end zones `(left, right)`.
fn zero_regions(zeros: &[usize], n: usize, hw: usize) -> (Vec<(usize, usize)>, Vec<usize>, usize, usize) {
    let mut holes: Vec<(usize, usize)> = Vec::new();
    let mut pins = Vec::new();
    let (mut left, mut right) = (0usize, 0usize);
    for &z in zeros {
        if z <= hw {
            left = left.max(z + hw + 1);
        } else if z + hw >= n - 1 {
            right = right.max(n - z + hw);
        } else {
            pins.push(z);
            let (a, b) = (z - hw, z + hw);
            match holes.last_mut() {
                Some(last) if a <= last.1 + 1 => last.1 = b,
                _ => holes.push((a, b)),
            }
        }
    }
    (holes, pins, left.min(n / 4), right.min(n / 4))
}

/// Replace `len` values at an end by a least-squares quadratic through the
/// next `2 len + 3` values.
fn extrapolate_end(v: &mut [f64], len: usize, at_left: bool) {
    if len == 0 {
        return;
    }
    let n = v.len();
    let m = 2 * len + 3;
    let idx: Vec<usize> = if at_left { (len..len + m).collect() } else { (n - len - m..n - len).collect() };
    // fit c0 + c1 t + c2 t² in local coordinates t = i - origin
    let origin = idx[0] as f64;
    let mut ata = [[0.0f64; 3]; 3];
    let mut atb = [0.0f64; 3];
    for &i in &idx {
        let t = i as f64 - origin;
        let p = [1.0, t, t * t];
        for r in 0..3 {
            for c in 0..3 {
                ata[r][c] += p[r] * p[c];
            }
            atb[r] += p[r] * v[i];
        }
    }
    let m3 = nalgebra::Matrix3::from_fn(|r, c| ata[r][c]);
    let c = m3.lu().solve(&nalgebra::Vector3::new(atb[0], atb[1], atb[2])).unwrap_or_else(nalgebra::Vector3::zeros);
    let range: Vec<usize> = if at_left { (0..len).collect() } else { (n - len..n).collect() };
    for i in range {
        let t = i as f64 - origin;
        v[i] = c[0] + c[1] * t + c[2] * t * t;
    }
}

/// Replace the end values of `w` by cubic extrapolation from the interior.
///
/// One-sided derivatives at the ends carry a different error constant than
/// the central ones; the resulting kink in `a = Φ / W` would be amplified by
/// the second differences of the `q` update.
fn smooth_ends(mut w: SampledField) -> SampledField {
    let v = w.values_mut();
    let n = v.len();
    v[0] = 4.0 * v[1] - 6.0 * v[2] + 4.0 * v[3] - v[4];
    v[n - 1] = 4.0 * v[n - 2] - 6.0 * v[n - 3] + 4.0 * v[n - 4] - v[n - 5];
    w
}

/// Divide `num` by `w` away from the zeros of `w`; excised holes are refilled
/// by a smoothing spline and end zones by extrapolation.
fn divide_with_excision(
    num: &SampledField,
    w: &SampledField,
    problem: &InverseProblem,
    diagnostics: &mut StepDiagnostics,
    pin_numerator: bool,
) -> Result<SampledField> {
    let n = w.len();
    let s = &problem.settings;
    let zeros = detect_zeros(w, s.zero_threshold);
    let (holes, pins, left, right) = zero_regions(&zeros, n, s.excision_half_width);
    let covered: usize = holes.iter().map(|(a, b)| b - a + 1).sum::<usize>() + left + right;
    if 4 * covered > n {
        return Err(Error::DegenerateW(alloc::format!(
            "zeros of W cover {covered} of {n} nodes; more than the excision cap allows"
        )));
    }
    let num = if pin_numerator && !(holes.is_empty() && pins.is_empty()) {
        excise_and_interpolate(num, &holes, &pins, s.excision_lambda)?
    } else {
        num.clone()
    };
    let mut out: Vec<f64> = num.values().iter().zip(w.values()).map(|(a, b)| if *b != 0.0 { a / b } else { 0.0 }).collect();
    // values inside holes are replaced below; keep them finite meanwhile
    for &(a, b) in &holes {
        for v in &mut out[a..=b] {
            *v = 0.0;
        }
    }
    let mut field = SampledField::new(*w.grid(), out)?;
    if !holes.is_empty() {
        field = excise_and_interpolate(&field, &holes, &[], s.excision_lambda)?;
    }
    extrapolate_end(field.values_mut(), left, true);
    extrapolate_end(field.values_mut(), right, false);
    diagnostics.excised = holes;
    if left > 0 {
        diagnostics.excised.insert(0, (0, left - 1));
    }
    if right > 0 {
        diagnostics.excised.push((n - right, n - 1));
    }
    Ok(field)
}

/// Pointwise `q` from one experiment given `a`:
/// `q = (r - D_t^α u + constant - G a) / f(g)` where `|f(g)|` is large
/// enough, radial-basis least squares elsewhere.
fn pointwise_q(
    problem: &InverseProblem,
    rows: &[DataRow],
    rate: &[f64],
    a: &SampledField,
    floor: f64,
    diagnostics: &mut StepDiagnostics,
) -> Result<SampledField> {
    let n = a.len();
    let fmax = rows.iter().fold(0.0f64, |m, r| m.max(r.q_coefficient.abs()));
    let mut q = vec![0.0; n];
    let mut good = vec![false; n];
    // boundary rows are only first-order consistent on data; those nodes are
    // filled from the basis
    for r in rows.iter().filter(|r| r.node > 0 && r.node + 1 < n) {
        if r.q_coefficient.abs() >= floor * fmax && r.q_coefficient != 0.0 {
            q[r.node] = (rate[r.node] + r.constant - r.apply_a(a.values())) / r.q_coefficient;
            good[r.node] = true;
        }
    }
    let q = SampledField::new(*a.grid(), q)?;
    let missing = good.iter().filter(|g| !**g).count();
    diagnostics.basis_filled = missing;
    if missing == 0 {
        return Ok(q);
    }
    let c = problem.basis.fit(&q, Some(&good), problem.tsvd_cutoff())?;
    let fill = problem.basis.evaluate(&c);
    let mut out = q.into_values();
    for i in 0..n {
        if !good[i] {
            out[i] = fill.values()[i];
        }
    }
    SampledField::new(*a.grid(), out)
}

/// Integration constant and cumulative integral for `(a W)' = φ`.
fn integrate_aw(phi: &SampledField, w: &SampledField, pin: Pin) -> SampledField {
    let cum = integrate_cumulative(phi);
    let n = w.len();
    match pin {
        Pin::Left(a0) => cum.map(|v| a0 * w.values()[0] + v),
        Pin::Right(al) => {
            let total = cum.values()[n - 1];
            cum.map(|v| al * w.values()[n - 1] - (total - v))
        }
        // W(0) = 0 when both experiments share the left boundary values
        Pin::None => cum,
    }
}

pub fn step_eliminate_q(problem: &InverseProblem, fwd: &ForwardPair) -> Result<StepOutcome> {
    let obs = &problem.observations;
    let mut diagnostics = StepDiagnostics::default();
    let w = smooth_ends(compute_w(&obs.filtered_u, &obs.filtered_v)?);
    diagnostics.w = Some(w_diagnostics(&obs.filtered_u, &obs.filtered_v, problem.settings.zero_threshold)?);
    let (phi, _) = rhs_fields(problem, fwd)?;
    let aw = integrate_aw(&phi, &w, problem.admissible.pin);
    let a = divide_with_excision(&aw, &w, problem, &mut diagnostics, true)?;
    let (a, _) = problem.admissible.project(&a, &a);
    let rate = source_minus_rate(&problem.u, &fwd.u);
    let q = pointwise_q(problem, &problem.rows_u(), &rate, &a, problem.settings.reaction_floor, &mut diagnostics)?;
    let (a, q) = problem.admissible.project(&a, &q);
    Ok(StepOutcome { a, q, diagnostics })
}

pub fn step_eliminate_a(problem: &InverseProblem, a_k: &SampledField, fwd: &ForwardPair) -> Result<StepOutcome> {
    let obs = &problem.observations;
    let mut diagnostics = StepDiagnostics::default();
    let w = compute_w(&obs.filtered_u, &obs.filtered_v)?;
    let wd = w_diagnostics(&obs.filtered_u, &obs.filtered_v, problem.settings.zero_threshold)?;
    let w_tilde = compute_w_tilde(&obs.filtered_u, &obs.filtered_v)?;
    let (_, psi) = rhs_fields(problem, fwd)?;
    let min_w = w.values().iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
    let cond = if min_w > 0.0 { w_tilde.sup_norm() / min_w } else { f64::INFINITY };
    if cond > problem.settings.conditioning_threshold {
        diagnostics.warnings.push(alloc::format!(
            "‖W̃‖∞/min|W| = {cond:.3e} exceeds {:.1e}; q update is poorly conditioned",
            problem.settings.conditioning_threshold
        ));
    }
    diagnostics.w = Some(wd);
    let num = SampledField::new(
        *w.grid(),
        (0..w.len()).map(|i| a_k.values()[i] * w_tilde.values()[i] - psi.values()[i]).collect(),
    )?;
    let mut q = divide_with_excision(&num, &w, problem, &mut diagnostics, false)?;
    // one-sided second differences at the ends are only first order
    extrapolate_end(q.values_mut(), 1, true);
    extrapolate_end(q.values_mut(), 1, false);

    // a from both experiments given q, in the radial basis
    let basis = &problem.basis;
    let pa = PinnedA::new(basis, problem.admissible.pin);
    let blocks = [
        (problem.rows_u(), source_minus_rate(&problem.u, &fwd.u)),
        (problem.rows_v(), source_minus_rate(&problem.v, fwd.v()?)),
    ];
    let mut rows_g: Vec<Vec<f64>> = Vec::new();
    let mut rhs = Vec::new();
    for (rows, rate) in &blocks {
        for r in rows {
            let wt = row_weight(r, basis.grid());
            rows_g.push(pa.cols.iter().map(|c| wt * r.apply_a(c)).collect());
            rhs.push(
                wt * (rate[r.node] + r.constant - r.q_coefficient * q.values()[r.node] - r.apply_a(&pa.offset)),
            );
        }
    }
    let m = DMatrix::from_fn(rows_g.len(), pa.cols.len(), |i, j| rows_g[i][j]);
    let sol = tsvd_solve(&m, &rhs, problem.tsvd_cutoff())?;
    diagnostics.rank = sol.rank;
    let a = pa.evaluate(*basis.grid(), &sol.coefficients)?;
    let (a, q) = problem.admissible.project(&a, &q);
    Ok(StepOutcome { a, q, diagnostics })
}

/// Least-squares weight of a data row: impedance rows are scaled back from
/// `2/h` times a flux balance, whose consistency error is only `O(h)`.
fn row_weight(row: &DataRow, grid: &crate::discretization::Grid) -> f64 {
    if row.node == 0 || row.node + 1 == grid.n_nodes() {
        0.5 * grid.spacing()
    } else {
        1.0
    }
}

/// Parametrization `a = offset + Σ c_j cols_j` of the radial-basis span
/// that satisfies the pinned boundary value exactly.
struct PinnedA {
    cols: Vec<Vec<f64>>,
    offset: Vec<f64>,
}

impl PinnedA {
    fn new(basis: &RbfBasis, pin: Pin) -> Self {
        let n = basis.grid().n_nodes();
        let all = || (0..basis.len()).map(|j| basis.column(j).to_vec());
        let (node, value) = match pin {
            Pin::Left(v) => (0, v),
            Pin::Right(v) => (n - 1, v),
            Pin::None => return Self { cols: all().collect(), offset: vec![0.0; n] },
        };
        // anchor on the function largest at the pinned node
        let k = (0..basis.len()).max_by(|&i, &j| basis.column(i)[node].total_cmp(&basis.column(j)[node])).unwrap_or(0);
        let bk = basis.column(k);
        let cols = (0..basis.len())
            .filter(|&j| j != k)
            .map(|j| {
                let r = basis.column(j)[node] / bk[node];
                basis.column(j).iter().zip(bk).map(|(b, c)| b - r * c).collect()
            })
            .collect();
        let offset = bk.iter().map(|c| value / bk[node] * c).collect();
        Self { cols, offset }
    }

    fn evaluate(&self, grid: crate::discretization::Grid, c: &[f64]) -> Result<SampledField> {
        let mut out = self.offset.clone();
        for (cj, col) in c.iter().zip(&self.cols) {
            for (o, b) in out.iter_mut().zip(col) {
                *o += cj * b;
            }
        }
        SampledField::new(grid, out)
    }
}

pub fn step_parallel(problem: &InverseProblem, fwd: &ForwardPair) -> Result<StepOutcome> {
    let basis = &problem.basis;
    let nb = basis.len();
    let mut diagnostics = StepDiagnostics::default();
    let blocks = [
        (problem.rows_u(), source_minus_rate(&problem.u, &fwd.u)),
        (problem.rows_v(), source_minus_rate(&problem.v, fwd.v()?)),
    ];
    let pa = PinnedA::new(basis, problem.admissible.pin);
    let mut a_rows: Vec<Vec<f64>> = Vec::new();
    let mut q_rows: Vec<Vec<f64>> = Vec::new();
    let mut rhs = Vec::new();
    // the unconstrained blocks of the first experiment, for the spectra
    let mut a1: Vec<Vec<f64>> = Vec::new();
    let mut q1: Vec<Vec<f64>> = Vec::new();
    for (k, (rows, rate)) in blocks.iter().enumerate() {
        for r in rows {
            let wt = row_weight(r, basis.grid());
            a_rows.push(pa.cols.iter().map(|c| wt * r.apply_a(c)).collect());
            let qr: Vec<f64> = (0..nb).map(|j| wt * r.q_coefficient * basis.column(j)[r.node]).collect();
            rhs.push(wt * (rate[r.node] + r.constant - r.apply_a(&pa.offset)));
            if k == 0 {
                a1.push((0..nb).map(|j| wt * r.apply_a(basis.column(j))).collect());
                q1.push(qr.clone());
            }
            q_rows.push(qr);
        }
    }
    diagnostics.singular_values_a = singular_values(&DMatrix::from_fn(a1.len(), nb, |i, j| a1[i][j]));
    diagnostics.singular_values_q = singular_values(&DMatrix::from_fn(q1.len(), nb, |i, j| q1[i][j]));

    // block column equilibration keeps the q-block from being truncated
    // merely because it is smaller
    let fro = |rows: &Vec<Vec<f64>>| libm::sqrt(rows.iter().flatten().map(|v| v * v).sum::<f64>());
    let (sa, sq) = (fro(&a_rows).max(f64::MIN_POSITIVE), fro(&q_rows).max(f64::MIN_POSITIVE));
    let na = pa.cols.len();
    let m = DMatrix::from_fn(a_rows.len(), na + nb, |i, j| if j < na { a_rows[i][j] / sa } else { q_rows[i][j - na] / sq });
    let sol = tsvd_solve(&m, &rhs, problem.tsvd_cutoff())?;
    diagnostics.rank = sol.rank;
    let ca: Vec<f64> = sol.coefficients[..na].iter().map(|v| v / sa).collect();
    let cq: Vec<f64> = sol.coefficients[na..].iter().map(|v| v / sq).collect();
    let a = pa.evaluate(*basis.grid(), &ca)?;
    let (a, q) = problem.admissible.project(&a, &basis.evaluate(&cq));
    Ok(StepOutcome { a, q, diagnostics })
}

/// `q⁺ = ((a g')' + r - D_t^α u) / f(g)` from the first experiment with `a`
/// known.
pub fn step_potential_only(problem: &InverseProblem, a: &SampledField, fwd: &ForwardPair) -> Result<StepOutcome> {
    let g = &problem.observations.filtered_u;
    let gmin = g.values().iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
    if gmin < problem.settings.potential_floor {
        return Err(Error::Domain(alloc::format!(
            "|g| drops to {gmin:.3e}, below the floor {:.1e}",
            problem.settings.potential_floor
        )));
    }
    let mut diagnostics = StepDiagnostics::default();
    let rows = problem.rows_u();
    let rate = source_minus_rate(&problem.u, &fwd.u);
    let n = g.len();
    let mut q = vec![0.0; n];
    let mut have = vec![false; n];
    for r in rows.iter().filter(|r| r.node > 0 && r.node + 1 < n) {
        q[r.node] = (rate[r.node] + r.constant - r.apply_a(a.values())) / r.q_coefficient;
        have[r.node] = true;
    }
    // end nodes: no equation (Dirichlet) or a first-order one (impedance)
    q[0] = 3.0 * q[1] - 3.0 * q[2] + q[3];
    q[n - 1] = 3.0 * q[n - 2] - 3.0 * q[n - 3] + q[n - 4];
    diagnostics.basis_filled = have.iter().filter(|h| !**h).count();
    let q = SampledField::new(*g.grid(), q)?;
    let q = if problem.admissible.q_radius.is_finite() { problem.admissible.project(a, &q).1 } else { q };
    Ok(StepOutcome { a: a.clone(), q, diagnostics })
}

/// One application of `scheme` at the iterate `(a, q)` whose forward
/// solutions are `fwd`.
pub fn apply_scheme(
    problem: &InverseProblem,
    scheme: Scheme,
    a: &SampledField,
    fwd: &ForwardPair,
) -> Result<StepOutcome> {
    match scheme {
        Scheme::Parallel => step_parallel(problem, fwd),
        Scheme::EliminateQ => step_eliminate_q(problem, fwd),
        Scheme::EliminateA => step_eliminate_a(problem, a, fwd),
        Scheme::PotentialOnly => step_potential_only(problem, a, fwd),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_regions_split_interior_and_ends() {
        let (holes, pins, l, r) = zero_regions(&[3, 50, 56, 97], 101, 7);
        assert_eq!(holes, alloc::vec![(43, 63)]);
        assert_eq!(pins, alloc::vec![50, 56]);
        assert_eq!(l, 11);
        assert_eq!(r, 11);
    }

    #[test]
    fn extrapolation_reproduces_quadratics() {
        let mut v: Vec<f64> = (0..40).map(|i| 2.0 + 0.5 * i as f64 - 0.01 * (i * i) as f64).collect();
        let want = v.clone();
        for k in 0..5 {
            v[k] = 99.0;
            v[39 - k] = -99.0;
        }
        extrapolate_end(&mut v, 5, true);
        extrapolate_end(&mut v, 5, false);
        for (a, b) in v.iter().zip(&want) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn scheme_names_round_trip() {
        for s in Scheme::ALL {
            assert_eq!(Scheme::from_name(s.name()), Some(s));
        }
        assert_eq!(Scheme::from_name("nope"), None);
    }
}
