//! Data generation, reconstructions, the Table-1 study and parameter sweeps.

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;

use invdiff_core::discretization::{differentiate, SampledField};
use invdiff_core::forward::solve_forward;
use invdiff_core::inversion::{
    contraction_factor, probe_pairs, run_scheme, w_diagnostics, ErrorNorms, InverseProblem, ObservationSet, RunReport,
    Scheme, StopRule, WDiagnostics,
};
use invdiff_core::noise::UniformNoise;

use crate::config::ExperimentConfig;
use crate::error::{CliError, Result};
use crate::output::{emit_plot, num, write_csv, write_fields_csv, write_text, Series};
use crate::setup::{admissible, scheme, settings, Setup};

/// Observations of both experiments together with the exact states.
#[derive(Debug, Clone)]
pub struct GeneratedData {
    pub setup: Setup,
    pub exact_u: SampledField,
    pub exact_v: SampledField,
    pub observations: ObservationSet,
    /// `W` of the exact data.
    pub w: WDiagnostics,
}

/// Forward-solve both experiments at the true coefficients, add seeded
/// uniform noise of level `δ` and filter.
pub fn generate_data(cfg: &ExperimentConfig) -> Result<GeneratedData> {
    let setup = Setup::build(cfg)?;
    let steps = cfg.problem.steps;
    let exact_u = solve_forward(&setup.u, steps)?.final_state().clone();
    let exact_v = solve_forward(&setup.v, steps)?.final_state().clone();
    let delta = cfg.noise.delta;
    let mut noise = UniformNoise::new(cfg.noise.seed);
    let g_u = noise.perturb(&exact_u, delta);
    let g_v = noise.perturb(&exact_v, delta);
    let observations = ObservationSet::new(g_u, g_v, delta)?;
    let w = w_diagnostics(&exact_u, &exact_v, settings(cfg).zero_threshold)?;
    Ok(GeneratedData { setup, exact_u, exact_v, observations, w })
}

pub fn write_data(dir: &Path, data: &GeneratedData) -> Result<()> {
    let obs = &data.observations;
    let w = invdiff_core::inversion::compute_w(&obs.filtered_u, &obs.filtered_v)?;
    let dw = differentiate(&w);
    write_fields_csv(
        &dir.join("data.csv"),
        &[
            ("u0", &data.setup.u.u0),
            ("v0", &data.setup.v.u0),
            ("g_u", &obs.g_u),
            ("g_v", &obs.g_v),
            ("exact_u", &data.exact_u),
            ("exact_v", &data.exact_v),
            ("filtered_u", &obs.filtered_u),
            ("filtered_v", &obs.filtered_v),
            ("W", &w),
        ],
    )?;
    emit_plot(
        "Initial values and data",
        &[("u0", &data.setup.u.u0), ("v0", &data.setup.v.u0), ("g_u", &obs.g_u), ("g_v", &obs.g_v)],
        &dir.join("data.svg"),
    )?;
    emit_plot("The functions W and W'", &[("W", &w), ("W'", &dw)], &dir.join("w.svg"))
}

pub fn inverse_problem(cfg: &ExperimentConfig, data: &GeneratedData) -> Result<InverseProblem> {
    let s = &data.setup;
    Ok(InverseProblem::new(
        s.u.clone(),
        s.v.clone(),
        data.observations.clone(),
        s.basis(cfg)?,
        admissible(cfg)?,
        settings(cfg),
    )?)
}

/// Run `scheme` from the configured start; the potential-only scheme keeps
/// the true `a`.
pub fn run_inversion(cfg: &ExperimentConfig, data: &GeneratedData, scheme: Scheme, stop: StopRule) -> Result<RunReport> {
    let problem = inverse_problem(cfg, data)?;
    let s = &data.setup;
    let a0 = if scheme == Scheme::PotentialOnly {
        s.a_act.clone()
    } else {
        SampledField::constant(s.grid, cfg.inversion.a_start)
    };
    let q0 = SampledField::constant(s.grid, cfg.inversion.q_start);
    Ok(run_scheme(&problem, scheme, &a0, &q0, Some((&s.a_act, &s.q_act)), stop)?)
}

pub fn configured_stop(cfg: &ExperimentConfig) -> StopRule {
    match cfg.inversion.iterations {
        0 => StopRule::Discrepancy,
        k => StopRule::Fixed(k),
    }
}

fn errors_or_nan(e: Option<ErrorNorms>) -> [f64; 4] {
    e.map_or([f64::NAN; 4], |e| [e.a_sup, e.q_sup, e.a_l2, e.q_l2])
}

pub fn write_run(dir: &Path, report: &RunReport, setup: &Setup) -> Result<()> {
    let rows: Vec<Vec<String>> = report
        .states
        .iter()
        .map(|s| {
            let mut r = vec![s.iterate.to_string(), num(s.residual)];
            r.extend(errors_or_nan(s.errors).iter().map(|v| num(*v)));
            r
        })
        .collect();
    write_csv(&dir.join("history.csv"), &["iter", "res", "err_a_sup", "err_q_sup", "err_a_l2", "err_q_l2"], &rows)?;
    let sel = report.selected();
    write_fields_csv(
        &dir.join("reconstruction.csv"),
        &[("a", &sel.a), ("q", &sel.q), ("a_act", &setup.a_act), ("q_act", &setup.q_act)],
    )?;
    let a_list: Vec<(String, &SampledField)> = report.states.iter().skip(1).take(5).map(|s| (format!("a_{}", s.iterate), &s.a)).collect();
    let mut a_plot: Vec<(&str, &SampledField)> = a_list.iter().map(|(n, f)| (n.as_str(), *f)).collect();
    a_plot.push(("a_act", &setup.a_act));
    emit_plot(&format!("Reconstructions of a ({})", report.scheme.name()), &a_plot, &dir.join("a.svg"))?;
    let q_list: Vec<(String, &SampledField)> = report.states.iter().skip(1).take(5).map(|s| (format!("q_{}", s.iterate), &s.q)).collect();
    let mut q_plot: Vec<(&str, &SampledField)> = q_list.iter().map(|(n, f)| (n.as_str(), *f)).collect();
    q_plot.push(("q_act", &setup.q_act));
    emit_plot(&format!("Reconstructions of q ({})", report.scheme.name()), &q_plot, &dir.join("q.svg"))?;
    if let Some(d) = report.diagnostics.first().filter(|d| !d.singular_values_a.is_empty()) {
        let n = d.singular_values_a.len().max(d.singular_values_q.len());
        let get = |v: &[f64], i: usize| v.get(i).map_or(String::new(), |x| num(*x));
        let rows: Vec<Vec<String>> =
            (0..n).map(|i| vec![i.to_string(), get(&d.singular_values_a, i), get(&d.singular_values_q, i)]).collect();
        write_csv(&dir.join("singular_values.csv"), &["index", "sigma_a", "sigma_q"], &rows)?;
    }
    write_text(&dir.join("metadata.txt"), &run_metadata(report))
}

pub fn run_metadata(report: &RunReport) -> String {
    let mut m = String::new();
    let _ = writeln!(m, "scheme = {}", report.scheme.name());
    let _ = writeln!(m, "iterations = {}", report.states.len() - 1);
    let _ = writeln!(m, "stopping_index = {}", report.stopping_index.map_or("none".to_string(), |k| k.to_string()));
    let _ = writeln!(m, "threshold = {}", num(report.threshold));
    let _ = writeln!(m, "k_max = {}", report.k_max);
    let _ = writeln!(m, "diverging = {}", report.diverging);
    let _ = writeln!(m, "final_residual = {}", num(report.last().residual));
    for (k, d) in report.diagnostics.iter().enumerate() {
        let _ = writeln!(m, "step.{}.rank = {}", k + 1, d.rank);
        if let Some(w) = &d.w {
            let _ = writeln!(m, "step.{}.w_min_ratio = {}", k + 1, num(w.min_abs_ratio));
            let _ = writeln!(m, "step.{}.w_zeros = {}", k + 1, w.zeros.len());
            let _ = writeln!(m, "step.{}.w_ill_conditioned = {}", k + 1, w.ill_conditioned);
        }
        if !d.excised.is_empty() {
            let _ = writeln!(m, "step.{}.excised = {:?}", k + 1, d.excised);
        }
        for w in &d.warnings {
            let _ = writeln!(m, "step.{}.warning = {w}", k + 1);
        }
    }
    m
}

/// The three two-coefficient schemes compared in the Table-1 study.
pub const TABLE1_SCHEMES: [Scheme; 3] = [Scheme::Parallel, Scheme::EliminateQ, Scheme::EliminateA];

pub const TABLE1_NORMS: [&str; 4] = ["‖a_n−a_act‖∞", "‖q_n−q_act‖∞", "‖a_n−a_act‖₂", "‖q_n−q_act‖₂"];

#[derive(Debug, Clone)]
pub struct Table1Entry {
    pub scheme: Scheme,
    /// `values[norm][n-1]` for iterations `n = 1..`; NaN after a failure.
    pub values: [Vec<f64>; 4],
    pub report: Option<RunReport>,
    pub failure: Option<String>,
}

#[derive(Debug, Clone)]
pub struct Table1 {
    pub iterations: usize,
    pub entries: Vec<Table1Entry>,
}

/// All three schemes on identical data for a fixed number of iterations.
/// A failing scheme is recorded in its entry; the others still run.
pub fn run_table1(cfg: &ExperimentConfig, data: &GeneratedData) -> Result<Table1> {
    let iterations = cfg.inversion.table_iterations.max(1);
    inverse_problem(cfg, data)?;
    let entries = TABLE1_SCHEMES
        .par_iter()
        .map(|&scheme| {
            let mut values: [Vec<f64>; 4] = std::array::from_fn(|_| vec![f64::NAN; iterations]);
            match run_inversion(cfg, data, scheme, StopRule::Fixed(iterations)) {
                Ok(report) => {
                    for s in report.states.iter().skip(1) {
                        let e = errors_or_nan(s.errors);
                        for (row, v) in values.iter_mut().zip(e) {
                            row[s.iterate - 1] = v;
                        }
                    }
                    let failure = report.diverging.then(|| "residual increased on three consecutive iterations".to_string());
                    Table1Entry { scheme, values, report: Some(report), failure }
                }
                Err(e) => Table1Entry { scheme, values, report: None, failure: Some(e.to_string()) },
            }
        })
        .collect();
    Ok(Table1 { iterations, entries })
}

fn scheme_title(s: Scheme) -> &'static str {
    match s {
        Scheme::Parallel => "Parallel scheme",
        Scheme::EliminateQ => "Eliminate q scheme",
        Scheme::EliminateA => "Eliminate a scheme",
        Scheme::PotentialOnly => "Potential-only scheme",
    }
}

pub fn format_table1(t: &Table1) -> String {
    let mut s = String::new();
    let _ = write!(s, "{:<22}{:<16}", "", "n");
    for n in 1..=t.iterations {
        let _ = write!(s, "{n:>10}");
    }
    s.push('\n');
    for e in &t.entries {
        for (k, row) in e.values.iter().enumerate() {
            let title = if k == 0 { scheme_title(e.scheme) } else { "" };
            let _ = write!(s, "{title:<22}{:<16}", TABLE1_NORMS[k]);
            for v in row {
                if v.is_finite() {
                    let _ = write!(s, "{v:>10.4}");
                } else {
                    let _ = write!(s, "{:>10}", "-");
                }
            }
            s.push('\n');
        }
        if let Some(f) = &e.failure {
            let _ = writeln!(s, "{:<22}note: {f}", "");
        }
    }
    s
}

/// `table1.csv`, the formatted `table1.txt` and one run directory per scheme.
pub fn write_table1(dir: &Path, t: &Table1, setup: &Setup) -> Result<()> {
    let keys = ["a_sup", "q_sup", "a_l2", "q_l2"];
    let mut rows = Vec::new();
    for e in &t.entries {
        for (k, row) in e.values.iter().enumerate() {
            for (n, v) in row.iter().enumerate() {
                rows.push(vec![e.scheme.name().to_string(), keys[k].to_string(), (n + 1).to_string(), num(*v)]);
            }
        }
    }
    write_csv(&dir.join("table1.csv"), &["scheme", "norm", "iteration", "value"], &rows)?;
    write_text(&dir.join("table1.txt"), &format_table1(t))?;
    for e in &t.entries {
        if let Some(r) = &e.report {
            let sub = dir.join(e.scheme.name());
            std::fs::create_dir_all(&sub).map_err(|err| CliError::io(&sub, err))?;
            write_run(&sub, r, setup)?;
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    FinalTime,
    Alpha,
    Delta,
}

impl SweepAxis {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "T" => Ok(Self::FinalTime),
            "alpha" => Ok(Self::Alpha),
            "delta" => Ok(Self::Delta),
            other => Err(CliError::Config(format!("sweep.axis: unknown axis '{other}' (T, alpha, delta)"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::FinalTime => "T",
            Self::Alpha => "alpha",
            Self::Delta => "delta",
        }
    }

    pub fn apply(self, cfg: &ExperimentConfig, value: f64) -> ExperimentConfig {
        let mut c = cfg.clone();
        match self {
            Self::FinalTime => c.problem.final_time = value,
            Self::Alpha => c.problem.alpha = value,
            Self::Delta => c.noise.delta = value,
        }
        c
    }
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub report: RunReport,
    pub setup: Setup,
    pub contraction: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub value: f64,
    pub outcome: std::result::Result<SweepOutcome, String>,
}

fn sweep_one(cfg: &ExperimentConfig) -> Result<SweepOutcome> {
    cfg.validate()?;
    let data = generate_data(cfg)?;
    let scheme = scheme(&cfg.inversion.scheme)?;
    let report = run_inversion(cfg, &data, scheme, configured_stop(cfg))?;
    let contraction = if cfg.sweep.contraction_probes > 0 {
        let problem = inverse_problem(cfg, &data)?;
        let s = &data.setup;
        let probes = probe_pairs(&s.a_act, &s.q_act, cfg.sweep.contraction_probes, cfg.noise.seed, 0.05, 0.2);
        Some(contraction_factor(&problem, scheme, &probes)?.factor)
    } else {
        None
    };
    Ok(SweepOutcome { report, setup: data.setup, contraction })
}

/// Repeat the configured inversion for every value of `axis`; failures are
/// recorded per value.
pub fn run_sweep(cfg: &ExperimentConfig, axis: SweepAxis, values: &[f64]) -> Result<Vec<SweepPoint>> {
    if values.windows(2).any(|w| w[1] < w[0]) {
        return Err(CliError::Config("sweep values must be sorted".into()));
    }
    scheme(&cfg.inversion.scheme)?;
    Ok(values
        .par_iter()
        .map(|&value| SweepPoint { value, outcome: sweep_one(&axis.apply(cfg, value)).map_err(|e| e.to_string()) })
        .collect())
}

pub fn sweep_dir_name(axis: SweepAxis, index: usize, value: f64) -> String {
    format!("{}_{index:02}_{value}", axis.name())
}

pub fn write_sweep(dir: &Path, axis: SweepAxis, points: &[SweepPoint]) -> Result<()> {
    let mut rows = Vec::new();
    let mut first_a = Series { label: "first iterate ‖a₁−a_act‖∞".into(), x: vec![], y: vec![] };
    let mut last_a = Series { label: "final ‖a−a_act‖∞".into(), x: vec![], y: vec![] };
    let mut last_q = Series { label: "final ‖q−q_act‖₂".into(), x: vec![], y: vec![] };
    for (i, p) in points.iter().enumerate() {
        match &p.outcome {
            Ok(o) => {
                let sub = dir.join(sweep_dir_name(axis, i, p.value));
                std::fs::create_dir_all(&sub).map_err(|e| CliError::io(&sub, e))?;
                write_run(&sub, &o.report, &o.setup)?;
                let first = errors_or_nan(o.report.states.get(1).and_then(|s| s.errors));
                let sel = o.report.selected();
                let last = errors_or_nan(sel.errors);
                rows.push(vec![
                    num(p.value),
                    o.report.stopping_index.map_or("none".into(), |k| k.to_string()),
                    sel.iterate.to_string(),
                    num(first[0]),
                    num(last[0]),
                    num(last[1]),
                    num(last[2]),
                    num(last[3]),
                    o.contraction.map_or(String::new(), num),
                    String::new(),
                ]);
                for (s, v) in [(&mut first_a, first[0]), (&mut last_a, last[0]), (&mut last_q, last[3])] {
                    s.x.push(p.value);
                    s.y.push(v);
                }
            }
            Err(e) => rows.push(vec![
                num(p.value),
                "none".into(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                e.clone(),
            ]),
        }
    }
    write_csv(
        &dir.join("sweep.csv"),
        &["value", "stopping_index", "iterate", "first_a_sup", "a_sup", "q_sup", "a_l2", "q_l2", "contraction", "failure"],
        &rows,
    )?;
    let svg = crate::output::line_chart(&format!("Errors against {}", axis.name()), axis.name(), "error", &[first_a, last_a, last_q]);
    write_text(&dir.join("sweep.svg"), &svg)
}
