//! `invdiff forward|invert|table1|sweep|ml-eval|spectral|gl-kernel`.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use invdiff_core::discretization::{integrate_cumulative, BoundaryCondition, SampledField};
use invdiff_core::eigen::{eigenvalue_asymptotics_check, gl_kernel, liouville_transform, solve_eigen};
use invdiff_core::forward::{describe, solve_forward};
use invdiff_core::special::ml;

use crate::config::ExperimentConfig;
use crate::error::{CliError, Result};
use crate::experiments::{
    configured_stop, format_table1, generate_data, run_inversion, run_sweep, run_table1, write_data, write_run,
    write_sweep, write_table1, SweepAxis,
};
use crate::output::{emit_plot, num, write_csv, write_fields_csv, write_text};
use crate::setup::{scheme, Setup};

#[derive(Debug, Parser)]
#[command(name = "invdiff", version, about = "Coefficient identification for time-fractional reaction-diffusion")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Configuration file (`section.key = value` lines); defaults if absent.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Overrides `noise.seed` (TOML integers are signed, hence the range).
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(..=i64::MAX as u64))]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Solve both experiments at the configured coefficients.
    Forward,
    /// Generate data and run the configured scheme.
    Invert,
    /// Run the three two-coefficient schemes on identical data.
    Table1,
    /// Repeat the inversion along `sweep.axis`.
    Sweep,
    /// Evaluate `E_{α,β}(-x)` at `ml.x`.
    MlEval,
    /// Dirichlet spectrum and its Liouville normal form.
    Spectral,
    /// Gel'fand-Levitan kernel of the Liouville potential.
    GlKernel,
}

pub fn load_config(cli: &Cli) -> Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.noise.seed = seed;
    }
    Ok(cfg)
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

/// Run one command and report what it wrote.
pub fn execute(cli: &Cli) -> Result<String> {
    let cfg = load_config(cli)?;
    let out = &cli.out;
    create_dir(out)?;
    write_text(&out.join("config.txt"), &cfg.to_flat_string())?;
    match cli.command {
        Command::Forward => forward(&cfg, out),
        Command::Invert => invert(&cfg, out),
        Command::Table1 => table1(&cfg, out),
        Command::Sweep => sweep(&cfg, out),
        Command::MlEval => ml_eval(&cfg, out),
        Command::Spectral => spectral(&cfg, out),
        Command::GlKernel => gl(&cfg, out),
    }
}

/// Parse arguments, execute, print, and return the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(summary) => {
            print!("{summary}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn forward(cfg: &ExperimentConfig, out: &Path) -> Result<String> {
    let setup = Setup::build(cfg)?;
    let mut summary = String::new();
    let mut meta = String::new();
    let mut columns = vec![("a", setup.a_act.clone()), ("q", setup.q_act.clone())];
    for (name, spec) in [("u", &setup.u), ("v", &setup.v)] {
        let hist = solve_forward(spec, cfg.problem.steps)?;
        if hist.compatibility_gap > 0.0 && spec.alpha < 1.0 {
            eprintln!(
                "warning: experiment {name}: initial value and Dirichlet data differ by {:e}; the fractional solution has a weak singularity at t = 0",
                hist.compatibility_gap
            );
        }
        meta.push_str(&format!("{name}.problem = {}\n", describe(spec)));
        meta.push_str(&format!("{name}.compatibility_gap = {}\n", num(hist.compatibility_gap)));
        meta.push_str(&format!("{name}.caputo_discrepancy = {}\n", num(hist.caputo_discrepancy)));
        summary.push_str(&format!("{name}(T): min {:.6} max {:.6}\n", hist.final_state().min(), hist.final_state().max()));
        columns.push(if name == "u" { ("u0", spec.u0.clone()) } else { ("v0", spec.u0.clone()) });
        columns.push(if name == "u" { ("u_T", hist.final_state().clone()) } else { ("v_T", hist.final_state().clone()) });
        columns.push(if name == "u" { ("u_rate", hist.caputo_at_final.clone()) } else { ("v_rate", hist.caputo_at_final.clone()) });
    }
    let refs: Vec<(&str, &SampledField)> = columns.iter().map(|(n, f)| (*n, f)).collect();
    write_fields_csv(&out.join("forward.csv"), &refs)?;
    emit_plot("Final states", &[refs[2], refs[3], refs[5], refs[6]], &out.join("final_states.svg"))?;
    write_text(&out.join("metadata.txt"), &meta)?;
    Ok(summary)
}

fn invert(cfg: &ExperimentConfig, out: &Path) -> Result<String> {
    let scheme = scheme(&cfg.inversion.scheme)?;
    let data = generate_data(cfg)?;
    write_data(out, &data)?;
    let report = run_inversion(cfg, &data, scheme, configured_stop(cfg))?;
    write_run(out, &report, &data.setup)?;
    let sel = report.selected();
    let mut s = format!(
        "{}: {} iterations, stopping index {}, residual {:.4e}\n",
        scheme.name(),
        report.states.len() - 1,
        report.stopping_index.map_or("none".to_string(), |k| k.to_string()),
        sel.residual
    );
    if let Some(e) = sel.errors {
        s.push_str(&format!("errors: a sup {:.4e}, q sup {:.4e}, a L2 {:.4e}, q L2 {:.4e}\n", e.a_sup, e.q_sup, e.a_l2, e.q_l2));
    }
    if report.diverging {
        s.push_str("warning: residual increased on three consecutive iterations\n");
    }
    Ok(s)
}

fn table1(cfg: &ExperimentConfig, out: &Path) -> Result<String> {
    let start = std::time::Instant::now();
    let data = generate_data(cfg)?;
    write_data(out, &data)?;
    let t = run_table1(cfg, &data)?;
    write_table1(out, &t, &data.setup)?;
    eprintln!("table computed in {:.1} s", start.elapsed().as_secs_f64());
    Ok(format_table1(&t))
}

fn sweep(cfg: &ExperimentConfig, out: &Path) -> Result<String> {
    let axis = SweepAxis::parse(&cfg.sweep.axis)?;
    let points = run_sweep(cfg, axis, &cfg.sweep.values)?;
    write_sweep(out, axis, &points)?;
    let mut s = String::new();
    for p in &points {
        match &p.outcome {
            Ok(o) => {
                let e = o.report.selected().errors;
                s.push_str(&format!(
                    "{} = {}: stop {}, a sup {:.4e}, q L2 {:.4e}\n",
                    axis.name(),
                    p.value,
                    o.report.stopping_index.map_or("none".to_string(), |k| k.to_string()),
                    e.map_or(f64::NAN, |e| e.a_sup),
                    e.map_or(f64::NAN, |e| e.q_l2)
                ));
            }
            Err(e) => s.push_str(&format!("{} = {}: failed: {e}\n", axis.name(), p.value)),
        }
    }
    Ok(s)
}

fn ml_eval(cfg: &ExperimentConfig, out: &Path) -> Result<String> {
    let m = &cfg.ml;
    let mut rows = Vec::new();
    for &x in &m.x {
        if x < 0.0 {
            return Err(CliError::Config(format!("ml.x must be >= 0, got {x}")));
        }
        let v = ml(m.alpha, m.beta, -x)?;
        rows.push(vec![num(x), num(v)]);
    }
    write_csv(&out.join("ml.csv"), &["x", "E(-x)"], &rows)?;
    Ok(format!("E_{{{},{}}}(-x) at {} points\n", m.alpha, m.beta, rows.len()))
}

fn spectral(cfg: &ExperimentConfig, out: &Path) -> Result<String> {
    let setup = Setup::build(cfg)?;
    let modes = cfg.spectral.modes;
    let bc = BoundaryCondition::dirichlet(0.0);
    let sys = solve_eigen(&setup.grid, &setup.a_act, &setup.q_act, &bc, &bc, modes)?;
    let cf = liouville_transform(&setup.a_act, &setup.q_act)?;
    let qhat = cf.unit_potential();
    let g1 = *qhat.grid();
    let canon = solve_eigen(&g1, &SampledField::constant(g1, 1.0), &qhat, &bc, &bc, modes)?;
    let remainders = eigenvalue_asymptotics_check(&qhat, &canon);
    let l2 = cf.length * cf.length;
    let rows: Vec<Vec<String>> = (0..modes)
        .map(|k| {
            let (lam, mu) = (sys.eigenvalues[k], canon.eigenvalues[k]);
            vec![(k + 1).to_string(), num(lam), num(mu), num(mu / (l2 * lam)), num(remainders[k])]
        })
        .collect();
    write_csv(&out.join("spectral.csv"), &["n", "lambda", "mu_unit", "mu_over_l2_lambda", "asymptotic_remainder"], &rows)?;
    let names: Vec<String> = (1..=modes).map(|k| format!("phi_{k}")).collect();
    let fields: Vec<(&str, &SampledField)> = names.iter().map(String::as_str).zip(&sys.orthonormal).collect();
    write_fields_csv(&out.join("eigenfunctions.csv"), &fields)?;
    write_fields_csv(&out.join("liouville_potential.csv"), &[("Q_unit", &qhat)])?;
    Ok(format!("{modes} Dirichlet eigenvalues; Liouville length {:.6}\n", cf.length))
}

fn gl(cfg: &ExperimentConfig, out: &Path) -> Result<String> {
    let setup = Setup::build(cfg)?;
    let cf = liouville_transform(&setup.a_act, &setup.q_act)?;
    let qhat = cf.unit_potential();
    let zero = SampledField::constant(*qhat.grid(), 0.0);
    let k = gl_kernel(&qhat, &zero, None)?;
    let half = integrate_cumulative(&qhat).map(|v| 0.5 * v);
    let diag = SampledField::new(*qhat.grid(), k.diagonal())?;
    write_fields_csv(&out.join("gl_diagonal.csv"), &[("K_xx", &diag), ("half_integral_Q", &half)])?;
    let rows: Vec<Vec<String>> = k.triangle().into_iter().map(|(x, t, v)| vec![num(x), num(t), num(v)]).collect();
    write_csv(&out.join("gl_kernel.csv"), &["x", "t", "K"], &rows)?;
    emit_plot("Kernel diagonal", &[("K(x,x)", &diag), ("(1/2)∫Q", &half)], &out.join("gl_diagonal.svg"))?;
    Ok(format!("kernel on {} steps, {} sweeps, residual {:.3e}\n", k.steps(), k.sweeps, k.residual))
}
