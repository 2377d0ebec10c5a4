//! Resolution of configuration selectors into core problem objects.

use std::f64::consts::PI;

use invdiff_core::discretization::{BoundaryCondition, Grid, SampledField};
use invdiff_core::forward::{Forcing, ProblemSpec, Reaction};
use invdiff_core::inversion::{AdmissibleSet, Pin, RbfBasis, Scheme, SchemeSettings};

use crate::config::ExperimentConfig;
use crate::error::{CliError, Result};

/// Default diffusion coefficient on `[0, L]`, written in `s = x/L`.
pub fn default_a(s: f64) -> f64 {
    1.0 + 4.0 * s * s * (1.0 - s) + 0.5 * (4.0 * PI * s).sin()
}

/// Default potential, in `s = x/L`.
pub fn default_q(s: f64) -> f64 {
    8.0 * s * (-3.0 * s).exp()
}

/// True coefficients and both experiments.
#[derive(Debug, Clone)]
pub struct Setup {
    pub grid: Grid,
    pub a_act: SampledField,
    pub q_act: SampledField,
    pub u: ProblemSpec,
    /// Second experiment; in two-times mode the first one observed at `T/2`.
    pub v: ProblemSpec,
    pub two_times: bool,
}

fn config_err(m: String) -> CliError {
    CliError::Config(m)
}

fn number(s: &str, what: &str) -> Result<f64> {
    s.trim().parse::<f64>().map_err(|_| config_err(format!("{what}: '{s}' is not a number")))
}

pub fn boundary(desc: &str, key: &str) -> Result<BoundaryCondition> {
    let parts: Vec<&str> = desc.split(':').collect();
    let bc = match parts.as_slice() {
        ["dirichlet", h] => BoundaryCondition::dirichlet(number(h, key)?),
        ["neumann", s] => BoundaryCondition::neumann(number(s, key)?),
        ["impedance", g, s] => BoundaryCondition::impedance(number(g, key)?, number(s, key)?)
            .map_err(|e| config_err(format!("{key}: {e}")))?,
        _ => return Err(config_err(format!("{key}: unknown boundary descriptor '{desc}'"))),
    };
    Ok(bc)
}

fn samples(grid: Grid, values: &[f64], key: &str) -> Result<SampledField> {
    if values.len() < 2 {
        return Err(config_err(format!("{key}: need at least two samples")));
    }
    let m = values.len() - 1;
    let l = grid.length();
    Ok(SampledField::from_fn(grid, |x| {
        let s = (x / l * m as f64).clamp(0.0, m as f64);
        let i = (s.floor() as usize).min(m - 1);
        let t = s - i as f64;
        (1.0 - t) * values[i] + t * values[i + 1]
    }))
}

fn coefficient(grid: Grid, selector: &str, value: f64, values: &[f64], key: &str, default: fn(f64) -> f64) -> Result<SampledField> {
    let l = grid.length();
    match selector {
        "default" => Ok(SampledField::from_fn(grid, |x| default(x / l))),
        "zero" => Ok(SampledField::constant(grid, 0.0)),
        "constant" => Ok(SampledField::constant(grid, value)),
        "samples" => samples(grid, values, key),
        other => Err(config_err(format!("{key}: unknown selector '{other}'"))),
    }
}

pub fn initial_value(grid: Grid, selector: &str, key: &str) -> Result<SampledField> {
    let l = grid.length();
    let f: fn(f64) -> f64 = match selector {
        "bump" => |s| s * (1.0 - s) + 1.0,
        "half-sine" => |s| 1.0 + (PI * s / 2.0).sin(),
        "sine" => |s| (PI * s).sin(),
        "one" => |_| 1.0,
        other => return Err(config_err(format!("{key}: unknown initial value '{other}'"))),
    };
    Ok(SampledField::from_fn(grid, |x| f(x / l)))
}

pub fn reaction(selector: &str) -> Result<Reaction> {
    match selector {
        "identity" => Ok(Reaction::Identity),
        "quadratic" => Ok(Reaction::Fisher),
        "cubic" => Ok(Reaction::Zeldovich),
        other => Err(config_err(format!("problem.reaction: unknown selector '{other}'"))),
    }
}

pub fn forcing(selector: &str) -> Result<Forcing> {
    match selector.split_once(':') {
        None if selector == "zero" => Ok(Forcing::Zero),
        Some(("constant", c)) => {
            let c = number(c, "problem.source")?;
            Ok(if c == 0.0 { Forcing::Zero } else { Forcing::from_fn(move |_, _, _| c) })
        }
        _ => Err(config_err(format!("problem.source: unknown selector '{selector}'"))),
    }
}

pub fn pin(desc: &str) -> Result<Pin> {
    match desc.split_once(':') {
        None if desc == "none" => Ok(Pin::None),
        Some(("left", v)) => Ok(Pin::Left(number(v, "inversion.pin")?)),
        Some(("right", v)) => Ok(Pin::Right(number(v, "inversion.pin")?)),
        _ => Err(config_err(format!("inversion.pin: unknown descriptor '{desc}'"))),
    }
}

pub fn scheme(name: &str) -> Result<Scheme> {
    Scheme::from_name(name).ok_or_else(|| config_err(format!("inversion.scheme: unknown scheme '{name}'")))
}

impl Setup {
    pub fn build(cfg: &ExperimentConfig) -> Result<Self> {
        let p = &cfg.problem;
        let grid = Grid::new(p.nodes, p.length).map_err(|e| config_err(format!("problem grid: {e}")))?;
        let a_act = coefficient(grid, &p.a, p.a_value, &p.a_samples, "problem.a", default_a)?;
        let q_act = coefficient(grid, &p.q, p.q_value, &p.q_samples, "problem.q", default_q)?;
        if a_act.min() <= 0.0 {
            return Err(config_err("problem.a must be positive".into()));
        }
        let two_times = match p.observation.as_str() {
            "two-experiments" => false,
            "two-times" => true,
            other => return Err(config_err(format!("problem.observation: unknown mode '{other}'"))),
        };
        let left = boundary(&p.left, "problem.left")?;
        let reaction = reaction(&p.reaction)?;
        let forcing = forcing(&p.source)?;
        let u = ProblemSpec::new(
            a_act.clone(),
            q_act.clone(),
            initial_value(grid, &p.u0, "problem.u0")?,
            left.clone(),
            boundary(&p.right_u, "problem.right_u")?,
        )
        .with_alpha(p.alpha)
        .with_final_time(p.final_time)
        .with_reaction(reaction)
        .with_forcing(forcing.clone());
        let v = if two_times {
            u.clone().with_final_time(0.5 * p.final_time)
        } else {
            ProblemSpec::new(
                a_act.clone(),
                q_act.clone(),
                initial_value(grid, &p.v0, "problem.v0")?,
                left,
                boundary(&p.right_v, "problem.right_v")?,
            )
            .with_alpha(p.alpha)
            .with_final_time(p.final_time)
            .with_reaction(reaction)
            .with_forcing(forcing)
        };
        Ok(Self { grid, a_act, q_act, u, v, two_times })
    }

    pub fn basis(&self, cfg: &ExperimentConfig) -> Result<RbfBasis> {
        let i = &cfg.inversion;
        RbfBasis::uniform(&self.grid, i.basis_size, i.basis_width).map_err(|e| config_err(format!("inversion basis: {e}")))
    }
}

pub fn admissible(cfg: &ExperimentConfig) -> Result<AdmissibleSet> {
    let set = AdmissibleSet { a_min: cfg.inversion.a_min, pin: pin(&cfg.inversion.pin)?, ..AdmissibleSet::default() };
    set.validate().map_err(|e| config_err(format!("inversion: {e}")))?;
    Ok(set)
}

pub fn settings(cfg: &ExperimentConfig) -> SchemeSettings {
    let i = &cfg.inversion;
    SchemeSettings {
        n_steps: cfg.problem.steps,
        tsvd_cutoff: (i.tsvd_cutoff > 0.0).then_some(i.tsvd_cutoff),
        tau: i.tau,
        k_max: i.k_max,
        ..SchemeSettings::default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn descriptors_parse() {
        assert!(boundary("dirichlet:1", "k").unwrap().is_dirichlet());
        assert!(!boundary("impedance:2:0.5", "k").unwrap().is_dirichlet());
        assert!(boundary("robin:1", "k").is_err());
        assert!(boundary("impedance:-1:0", "k").is_err());
        assert_eq!(pin("right:2").unwrap(), Pin::Right(2.0));
        assert!(pin("middle:1").is_err());
        assert!(forcing("constant:0").unwrap().is_zero());
        assert!(!forcing("constant:2").unwrap().is_zero());
    }

    #[test]
    fn samples_are_interpolated_linearly() {
        let g = Grid::unit(5).unwrap();
        let f = samples(g, &[0.0, 2.0, 0.0], "k").unwrap();
        assert_eq!(f.values(), &[0.0, 1.0, 2.0, 1.0, 0.0]);
    }

    #[test]
    fn two_times_mode_reuses_the_first_experiment() {
        let mut cfg = ExperimentConfig::default();
        cfg.problem.nodes = 33;
        cfg.problem.observation = "two-times".into();
        let s = Setup::build(&cfg).unwrap();
        assert_eq!(s.v.final_time, 0.25);
        assert_eq!(s.v.u0, s.u.u0);
    }
}
