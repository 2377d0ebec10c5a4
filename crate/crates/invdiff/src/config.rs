//! Flat `section.key = value` configuration files.
//!
//! The text is TOML restricted to dotted keys, so `problem.alpha = 0.5` and a
//! `[problem]` table are both accepted. [`ExperimentConfig::to_flat_string`]
//! writes the canonical form: every key, sorted, one per line.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProblemConfig {
    pub alpha: f64,
    pub final_time: f64,
    pub length: f64,
    pub nodes: usize,
    pub steps: usize,
    /// `default`, `constant` (uses `a_value`) or `samples` (uses `a_samples`).
    pub a: String,
    pub a_value: f64,
    pub a_samples: Vec<f64>,
    /// `default`, `zero`, `constant` or `samples`.
    pub q: String,
    pub q_value: f64,
    pub q_samples: Vec<f64>,
    /// `bump`, `half-sine`, `sine` or `one`.
    pub u0: String,
    pub v0: String,
    /// `dirichlet:<h>`, `neumann:<s>` or `impedance:<γ>:<s>`.
    pub left: String,
    pub right_u: String,
    pub right_v: String,
    /// `identity`, `quadratic` or `cubic`.
    pub reaction: String,
    /// `zero` or `constant:<c>`.
    pub source: String,
    /// `two-experiments`, or `two-times` for one run observed at `T/2` and `T`.
    pub observation: String,
}

impl Default for ProblemConfig {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            final_time: 0.5,
            length: 1.0,
            nodes: 257,
            steps: 1024,
            a: "default".into(),
            a_value: 1.0,
            a_samples: Vec::new(),
            q: "default".into(),
            q_value: 0.0,
            q_samples: Vec::new(),
            u0: "bump".into(),
            v0: "half-sine".into(),
            left: "dirichlet:1".into(),
            right_u: "neumann:1".into(),
            right_v: "neumann:-1".into(),
            reaction: "identity".into(),
            source: "zero".into(),
            observation: "two-experiments".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InversionConfig {
    pub scheme: String,
    pub basis_size: usize,
    /// Gaussian width as a multiple of the centre spacing.
    pub basis_width: f64,
    pub a_start: f64,
    pub q_start: f64,
    pub tau: f64,
    pub k_max: usize,
    pub a_min: f64,
    /// `left:<a₀>`, `right:<a_L>` or `none`.
    pub pin: String,
    /// Fixed iteration count; 0 stops by the discrepancy principle.
    pub iterations: usize,
    /// Relative TSVD cutoff; 0 selects it from the noise level.
    pub tsvd_cutoff: f64,
    /// Iterations shown in the Table-1 layout.
    pub table_iterations: usize,
}

impl Default for InversionConfig {
    fn default() -> Self {
        Self {
            scheme: "parallel".into(),
            basis_size: 41,
            basis_width: 4.0,
            a_start: 1.0,
            q_start: 0.0,
            tau: 1.1,
            k_max: 20,
            a_min: 0.1,
            pin: "left:1".into(),
            iterations: 0,
            tsvd_cutoff: 0.0,
            table_iterations: 6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseConfig {
    pub delta: f64,
    pub seed: u64,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        Self { delta: 0.01, seed: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    /// `T`, `alpha` or `delta`.
    pub axis: String,
    pub values: Vec<f64>,
    /// Seeded probe pairs for the empirical contraction factor; 0 skips it.
    pub contraction_probes: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self { axis: "T".into(), values: vec![0.05, 0.1, 0.5], contraction_probes: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MlConfig {
    pub alpha: f64,
    pub beta: f64,
    /// Arguments `x` of `E_{α,β}(-x)`.
    pub x: Vec<f64>,
}

impl Default for MlConfig {
    fn default() -> Self {
        Self { alpha: 0.5, beta: 1.0, x: vec![0.0, 0.5, 1.0, 2.0, 5.0, 10.0, 100.0] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectralConfig {
    pub modes: usize,
}

impl Default for SpectralConfig {
    fn default() -> Self {
        Self { modes: 10 }
    }
}

/// One file fully determines a run.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problem: ProblemConfig,
    pub inversion: InversionConfig,
    pub noise: NoiseConfig,
    pub sweep: SweepConfig,
    pub ml: MlConfig,
    pub spectral: SpectralConfig,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: Self = toml::from_str(text).map_err(|e| CliError::Config(e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    /// Range checks that do not need the numerical core; selectors are
    /// resolved (and rejected) when the problem is built.
    pub fn validate(&self) -> Result<(), CliError> {
        let p = &self.problem;
        let bad = |m: String| Err(CliError::Config(m));
        if !(p.alpha > 0.0 && p.alpha <= 1.0) {
            return bad(format!("problem.alpha must lie in (0, 1], got {}", p.alpha));
        }
        if !(p.final_time > 0.0 && p.final_time.is_finite()) {
            return bad(format!("problem.final_time must be positive, got {}", p.final_time));
        }
        if !(p.length > 0.0 && p.length.is_finite()) {
            return bad(format!("problem.length must be positive, got {}", p.length));
        }
        if p.nodes < 9 || p.steps < 8 {
            return bad(format!("need problem.nodes >= 9 and problem.steps >= 8, got {} and {}", p.nodes, p.steps));
        }
        if !(0.0..=0.2).contains(&self.noise.delta) {
            return bad(format!("noise.delta must lie in [0, 0.2], got {}", self.noise.delta));
        }
        let i = &self.inversion;
        if !(i.tau >= 1.0) || !(i.basis_width > 0.0) || !(i.a_min > 0.0) || !(i.tsvd_cutoff >= 0.0) {
            return bad("inversion.tau >= 1, basis_width > 0, a_min > 0 and tsvd_cutoff >= 0 are required".into());
        }
        if self.sweep.values.windows(2).any(|w| w[1] < w[0]) {
            return bad("sweep.values must be sorted".into());
        }
        Ok(())
    }

    /// Canonical text: all keys, sorted, `section.key = value`.
    pub fn to_flat_string(&self) -> String {
        let value = toml::Value::try_from(self).expect("configuration serializes");
        let mut lines = Vec::new();
        flatten("", &value, &mut lines);
        lines.sort();
        let mut out = lines.join("\n");
        out.push('\n');
        out
    }
}

fn flatten(prefix: &str, value: &toml::Value, out: &mut Vec<String>) {
    match value {
        toml::Value::Table(t) => {
            for (k, v) in t {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, v, out);
            }
        }
        leaf => out.push(format!("{prefix} = {leaf}")),
    }
}
