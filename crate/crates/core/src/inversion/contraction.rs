use alloc::vec::Vec;

use super::schemes::{apply_scheme, InverseProblem, Scheme};
use crate::discretization::{differentiate, SampledField};
use crate::error::{domain, Result};
use crate::noise::UniformNoise;
use crate::quad::push_kronrod_panel;
use crate::special::{ml_neg, MLParams};

/// Composite rule on `[0, 1/2]` graded geometrically down to `1e-30`.
fn graded_half_rule() -> Vec<(f64, f64)> {
    let mut breaks = alloc::vec![0.0];
    for k in 0..=58 {
        breaks.push(libm::pow(10.0, -30.0 + 0.5 * k as f64));
    }
    breaks.push(0.25);
    breaks.push(0.5);
    let mut rule = Vec::with_capacity(15 * breaks.len());
    for w in breaks.windows(2) {
        push_kronrod_panel(w[0], w[1], &mut rule);
    }
    rule
}

/// Quadrature nodes for the two halves of `[0, 1]`: the left half in `σ`,
/// the right half in `τ = 1 - σ` so that both endpoint layers are resolved.
struct PhiRule {
    // (σ, 1 - σ^{1/α}, weight)
    nodes: Vec<(f64, f64, f64)>,
}

impl PhiRule {
    fn new(alpha: f64) -> Self {
        let half = graded_half_rule();
        let mut nodes = Vec::with_capacity(2 * half.len());
        for &(s, w) in &half {
            nodes.push((s, -libm::expm1(libm::log(s) / alpha), w));
        }
        for &(t, w) in &half {
            nodes.push((1.0 - t, -libm::expm1(libm::log1p(-t) / alpha), w));
        }
        nodes.iter_mut().for_each(|n| {
            if n.0 == 0.0 {
                n.1 = 1.0;
            }
        });
        Self { nodes }
    }

    fn lambda_factor(&self, alpha: f64, lt: f64) -> Vec<f64> {
        self.nodes.iter().map(|&(s, _, w)| w * ml_neg(alpha, alpha, lt * s)).collect()
    }

    fn mu_factor(&self, alpha: f64, mt: f64) -> Vec<f64> {
        self.nodes.iter().map(|&(_, c, _)| ml_neg(alpha, 1.0, mt * libm::pow(c, alpha))).collect()
    }
}

fn check_phi_args(alpha: f64, lambda: f64, mu: f64, t: f64) -> Result<()> {
    MLParams::new(alpha, alpha)?;
    if !(lambda > 0.0 && mu > 0.0 && t > 0.0) {
        return Err(domain!("need λ, μ, T > 0, got λ={lambda}, μ={mu}, T={t}"));
    }
    Ok(())
}

/// The convolution integral
///
/// ```text
/// ∫_0^T s^{α-1} E_{α,α}(-λ s^α) max(1, μ) E_{α,1}(-μ (T - s)^α) ds
/// ```
///
/// evaluated after the substitution `s = T σ^{1/α}`, which removes the
/// endpoint singularity.
pub fn phi_integral(alpha: f64, lambda: f64, mu: f64, t: f64) -> Result<f64> {
    check_phi_args(alpha, lambda, mu, t)?;
    let rule = PhiRule::new(alpha);
    let ta = libm::pow(t, alpha);
    let l = rule.lambda_factor(alpha, lambda * ta);
    let m = rule.mu_factor(alpha, mu * ta);
    let dot: f64 = l.iter().zip(&m).map(|(a, b)| a * b).sum();
    Ok(ta / alpha * mu.max(1.0) * dot)
}

/// Lattice size per axis used by [`phi_of_t`].
pub const PHI_LATTICE: usize = 31;

/// `Φ(T) = sup_{λ ≥ λ₁} sup_{μ ≥ μ₁}` of [`phi_integral`], taken over a
/// log-spaced lattice from `(λ₁, μ₁)` to `10⁶` in each variable.
pub fn phi_of_t(alpha: f64, lambda1: f64, mu1: f64, t: f64) -> Result<f64> {
    check_phi_args(alpha, lambda1, mu1, t)?;
    let rule = PhiRule::new(alpha);
    let ta = libm::pow(t, alpha);
    let lattice = |start: f64| -> Vec<f64> {
        let top = 1e6f64.max(start);
        let (l0, l1) = (libm::log(start), libm::log(top));
        (0..PHI_LATTICE).map(|k| libm::exp(l0 + (l1 - l0) * k as f64 / (PHI_LATTICE - 1) as f64)).collect()
    };
    let lam: Vec<Vec<f64>> = lattice(lambda1).iter().map(|l| rule.lambda_factor(alpha, l * ta)).collect();
    let mut best = 0.0f64;
    for mu in lattice(mu1) {
        let m = rule.mu_factor(alpha, mu * ta);
        for l in &lam {
            let dot: f64 = l.iter().zip(&m).map(|(a, b)| a * b).sum();
            best = best.max(ta / alpha * mu.max(1.0) * dot);
        }
    }
    Ok(best)
}

/// `|||(a, q)||| = ‖a'‖₂ + ‖a‖∞ + ‖q‖₂`.
pub fn triple_norm(a: &SampledField, q: &SampledField) -> f64 {
    differentiate(a).l2_norm() + a.sup_norm() + q.l2_norm()
}

/// Two coefficient pairs whose images under one step are compared.
#[derive(Debug, Clone)]
pub struct ProbePair {
    pub a: SampledField,
    pub q: SampledField,
    pub a_tilde: SampledField,
    pub q_tilde: SampledField,
}

/// `count` seeded pairs around `(a, q)`: each member adds to `a` a random
/// combination of `sin(kπx/2L)`, `k = 1..3`, scaled by `amp_a` (so the pinned
/// value at `x = 0` is kept), and to `q` a combination of `cos(kπx/L)`,
/// `k = 0..2`, scaled by `amp_q`.
pub fn probe_pairs(a: &SampledField, q: &SampledField, count: usize, seed: u64, amp_a: f64, amp_q: f64) -> Vec<ProbePair> {
    let mut rng = UniformNoise::new(seed);
    let l = a.grid().length();
    let pi = core::f64::consts::PI;
    let perturb = |rng: &mut UniformNoise| {
        let ca: [f64; 3] = [rng.next_symmetric(), rng.next_symmetric(), rng.next_symmetric()];
        let cq: [f64; 3] = [rng.next_symmetric(), rng.next_symmetric(), rng.next_symmetric()];
        let grid = *a.grid();
        let da = SampledField::from_fn(grid, |x| {
            amp_a / 3.0 * (1..=3).map(|k| ca[k - 1] * libm::sin(k as f64 * pi * x / (2.0 * l))).sum::<f64>()
        });
        let dq = SampledField::from_fn(grid, |x| {
            amp_q / 3.0 * (0..3).map(|k| cq[k] * libm::cos(k as f64 * pi * x / l)).sum::<f64>()
        });
        (
            a.zip_with(&da, |x, y| x + y).expect("same grid"),
            q.zip_with(&dq, |x, y| x + y).expect("same grid"),
        )
    };
    (0..count)
        .map(|_| {
            let (a1, q1) = perturb(&mut rng);
            let (a2, q2) = perturb(&mut rng);
            ProbePair { a: a1, q: q1, a_tilde: a2, q_tilde: q2 }
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct ContractionReport {
    /// Largest observed ratio.
    pub factor: f64,
    /// Per-probe ratio; `None` for coincident pairs.
    pub ratios: Vec<Option<f64>>,
}

/// Empirical Lipschitz constant of one scheme step in the triple norm.
pub fn contraction_factor(problem: &InverseProblem, scheme: Scheme, probes: &[ProbePair]) -> Result<ContractionReport> {
    let both = scheme.uses_second_experiment();
    let mut ratios = Vec::with_capacity(probes.len());
    for p in probes {
        let da = p.a.sub(&p.a_tilde)?;
        let dq = p.q.sub(&p.q_tilde)?;
        let den = triple_norm(&da, &dq);
        if den == 0.0 {
            ratios.push(None);
            continue;
        }
        let f1 = problem.forward(&p.a, &p.q, both)?;
        let t1 = apply_scheme(problem, scheme, &p.a, &f1)?;
        let f2 = problem.forward(&p.a_tilde, &p.q_tilde, both)?;
        let t2 = apply_scheme(problem, scheme, &p.a_tilde, &f2)?;
        let num = triple_norm(&t1.a.sub(&t2.a)?, &t1.q.sub(&t2.q)?);
        ratios.push(Some(num / den));
    }
    let factor = ratios.iter().flatten().fold(0.0f64, |m, r| m.max(*r));
    Ok(ContractionReport { factor, ratios })
}
