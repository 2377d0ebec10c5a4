use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use super::grid::SampledField;
use crate::error::{invalid, Result};
use crate::linalg::SymBanded;

/// Weight used to pin nodes to a prescribed value in [`spline_fit`].
const PIN_WEIGHT: f64 = 1e12;

/// Penalized least-squares (discrete cubic smoothing spline) fit.
///
/// Minimizes `Σ w_i (y_i - s_i)² + λ/h⁴ Σ (s_{i+1} - 2 s_i + s_{i-1})²`, the
/// grid version of `∫ w (y - s)² + λ ∫ s''²`. Needs at least two nodes with
/// positive weight.
pub fn spline_fit(y: &[f64], weights: &[f64], lambda: f64, h: f64) -> Result<Vec<f64>> {
    penalized_fit(y, weights, lambda, h, 2)
}

/// As [`spline_fit`] with the penalty on `order`-th differences,
/// `λ/h⁴ Σ (Δ^order s)²`.
pub fn penalized_fit(y: &[f64], weights: &[f64], lambda: f64, h: f64, order: usize) -> Result<Vec<f64>> {
    let n = y.len();
    if weights.len() != n || n < order + 2 || !(1..=4).contains(&order) {
        return Err(invalid!("penalized fit needs matching data and weights, order 1..=4 and at least order + 2 nodes"));
    }
    let pen = lambda / h.powi(2 * order as i32);
    // binomial coefficients with alternating sign
    let mut c = vec![1.0f64];
    for _ in 0..order {
        let mut next = vec![0.0; c.len() + 1];
        for (k, v) in c.iter().enumerate() {
            next[k] += v;
            next[k + 1] -= v;
        }
        c = next;
    }
    let mut m = SymBanded::zeros(n, order);
    for (i, &w) in weights.iter().enumerate() {
        m.add(i, i, w);
    }
    for start in 0..n - order {
        for a in 0..=order {
            for b in a..=order {
                m.add(start + a, start + b, pen * c[a] * c[b]);
            }
        }
    }
    let rhs: Vec<f64> = y.iter().zip(weights).map(|(v, w)| v * w).collect();
    m.solve(&rhs)
}

/// Outcome of the discrepancy-matched smoothing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothingReport {
    pub lambda: f64,
    /// Root-mean-square residual `(Σ (s_i - y_i)² / n)^{1/2}` of the returned fit.
    pub residual: f64,
    /// `δ ‖y‖∞ / √3`, the standard deviation of the uniform noise model.
    pub target: f64,
    pub bisection_steps: usize,
}

/// Smooth noisy samples into an approximation with usable second
/// differences.
///
/// The smoothing parameter is found by bisection in `log λ` so that the
/// root-mean-square residual matches the standard deviation `δ ‖y‖∞ / √3`
/// of noise uniform on `[-δ‖y‖∞, δ‖y‖∞]`. If even the smoothest fit
/// stays below that level the smoothest fit is returned. `δ = 0` returns
/// the input unchanged.
pub fn smooth_to_h2(noisy: &SampledField, noise_level: f64) -> Result<(SampledField, SmoothingReport)> {
    if !(noise_level >= 0.0) {
        return Err(invalid!("noise level must be >= 0, got {noise_level}"));
    }
    let target = noise_level * noisy.sup_norm() / libm::sqrt(3.0);
    if noise_level == 0.0 || target == 0.0 {
        let report = SmoothingReport { lambda: 0.0, residual: 0.0, target, bisection_steps: 0 };
        return Ok((noisy.clone(), report));
    }
    let y = noisy.values();
    let h = noisy.grid().spacing();
    let ones = vec![1.0; y.len()];
    let fit = |log_lambda: f64| -> Result<(Vec<f64>, f64)> {
        let s = spline_fit(y, &ones, 10f64.powf(log_lambda), h)?;
        let r = libm::sqrt(s.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / y.len() as f64);
        Ok((s, r))
    };
    // keep λ/h⁴ within what the banded factorization resolves
    let cap = 12.0 + 4.0 * libm::log10(h);
    let (mut lo, mut hi) = (cap - 24.0, cap.min(4.0));
    let (s_hi, r_hi) = fit(hi)?;
    if r_hi <= target {
        let report = SmoothingReport { lambda: 10f64.powf(hi), residual: r_hi, target, bisection_steps: 0 };
        return Ok((SampledField::from_parts_unchecked(*noisy.grid(), s_hi), report));
    }
    let mut best = fit(lo)?;
    let mut best_log = lo;
    let mut steps = 0;
    while steps < 60 {
        steps += 1;
        let mid = 0.5 * (lo + hi);
        let (s, r) = fit(mid)?;
        if r > target {
            hi = mid;
        } else {
            lo = mid;
            best = (s, r);
            best_log = mid;
        }
        if (best.1 / target - 1.0).abs() < 0.01 {
            break;
        }
    }
    let report = SmoothingReport { lambda: 10f64.powf(best_log), residual: best.1, target, bisection_steps: steps };
    Ok((SampledField::from_parts_unchecked(*noisy.grid(), best.0), report))
}

/// Replace the values inside `holes` (inclusive index ranges) by a smoothing
/// spline through the surrounding data, with the nodes in `pinned_zeros`
/// forced to zero.
///
/// Holes must be disjoint, lie strictly inside the grid and together cover
/// at most a quarter of the nodes.
pub fn excise_and_interpolate(
    field: &SampledField,
    holes: &[(usize, usize)],
    pinned_zeros: &[usize],
    lambda: f64,
) -> Result<SampledField> {
    let n = field.len();
    if holes.is_empty() && pinned_zeros.is_empty() {
        return Ok(field.clone());
    }
    let mut sorted: Vec<(usize, usize)> = holes.to_vec();
    sorted.sort_unstable();
    let mut covered = 0;
    for (k, &(a, b)) in sorted.iter().enumerate() {
        if a > b || a == 0 || b + 1 >= n {
            return Err(invalid!("hole [{a}, {b}] must lie strictly inside 0..{n}"));
        }
        if k > 0 && a <= sorted[k - 1].1 {
            return Err(invalid!("holes overlap at index {a}"));
        }
        covered += b - a + 1;
    }
    if 4 * covered > n {
        return Err(invalid!("holes cover {covered} of {n} nodes (more than 25%)"));
    }
    if let Some(&p) = pinned_zeros.iter().find(|&&p| p >= n) {
        return Err(invalid!("pinned node {p} outside grid"));
    }
    let y = field.values();
    let mut w = vec![1.0; n];
    let mut target = y.to_vec();
    for &(a, b) in &sorted {
        for v in &mut w[a..=b] {
            *v = 0.0;
        }
    }
    for &p in pinned_zeros {
        w[p] = PIN_WEIGHT;
        target[p] = 0.0;
    }
    let s = spline_fit(&target, &w, lambda.max(1e-14), field.grid().spacing())?;
    let mut out = y.to_vec();
    for &(a, b) in &sorted {
        out[a..=b].copy_from_slice(&s[a..=b]);
    }
    for &p in pinned_zeros {
        out[p] = 0.0;
    }
    Ok(SampledField::from_parts_unchecked(*field.grid(), out))
}
