use alloc::vec;
use alloc::vec::Vec;

use crate::discretization::{
    differentiate, second_derivative, smooth_to_h2, BoundaryCondition, BoundaryKind, SampledField, SmoothingReport,
};
use crate::error::{invalid, Result};
use crate::forward::Reaction;

/// Final-time observations of the two experiments and their filtered
/// versions.
#[derive(Debug, Clone)]
pub struct ObservationSet {
    pub g_u: SampledField,
    pub g_v: SampledField,
    pub noise_level: f64,
    pub filtered_u: SampledField,
    pub filtered_v: SampledField,
    pub smoothing: [Option<SmoothingReport>; 2],
}

impl ObservationSet {
    /// Wraps raw data; for `noise_level > 0` both fields are smoothed with
    /// [`smooth_to_h2`].
    pub fn new(g_u: SampledField, g_v: SampledField, noise_level: f64) -> Result<Self> {
        g_u.grid().check_same(g_v.grid(), "second observation")?;
        if !(noise_level >= 0.0) {
            return Err(invalid!("noise level must be >= 0, got {noise_level}"));
        }
        if noise_level == 0.0 {
            return Ok(Self {
                filtered_u: g_u.clone(),
                filtered_v: g_v.clone(),
                g_u,
                g_v,
                noise_level,
                smoothing: [None, None],
            });
        }
        let (fu, ru) = smooth_to_h2(&g_u, noise_level)?;
        let (fv, rv) = smooth_to_h2(&g_v, noise_level)?;
        Ok(Self { g_u, g_v, noise_level, filtered_u: fu, filtered_v: fv, smoothing: [Some(ru), Some(rv)] })
    }
}

/// `W = g_v g_u' - g_u g_v'`.
pub fn compute_w(g_u: &SampledField, g_v: &SampledField) -> Result<SampledField> {
    let du = differentiate(g_u);
    let dv = differentiate(g_v);
    let mut w = g_v.zip_with(&du, |a, b| a * b)?;
    for ((wi, ui), dvi) in w.values_mut().iter_mut().zip(g_u.values()).zip(dv.values()) {
        *wi -= ui * dvi;
    }
    Ok(w)
}

/// `g_u' g_v'' - g_v' g_u''`, the coefficient of `a` when `a'` is eliminated
/// from the two equations.
pub fn compute_w_tilde(g_u: &SampledField, g_v: &SampledField) -> Result<SampledField> {
    let (du, dv) = (differentiate(g_u), differentiate(g_v));
    let (ddu, ddv) = (second_derivative(g_u), second_derivative(g_v));
    let v: Vec<f64> = (0..g_u.len())
        .map(|i| du.values()[i] * ddv.values()[i] - dv.values()[i] * ddu.values()[i])
        .collect();
    SampledField::new(*g_u.grid(), v)
}

/// Nodes where `W` vanishes: one representative per sign change and per run
/// of nodes with `|W| < rel_threshold · ‖W‖∞`.
pub fn detect_zeros(w: &SampledField, rel_threshold: f64) -> Vec<usize> {
    let v = w.values();
    let n = v.len();
    let cut = rel_threshold * w.sup_norm();
    let mut zeros = Vec::new();
    let mut i = 0;
    while i < n {
        if v[i].abs() < cut || v[i] == 0.0 {
            let start = i;
            while i + 1 < n && (v[i + 1].abs() < cut || v[i + 1] == 0.0) {
                i += 1;
            }
            let best = (start..=i).min_by(|&a, &b| v[a].abs().total_cmp(&v[b].abs())).unwrap_or(start);
            zeros.push(best);
        }
        i += 1;
    }
    for i in 0..n - 1 {
        if v[i] * v[i + 1] < 0.0 {
            let z = if v[i].abs() <= v[i + 1].abs() { i } else { i + 1 };
            zeros.push(z);
        }
    }
    zeros.sort_unstable();
    zeros.dedup();
    // a sign change inside a small-|W| run is the same zero
    let mut merged: Vec<usize> = Vec::new();
    for z in zeros {
        match merged.last_mut() {
            Some(last) if z <= *last + 1 => {
                if v[z].abs() < v[*last].abs() {
                    *last = z;
                }
            }
            _ => merged.push(z),
        }
    }
    merged
}

/// Conditioning summary of `W` for a pair of observations.
#[derive(Debug, Clone, PartialEq)]
pub struct WDiagnostics {
    /// `min |W| / ‖W‖∞`.
    pub min_abs_ratio: f64,
    /// `‖W‖∞ / (‖g_v‖∞ ‖g_u'‖∞ + ‖g_u‖∞ ‖g_v'‖∞)`: size of `W` relative to
    /// the two terms it is the difference of.
    pub relative_magnitude: f64,
    /// `‖W'‖∞ / ‖W‖∞`.
    pub derivative_ratio: f64,
    pub zeros: Vec<usize>,
    pub interior_zeros: usize,
    pub ill_conditioned: bool,
}

pub const ILL_CONDITIONED_RATIO: f64 = 0.05;

pub fn w_diagnostics(g_u: &SampledField, g_v: &SampledField, zero_threshold: f64) -> Result<WDiagnostics> {
    let w = compute_w(g_u, g_v)?;
    let norm = w.sup_norm();
    let n = w.len();
    let min_abs = w.values().iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
    let scale = g_v.sup_norm() * differentiate(g_u).sup_norm() + g_u.sup_norm() * differentiate(g_v).sup_norm();
    let zeros = detect_zeros(&w, zero_threshold);
    let interior_zeros = zeros.iter().filter(|&&z| z > 0 && z + 1 < n).count();
    let min_abs_ratio = if norm > 0.0 { min_abs / norm } else { 0.0 };
    let relative_magnitude = if scale > 0.0 { norm / scale } else { 0.0 };
    let derivative_ratio = if norm > 0.0 { differentiate(&w).sup_norm() / norm } else { f64::INFINITY };
    let ill_conditioned = min_abs_ratio <= ILL_CONDITIONED_RATIO
        && (interior_zeros >= 2 || relative_magnitude < ILL_CONDITIONED_RATIO);
    Ok(WDiagnostics { min_abs_ratio, relative_magnitude, derivative_ratio, zeros, interior_zeros, ill_conditioned })
}

/// One equation `Σ_k G_k a_k + f(g_i) q_i = rhs_i` of the discrete system
/// `-(a g')' + q f(g) = r - D_t^α u` evaluated on data `g`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DataRow {
    pub node: usize,
    /// `(k, G_k)` for the three nodal values of `a` in the conservative
    /// stencil (half-node values are arithmetic means).
    pub a_stencil: [(usize, f64); 3],
    pub q_coefficient: f64,
    /// Terms that depend neither on `a` nor on `q` (impedance data).
    pub constant: f64,
}

/// Rows of the data equation for one experiment: every interior node plus
/// impedance end nodes, mirroring the forward operator row by row.
pub fn data_rows(
    g: &SampledField,
    left: &BoundaryCondition,
    right: &BoundaryCondition,
    reaction: Reaction,
    t: f64,
) -> Vec<DataRow> {
    let v = g.values();
    let n = v.len();
    let h = g.grid().spacing();
    let h2 = h * h;
    let mut rows = Vec::with_capacity(n);
    if let BoundaryKind::Impedance { gamma } = left.kind {
        let d = (v[0] - v[1]) / h2;
        rows.push(DataRow {
            node: 0,
            a_stencil: [(0, d), (1, d), (1, 0.0)],
            q_coefficient: reaction.eval(v[0]),
            constant: 2.0 * left.data.eval(t) / h - 2.0 * gamma / h * v[0],
        });
    }
    for i in 1..n - 1 {
        let fwd = v[i + 1] - v[i];
        let bwd = v[i] - v[i - 1];
        rows.push(DataRow {
            node: i,
            a_stencil: [(i - 1, bwd / (2.0 * h2)), (i, -(fwd - bwd) / (2.0 * h2)), (i + 1, -fwd / (2.0 * h2))],
            q_coefficient: reaction.eval(v[i]),
            constant: 0.0,
        });
    }
    if let BoundaryKind::Impedance { gamma } = right.kind {
        let d = (v[n - 1] - v[n - 2]) / h2;
        rows.push(DataRow {
            node: n - 1,
            a_stencil: [(n - 2, d), (n - 1, d), (n - 1, 0.0)],
            q_coefficient: reaction.eval(v[n - 1]),
            constant: 2.0 * right.data.eval(t) / h - 2.0 * gamma / h * v[n - 1],
        });
    }
    rows
}

impl DataRow {
    /// `Σ_k G_k a_k` for nodal `a`.
    pub fn apply_a(&self, a: &[f64]) -> f64 {
        self.a_stencil.iter().map(|(k, c)| c * a[*k]).sum()
    }
}

/// `-(a g')'` on the nodes of `rows`, zero elsewhere.
pub fn flux_divergence(rows: &[DataRow], a: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n];
    for r in rows {
        out[r.node] = r.apply_a(a);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretization::{EllipticOperator, Grid};
    use core::f64::consts::PI;

    #[test]
    fn wronskian_of_sine_and_cosine() {
        let g = Grid::unit(401).unwrap();
        let s = SampledField::from_fn(g, |x| libm::sin(PI * x));
        let c = SampledField::from_fn(g, |x| libm::cos(PI * x));
        let w = compute_w(&s, &c).unwrap();
        assert!(w.values().iter().all(|v| (v - PI).abs() < 1e-3));
        assert!(compute_w(&s, &s).unwrap().sup_norm() < 1e-14);
    }

    #[test]
    fn zeros_found_once_each() {
        let g = Grid::unit(201).unwrap();
        let w = SampledField::from_fn(g, |x| (x - 0.3) * (x - 0.71) * (1.0 - x));
        let z = detect_zeros(&w, 1e-3);
        assert_eq!(z.len(), 3, "{z:?}");
        assert_eq!(z[0], g.nearest(0.3));
        assert_eq!(z[1], g.nearest(0.71));
        assert_eq!(z[2], 200);
    }

    #[test]
    fn rows_reproduce_forward_operator() {
        let g = Grid::unit(33).unwrap();
        let a = SampledField::from_fn(g, |x| 1.0 + x * x);
        let q = SampledField::from_fn(g, |x| 2.0 - x);
        let w = SampledField::from_fn(g, |x| libm::exp(x) + x);
        let left = BoundaryCondition::dirichlet(1.0);
        let right = BoundaryCondition::impedance(0.7, 0.3).unwrap();
        let op = EllipticOperator::assemble(&g, &a, &q, &left, &right).unwrap();
        let aw = op.matvec(w.values());
        let b = op.boundary_rhs(0.0);
        for r in data_rows(&w, &left, &right, Reaction::Identity, 0.0) {
            let lhs = r.apply_a(a.values()) + r.q_coefficient * q.values()[r.node];
            // operator row minus its boundary data, plus the row constant
            let want = aw[r.node] - b[r.node];
            assert!((lhs - (want + r.constant)).abs() < 1e-9 * aw[r.node].abs().max(1.0), "row {}", r.node);
        }
    }
}
