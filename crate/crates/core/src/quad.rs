//! Adaptive Gauss–Kronrod quadrature on finite intervals.

use alloc::vec::Vec;

// Kronrod 15-point nodes (positive half) and weights; Gauss 7-point weights
// correspond to the odd-indexed Kronrod nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Append the 15 Kronrod nodes and weights of the panel `[a, b]` to `out`,
/// for fixed composite rules.
pub fn push_kronrod_panel(a: f64, b: f64, out: &mut Vec<(f64, f64)>) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    out.push((c, h * WGK[7]));
    for j in 0..7 {
        let dx = h * XGK[j];
        out.push((c - dx, h * WGK[j]));
        out.push((c + dx, h * WGK[j]));
    }
}

/// One 15-point Kronrod panel, returning (estimate, error estimate).
fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut resk = fc * WGK[7];
    let mut resg = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        resk += WGK[j] * s;
        if j % 2 == 1 {
            resg += WG[j / 2] * s;
        }
    }
    (resk * h, ((resk - resg) * h).abs())
}

/// Adaptive quadrature of `f` over `[a, b]`.
///
/// Panels are bisected until the summed Kronrod error estimate falls below
/// `max(abs_tol, rel_tol * |I|)` or `max_panels` is reached; the best
/// estimate is returned either way.
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_panels: usize,
) -> f64 {
    if a == b {
        return 0.0;
    }
    let (v, e) = gk15(&mut f, a, b);
    let mut panels: Vec<(f64, f64, f64, f64)> = alloc::vec![(a, b, v, e)];
    let mut total = v;
    let mut err = e;
    while err > abs_tol.max(rel_tol * total.abs()) && panels.len() < max_panels {
        // bisect the panel with the largest error
        let (idx, _) = panels
            .iter()
            .enumerate()
            .fold((0, -1.0), |acc, (i, p)| if p.3 > acc.1 { (i, p.3) } else { acc });
        let (pa, pb, pv, pe) = panels.swap_remove(idx);
        let mid = 0.5 * (pa + pb);
        if mid <= pa || mid >= pb {
            panels.push((pa, pb, pv, 0.0));
            err -= pe;
            continue;
        }
        let (v1, e1) = gk15(&mut f, pa, mid);
        let (v2, e2) = gk15(&mut f, mid, pb);
        total += v1 + v2 - pv;
        err += e1 + e2 - pe;
        panels.push((pa, mid, v1, e1));
        panels.push((mid, pb, v2, e2));
    }
    // re-sum to shed accumulated cancellation from the running updates
    panels.iter().map(|p| p.2).sum()
}

/// Adaptive quadrature over consecutive sub-intervals delimited by `breaks`.
pub fn integrate_pieces<F: FnMut(f64) -> f64>(
    mut f: F,
    breaks: &[f64],
    abs_tol: f64,
    rel_tol: f64,
) -> f64 {
    breaks
        .windows(2)
        .map(|w| integrate(&mut f, w[0], w[1], abs_tol, rel_tol, 4000))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let v = integrate(|x| x.powi(9) - 3.0 * x * x, 0.0, 2.0, 1e-14, 1e-14, 100);
        assert!((v - (102.4 - 8.0)).abs() < 1e-12);
    }

    #[test]
    fn endpoint_singularity() {
        let v = integrate(|x| 1.0 / x.sqrt(), 0.0, 1.0, 1e-12, 1e-12, 2000);
        assert!((v - 2.0).abs() < 1e-9, "{v}");
    }

    #[test]
    fn sharp_peak_with_breaks() {
        let w = 1e-3;
        let v = integrate_pieces(|x| w / ((x - 0.3) * (x - 0.3) + w * w), &[0.0, 0.3, 1.0], 1e-14, 1e-13);
        let exact = (0.7f64 / w).atan() + (0.3f64 / w).atan();
        assert!((v - exact).abs() < 1e-10);
    }
}
