use alloc::vec;
use alloc::vec::Vec;

use super::grid::SampledField;

/// First derivative: centered differences inside, second-order one-sided
/// differences at the two ends.
pub fn differentiate(field: &SampledField) -> SampledField {
    let h = field.grid().spacing();
    let v = field.values();
    SampledField::from_parts_unchecked(*field.grid(), derivative_values(v, h))
}

pub(crate) fn derivative_values(v: &[f64], h: f64) -> Vec<f64> {
    let n = v.len();
    let mut d = vec![0.0; n];
    for i in 1..n - 1 {
        d[i] = (v[i + 1] - v[i - 1]) / (2.0 * h);
    }
    d[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
    d[n - 1] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h);
    d
}

/// Second derivative: three-point stencil inside, second-order four-point
/// one-sided stencils at the ends (needs at least 4 nodes).
pub fn second_derivative(field: &SampledField) -> SampledField {
    let h = field.grid().spacing();
    let v = field.values();
    let n = v.len();
    let h2 = h * h;
    let mut d = vec![0.0; n];
    for i in 1..n - 1 {
        d[i] = (v[i + 1] - 2.0 * v[i] + v[i - 1]) / h2;
    }
    if n >= 4 {
        d[0] = (2.0 * v[0] - 5.0 * v[1] + 4.0 * v[2] - v[3]) / h2;
        d[n - 1] = (2.0 * v[n - 1] - 5.0 * v[n - 2] + 4.0 * v[n - 3] - v[n - 4]) / h2;
    } else {
        d[0] = d[1];
        d[n - 1] = d[n - 2];
    }
    SampledField::from_parts_unchecked(*field.grid(), d)
}

/// Cumulative trapezoidal integral `∫_0^x f`, zero at the left end.
pub fn integrate_cumulative(field: &SampledField) -> SampledField {
    let h = field.grid().spacing();
    let v = field.values();
    let mut out = Vec::with_capacity(v.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in v.windows(2) {
        acc += 0.5 * h * (w[0] + w[1]);
        out.push(acc);
    }
    SampledField::from_parts_unchecked(*field.grid(), out)
}

/// Trapezoidal `∫_0^L f`.
pub fn integrate(field: &SampledField) -> f64 {
    let h = field.grid().spacing();
    let v = field.values();
    let n = v.len();
    h * (v.iter().sum::<f64>() - 0.5 * (v[0] + v[n - 1]))
}

/// `‖f'‖₂` with the derivative from [`differentiate`].
pub fn h1_seminorm(field: &SampledField) -> f64 {
    differentiate(field).l2_norm()
}
