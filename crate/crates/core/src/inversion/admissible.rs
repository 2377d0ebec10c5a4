use crate::discretization::{h1_seminorm, SampledField};
use crate::error::{invalid, Result};

/// Endpoint at which the diffusion coefficient is known.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Pin {
    Left(f64),
    Right(f64),
    None,
}

/// Closed convex set of admissible `(a, q)`:
///
/// ```text
/// a(pin) = a_pin,  a ≥ a_min,  ‖q - q_ref‖₂ ≤ q_radius,  ‖a'‖₂ ≤ slope_bound
/// ```
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdmissibleSet {
    pub a_min: f64,
    pub q_ref: f64,
    pub q_radius: f64,
    pub slope_bound: f64,
    pub pin: Pin,
}

impl Default for AdmissibleSet {
    fn default() -> Self {
        Self { a_min: 0.1, q_ref: 0.0, q_radius: f64::INFINITY, slope_bound: f64::INFINITY, pin: Pin::Left(1.0) }
    }
}

impl AdmissibleSet {
    pub fn validate(&self) -> Result<()> {
        if !(self.a_min > 0.0) {
            return Err(invalid!("lower bound for a must be positive, got {}", self.a_min));
        }
        if !(self.q_radius > 0.0) || !(self.slope_bound > 0.0) {
            return Err(invalid!("admissible radii must be positive"));
        }
        match self.pin {
            Pin::Left(v) | Pin::Right(v) if v < self.a_min => {
                Err(invalid!("pinned value {v} lies below the lower bound {}", self.a_min))
            }
            _ => Ok(()),
        }
    }

    /// Membership test with relative slack `tol`.
    pub fn contains(&self, a: &SampledField, q: &SampledField, tol: f64) -> bool {
        let n = a.len();
        let pin_ok = match self.pin {
            Pin::Left(v) => (a.values()[0] - v).abs() <= tol * v.abs().max(1.0),
            Pin::Right(v) => (a.values()[n - 1] - v).abs() <= tol * v.abs().max(1.0),
            Pin::None => true,
        };
        let q_dist = q.map(|v| v - self.q_ref).l2_norm();
        pin_ok
            && a.min() >= self.a_min * (1.0 - tol)
            && q_dist <= self.q_radius * (1.0 + tol)
            && h1_seminorm(a) <= self.slope_bound * (1.0 + tol)
    }

    /// Clip `a` from below, set the pinned value, and pull `q` radially into
    /// its ball. The slope bound is checked by [`contains`](Self::contains)
    /// only.
    pub fn project(&self, a: &SampledField, q: &SampledField) -> (SampledField, SampledField) {
        let mut a = a.map(|v| v.max(self.a_min));
        let n = a.len();
        match self.pin {
            Pin::Left(v) => a.values_mut()[0] = v,
            Pin::Right(v) => a.values_mut()[n - 1] = v,
            Pin::None => {}
        }
        let dist = q.map(|v| v - self.q_ref).l2_norm();
        let q = if dist > self.q_radius {
            let s = self.q_radius / dist;
            q.map(|v| self.q_ref + s * (v - self.q_ref))
        } else {
            q.clone()
        };
        (a, q)
    }
}
