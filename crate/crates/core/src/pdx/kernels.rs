use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::PhysicalConstants;
use crate::series::{TimeAxis, TimeSeries};

/// `1/√i = e^{-iπ/4}`.
pub(crate) fn inv_sqrt_i() -> Complex64 {
    Complex64::from_polar(1.0, -PI / 4.0)
}

fn positive_time(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("propagator time must be positive, got {t}")))
    }
}

/// `g_f(x1, t | x0) = √(m/2πiħt) exp(i m (x1 - x0)² / 2ħt)`.
pub fn free_propagator(x1: f64, t: f64, x0: f64, c: &PhysicalConstants) -> Result<Complex64> {
    positive_time(t)?;
    let amp = (c.mass / (2.0 * PI * c.hbar * t)).sqrt();
    let phase = c.mass * (x1 - x0).powi(2) / (2.0 * c.hbar * t);
    Ok(inv_sqrt_i() * Complex64::from_polar(amp, phase))
}

/// `∂g_f/∂x1`.
pub fn free_propagator_dx(x1: f64, t: f64, x0: f64, c: &PhysicalConstants) -> Result<Complex64> {
    let g = free_propagator(x1, t, x0, c)?;
    Ok(g * Complex64::new(0.0, c.mass * (x1 - x0) / (c.hbar * t)))
}

/// Propagator restricted to paths that never leave `x > 0`, by images.
pub fn restricted_propagator(x1: f64, t: f64, x0: f64, c: &PhysicalConstants) -> Result<Complex64> {
    positive_time(t)?;
    if x1 <= 0.0 || x0 <= 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    Ok(free_propagator(x1, t, x0, c)? - free_propagator(-x1, t, x0, c)?)
}

/// `∂g_r/∂x1` at `x1 = 0⁺`.
pub fn restricted_propagator_dx_origin(t: f64, x0: f64, c: &PhysicalConstants) -> Result<Complex64> {
    positive_time(t)?;
    if x0 <= 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    Ok(free_propagator_dx(0.0, t, x0, c)? * 2.0)
}

/// `⟨0|e^{-iHu/ħ}|0⟩` for `H = p²/2m - iV₀θ(-x)`:
/// `√(m/2πiħ) (1 - e^{-V₀u/ħ}) / ((V₀/ħ) u^{3/2})`.
pub fn edge_kernel(u: f64, v0: f64, c: &PhysicalConstants) -> Result<Complex64> {
    positive_time(u)?;
    if !(v0 >= 0.0 && v0.is_finite()) {
        return Err(Error::InvalidParameter(format!("V0 must be non-negative, got {v0}")));
    }
    let pre = inv_sqrt_i() * (c.mass / (2.0 * PI * c.hbar)).sqrt();
    let z = v0 * u / c.hbar;
    let ratio = if z == 0.0 { 1.0 } else { -(-z).exp_m1() / z };
    Ok(pre * (ratio / u.sqrt()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelForm {
    Edge,
    FreeCoincident,
}

/// Sampled time kernel, optionally tagged with the closed form it discretizes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Kernel {
    pub samples: TimeSeries<Complex64>,
    pub closed_form: Option<KernelForm>,
}

/// The edge kernel on `axis`, which must start after `t = 0`.
pub fn edge_kernel_series(axis: TimeAxis, v0: f64, c: &PhysicalConstants) -> Result<Kernel> {
    if axis.t0 <= 0.0 {
        return Err(Error::InvalidParameter("kernels are never sampled at t <= 0".into()));
    }
    let values = axis.times().map(|u| edge_kernel(u, v0, c)).collect::<Result<Vec<_>>>()?;
    Ok(Kernel { samples: TimeSeries::new(axis, values)?, closed_form: Some(KernelForm::Edge) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modulus_is_position_independent() {
        let c = PhysicalConstants::default();
        for &x in &[-3.0, 0.0, 0.7, 12.0] {
            let g = free_propagator(x, 0.3, 0.2, &c).unwrap();
            assert!((g.norm() - (1.0 / (2.0 * PI * 0.3)).sqrt()).abs() < 1e-14);
        }
        assert!(free_propagator(1.0, 0.0, 0.0, &c).is_err());
    }

    #[test]
    fn images_vanish_and_are_symmetric() {
        let c = PhysicalConstants::new(0.7, 1.3).unwrap();
        assert_eq!(restricted_propagator(0.0, 0.4, 2.0, &c).unwrap(), Complex64::new(0.0, 0.0));
        let a = restricted_propagator(0.8, 0.4, 2.0, &c).unwrap();
        let b = restricted_propagator(2.0, 0.4, 0.8, &c).unwrap();
        assert!((a - b).norm() < 1e-14);
    }

    #[test]
    fn edge_kernel_free_limit() {
        let c = PhysicalConstants::default();
        let u = 0.2;
        let free = free_propagator(0.0, u, 0.0, &c).unwrap();
        assert!((edge_kernel(u, 0.0, &c).unwrap() - free).norm() < 1e-15);
        let small = edge_kernel(u, 1e-4, &c).unwrap();
        let rel = (small - free).norm() / free.norm();
        assert!((rel - 0.5e-4 * u).abs() < 1e-8);
    }
}
