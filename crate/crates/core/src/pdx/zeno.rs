//! `φ(x)`, the Zeno constant `C` and the two special integrals behind them.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::kernels::{edge_kernel, inv_sqrt_i};
use crate::error::{Error, Result};
use crate::qcore::PhysicalConstants;
use crate::quad::{integrate_sqrt_endpoint, integrate_to_infinity, QuadConfig};

/// Smallest `V₀τ/ħ` for which the `τ → ∞` factorization is trusted.
pub const FACTORIZATION_THRESHOLD: f64 = 20.0;

fn check_v0(v0: f64) -> Result<()> {
    if v0 > 0.0 && v0.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("V0 must be positive, got {v0}")))
    }
}

/// `e^{-iπ/4} √(2m/V₀) exp(-(1-i) √(mV₀) |x| / ħ)`.
pub fn phi_closed_form(x: f64, v0: f64, c: &PhysicalConstants) -> Result<Complex64> {
    check_v0(v0)?;
    let kappa = (c.mass * v0).sqrt() / c.hbar;
    let decay = Complex64::new(-kappa * x.abs(), kappa * x.abs()).exp();
    Ok(inv_sqrt_i() * (2.0 * c.mass / v0).sqrt() * decay)
}

/// Maps `∫₀^∞ dv F(v)` onto the ray `v = w² e^{-iπ/4}`, where both
/// `e^{imx²/2ħv}` and `e^{-V₀v/ħ}` decay.
fn rotated_ray<F>(mut f: F, scale: f64, cfg: &QuadConfig) -> Result<Complex64>
where
    F: FnMut(Complex64) -> Complex64,
{
    let rot = inv_sqrt_i();
    let r = integrate_to_infinity(|w| f(rot * (w * w)) * (rot * (2.0 * w)), 0.0, scale, cfg)?;
    Ok(r.value)
}

/// `√(m/2πiħv)` continued off the real axis with the principal root of `iv`.
fn free_amplitude(v: Complex64, c: &PhysicalConstants) -> Complex64 {
    (c.mass / (2.0 * PI * c.hbar)).sqrt() / (Complex64::i() * v).sqrt()
}

/// `A(x) = ∫₀^∞ dv (m x / v) g_f(x, v | 0) e^{-V₀v/ħ}`.
fn factor_a(x: f64, v0: f64, c: &PhysicalConstants, cfg: &QuadConfig) -> Result<Complex64> {
    let rho = x.abs() * (c.mass / (2.0 * v0)).sqrt();
    let i = Complex64::i();
    rotated_ray(
        |v| {
            let expo = i * (c.mass * x * x / (2.0 * c.hbar)) / v - v * (v0 / c.hbar);
            (c.mass * x) / v * free_amplitude(v, c) * expo.exp()
        },
        3.0 * rho.sqrt(),
        cfg,
    )
}

/// `B = ∫₀^∞ du ⟨0|e^{-iHu/ħ}|0⟩`.
fn factor_b(v0: f64, c: &PhysicalConstants, cfg: &QuadConfig) -> Result<Complex64> {
    let u = c.hbar / v0;
    let kernel = |t: f64| edge_kernel(t, v0, c).unwrap_or(Complex64::new(f64::NAN, 0.0));
    let head = integrate_sqrt_endpoint(kernel, u, cfg)?;
    let tail = integrate_to_infinity(kernel, u, u, cfg)?;
    Ok(head.value + tail.value)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhiValue {
    /// `-(1/m) A(x) B` from quadrature of the two factors.
    pub value: Complex64,
    pub closed_form: Complex64,
    /// `V₀τ/ħ ≥` [`FACTORIZATION_THRESHOLD`].
    pub factorization_valid: bool,
}

/// `φ(x)` for `x < 0` in the large-`V₀τ` factorized form.
pub fn phi_function(x: f64, v0: f64, tau: f64, c: &PhysicalConstants) -> Result<PhiValue> {
    if !(x < 0.0 && x.is_finite()) {
        return Err(Error::InvalidParameter(format!("phi needs x < 0, got {x}")));
    }
    check_v0(v0)?;
    if !(tau > 0.0) {
        return Err(Error::InvalidParameter(format!("tau must be positive, got {tau}")));
    }
    let cfg = QuadConfig::default();
    let value = factor_a(x, v0, c, &cfg)? * factor_b(v0, c, &cfg)? * (-1.0 / c.mass);
    Ok(PhiValue {
        value,
        closed_form: phi_closed_form(x, v0, c)?,
        factorization_valid: v0 * tau / c.hbar >= FACTORIZATION_THRESHOLD,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstantMode {
    Numeric,
    ClosedForm,
}

/// `C = (2V₀/ħm²) ∫_{x<0} |φ(x)|² dx`; closed form `2 m^{-3/2} V₀^{-1/2}`.
pub fn constant_c(v0: f64, c: &PhysicalConstants, mode: ConstantMode) -> Result<f64> {
    check_v0(v0)?;
    match mode {
        ConstantMode::ClosedForm => Ok(2.0 / (c.mass.powf(1.5) * v0.sqrt())),
        ConstantMode::Numeric => {
            let cfg = QuadConfig { rel_tol: 1e-9, ..QuadConfig::default() };
            let inner = QuadConfig::default();
            let b = factor_b(v0, c, &inner)?;
            let mut failure = None;
            let length = c.hbar / (c.mass * v0).sqrt();
            let r = integrate_to_infinity(
                |y| match factor_a(-y, v0, c, &inner) {
                    Ok(a) => Complex64::new((a * b).norm_sqr() / (c.mass * c.mass), 0.0),
                    Err(e) => {
                        failure.get_or_insert(e);
                        Complex64::new(0.0, 0.0)
                    }
                },
                0.0,
                3.0 * length,
                &cfg,
            )?;
            if let Some(e) = failure {
                return Err(e);
            }
            Ok(2.0 * v0 / (c.hbar * c.mass * c.mass) * r.value.re)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpecialIntegrals {
    /// `∫₀^∞ (1 - e^{-x}) x^{-3/2} dx`.
    pub i31: f64,
    /// `|I31 - 2√π| / 2√π`.
    pub i31_relative_error: f64,
    /// `∫₀^∞ dt √(m/2πiħt) e^{imx²/2ħt} e^{iEt/ħ}` at `E = iV₀`.
    pub i30_numeric: Complex64,
    /// `√(m/2E) e^{i√(2mE)|x|/ħ}`.
    pub i30_closed: Complex64,
    pub i30_relative_error: f64,
    /// The same comparison at `x = 0`.
    pub i30_origin_relative_error: f64,
}

fn i30_numeric(x: f64, v0: f64, c: &PhysicalConstants) -> Result<Complex64> {
    let i = Complex64::i();
    let scale = if x == 0.0 { (c.hbar / v0).sqrt() } else { (x.abs() * (c.mass / (2.0 * v0)).sqrt()).sqrt() };
    rotated_ray(
        |t| free_amplitude(t, c) * (i * (c.mass * x * x / (2.0 * c.hbar)) / t - t * (v0 / c.hbar)).exp(),
        3.0 * scale,
        &QuadConfig::default(),
    )
}

fn i30_closed(x: f64, e: Complex64, c: &PhysicalConstants) -> Complex64 {
    let i = Complex64::i();
    (c.mass / (2.0 * e)).sqrt() * (i * (2.0 * c.mass * e).sqrt() * (x.abs() / c.hbar)).exp()
}

/// Quadrature of the free resolvent kernel at `E = iV₀` against its closed form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResolventCheck {
    pub x: f64,
    pub v0: f64,
    pub numeric: Complex64,
    pub closed_form: Complex64,
    pub relative_error: f64,
}

pub fn resolvent_check(x: f64, v0: f64, c: &PhysicalConstants) -> Result<ResolventCheck> {
    check_v0(v0)?;
    if !x.is_finite() {
        return Err(Error::InvalidParameter(format!("x must be finite, got {x}")));
    }
    let numeric = i30_numeric(x, v0, c)?;
    let closed_form = i30_closed(x, Complex64::new(0.0, v0), c);
    Ok(ResolventCheck {
        x,
        v0,
        numeric,
        closed_form,
        relative_error: (numeric - closed_form).norm() / closed_form.norm(),
    })
}

/// `I31` and the `I30` check at `V₀ = 10`, `x = -0.3`, `m = ħ = 1`.
pub fn special_integrals() -> Result<SpecialIntegrals> {
    let cfg = QuadConfig::default();
    let f = |x: f64| Complex64::new(-(-x).exp_m1() * x.powf(-1.5), 0.0);
    let i31 = integrate_sqrt_endpoint(f, 1.0, &cfg)?.value.re + integrate_to_infinity(f, 1.0, 1.0, &cfg)?.value.re;
    let want = 2.0 * PI.sqrt();
    let c = PhysicalConstants::default();
    let (v0, x) = (10.0, -0.3);
    let e = Complex64::new(0.0, v0);
    let num = i30_numeric(x, v0, &c)?;
    let closed = i30_closed(x, e, &c);
    let origin = i30_numeric(0.0, v0, &c)?;
    let origin_closed = i30_closed(0.0, e, &c);
    Ok(SpecialIntegrals {
        i31,
        i31_relative_error: (i31 - want).abs() / want,
        i30_numeric: num,
        i30_closed: closed,
        i30_relative_error: (num - closed).norm() / closed.norm(),
        i30_origin_relative_error: (origin - origin_closed).norm() / origin_closed.norm(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn special_integrals_match() {
        let s = special_integrals().unwrap();
        assert!(s.i31_relative_error < 1e-9, "{s:?}");
        assert!(s.i30_relative_error < 1e-8, "{s:?}");
        assert!(s.i30_origin_relative_error < 1e-8, "{s:?}");
    }

    #[test]
    fn resolvent_check_with_units() {
        let c = PhysicalConstants::new(0.5, 2.0).unwrap();
        let r = resolvent_check(0.4, 30.0, &c).unwrap();
        assert!(r.relative_error < 1e-8, "{r:?}");
        assert!(resolvent_check(0.4, 0.0, &c).is_err());
    }

    #[test]
    fn phi_factors_reproduce_closed_form() {
        let c = PhysicalConstants::default();
        for &x in &[-0.01, -0.05, -0.2] {
            let p = phi_function(x, 100.0, 1.0, &c).unwrap();
            assert!((p.value - p.closed_form).norm() < 1e-7 * p.closed_form.norm(), "{x}: {p:?}");
            assert!(p.factorization_valid);
        }
        assert!(!phi_function(-0.1, 100.0, 0.1, &c).unwrap().factorization_valid);
    }

    #[test]
    fn numeric_constant() {
        let c = PhysicalConstants::default();
        let n = constant_c(100.0, &c, ConstantMode::Numeric).unwrap();
        assert!((n - 0.2).abs() < 1e-6, "{n}");
        let c2 = PhysicalConstants::new(0.5, 2.0).unwrap();
        let n2 = constant_c(100.0, &c2, ConstantMode::Numeric).unwrap();
        let closed = constant_c(100.0, &c2, ConstantMode::ClosedForm).unwrap();
        assert!((n2 - closed).abs() < 1e-6 * closed, "{n2} vs {closed}");
    }
}
