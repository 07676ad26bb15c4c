//! Globally adaptive Gauss–Kronrod (7/15) quadrature for complex integrands.
//!
//! Endpoint singularities and infinite ranges are handled by the caller with
//! a change of variables (see [`integrate_to_infinity`] and
//! [`integrate_sqrt_endpoint`]); the core rule never evaluates an endpoint.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

use crate::error::{Error, Result};

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
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

// Gauss weights for XGK[1], XGK[3], XGK[5] and the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self { abs_tol: 1e-14, rel_tol: 1e-11, max_intervals: 4000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: Complex64,
    pub error: f64,
    pub evaluations: usize,
}

struct Piece {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: FnMut(f64) -> Complex64>(f: &mut F, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for i in 0..7 {
        let dx = h * XGK[i];
        let s = f(c - dx) + f(c + dx);
        k += s * WGK[i];
        if i % 2 == 1 {
            g += s * WG[i / 2];
        }
    }
    let k = k * h;
    let g = g * h;
    (k, (k - g).norm())
}

/// Adaptive integration over a union of finite segments sharing one error budget.
pub fn integrate_segments<F>(mut f: F, segments: &[(f64, f64)], cfg: &QuadConfig) -> Result<QuadResult>
where
    F: FnMut(f64) -> Complex64,
{
    let mut heap = BinaryHeap::new();
    let mut evaluations = 0;
    for &(a, b) in segments {
        if a == b {
            continue;
        }
        let (value, error) = kronrod(&mut f, a, b);
        evaluations += 15;
        heap.push(Piece { a, b, value, error });
    }
    loop {
        let total: Complex64 = heap.iter().map(|p| p.value).sum();
        let err: f64 = heap.iter().map(|p| p.error).sum();
        if !total.re.is_finite() || !total.im.is_finite() {
            return Err(Error::Quadrature("integrand produced a non-finite value".into()));
        }
        if err <= cfg.abs_tol.max(cfg.rel_tol * total.norm()) {
            return Ok(QuadResult { value: total, error: err, evaluations });
        }
        if heap.len() >= cfg.max_intervals {
            return Err(Error::Quadrature(format!(
                "error estimate {err:.3e} above tolerance after {} intervals",
                heap.len()
            )));
        }
        let worst = heap.pop().expect("non-empty");
        let m = 0.5 * (worst.a + worst.b);
        if m <= worst.a || m >= worst.b {
            return Err(Error::Quadrature("interval collapsed to machine precision".into()));
        }
        for (a, b) in [(worst.a, m), (m, worst.b)] {
            let (value, error) = kronrod(&mut f, a, b);
            evaluations += 15;
            heap.push(Piece { a, b, value, error });
        }
    }
}

pub fn integrate<F>(f: F, a: f64, b: f64, cfg: &QuadConfig) -> Result<QuadResult>
where
    F: FnMut(f64) -> Complex64,
{
    integrate_segments(f, &[(a, b)], cfg)
}

pub fn integrate_real<F>(mut f: F, a: f64, b: f64, cfg: &QuadConfig) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    Ok(integrate(|x| Complex64::new(f(x), 0.0), a, b, cfg)?.value.re)
}

/// `∫_a^∞ f`: plain rule on `[a, a + scale]`, then `t = T/y²` with `T = a + scale` on the tail,
/// which leaves a `t^{-3/2}` tail smooth in `y`.
pub fn integrate_to_infinity<F>(mut f: F, a: f64, scale: f64, cfg: &QuadConfig) -> Result<QuadResult>
where
    F: FnMut(f64) -> Complex64,
{
    let split = a + scale;
    if !(scale > 0.0 && split > 0.0) {
        return Err(Error::InvalidParameter("integrate_to_infinity needs scale > 0 and a + scale > 0".into()));
    }
    let head = integrate(&mut f, a, split, cfg)?;
    let tail = integrate(|y| f(split / (y * y)) * (2.0 * split / (y * y * y)), 0.0, 1.0, cfg)?;
    Ok(QuadResult {
        value: head.value + tail.value,
        error: head.error + tail.error,
        evaluations: head.evaluations + tail.evaluations,
    })
}

/// `∫_0^b f` for `f ~ t^{-1/2}` at the origin, via `t = w²`.
pub fn integrate_sqrt_endpoint<F>(mut f: F, b: f64, cfg: &QuadConfig) -> Result<QuadResult>
where
    F: FnMut(f64) -> Complex64,
{
    integrate(|w| f(w * w) * (2.0 * w), 0.0, b.sqrt(), cfg)
}
