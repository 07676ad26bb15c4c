use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{SpatialGrid, WaveFunction};
use crate::error::{ensure, Error, Result, TailRegion};

pub const DEFAULT_TAIL_TOLERANCE: f64 = 1e-8;

/// Gaussian initial state `ψ ∝ exp(-(x-x0)²/4σ² + i k0 x)`.
///
/// `sigma` is the position standard deviation of `|ψ|²`; the momentum spread
/// is `1/(2σ)` in wavenumber units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianPacketSpec {
    pub x0: f64,
    pub sigma: f64,
    pub k0: f64,
    pub tail_tolerance: f64,
}

impl GaussianPacketSpec {
    pub fn new(x0: f64, sigma: f64, k0: f64) -> Result<Self> {
        let s = Self { x0, sigma, k0, tail_tolerance: DEFAULT_TAIL_TOLERANCE };
        s.validate()?;
        Ok(s)
    }

    pub fn with_tail_tolerance(mut self, tol: f64) -> Result<Self> {
        self.tail_tolerance = tol;
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        ensure(self.x0 > 0.0, || format!("packet centre must lie in x > 0, got {}", self.x0))?;
        ensure(self.sigma > 0.0, || format!("packet width must be positive, got {}", self.sigma))?;
        ensure(self.k0 < 0.0, || format!("packet must move left (k0 < 0), got {}", self.k0))?;
        ensure(self.tail_tolerance > 0.0 && self.tail_tolerance < 1.0, || {
            format!("tail tolerance must lie in (0, 1), got {}", self.tail_tolerance)
        })
    }

    /// Wavenumber standard deviation of `|ψ̃|²`.
    pub fn sigma_k(&self) -> f64 {
        0.5 / self.sigma
    }

    /// Analytic `ψ(x)` of the unit-norm continuum packet.
    pub fn amplitude(&self, x: f64) -> Complex64 {
        let d = x - self.x0;
        let a = (2.0 * PI * self.sigma * self.sigma).powf(-0.25) * (-d * d / (4.0 * self.sigma * self.sigma)).exp();
        Complex64::from_polar(a, self.k0 * x)
    }
}

/// Samples and normalizes the packet, enforcing the tail conditions.
///
/// Rejected when the probability in `x < 0`, at `k > 0`, beyond the right
/// edge of the grid, or beyond the Nyquist wavenumber exceeds the tolerance.
pub fn make_gaussian(spec: &GaussianPacketSpec, grid: &SpatialGrid) -> Result<WaveFunction> {
    spec.validate()?;
    let tol = spec.tail_tolerance;
    let right = 0.5 * libm::erfc((grid.x_max() - spec.x0) / (2f64.sqrt() * spec.sigma));
    if right > tol {
        return Err(Error::TailViolation { region: TailRegion::RightBoundary, mass: right, tolerance: tol });
    }
    let band = 0.5 * libm::erfc((grid.k_nyquist() - spec.k0.abs()) / (2f64.sqrt() * spec.sigma_k()));
    if band > tol {
        return Err(Error::TailViolation { region: TailRegion::Bandwidth, mass: band, tolerance: tol });
    }
    let left = 0.5 * libm::erfc(spec.x0 / (2f64.sqrt() * spec.sigma));
    if left > tol {
        return Err(Error::TailViolation { region: TailRegion::NegativePosition, mass: left, tolerance: tol });
    }
    let positive = 0.5 * libm::erfc(-spec.k0 / (2f64.sqrt() * spec.sigma_k()));
    if positive > tol {
        return Err(Error::TailViolation { region: TailRegion::PositiveMomentum, mass: positive, tolerance: tol });
    }
    let psi = WaveFunction::from_fn(*grid, |x| spec.amplitude(x))?.normalized()?;
    let left = psi.mass_left_of_origin()?;
    if left > tol {
        return Err(Error::TailViolation { region: TailRegion::NegativePosition, mass: left, tolerance: tol });
    }
    let positive = psi.to_momentum()?.positive_momentum_mass()?;
    if positive > tol {
        return Err(Error::TailViolation { region: TailRegion::PositiveMomentum, mass: positive, tolerance: tol });
    }
    Ok(psi)
}
