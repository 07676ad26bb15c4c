use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use super::{PhysicalConstants, SpatialGrid};
use crate::error::{Error, Result};

/// Which basis the amplitudes of a [`WaveFunction`] are stored in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Representation {
    Position,
    Momentum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    ToMomentum,
    ToPosition,
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

pub(crate) fn plan_pair(n: usize) -> (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>) {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        (p.plan_fft_forward(n), p.plan_fft_inverse(n))
    })
}

/// Complex amplitudes on a [`SpatialGrid`].
///
/// In the position representation `amplitudes[j] = ψ(x_j)`. In the momentum
/// representation `amplitudes[m] = ψ̃(k_m)` in FFT ordering, scaled so that
/// `Σ|ψ̃|² dk = Σ|ψ|² dx` (the discrete analogue of the unitary Fourier transform).
#[derive(Debug, Clone, PartialEq)]
pub struct WaveFunction {
    grid: SpatialGrid,
    amplitudes: Vec<Complex64>,
    representation: Representation,
}

impl WaveFunction {
    pub fn new(
        grid: SpatialGrid,
        amplitudes: Vec<Complex64>,
        representation: Representation,
    ) -> Result<Self> {
        if amplitudes.len() != grid.len() {
            return Err(Error::InvalidParameter(format!(
                "expected {} amplitudes, got {}",
                grid.len(),
                amplitudes.len()
            )));
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidParameter("non-finite amplitude".into()));
        }
        Ok(Self { grid, amplitudes, representation })
    }

    /// Samples `f` at every grid point.
    pub fn from_fn(grid: SpatialGrid, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let amps = (0..grid.len()).map(|j| f(grid.x(j))).collect();
        Self::new(grid, amps, Representation::Position)
    }

    pub(crate) fn from_parts_unchecked(
        grid: SpatialGrid,
        amplitudes: Vec<Complex64>,
        representation: Representation,
    ) -> Self {
        Self { grid, amplitudes, representation }
    }

    #[inline]
    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    #[inline]
    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    #[inline]
    pub fn representation(&self) -> Representation {
        self.representation
    }

    fn measure(&self) -> f64 {
        match self.representation {
            Representation::Position => self.grid.dx(),
            Representation::Momentum => self.grid.dk(),
        }
    }

    /// `‖ψ‖²` by the Riemann sum of the current representation.
    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.measure()
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        let amplitudes = self.amplitudes.iter().map(|z| z * factor).collect();
        Self { amplitudes, ..*self }
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm_sqr();
        if !(n > 0.0) {
            return Err(Error::Degenerate("cannot normalize a zero state".into()));
        }
        Ok(self.scaled(Complex64::new(1.0 / n.sqrt(), 0.0)))
    }

    /// `Σ c_i ψ_i` over states sharing one grid and representation.
    pub fn linear_combination(terms: &[(Complex64, &WaveFunction)]) -> Result<Self> {
        let (_, first) = terms
            .first()
            .ok_or_else(|| Error::InvalidParameter("empty linear combination".into()))?;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); first.grid.len()];
        for (c, psi) in terms {
            if psi.grid != first.grid || psi.representation != first.representation {
                return Err(Error::Mismatch("states live on different grids".into()));
            }
            for (a, z) in amplitudes.iter_mut().zip(&psi.amplitudes) {
                *a += c * z;
            }
        }
        Ok(Self { grid: first.grid, amplitudes, representation: first.representation })
    }

    /// This state in the momentum representation (a copy if already there).
    pub fn to_momentum(&self) -> Result<Self> {
        match self.representation {
            Representation::Momentum => Ok(self.clone()),
            Representation::Position => spectral_transform(self, Direction::ToMomentum),
        }
    }

    /// This state in the position representation (a copy if already there).
    pub fn to_position(&self) -> Result<Self> {
        match self.representation {
            Representation::Position => Ok(self.clone()),
            Representation::Momentum => spectral_transform(self, Direction::ToPosition),
        }
    }

    /// Probability in `x < 0` (position representation required).
    pub fn mass_left_of_origin(&self) -> Result<f64> {
        self.require(Representation::Position)?;
        let j0 = self.grid.zero_index();
        Ok(self.amplitudes[..j0].iter().map(|z| z.norm_sqr()).sum::<f64>() * self.grid.dx())
    }

    /// Probability at `k > 0` (momentum representation required).
    pub fn positive_momentum_mass(&self) -> Result<f64> {
        self.require(Representation::Momentum)?;
        let g = &self.grid;
        Ok(self
            .amplitudes
            .iter()
            .enumerate()
            .filter(|(m, _)| g.k(*m) > 0.0)
            .map(|(_, z)| z.norm_sqr())
            .sum::<f64>()
            * g.dk())
    }

    /// Probability in the two edge bands of the periodic cell.
    pub fn boundary_mass(&self) -> Result<f64> {
        self.require(Representation::Position)?;
        let b = self.grid.boundary_band();
        let n = self.grid.len();
        let s: f64 = self.amplitudes[..b]
            .iter()
            .chain(&self.amplitudes[n - b..])
            .map(|z| z.norm_sqr())
            .sum();
        Ok(s * self.grid.dx())
    }

    /// Coefficients `c_m` with `ψ(x) = Σ_m c_m e^{i k_m x}`; `c_m = ψ̃(k_m) dk / √(2π)`.
    pub fn plane_wave_coefficients(&self) -> Result<Vec<Complex64>> {
        let m = match self.representation {
            Representation::Momentum => std::borrow::Cow::Borrowed(self),
            Representation::Position => std::borrow::Cow::Owned(self.to_momentum()?),
        };
        let s = self.grid.dk() / (2.0 * PI).sqrt();
        Ok(m.amplitudes.iter().map(|z| z * s).collect())
    }

    /// Trigonometric interpolant at an arbitrary `x`; exact at grid points.
    pub fn value_at(&self, x: f64) -> Result<Complex64> {
        if self.representation == Representation::Position {
            if let Some(j) = self.grid.index_of(x) {
                return Ok(self.amplitudes[j]);
            }
        }
        let c = self.plane_wave_coefficients()?;
        let nyq = self.grid.nyquist_index();
        Ok(c.iter()
            .enumerate()
            .map(|(m, cm)| {
                let k = self.grid.k(m);
                if m == nyq {
                    cm * (k * x).cos()
                } else {
                    cm * Complex64::from_polar(1.0, k * x)
                }
            })
            .sum())
    }

    pub(crate) fn require(&self, r: Representation) -> Result<()> {
        if self.representation == r {
            Ok(())
        } else {
            Err(Error::Contract(format!("expected {r:?} representation, got {:?}", self.representation)))
        }
    }
}

/// Unitary discrete Fourier transform between the two representations.
pub fn spectral_transform(psi: &WaveFunction, direction: Direction) -> Result<WaveFunction> {
    let g = psi.grid;
    let n = g.len();
    let (fwd, inv) = plan_pair(n);
    let mut buf = psi.amplitudes.clone();
    let x0 = g.x(0);
    match direction {
        Direction::ToMomentum => {
            psi.require(Representation::Position)?;
            fwd.process(&mut buf);
            let s = g.dx() / (2.0 * PI).sqrt();
            for (m, z) in buf.iter_mut().enumerate() {
                *z *= Complex64::from_polar(s, -g.k(m) * x0);
            }
            Ok(WaveFunction::from_parts_unchecked(g, buf, Representation::Momentum))
        }
        Direction::ToPosition => {
            psi.require(Representation::Momentum)?;
            let s = (2.0 * PI).sqrt() / (g.dx() * n as f64);
            for (m, z) in buf.iter_mut().enumerate() {
                *z *= Complex64::from_polar(s, g.k(m) * x0);
            }
            inv.process(&mut buf);
            Ok(WaveFunction::from_parts_unchecked(g, buf, Representation::Position))
        }
    }
}

/// Pointwise observables of a state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Observables {
    pub norm_sqr: f64,
    pub mean_x: f64,
    pub mean_p: f64,
    /// `ψ(0)`.
    pub psi_at_0: Complex64,
    /// `∂ₓψ(0)`, differentiated in momentum space. `⟨0|p̂|ψ⟩ = -iħ dpsi_at_0`.
    pub dpsi_at_0: Complex64,
}

pub fn observables(psi: &WaveFunction, constants: &PhysicalConstants) -> Result<Observables> {
    let (pos, mom) = match psi.representation {
        Representation::Position => (psi.clone(), psi.to_momentum()?),
        Representation::Momentum => (psi.to_position()?, psi.clone()),
    };
    let g = psi.grid;
    let norm_sqr = pos.norm_sqr();
    if !(norm_sqr > 0.0) {
        return Err(Error::Degenerate("observables of a zero state".into()));
    }
    let mean_x = pos
        .amplitudes
        .iter()
        .enumerate()
        .map(|(j, z)| g.x(j) * z.norm_sqr())
        .sum::<f64>()
        * g.dx()
        / norm_sqr;
    let nyq = g.nyquist_index();
    let mut mean_k = 0.0;
    let mut psi0 = Complex64::new(0.0, 0.0);
    let mut dpsi0 = Complex64::new(0.0, 0.0);
    let s = g.dk() / (2.0 * PI).sqrt();
    for (m, z) in mom.amplitudes.iter().enumerate() {
        let c = z * s;
        psi0 += c;
        if m == nyq {
            continue;
        }
        let k = g.k(m);
        mean_k += k * z.norm_sqr();
        dpsi0 += Complex64::new(0.0, k) * c;
    }
    Ok(Observables {
        norm_sqr,
        mean_x,
        mean_p: constants.hbar * mean_k * g.dk() / norm_sqr,
        psi_at_0: psi0,
        dpsi_at_0: dpsi0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> SpatialGrid {
        SpatialGrid::new(-20.0, 20.0, 1024).unwrap()
    }

    #[test]
    fn wrong_tag_is_contract_violation() {
        let psi = WaveFunction::from_fn(grid(), |x| Complex64::new((-x * x).exp(), 0.0)).unwrap();
        assert!(matches!(
            spectral_transform(&psi, Direction::ToPosition),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn gaussian_transform_matches_analytic() {
        // ψ = π^{-1/4} e^{-x²/2}  ⇒  ψ̃ = π^{-1/4} e^{-k²/2}
        let g = grid();
        let psi = WaveFunction::from_fn(g, |x| Complex64::new(PI.powf(-0.25) * (-x * x / 2.0).exp(), 0.0))
            .unwrap();
        let mom = psi.to_momentum().unwrap();
        for m in 0..g.len() {
            let k = g.k(m);
            let want = PI.powf(-0.25) * (-k * k / 2.0).exp();
            assert!((mom.amplitudes()[m] - want).norm() < 1e-12, "k={k}");
        }
    }

    #[test]
    fn real_even_state_has_zero_slope_at_origin() {
        let g = grid();
        let psi = WaveFunction::from_fn(g, |x| Complex64::new((-x * x).exp() * (3.0 * x).cos(), 0.0)).unwrap();
        let obs = observables(&psi, &PhysicalConstants::default()).unwrap();
        assert!(obs.dpsi_at_0.norm() < 1e-10);
        assert!((obs.psi_at_0.re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn slope_matches_analytic_derivative() {
        let g = grid();
        // ψ = e^{-(x-1)²} ⇒ ψ'(0) = 2 e^{-1}
        let psi = WaveFunction::from_fn(g, |x| Complex64::new((-(x - 1.0) * (x - 1.0)).exp(), 0.0)).unwrap();
        let obs = observables(&psi, &PhysicalConstants::default()).unwrap();
        assert!((obs.dpsi_at_0.re - 2.0 * (-1.0f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn value_at_interpolates_smooth_state() {
        let g = grid();
        let f = |x: f64| Complex64::new((-(x - 0.3) * (x - 0.3)).exp(), 0.0) * Complex64::from_polar(1.0, 2.0 * x);
        let psi = WaveFunction::from_fn(g, f).unwrap();
        let x = 0.123456;
        assert!((psi.value_at(x).unwrap() - f(x)).norm() < 1e-12);
    }
}
