use std::sync::Arc;

use num_complex::Complex64;
use rustfft::Fft;

use crate::error::{ensure, Result};
use crate::qcore::{PhysicalConstants, SpatialGrid};

/// Precomputed Strang factors for one step size.
struct Factors {
    h_bits: u64,
    /// `e^{-iωh/2} / N`, applied before the inverse transform.
    half_scaled: Vec<Complex64>,
    /// `e^{-iωh/2}`, applied after the forward transform.
    half: Vec<Complex64>,
    /// `e^{-W h / ħ}`.
    absorb: Vec<f64>,
}

const FACTOR_CACHE: usize = 32;

/// Strang-split stepper `e^{-iT h/2ħ} e^{-W h/ħ} e^{-iT h/2ħ}` for `H = T - iW(x)`.
///
/// Between steps the state is held in momentum space with the unnormalized
/// FFT convention, so each step costs one inverse and one forward transform.
pub struct SplitStepper {
    grid: SpatialGrid,
    constants: PhysicalConstants,
    rates: Vec<f64>,
    omega: Vec<f64>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
    cache: Vec<Factors>,
}

impl SplitStepper {
    /// `rates[j]` is the absorption rate `W(x_j) >= 0`.
    pub fn new(grid: SpatialGrid, rates: Vec<f64>, constants: PhysicalConstants) -> Result<Self> {
        ensure(rates.len() == grid.len(), || "one absorption rate per grid point".into())?;
        ensure(rates.iter().all(|r| r.is_finite() && *r >= 0.0), || {
            "absorption rates must be finite and non-negative".into()
        })?;
        let (fwd, inv) = crate::qcore::wave_plan(grid.len());
        let scratch = vec![Complex64::new(0.0, 0.0); fwd.get_inplace_scratch_len().max(inv.get_inplace_scratch_len())];
        let omega = (0..grid.len()).map(|m| constants.kinetic_frequency(grid.k(m))).collect();
        Ok(Self { grid, constants, rates, omega, fwd, inv, scratch, cache: Vec::new() })
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn rates(&self) -> &[f64] {
        &self.rates
    }

    fn factors(&mut self, h: f64) -> usize {
        let bits = h.to_bits();
        if let Some(i) = self.cache.iter().position(|f| f.h_bits == bits) {
            return i;
        }
        if self.cache.len() >= FACTOR_CACHE {
            self.cache.remove(0);
        }
        let n = self.grid.len() as f64;
        let hbar = self.constants.hbar;
        let half: Vec<Complex64> = self.omega.iter().map(|w| Complex64::from_polar(1.0, -0.5 * w * h)).collect();
        let half_scaled = half.iter().map(|z| z / n).collect();
        let absorb = self.rates.iter().map(|r| (-r * h / hbar).exp()).collect();
        self.cache.push(Factors { h_bits: bits, half_scaled, half, absorb });
        self.cache.len() - 1
    }

    /// Forward transform of a position-space state (unnormalized).
    pub fn to_spectral(&mut self, psi: &mut [Complex64]) {
        self.fwd.process_with_scratch(psi, &mut self.scratch);
    }

    /// Inverse of [`SplitStepper::to_spectral`].
    pub fn to_position(&mut self, spectral: &mut [Complex64]) {
        self.inv.process_with_scratch(spectral, &mut self.scratch);
        let s = 1.0 / self.grid.len() as f64;
        spectral.iter_mut().for_each(|z| *z *= s);
    }

    /// One Strang step on a spectral state. `mid` sees the position-space
    /// state right after the absorption factor has been applied.
    pub fn step(&mut self, spectral: &mut [Complex64], h: f64, mut mid: impl FnMut(&[Complex64])) {
        let i = self.factors(h);
        let f = &self.cache[i];
        spectral.iter_mut().zip(&f.half_scaled).for_each(|(z, k)| *z *= k);
        self.inv.process_with_scratch(spectral, &mut self.scratch);
        let f = &self.cache[i];
        spectral.iter_mut().zip(&f.absorb).for_each(|(z, a)| *z *= a);
        mid(spectral);
        self.fwd.process_with_scratch(spectral, &mut self.scratch);
        let f = &self.cache[i];
        spectral.iter_mut().zip(&f.half).for_each(|(z, k)| *z *= k);
    }

    /// Evolves `psi0` through the time nodes and evaluates each linear
    /// functional at every node (node 0 included).
    pub fn observe_along(
        &mut self,
        psi0: &[Complex64],
        nodes: &[f64],
        functionals: &[SpectralFunctional],
    ) -> Vec<Vec<Complex64>> {
        let mut buf = psi0.to_vec();
        self.to_spectral(&mut buf);
        let mut out = Vec::with_capacity(nodes.len());
        out.push(functionals.iter().map(|f| f.apply(&buf)).collect());
        for w in nodes.windows(2) {
            self.step(&mut buf, w[1] - w[0], |_| {});
            out.push(functionals.iter().map(|f| f.apply(&buf)).collect());
        }
        out
    }
}

/// A linear functional on states, stored as weights on unnormalized FFT coefficients.
#[derive(Debug, Clone)]
pub struct SpectralFunctional {
    weights: Vec<Complex64>,
}

impl SpectralFunctional {
    /// `ψ ↦ ψ(x)` through the trigonometric interpolant.
    pub fn point(grid: &SpatialGrid, x: f64) -> Self {
        let n = grid.len();
        let x_first = grid.x(0);
        let nyq = grid.nyquist_index();
        let weights = (0..n)
            .map(|m| {
                let phase = grid.k(m) * (x - x_first);
                if m == nyq {
                    Complex64::new(phase.cos() / n as f64, 0.0)
                } else {
                    Complex64::from_polar(1.0 / n as f64, phase)
                }
            })
            .collect();
        Self { weights }
    }

    /// `ψ ↦ ⟨χ|ψ⟩ = Σ_j χ_j* ψ_j dx` for a position-space `χ`.
    pub fn overlap(grid: &SpatialGrid, chi: &[Complex64]) -> Self {
        let (fwd, _) = crate::qcore::wave_plan(grid.len());
        let mut c = chi.to_vec();
        fwd.process(&mut c);
        let s = grid.dx() / grid.len() as f64;
        Self { weights: c.iter().map(|z| z.conj() * s).collect() }
    }

    #[inline]
    pub fn apply(&self, spectral: &[Complex64]) -> Complex64 {
        self.weights.iter().zip(spectral).map(|(w, z)| w * z).sum()
    }
}

/// Quadratic absorbing ramps at both ends of the periodic cell.
///
/// Used only by grid estimates of propagator columns, where fast components
/// of a point source would otherwise wrap around the cell.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Sponge {
    /// Ramps start at this fraction of the distance from the origin to each edge.
    pub start_fraction: f64,
    /// Rate reached at the edges.
    pub strength: f64,
}

impl Default for Sponge {
    fn default() -> Self {
        Self { start_fraction: 0.6, strength: 3000.0 }
    }
}

impl Sponge {
    pub fn rates(&self, grid: &SpatialGrid) -> Vec<f64> {
        let right = grid.x_max();
        let left = grid.x_min();
        let (rs, ls) = (self.start_fraction * right, self.start_fraction * left);
        (0..grid.len())
            .map(|j| {
                let x = grid.x(j);
                if x > rs {
                    self.strength * ((x - rs) / (right - rs)).powi(2)
                } else if x < ls {
                    self.strength * ((x - ls) / (left - ls)).powi(2)
                } else {
                    0.0
                }
            })
            .collect()
    }
}

/// Nodes on `[0, total]` whose spacing starts at `h_max / 2^levels` and
/// doubles after every `steps_per_level` steps. Past the graded head the
/// nodes sit on multiples of `h_max`, ending exactly at `total`.
pub fn graded_nodes(total: f64, h_max: f64, levels: u32, steps_per_level: usize) -> Vec<f64> {
    let mut nodes = vec![0.0];
    let mut t = 0.0;
    'head: for level in (1..=levels).rev() {
        let h = h_max / f64::from(1u32 << level);
        for _ in 0..steps_per_level {
            if t + h >= total {
                break 'head;
            }
            t += h;
            nodes.push(t);
        }
    }
    let mut i = (t / h_max).floor() as usize + 1;
    loop {
        let next = i as f64 * h_max;
        if next >= total * (1.0 - 1e-12) {
            break;
        }
        if next > t * (1.0 + 1e-12) {
            nodes.push(next);
        }
        i += 1;
    }
    nodes.push(total);
    nodes
}
