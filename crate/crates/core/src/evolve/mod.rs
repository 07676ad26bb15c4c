//! Absorbed time evolution and the arrival densities derived from it.

mod split;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use split::{graded_nodes, SpectralFunctional, SplitStepper, Sponge};

use crate::error::{Error, Result};
use crate::qcore::{AbsorbingPotential, PhysicalConstants, Representation, WaveFunction};
use crate::series::{TimeAxis, TimeSeries};

/// Largest allowed `dt · max W / ħ`.
pub const MAX_STEP_ABSORPTION: f64 = 20.0;
/// Boundary mass above which a run is aborted.
pub const DEFAULT_BOUNDARY_TOLERANCE: f64 = 1e-6;
/// Momentum tail that may lie outside the band whose kinetic phase per step is checked.
pub const DEFAULT_BAND_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolutionConfig {
    pub dt: f64,
    pub t_max: f64,
    /// Steps between recorded states.
    pub record_stride: usize,
    pub potential: AbsorbingPotential,
    pub constants: PhysicalConstants,
    /// Abort when more than this mass sits in the edge bands. `None` disables the check.
    pub boundary_tolerance: Option<f64>,
    pub band_tolerance: f64,
    /// Keep the recorded states in the result.
    pub keep_states: bool,
}

impl EvolutionConfig {
    pub fn new(dt: f64, t_max: f64, potential: AbsorbingPotential) -> Self {
        Self {
            dt,
            t_max,
            record_stride: 1,
            potential,
            constants: PhysicalConstants::default(),
            boundary_tolerance: Some(DEFAULT_BOUNDARY_TOLERANCE),
            band_tolerance: DEFAULT_BAND_TOLERANCE,
            keep_states: true,
        }
    }

    pub fn with_record_stride(mut self, stride: usize) -> Self {
        self.record_stride = stride;
        self
    }

    pub fn with_constants(mut self, constants: PhysicalConstants) -> Self {
        self.constants = constants;
        self
    }

    pub fn with_boundary_tolerance(mut self, tol: Option<f64>) -> Self {
        self.boundary_tolerance = tol;
        self
    }

    pub fn without_states(mut self) -> Self {
        self.keep_states = false;
        self
    }

    /// Number of steps, requiring `t_max` to be a whole number of steps.
    pub fn steps(&self) -> Result<usize> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::Config(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_max.is_finite() && self.t_max >= self.dt) {
            return Err(Error::Config(format!("t_max = {} must be at least dt = {}", self.t_max, self.dt)));
        }
        let ratio = self.t_max / self.dt;
        let n = ratio.round();
        if (ratio - n).abs() > 1e-6 * ratio.max(1.0) {
            return Err(Error::Config(format!("t_max = {} is not a whole number of steps dt = {}", self.t_max, self.dt)));
        }
        Ok(n as usize)
    }

    /// Checks every step-size precondition against the initial state.
    pub fn validate(&self, psi0: &WaveFunction) -> Result<()> {
        self.steps()?;
        if self.record_stride == 0 {
            return Err(Error::Config("record_stride must be at least 1".into()));
        }
        if let Some(tol) = self.boundary_tolerance {
            if !(tol > 0.0) {
                return Err(Error::Config(format!("boundary tolerance must be positive, got {tol}")));
            }
        }
        self.potential.profile().validate().map_err(|e| Error::Config(e.to_string()))?;
        let rates = self.potential.rates_on(psi0.grid())?;
        let w_max = rates.iter().cloned().fold(0.0, f64::max);
        let step_absorption = self.dt * w_max / self.constants.hbar;
        if step_absorption > MAX_STEP_ABSORPTION {
            return Err(Error::Config(format!(
                "dt * max W / hbar = {step_absorption:.3} exceeds {MAX_STEP_ABSORPTION}"
            )));
        }
        let band = resolved_band(psi0, self.band_tolerance)?;
        let phase = self.dt * self.constants.kinetic_frequency(band);
        if phase >= std::f64::consts::PI {
            return Err(Error::Config(format!(
                "kinetic phase per step {phase:.3} at the resolved wavenumber {band:.3} is not below pi"
            )));
        }
        Ok(())
    }
}

/// Smallest `K` such that at most `tol` of the momentum mass lies at `|k| > K`.
pub fn resolved_band(psi: &WaveFunction, tol: f64) -> Result<f64> {
    let mom = psi.to_momentum()?;
    let dk = psi.grid().dk();
    let mut bins: Vec<(f64, f64)> = mom
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(m, z)| (psi.grid().k(m).abs(), z.norm_sqr() * dk))
        .collect();
    let total: f64 = bins.iter().map(|b| b.1).sum();
    if total <= 0.0 {
        return Err(Error::Degenerate("state has zero norm".into()));
    }
    bins.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut tail = 0.0;
    for (k, w) in bins {
        tail += w;
        if tail > tol * total {
            return Ok(k);
        }
    }
    Ok(0.0)
}

#[derive(Debug, Clone)]
pub struct Evolution {
    /// `N(t_j) = ⟨ψ(t_j)|ψ(t_j)⟩` at every step, `t_0 = 0`.
    pub survival: TimeSeries,
    /// Times of the recorded states.
    pub record_axis: TimeAxis,
    /// Recorded states, empty unless `keep_states` was set.
    pub states: Vec<WaveFunction>,
    /// Arrival density from the potential expectation at the recorded times.
    pub potential_density: TimeSeries,
    pub final_state: WaveFunction,
}

/// Evolves `psi0` under `H = p²/2m - i V₀ f(x) θ(-x)`.
pub fn evolve(psi0: &WaveFunction, cfg: &EvolutionConfig) -> Result<Evolution> {
    evolve_with(psi0, cfg, |_, _| {})
}

/// As [`evolve`], also handing each recorded state to `observer`.
pub fn evolve_with(
    psi0: &WaveFunction,
    cfg: &EvolutionConfig,
    mut observer: impl FnMut(f64, &WaveFunction),
) -> Result<Evolution> {
    let psi0 = psi0.to_position()?;
    cfg.validate(&psi0)?;
    let n_steps = cfg.steps()?;
    let grid = *psi0.grid();
    let dx = grid.dx();
    let rates = cfg.potential.rates_on(&grid)?;
    let mut stepper = SplitStepper::new(grid, rates.clone(), cfg.constants)?;
    let band = grid.boundary_band();
    let n = grid.len();
    let boundary_mass =
        |psi: &[Complex64]| -> f64 { (psi[..band].iter().chain(&psi[n - band..])).map(|z| z.norm_sqr()).sum::<f64>() * dx };
    let pot_density = |psi: &[Complex64]| -> f64 {
        2.0 / cfg.constants.hbar * psi.iter().zip(&rates).map(|(z, r)| r * z.norm_sqr()).sum::<f64>() * dx
    };

    let stride = cfg.record_stride;
    let n_records = n_steps / stride + 1;
    let record_axis = TimeAxis::new(0.0, stride as f64 * cfg.dt, n_records)?;
    let mut survival = Vec::with_capacity(n_steps + 1);
    let mut states = Vec::new();
    let mut pot = Vec::with_capacity(n_records);

    let norm0 = psi0.norm_sqr();
    survival.push(norm0);
    pot.push(pot_density(psi0.amplitudes()));
    observer(0.0, &psi0);
    if cfg.keep_states {
        states.push(psi0.clone());
    }

    let mut buf = psi0.amplitudes().to_vec();
    stepper.to_spectral(&mut buf);
    let mut failure = None;
    for step in 1..=n_steps {
        let t = step as f64 * cfg.dt;
        let mut norm = 0.0;
        let mut edge = 0.0;
        stepper.step(&mut buf, cfg.dt, |psi| {
            norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>() * dx;
            edge = boundary_mass(psi);
        });
        survival.push(norm);
        if let Some(limit) = cfg.boundary_tolerance {
            if edge > limit {
                failure = Some(Error::BoundaryMass { time: t, mass: edge, limit });
                break;
            }
        }
        if step % stride == 0 {
            let mut pos = buf.clone();
            stepper.to_position(&mut pos);
            pot.push(pot_density(&pos));
            let state = WaveFunction::from_parts_unchecked(grid, pos, Representation::Position);
            observer(t, &state);
            if cfg.keep_states {
                states.push(state);
            }
        }
    }
    if let Some(e) = failure {
        return Err(e);
    }
    stepper.to_position(&mut buf);
    let final_state = WaveFunction::new(grid, buf, Representation::Position)?;
    Ok(Evolution {
        survival: TimeSeries::new(TimeAxis::new(0.0, cfg.dt, n_steps + 1)?, survival)?,
        record_axis,
        states,
        potential_density: TimeSeries::new(record_axis, pot)?,
        final_state,
    })
}

/// `Π = -dN/dt` by centered differences, second-order one-sided at the ends.
pub fn arrival_density_from_norm(survival: &TimeSeries) -> Result<TimeSeries> {
    let n = survival.values.len();
    if n < 3 {
        return Err(Error::Degenerate(format!("need at least 3 survival samples, got {n}")));
    }
    let v = &survival.values;
    let h = survival.dt;
    let mut out = Vec::with_capacity(n);
    out.push((3.0 * v[0] - 4.0 * v[1] + v[2]) / (2.0 * h));
    for j in 1..n - 1 {
        out.push((v[j - 1] - v[j + 1]) / (2.0 * h));
    }
    out.push(-(3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h));
    TimeSeries::new(survival.axis(), out)
}

/// `Π(t) = (2/ħ) ∫ W(x) |ψ(x,t)|² dx` for each state, `W = V₀ f θ(-x)`.
pub fn arrival_density_from_potential(
    states: &[WaveFunction],
    axis: TimeAxis,
    potential: &AbsorbingPotential,
    constants: &PhysicalConstants,
) -> Result<TimeSeries> {
    let first = states.first().ok_or_else(|| Error::Degenerate("no states".into()))?;
    let grid = *first.grid();
    let rates = potential.rates_on(&grid)?;
    let values = states
        .iter()
        .map(|s| {
            if s.grid() != &grid {
                return Err(Error::Mismatch("states live on different grids".into()));
            }
            let s = s.to_position()?;
            let sum: f64 = s.amplitudes().iter().zip(&rates).map(|(z, r)| r * z.norm_sqr()).sum();
            Ok(2.0 / constants.hbar * sum * grid.dx())
        })
        .collect::<Result<Vec<_>>>()?;
    TimeSeries::new(axis, values)
}

/// Plateau test applied to the tail of a survival curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Plateau {
    /// Trailing window as a fraction of the sampled span.
    pub window_fraction: f64,
    pub tolerance: f64,
}

impl Default for Plateau {
    fn default() -> Self {
        Self { window_fraction: 0.1, tolerance: 1e-8 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReflectionEstimate {
    /// `N(t_max)` as the estimate of `N(∞)`.
    pub value: f64,
    /// `|N(t_max) - N(t_max - Δ)|`.
    pub residual: f64,
    pub plateaued: bool,
}

pub fn reflection_probability(survival: &TimeSeries) -> Result<ReflectionEstimate> {
    reflection_probability_with(survival, Plateau::default())
}

pub fn reflection_probability_with(survival: &TimeSeries, plateau: Plateau) -> Result<ReflectionEstimate> {
    let n = survival.values.len();
    if n < 2 {
        return Err(Error::Degenerate("survival needs at least 2 samples".into()));
    }
    if !(plateau.window_fraction > 0.0 && plateau.window_fraction <= 1.0 && plateau.tolerance > 0.0) {
        return Err(Error::InvalidParameter(format!("bad plateau criterion {plateau:?}")));
    }
    let back = (((n - 1) as f64 * plateau.window_fraction).round() as usize).clamp(1, n - 1);
    let value = survival.values[n - 1];
    let residual = (value - survival.values[n - 1 - back]).abs();
    Ok(ReflectionEstimate { value, residual, plateaued: residual < plateau.tolerance })
}
