//! Ideal arrival-time distributions at `x = 0` for freely evolving packets.
//!
//! Free evolution uses the exact phases `e^{-iħk²t/2m}` on the plane-wave
//! coefficients of the initial state, so no time stepping enters here.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, TailRegion};
use crate::evolve::ReflectionEstimate;
use crate::qcore::{GaussianPacketSpec, PhysicalConstants, SpatialGrid, WaveFunction, DEFAULT_TAIL_TOLERANCE};
use crate::qcore::make_gaussian;
use crate::series::{trapezoid, TimeAxis, TimeSeries};

/// Smallest `1 - N(∞)` accepted by [`normalize_distribution`].
pub const MIN_CROSSED: f64 = 1e-12;

/// Values at the origin of a freely evolved state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OriginSample {
    /// `ψ_f(0, t)`.
    pub psi: Complex64,
    /// `⟨0|p|ψ_f(t)⟩ = -iħ ∂ψ_f(0, t)`.
    pub momentum: Complex64,
    /// `Σ_{k<0} |k|^{1/2} c_k e^{-iħk²t/2m}`.
    pub kijowski: Complex64,
}

/// Plane-wave expansion of an initial state, evaluated at the origin for any time.
#[derive(Debug, Clone)]
pub struct FreeEvolution {
    constants: PhysicalConstants,
    modes: Vec<Mode>,
    mean_momentum: f64,
    positive_mass: f64,
}

#[derive(Debug, Clone, Copy)]
struct Mode {
    k: f64,
    omega: f64,
    c: Complex64,
    /// Whether `k` enters derivatives (the Nyquist bin does not).
    differentiable: bool,
}

impl FreeEvolution {
    pub fn new(psi0: &WaveFunction, constants: PhysicalConstants) -> Result<Self> {
        let grid = psi0.grid();
        let mom = psi0.to_momentum()?;
        let norm = mom.norm_sqr();
        if !(norm > 0.0) {
            return Err(Error::Degenerate("state has zero norm".into()));
        }
        let coeffs = mom.plane_wave_coefficients()?;
        let nyq = grid.nyquist_index();
        let dk = grid.dk();
        let mut p = 0.0;
        let mut positive = 0.0;
        for (m, z) in mom.amplitudes().iter().enumerate() {
            let k = grid.k(m);
            p += k * z.norm_sqr() * dk;
            if k > 0.0 {
                positive += z.norm_sqr() * dk;
            }
        }
        let modes = coeffs
            .iter()
            .enumerate()
            .map(|(m, &c)| {
                let k = grid.k(m);
                Mode { k, omega: constants.kinetic_frequency(k), c, differentiable: m != nyq }
            })
            .collect();
        Ok(Self {
            constants,
            modes,
            mean_momentum: constants.hbar * p / norm,
            positive_mass: positive / norm,
        })
    }

    /// `⟨p⟩` of the initial state.
    pub fn mean_momentum(&self) -> f64 {
        self.mean_momentum
    }

    /// Fraction of the norm carried by `k > 0`.
    pub fn positive_momentum_fraction(&self) -> f64 {
        self.positive_mass
    }

    pub fn constants(&self) -> PhysicalConstants {
        self.constants
    }

    pub fn at(&self, t: f64) -> OriginSample {
        let mut psi = Complex64::new(0.0, 0.0);
        let mut d = Complex64::new(0.0, 0.0);
        let mut kij = Complex64::new(0.0, 0.0);
        for mode in &self.modes {
            let z = mode.c * Complex64::from_polar(1.0, -mode.omega * t);
            psi += z;
            if mode.differentiable {
                d += z * mode.k;
                if mode.k < 0.0 {
                    kij += z * (-mode.k).sqrt();
                }
            }
        }
        OriginSample { psi, momentum: d * self.constants.hbar, kijowski: kij }
    }

    pub fn sample(&self, times: TimeAxis) -> Vec<OriginSample> {
        (0..times.len).into_par_iter().map(|j| self.at(times.time(j))).collect()
    }

    fn series(&self, times: TimeAxis, f: impl Fn(&OriginSample) -> f64 + Sync) -> Result<TimeSeries> {
        let values = (0..times.len).into_par_iter().map(|j| f(&self.at(times.time(j)))).collect();
        TimeSeries::new(times, values)
    }

    /// `|⟨0|p|ψ_f(t)⟩|²`.
    pub fn pdp(&self, times: TimeAxis) -> Result<TimeSeries> {
        self.series(times, |s| s.momentum.norm_sqr())
    }

    /// `|⟨0|p|ψ_f⟩|² / (m |⟨p⟩|)`.
    pub fn normalized_pdp(&self, times: TimeAxis) -> Result<TimeSeries> {
        let p = self.mean_momentum.abs();
        let scale = self.mode_momentum_scale();
        if !(p > 1e-6 * scale) {
            return Err(Error::Degenerate(format!("mean momentum {p:.3e} too small to normalize")));
        }
        let factor = 1.0 / (self.constants.mass * p);
        self.series(times, |s| s.momentum.norm_sqr() * factor)
    }

    /// Flux through the origin toward `x < 0`, `-(ħ/m) Re[ψ*(0) ⟨0|p|ψ⟩]`.
    pub fn current(&self, times: TimeAxis) -> Result<TimeSeries> {
        let f = self.constants.hbar / self.constants.mass;
        self.series(times, |s| -f * (s.psi.conj() * s.momentum).re)
    }

    /// `(ħ/m) |Σ_{k<0} |k|^{1/2} c_k e^{-iω t}|²`.
    pub fn kijowski(&self, times: TimeAxis, tolerance: f64) -> Result<TimeSeries> {
        if self.positive_mass > tolerance {
            return Err(Error::TailViolation {
                region: TailRegion::PositiveMomentum,
                mass: self.positive_mass,
                tolerance,
            });
        }
        let f = self.constants.hbar / self.constants.mass;
        self.series(times, |s| f * s.kijowski.norm_sqr())
    }

    fn mode_momentum_scale(&self) -> f64 {
        let (mut num, mut den) = (0.0, 0.0);
        for m in &self.modes {
            num += m.k * m.k * m.c.norm_sqr();
            den += m.c.norm_sqr();
        }
        self.constants.hbar * (num / den).sqrt()
    }
}

/// `e^{-iH₀t/ħ} ψ` by exact phases on the grid wavenumbers.
pub fn free_evolve(psi: &WaveFunction, t: f64, constants: PhysicalConstants) -> Result<WaveFunction> {
    let mom = psi.to_momentum()?;
    let g = *psi.grid();
    let amps = mom
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(m, z)| z * Complex64::from_polar(1.0, -constants.kinetic_frequency(g.k(m)) * t))
        .collect();
    WaveFunction::new(g, amps, crate::qcore::Representation::Momentum)?.to_position()
}

pub fn pdp_density(psi0: &WaveFunction, times: TimeAxis, constants: PhysicalConstants) -> Result<TimeSeries> {
    FreeEvolution::new(psi0, constants)?.pdp(times)
}

pub fn normalized_pdp(psi0: &WaveFunction, times: TimeAxis, constants: PhysicalConstants) -> Result<TimeSeries> {
    FreeEvolution::new(psi0, constants)?.normalized_pdp(times)
}

pub fn current_density(psi0: &WaveFunction, times: TimeAxis, constants: PhysicalConstants) -> Result<TimeSeries> {
    FreeEvolution::new(psi0, constants)?.current(times)
}

pub fn kijowski_density(psi0: &WaveFunction, times: TimeAxis, constants: PhysicalConstants) -> Result<TimeSeries> {
    FreeEvolution::new(psi0, constants)?.kijowski(times, DEFAULT_TAIL_TOLERANCE)
}

/// `Π / (1 - N(∞))`, requiring a plateaued survival curve.
pub fn normalize_distribution(pi: &TimeSeries, reflection: &ReflectionEstimate) -> Result<TimeSeries> {
    if !reflection.plateaued {
        return Err(Error::Contract(format!(
            "survival has not plateaued (residual {:.3e}); extend t_max",
            reflection.residual
        )));
    }
    let crossed = 1.0 - reflection.value;
    if !(crossed >= MIN_CROSSED) {
        return Err(Error::Degenerate(format!("nothing crossed: 1 - N(inf) = {crossed:.3e}")));
    }
    Ok(pi.scaled(1.0 / crossed))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub mass: f64,
    pub mean: f64,
    pub variance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Distance {
    pub l1: f64,
    pub linf: f64,
}

/// Named distributions on one time grid with their moments and pairwise distances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionReport {
    pub distributions: BTreeMap<String, TimeSeries>,
    pub moments: BTreeMap<String, Moments>,
    /// Keyed by `"a|b"` with `a < b`.
    pub distances: BTreeMap<String, Distance>,
}

impl DistributionReport {
    pub fn distance(&self, a: &str, b: &str) -> Option<Distance> {
        let key = if a <= b { format!("{a}|{b}") } else { format!("{b}|{a}") };
        self.distances.get(&key).copied()
    }
}

pub fn moments(pi: &TimeSeries) -> Moments {
    let t: Vec<f64> = pi.axis().times().collect();
    let mass = pi.integral();
    let first: Vec<f64> = t.iter().zip(&pi.values).map(|(t, v)| t * v).collect();
    let mean = trapezoid(&first, pi.dt) / mass;
    let second: Vec<f64> = t.iter().zip(&pi.values).map(|(t, v)| (t - mean).powi(2) * v).collect();
    Moments { mass, mean, variance: trapezoid(&second, pi.dt) / mass }
}

pub fn distance(a: &TimeSeries, b: &TimeSeries) -> Result<Distance> {
    if !a.axis().matches(&b.axis()) {
        return Err(Error::Mismatch(format!("time grids differ: {:?} vs {:?}", a.axis(), b.axis())));
    }
    let diff: Vec<f64> = a.values.iter().zip(&b.values).map(|(x, y)| (x - y).abs()).collect();
    Ok(Distance { l1: trapezoid(&diff, a.dt), linf: diff.iter().cloned().fold(0.0, f64::max) })
}

pub fn compare_distributions<I, S>(entries: I) -> Result<DistributionReport>
where
    I: IntoIterator<Item = (S, TimeSeries)>,
    S: Into<String>,
{
    let distributions: BTreeMap<String, TimeSeries> = entries.into_iter().map(|(k, v)| (k.into(), v)).collect();
    let moments = distributions.iter().map(|(k, v)| (k.clone(), moments(v))).collect();
    let mut distances = BTreeMap::new();
    let names: Vec<&String> = distributions.keys().collect();
    for (i, a) in names.iter().enumerate() {
        for b in &names[i + 1..] {
            distances.insert(format!("{a}|{b}"), distance(&distributions[*a], &distributions[*b])?);
        }
    }
    Ok(DistributionReport { distributions, moments, distances })
}

/// A two-packet superposition whose current turns negative.
#[derive(Debug, Clone)]
pub struct BackflowWitness {
    pub relative_phase: f64,
    pub min_current: f64,
    pub min_current_time: f64,
    pub min_kijowski: f64,
    pub state: WaveFunction,
}

/// Scans the relative phase of `g(k_a) + e^{iφ} g(k_b)` for the most negative current.
pub fn backflow_witness(
    grid: &SpatialGrid,
    a: &GaussianPacketSpec,
    b: &GaussianPacketSpec,
    times: TimeAxis,
    constants: PhysicalConstants,
    phases: usize,
) -> Result<BackflowWitness> {
    if phases == 0 {
        return Err(Error::InvalidParameter("need at least one phase".into()));
    }
    let ga = make_gaussian(a, grid)?;
    let gb = make_gaussian(b, grid)?;
    let mut best: Option<BackflowWitness> = None;
    for i in 0..phases {
        let phi = 2.0 * std::f64::consts::PI * i as f64 / phases as f64;
        let state = WaveFunction::linear_combination(&[
            (Complex64::new(1.0, 0.0), &ga),
            (Complex64::from_polar(1.0, phi), &gb),
        ])?
        .normalized()?;
        let free = FreeEvolution::new(&state, constants)?;
        let j = free.current(times)?;
        let (jm, idx) = j
            .values
            .iter()
            .enumerate()
            .fold((f64::INFINITY, 0), |acc, (i, &v)| if v < acc.0 { (v, i) } else { acc });
        if best.as_ref().is_none_or(|w| jm < w.min_current) {
            let kmin = free.kijowski(times, f64::INFINITY)?.min();
            best = Some(BackflowWitness {
                relative_phase: phi,
                min_current: jm,
                min_current_time: times.time(idx),
                min_kijowski: kmin,
                state,
            });
        }
    }
    Ok(best.expect("at least one phase scanned"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian(x0: f64, sigma: f64, k0: f64) -> WaveFunction {
        let g = SpatialGrid::new(-40.0, 60.0, 4096).unwrap();
        make_gaussian(&GaussianPacketSpec::new(x0, sigma, k0).unwrap(), &g).unwrap()
    }

    #[test]
    fn bilinear_scaling() {
        let psi = gaussian(10.0, 1.0, -5.0);
        let times = TimeAxis::spanning(0.0, 4.0, 40).unwrap();
        let c = PhysicalConstants::default();
        let a = pdp_density(&psi, times, c).unwrap();
        let b = pdp_density(&psi.scaled(Complex64::new(2.0, 0.0)), times, c).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!((4.0 * x - y).abs() <= 1e-12 * y.abs().max(1e-300));
        }
    }

    #[test]
    fn compare_identical_and_zero() {
        let gamma = 0.5;
        let axis = TimeAxis::spanning(0.0, 10.0, 10_000).unwrap();
        let a = TimeSeries::new(axis, axis.times().map(|t| gamma * (-gamma * t).exp()).collect()).unwrap();
        let zero = TimeSeries::new(axis, vec![0.0; axis.len]).unwrap();
        let r = compare_distributions([("a", a.clone()), ("b", a.clone()), ("z", zero)]).unwrap();
        let d = r.distance("a", "b").unwrap();
        assert_eq!((d.l1, d.linf), (0.0, 0.0));
        let dz = r.distance("z", "a").unwrap();
        assert!((dz.l1 - (1.0 - (-gamma * 10.0f64).exp())).abs() < 1e-7);
    }

    #[test]
    fn normalize_rejects_degenerate() {
        let axis = TimeAxis::new(0.0, 0.1, 5).unwrap();
        let zero = TimeSeries::new(axis, vec![0.0; 5]).unwrap();
        let all = ReflectionEstimate { value: 1.0, residual: 0.0, plateaued: true };
        assert!(matches!(normalize_distribution(&zero, &all), Err(Error::Degenerate(_))));
        let open = ReflectionEstimate { value: 0.5, residual: 1e-3, plateaued: false };
        assert!(matches!(normalize_distribution(&zero, &open), Err(Error::Contract(_))));
    }
}
