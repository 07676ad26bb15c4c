//! Grid estimates of propagator columns from a band-limited delta source.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::kernels::Kernel;
use crate::arrival::FreeEvolution;
use crate::error::{Error, Result};
use crate::evolve::{graded_nodes, SpectralFunctional, SplitStepper, Sponge};
use crate::qcore::{wave_plan, AbsorbingPotential, PhysicalConstants, SpatialGrid, WaveFunction, DEFAULT_TAIL_TOLERANCE};
use crate::series::{TimeAxis, TimeSeries};

/// `δ_a(x) = (1/2π) ∫ e^{-k²a²/2} e^{ikx} dk` on the grid; `width = 0` keeps the full band.
pub fn smoothed_delta(grid: &SpatialGrid, width: f64) -> Result<Vec<Complex64>> {
    if !(width >= 0.0 && width.is_finite()) {
        return Err(Error::InvalidParameter(format!("source width must be non-negative, got {width}")));
    }
    let n = grid.len();
    let x_first = grid.x(0);
    let mut c: Vec<Complex64> = (0..n)
        .map(|m| {
            let k = grid.k(m);
            Complex64::from_polar((-0.5 * (k * width).powi(2)).exp(), k * x_first)
        })
        .collect();
    let (_, inv) = wave_plan(n);
    inv.process(&mut c);
    let s = 1.0 / (n as f64 * grid.dx());
    c.iter_mut().for_each(|z| *z *= s);
    Ok(c)
}

/// Time nodes for a propagator column: a graded head resolving `s → 0`, then uniform steps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ColumnMesh {
    pub h_max: f64,
    pub levels: u32,
    pub steps_per_level: usize,
}

impl Default for ColumnMesh {
    fn default() -> Self {
        Self { h_max: 5e-4, levels: 6, steps_per_level: 64 }
    }
}

impl ColumnMesh {
    pub fn nodes(&self, total: f64) -> Result<Vec<f64>> {
        if !(self.h_max > 0.0 && total > 0.0 && self.levels < 31) {
            return Err(Error::InvalidParameter(format!("bad column mesh {self:?} on [0, {total}]")));
        }
        Ok(graded_nodes(total, self.h_max, self.levels, self.steps_per_level))
    }

    pub fn refined(&self) -> Self {
        Self { h_max: self.h_max / 2.0, steps_per_level: self.steps_per_level * 2, ..*self }
    }
}

fn trapezoid_nodes(nodes: &[f64], values: &[Complex64]) -> Complex64 {
    nodes
        .windows(2)
        .zip(values.windows(2))
        .map(|(t, v)| (v[0] + v[1]) * (0.5 * (t[1] - t[0])))
        .sum()
}

fn column_stepper(grid: &SpatialGrid, potential: &AbsorbingPotential, sponge: Option<Sponge>, c: PhysicalConstants) -> Result<SplitStepper> {
    let mut rates = potential.rates_on(grid)?;
    if let Some(s) = sponge {
        rates.iter_mut().zip(s.rates(grid)).for_each(|(r, w)| *r += w);
    }
    SplitStepper::new(*grid, rates, c)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PdxOptions {
    pub mesh: ColumnMesh,
    /// Width of the delta source; `None` uses four grid spacings.
    pub source_width: Option<f64>,
    pub sponge: Option<Sponge>,
    /// Largest accepted relative difference between the fine and the coarse trapezoid.
    pub max_relative_error: f64,
}

impl Default for PdxOptions {
    fn default() -> Self {
        Self { mesh: ColumnMesh::default(), source_width: None, sponge: Some(Sponge::default()), max_relative_error: 0.05 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PdxResult {
    pub value: Complex64,
    /// `|fine - coarse| / 3` from dropping every other node.
    pub error_estimate: f64,
    pub nodes: usize,
}

/// `ψ(x1, τ) = -(1/m) ∫₀^τ dt ⟨x1|e^{-iH(τ-t)/ħ}|0⟩ ⟨0|p|ψ_f(t)⟩` for `x1 < 0`.
///
/// The column `⟨x1|e^{-iHs/ħ}|0⟩` is evolved from [`smoothed_delta`] on the
/// state's grid; the free factor uses exact plane-wave phases.
pub fn pdx_reconstruct(
    psi0: &WaveFunction,
    tau: f64,
    x1: f64,
    potential: &AbsorbingPotential,
    constants: PhysicalConstants,
    opts: &PdxOptions,
) -> Result<PdxResult> {
    if !(x1 < 0.0) {
        return Err(Error::InvalidParameter(format!("reconstruction point must satisfy x1 < 0, got {x1}")));
    }
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::InvalidParameter(format!("tau must be positive, got {tau}")));
    }
    let grid = *psi0.grid();
    if !(x1 >= grid.x_min()) {
        return Err(Error::InvalidParameter(format!("x1 = {x1} lies outside the grid")));
    }
    let psi0 = psi0.to_position()?;
    let left = psi0.mass_left_of_origin()? / psi0.norm_sqr();
    if left > DEFAULT_TAIL_TOLERANCE {
        return Err(Error::TailViolation {
            region: crate::error::TailRegion::NegativePosition,
            mass: left,
            tolerance: DEFAULT_TAIL_TOLERANCE,
        });
    }
    let free = FreeEvolution::new(&psi0, constants)?;
    let mut stepper = column_stepper(&grid, potential, opts.sponge, constants)?;
    let source = smoothed_delta(&grid, opts.source_width.unwrap_or(4.0 * grid.dx()))?;
    let nodes = opts.mesh.nodes(tau)?;
    let column = stepper.observe_along(&source, &nodes, &[SpectralFunctional::point(&grid, x1)]);
    let integrand: Vec<Complex64> =
        nodes.iter().zip(&column).map(|(s, g)| g[0] * free.at(tau - s).momentum).collect();
    let scale = -1.0 / constants.mass;
    let value = trapezoid_nodes(&nodes, &integrand) * scale;
    let even: Vec<usize> = (0..nodes.len()).step_by(2).chain(if nodes.len() % 2 == 0 { Some(nodes.len() - 1) } else { None }).collect();
    let coarse_nodes: Vec<f64> = even.iter().map(|&i| nodes[i]).collect();
    let coarse_vals: Vec<Complex64> = even.iter().map(|&i| integrand[i]).collect();
    let coarse = trapezoid_nodes(&coarse_nodes, &coarse_vals) * scale;
    let error_estimate = (value - coarse).norm() / 3.0;
    if !(value.re.is_finite() && value.im.is_finite()) {
        return Err(Error::Quadrature("reconstruction produced a non-finite value".into()));
    }
    let floor = DEFAULT_TAIL_TOLERANCE * free.mean_momentum().abs().max(1.0);
    if error_estimate > opts.max_relative_error * value.norm().max(floor) {
        return Err(Error::Quadrature(format!(
            "time quadrature error {error_estimate:.3e} too large for |value| {:.3e}; refine the mesh",
            value.norm()
        )));
    }
    Ok(PdxResult { value, error_estimate, nodes: nodes.len() })
}

/// Grid estimate of `⟨δ|e^{-iHu/ħ}|δ⟩` for a band-limited delta at the origin,
/// sampled every `h` on `(0, t_end]`.
pub fn edge_kernel_grid(
    grid: &SpatialGrid,
    v0: f64,
    constants: PhysicalConstants,
    h: f64,
    t_end: f64,
    sponge: Option<Sponge>,
) -> Result<Kernel> {
    let steps = (t_end / h).round();
    if !(h > 0.0 && steps >= 1.0 && ((t_end / h) - steps).abs() < 1e-6) {
        return Err(Error::InvalidParameter(format!("t_end = {t_end} must be a positive multiple of h = {h}")));
    }
    let potential = AbsorbingPotential::step(v0)?;
    let mut stepper = column_stepper(grid, &potential, sponge, constants)?;
    let delta = smoothed_delta(grid, 0.0)?;
    let nodes: Vec<f64> = (0..=steps as usize).map(|i| i as f64 * h).collect();
    let obs = stepper.observe_along(&delta, &nodes, &[SpectralFunctional::overlap(grid, &delta)]);
    let values = obs.into_iter().skip(1).map(|v| v[0]).collect();
    Ok(Kernel { samples: TimeSeries::new(TimeAxis::new(h, h, steps as usize)?, values)?, closed_form: None })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPhi {
    /// `∫₀^τ ds ⟨x|e^{-iHs/ħ}|0⟩`.
    pub at_tau: Complex64,
    /// The same integral up to `τ/4`.
    pub at_quarter: Complex64,
    /// `2 φ_τ - φ_{τ/4}`, removing the leading `τ^{-1/2}` remainder.
    pub extrapolated: Complex64,
}

/// `φ(x) = ∫₀^∞ ds ⟨x|e^{-iHs/ħ}|0⟩` from a grid column under the step potential.
pub fn phi_grid_estimate(
    grid: &SpatialGrid,
    x: f64,
    v0: f64,
    tau: f64,
    constants: PhysicalConstants,
    mesh: &ColumnMesh,
    sponge: Option<Sponge>,
) -> Result<GridPhi> {
    if !(x < 0.0 && x >= grid.x_min()) {
        return Err(Error::InvalidParameter(format!("x = {x} must be negative and on the grid")));
    }
    let quarter = tau / 4.0;
    let potential = AbsorbingPotential::step(v0)?;
    let mut stepper = column_stepper(grid, &potential, sponge, constants)?;
    let source = smoothed_delta(grid, 4.0 * grid.dx())?;
    let nodes = mesh.nodes(tau)?;
    let cut = nodes
        .iter()
        .position(|&s| (s - quarter).abs() <= 1e-9 * tau)
        .ok_or_else(|| Error::InvalidParameter(format!("tau/4 = {quarter} is not a mesh node; pick tau/4 as a multiple of h_max")))?;
    let column: Vec<Complex64> = stepper
        .observe_along(&source, &nodes, &[SpectralFunctional::point(grid, x)])
        .into_iter()
        .map(|v| v[0])
        .collect();
    let at_tau = trapezoid_nodes(&nodes, &column);
    let at_quarter = trapezoid_nodes(&nodes[..=cut], &column[..=cut]);
    Ok(GridPhi { at_tau, at_quarter, extrapolated: at_tau * 2.0 - at_quarter })
}
