//! Run configuration read from TOML. Every dimensional key carries its unit in the name.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use zeno_core::qcore::{make_gaussian, GaussianPacketSpec, DEFAULT_TAIL_TOLERANCE};
use zeno_core::{AbsorbingPotential, PhysicalConstants, Profile, SpatialGrid, WaveFunction};

use crate::error::{LabError, LabResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub x_min_length: f64,
    pub x_max_length: f64,
    pub points: usize,
}

impl GridSection {
    pub fn build(&self) -> LabResult<SpatialGrid> {
        Ok(SpatialGrid::new(self.x_min_length, self.x_max_length, self.points)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PacketSection {
    pub x0_length: f64,
    pub sigma_length: f64,
    pub k0_wavenumber: f64,
    #[serde(default = "default_tail")]
    pub tail_tolerance: f64,
}

fn default_tail() -> f64 {
    DEFAULT_TAIL_TOLERANCE
}

impl PacketSection {
    pub fn spec(&self) -> LabResult<GaussianPacketSpec> {
        Ok(GaussianPacketSpec::new(self.x0_length, self.sigma_length, self.k0_wavenumber)?
            .with_tail_tolerance(self.tail_tolerance)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantsSection {
    pub hbar_action: f64,
    pub particle_mass: f64,
}

impl Default for ConstantsSection {
    fn default() -> Self {
        Self { hbar_action: 1.0, particle_mass: 1.0 }
    }
}

impl ConstantsSection {
    pub fn build(&self) -> LabResult<PhysicalConstants> {
        Ok(PhysicalConstants::new(self.hbar_action, self.particle_mass)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSection {
    /// Profile id, looked up in the built-in registry and `[profiles]`.
    #[serde(default = "default_profile")]
    pub profile: String,
    pub v0_energy: Vec<f64>,
}

fn default_profile() -> String {
    "constant".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolutionSection {
    /// Fixed step; when absent the step follows `absorption_per_step / V0`.
    #[serde(default)]
    pub dt_time: Option<f64>,
    pub t_max_time: f64,
    /// Spacing of recorded states and of the CSV rows.
    pub record_interval_time: f64,
    #[serde(default = "default_absorption_per_step")]
    pub absorption_per_step: f64,
    #[serde(default = "default_min_dt")]
    pub min_dt_time: f64,
    #[serde(default = "default_max_dt")]
    pub max_dt_time: f64,
    #[serde(default = "default_window")]
    pub plateau_window_fraction: f64,
    #[serde(default = "default_plateau_tol")]
    pub plateau_tolerance: f64,
    /// Edge-band mass that aborts a run; absent means no check.
    #[serde(default = "default_boundary")]
    pub boundary_tolerance: Option<f64>,
}

fn default_absorption_per_step() -> f64 {
    0.04
}
fn default_min_dt() -> f64 {
    2.5e-5
}
fn default_max_dt() -> f64 {
    2.5e-4
}
fn default_window() -> f64 {
    0.1
}
fn default_plateau_tol() -> f64 {
    1e-8
}
fn default_boundary() -> Option<f64> {
    Some(zeno_core::evolve::DEFAULT_BOUNDARY_TOLERANCE)
}

impl EvolutionSection {
    /// Step for a given `V0`, snapped so that `t_max` is a whole number of steps.
    pub fn dt_for(&self, v0: f64, hbar: f64) -> LabResult<f64> {
        let raw = match self.dt_time {
            Some(dt) => return Ok(dt),
            None if v0 > 0.0 => (self.absorption_per_step * hbar / v0).clamp(self.min_dt_time, self.max_dt_time),
            None => self.max_dt_time,
        };
        if !(raw > 0.0 && self.t_max_time > 0.0) {
            return Err(LabError::Config(format!("cannot derive a time step from dt = {raw}, t_max = {}", self.t_max_time)));
        }
        let steps = (self.t_max_time / raw * (1.0 - 1e-12)).ceil();
        Ok(self.t_max_time / steps)
    }

    pub fn record_stride(&self, dt: f64) -> LabResult<usize> {
        let ratio = self.record_interval_time / dt;
        let stride = ratio.round();
        if !(stride >= 1.0) || (ratio - stride).abs() > 1e-6 * ratio {
            return Err(LabError::Config(format!(
                "record_interval_time = {} is not a whole number of steps dt = {dt}",
                self.record_interval_time
            )));
        }
        Ok(stride as usize)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    /// Profile ids for the profile axis.
    #[serde(default = "default_sweep_profiles")]
    pub profiles: Vec<String>,
    /// `V0` used on the profile axis.
    #[serde(default = "default_profile_v0")]
    pub profile_v0_energy: f64,
}

fn default_sweep_profiles() -> Vec<String> {
    vec!["constant".into(), "exponential".into(), "lorentzian".into()]
}
fn default_profile_v0() -> f64 {
    1600.0
}

impl Default for SweepSection {
    fn default() -> Self {
        Self { profiles: default_sweep_profiles(), profile_v0_energy: default_profile_v0() }
    }
}

/// Inputs of the verification suites.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifySection {
    pub constant_v0_energy: Vec<f64>,
    /// `(x, V0)` pairs for the resolvent-kernel check.
    pub resolvent_points: Vec<[f64; 2]>,
    pub pdx_grid: GridSection,
    pub pdx_v0_energy: f64,
    pub pdx_x1_length: f64,
    pub pdx_tau_time: f64,
    pub pdx_reference_dt_time: f64,
    pub edge_grid: GridSection,
    pub edge_v0_energy: f64,
    pub edge_dt_time: f64,
    pub edge_u_min_time: f64,
    pub edge_u_max_time: f64,
    pub image_samples: usize,
    pub backflow_grid: GridSection,
    pub backflow_x0_length: f64,
    pub backflow_sigma_length: f64,
    pub backflow_k0_wavenumber: [f64; 2],
    pub backflow_t_max_time: f64,
    pub backflow_time_points: usize,
    pub backflow_phases: usize,
    pub mono_x0_length: f64,
    pub mono_sigma_length: f64,
    pub mono_k0_wavenumber: f64,
    pub mono_t_max_time: f64,
    pub mono_time_points: usize,
}

impl Default for VerifySection {
    fn default() -> Self {
        Self {
            constant_v0_energy: vec![100.0, 400.0],
            resolvent_points: vec![[-0.3, 10.0], [-0.05, 100.0], [0.7, 400.0]],
            pdx_grid: GridSection { x_min_length: -10.24, x_max_length: 30.72, points: 32768 },
            pdx_v0_energy: 100.0,
            pdx_x1_length: -0.1,
            pdx_tau_time: 2.5,
            pdx_reference_dt_time: 1e-4,
            edge_grid: GridSection { x_min_length: -10.24, x_max_length: 10.24, points: 16384 },
            edge_v0_energy: 50.0,
            edge_dt_time: 5e-5,
            edge_u_min_time: 0.05,
            edge_u_max_time: 0.5,
            image_samples: 200,
            backflow_grid: GridSection { x_min_length: -60.0, x_max_length: 60.0, points: 8192 },
            backflow_x0_length: 10.0,
            backflow_sigma_length: 1.5,
            backflow_k0_wavenumber: [-2.0, -6.0],
            backflow_t_max_time: 16.0,
            backflow_time_points: 4000,
            backflow_phases: 32,
            mono_x0_length: 15.0,
            mono_sigma_length: 2.5,
            mono_k0_wavenumber: -5.0,
            mono_t_max_time: 12.0,
            mono_time_points: 6000,
        }
    }
}

/// Acceptance thresholds; each can be overridden in `[tolerances]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Norm-route vs potential-route density, relative to the peak.
    pub route_agreement: f64,
    pub slope_target: f64,
    pub slope_tolerance: f64,
    pub ideal_l1: f64,
    pub profile_l1: f64,
    pub constant_relative: f64,
    pub quadrature_relative: f64,
    pub pdx_relative: f64,
    pub image_identity: f64,
    pub edge_relative: f64,
    pub distribution_l1: f64,
    /// Largest `σ_k/|k0|` accepted as quasi-monochromatic.
    pub mono_spread: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            route_agreement: 1e-3,
            slope_target: -0.5,
            slope_tolerance: 0.05,
            ideal_l1: 0.05,
            profile_l1: 0.05,
            constant_relative: 0.01,
            quadrature_relative: 1e-6,
            pdx_relative: 0.01,
            image_identity: 1e-10,
            edge_relative: 0.02,
            distribution_l1: 0.01,
            mono_spread: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub grid: GridSection,
    pub packet: PacketSection,
    #[serde(default)]
    pub constants: ConstantsSection,
    pub potential: PotentialSection,
    pub evolution: EvolutionSection,
    /// User profiles; ids here shadow the built-ins.
    #[serde(default)]
    pub profiles: BTreeMap<String, Profile>,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub verify: VerifySection,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub output: Option<OutputSection>,
}

/// The built-in profile registry: `1`, `e^{x}` and `2/(1+x²)`.
pub fn builtin_profile(id: &str) -> Option<Profile> {
    match id {
        "constant" => Some(Profile::Constant { scale: 1.0 }),
        "exponential" => Some(Profile::Exponential { scale: 1.0, rate: 1.0 }),
        "lorentzian" => Some(Profile::Lorentzian { scale: 2.0, width: 1.0 }),
        _ => None,
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> LabResult<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| LabError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> LabResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| LabError::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn profile(&self, id: &str) -> LabResult<Profile> {
        self.profiles
            .get(id)
            .cloned()
            .or_else(|| builtin_profile(id))
            .ok_or_else(|| LabError::UnknownProfile(id.to_string()))
    }

    pub fn potential(&self, v0: f64, profile: &str) -> LabResult<AbsorbingPotential> {
        Ok(AbsorbingPotential::new(v0, self.profile(profile)?)?)
    }

    pub fn constants(&self) -> LabResult<PhysicalConstants> {
        self.constants.build()
    }

    pub fn initial_state(&self) -> LabResult<WaveFunction> {
        Ok(make_gaussian(&self.packet.spec()?, &self.grid.build()?)?)
    }

    pub fn validate(&self) -> LabResult<()> {
        self.grid.build()?;
        self.packet.spec()?;
        self.constants()?;
        for (id, p) in &self.profiles {
            p.validate().map_err(|e| LabError::Config(format!("profile {id}: {e}")))?;
        }
        self.profile(&self.potential.profile)?;
        for id in &self.sweep.profiles {
            self.profile(id)?;
        }
        if self.potential.v0_energy.is_empty() {
            return Err(LabError::Config("potential.v0_energy must list at least one value".into()));
        }
        if let Some(v) = self.potential.v0_energy.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(LabError::Config(format!("V0 values must be finite and non-negative, got {v}")));
        }
        Ok(())
    }

    /// `--out` wins over `[output].dir`.
    pub fn output_dir(&self, cli: Option<&Path>) -> LabResult<PathBuf> {
        cli.map(Path::to_path_buf)
            .or_else(|| self.output.as_ref().map(|o| o.dir.clone()))
            .ok_or_else(|| LabError::Config("no output directory: pass --out or set [output].dir".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
        [grid]
        x_min_length = -40.0
        x_max_length = 60.0
        points = 4096

        [packet]
        x0_length = 10.0
        sigma_length = 1.0
        k0_wavenumber = -5.0

        [potential]
        v0_energy = [400.0]

        [evolution]
        t_max_time = 6.0
        record_interval_time = 0.01
    "#;

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg = RunConfig::from_toml(MINIMAL).unwrap();
        assert_eq!(cfg.potential.profile, "constant");
        assert_eq!(cfg.constants, ConstantsSection::default());
        assert_eq!(cfg.tolerances, Tolerances::default());
        assert_eq!(cfg.evolution.dt_for(400.0, 1.0).unwrap(), 1e-4);
        assert_eq!(cfg.evolution.dt_for(100.0, 1.0).unwrap(), 2.5e-4);
        assert_eq!(cfg.evolution.record_stride(1e-4).unwrap(), 100);
    }

    #[test]
    fn derived_step_divides_the_run() {
        let cfg = RunConfig::from_toml(MINIMAL).unwrap();
        let dt = cfg.evolution.dt_for(700.0, 1.0).unwrap();
        let n = cfg.evolution.t_max_time / dt;
        assert!((n - n.round()).abs() < 1e-9 && dt <= 0.04 / 700.0);
    }

    #[test]
    fn unknown_profile_is_reported() {
        let text = MINIMAL.replace("v0_energy = [400.0]", "profile = \"gaussian\"\nv0_energy = [400.0]");
        let err = RunConfig::from_toml(&text).unwrap_err();
        assert!(err.to_string().contains("unknown profile"), "{err}");
    }

    #[test]
    fn user_profiles_extend_the_registry() {
        let text = format!(
            "{MINIMAL}\n[profiles.ramp]\nkind = \"tabulated\"\nx = [-2.0, 0.0]\nf = [1.0, 3.0]\n"
        )
        .replace("v0_energy = [400.0]", "profile = \"ramp\"\nv0_energy = [400.0]");
        let cfg = RunConfig::from_toml(&text).unwrap();
        assert_eq!(cfg.profile("ramp").unwrap().value(-1.0), 2.0);
    }

    #[test]
    fn unitless_keys_are_rejected() {
        let text = MINIMAL.replace("t_max_time", "t_max");
        assert!(RunConfig::from_toml(&text).is_err());
    }
}
