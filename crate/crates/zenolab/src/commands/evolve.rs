use std::path::Path;

use serde::Serialize;
use serde_json::json;
use zeno_core::arrival::{normalize_distribution, MIN_CROSSED};
use zeno_core::evolve::{
    arrival_density_from_norm, evolve, reflection_probability_with, EvolutionConfig, Plateau, ReflectionEstimate,
};
use zeno_core::{TimeSeries, WaveFunction};

use crate::config::RunConfig;
use crate::error::{LabError, LabResult};
use crate::io::{write_meta, write_series, Check, Report};

/// Peaks below this are treated as zero when scaling the route discrepancy.
const PEAK_FLOOR: f64 = 1e-6;

/// Everything one `(V0, profile)` evolution produced.
#[derive(Debug, Clone)]
pub struct PointOutcome {
    pub v0: f64,
    pub profile: String,
    pub dt: f64,
    pub steps: usize,
    pub reflection: ReflectionEstimate,
    /// `max |Π_norm - Π_potential| / max Π_norm` at the recorded times.
    pub route_discrepancy: f64,
    /// `-dN/dt` at the recorded times.
    pub pi_norm: TimeSeries,
    pub pi_potential: TimeSeries,
    /// `Π / (1 - N(∞))`, when the survival plateaued and something crossed.
    pub pi_normalized: Option<TimeSeries>,
    pub report: Report,
}

#[derive(Serialize)]
struct PointParams<'a> {
    v0_energy: f64,
    profile: &'a str,
    dt_time: f64,
    steps: usize,
    record_stride: usize,
}

/// Runs one evolution and writes its artifacts into `dir`.
pub fn run_point(cfg: &RunConfig, psi0: &WaveFunction, v0: f64, profile: &str, dir: &Path) -> LabResult<PointOutcome> {
    let constants = cfg.constants()?;
    let potential = cfg.potential(v0, profile)?;
    let dt = cfg.evolution.dt_for(v0, constants.hbar)?;
    let stride = cfg.evolution.record_stride(dt)?;
    let ecfg = EvolutionConfig::new(dt, cfg.evolution.t_max_time, potential)
        .with_constants(constants)
        .with_record_stride(stride)
        .with_boundary_tolerance(cfg.evolution.boundary_tolerance)
        .without_states();
    let steps = ecfg.steps()?;
    let ev = evolve(psi0, &ecfg)?;

    let plateau = Plateau {
        window_fraction: cfg.evolution.plateau_window_fraction,
        tolerance: cfg.evolution.plateau_tolerance,
    };
    let reflection = reflection_probability_with(&ev.survival, plateau)?;
    let pi_norm = arrival_density_from_norm(&ev.survival)?.subsample(stride);
    let pi_potential = ev.potential_density;
    if pi_norm.len() != pi_potential.len() {
        return Err(LabError::Config(format!(
            "t_max_time = {} is not a whole number of record intervals",
            cfg.evolution.t_max_time
        )));
    }
    let peak = pi_norm.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let worst = pi_norm.values.iter().zip(&pi_potential.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let route_discrepancy = worst / peak.max(PEAK_FLOOR);
    let crossed = 1.0 - reflection.value;
    let pi_normalized = if reflection.plateaued && crossed >= MIN_CROSSED {
        Some(normalize_distribution(&pi_norm, &reflection)?)
    } else {
        None
    };

    write_series(&dir.join("survival.csv"), &ev.survival.subsample(stride))?;
    write_series(&dir.join("pi_norm.csv"), &pi_norm)?;
    write_series(&dir.join("pi_potential.csv"), &pi_potential)?;
    if let Some(p) = &pi_normalized {
        write_series(&dir.join("pi_normalized.csv"), p)?;
    }

    let tol = &cfg.tolerances;
    let results = vec![
        Check::info("survival_final", reflection.value),
        Check::info("crossed_probability", crossed),
        Check::at_most("plateau_residual", reflection.residual, plateau.tolerance),
        Check::at_most("route_discrepancy", route_discrepancy, tol.route_agreement),
    ];
    let params = json!({
        "point": PointParams { v0_energy: v0, profile, dt_time: dt, steps, record_stride: stride },
        "config": cfg,
    });
    let report = Report::new(params, results);
    report.write(&dir.join("summary.json"))?;
    Ok(PointOutcome {
        v0,
        profile: profile.to_string(),
        dt,
        steps,
        reflection,
        route_discrepancy,
        pi_norm,
        pi_potential,
        pi_normalized,
        report,
    })
}

/// `evolve`: a single `V0` from the config.
pub fn cmd_evolve(cfg: &RunConfig, out: &Path) -> LabResult<Report> {
    let [v0] = cfg.potential.v0_energy[..] else {
        return Err(LabError::Config(format!(
            "evolve needs exactly one V0, got {}; use sweep for several",
            cfg.potential.v0_energy.len()
        )));
    };
    let psi0 = cfg.initial_state()?;
    let outcome = run_point(cfg, &psi0, v0, &cfg.potential.profile, out)?;
    write_meta(out, "evolve")?;
    Ok(outcome.report)
}
