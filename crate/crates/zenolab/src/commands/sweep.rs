use std::path::Path;

use rayon::prelude::*;
use serde_json::json;
use zeno_core::arrival::{distance, normalized_pdp};
use zeno_core::TimeSeries;

use super::evolve::{run_point, PointOutcome};
use crate::config::RunConfig;
use crate::error::{LabError, LabResult};
use crate::io::{write_meta, write_series, Check, Report};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Axis {
    V0,
    Profile,
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let (lx, ly): (Vec<f64>, Vec<f64>) = points.iter().map(|(x, y)| (x.ln(), y.ln())).unzip();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

fn pool(jobs: Option<usize>) -> LabResult<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        b = b.num_threads(j.max(1));
    }
    b.build().map_err(|e| LabError::Config(format!("thread pool: {e}")))
}

struct Point {
    label: String,
    dir: String,
    v0: f64,
    profile: String,
}

/// `sweep`: one evolution per axis point, then the cross-point comparisons.
pub fn cmd_sweep(cfg: &RunConfig, axis: Axis, out: &Path, jobs: Option<usize>) -> LabResult<Report> {
    let points: Vec<Point> = match axis {
        Axis::V0 => cfg
            .potential
            .v0_energy
            .iter()
            .map(|&v0| Point {
                label: format!("v0={v0}"),
                dir: format!("v0_{v0}"),
                v0,
                profile: cfg.potential.profile.clone(),
            })
            .collect(),
        Axis::Profile => cfg
            .sweep
            .profiles
            .iter()
            .map(|id| Point {
                label: format!("profile={id}"),
                dir: format!("profile_{id}"),
                v0: cfg.sweep.profile_v0_energy,
                profile: id.clone(),
            })
            .collect(),
    };
    if points.len() < 2 {
        return Err(LabError::Config(format!("a sweep needs at least 2 points, got {}", points.len())));
    }
    for p in &points {
        cfg.profile(&p.profile)?;
    }
    let psi0 = cfg.initial_state()?;
    let outcomes: Vec<LabResult<PointOutcome>> = pool(jobs)?
        .install(|| points.par_iter().map(|p| run_point(cfg, &psi0, p.v0, &p.profile, &out.join(&p.dir))).collect());

    let tol = &cfg.tolerances;
    let mut results = Vec::new();
    let mut partial = false;
    let mut ok: Vec<(&Point, PointOutcome)> = Vec::new();
    for (p, o) in points.iter().zip(outcomes) {
        match o {
            Ok(o) => {
                results.push(Check::at_most(
                    format!("plateau_residual[{}]", p.label),
                    o.reflection.residual,
                    cfg.evolution.plateau_tolerance,
                ));
                results.push(Check::info(format!("crossed_probability[{}]", p.label), 1.0 - o.reflection.value));
                partial |= !o.reflection.plateaued;
                ok.push((p, o));
            }
            Err(e) => {
                partial = true;
                results.push(Check::failed(format!("run[{}]", p.label), e));
            }
        }
    }
    let certified: Vec<(&Point, &TimeSeries, &PointOutcome)> =
        ok.iter().filter_map(|(p, o)| o.pi_normalized.as_ref().map(|pi| (*p, pi, o))).collect();

    if let Some((_, first, _)) = certified.first() {
        let ideal = normalized_pdp(&psi0, first.axis(), cfg.constants()?)?;
        write_series(&out.join("pi_ideal.csv"), &ideal)?;
        let mut l1s = Vec::new();
        for (k, (p, pi, _)) in certified.iter().enumerate() {
            let d = distance(pi, &ideal)?.l1;
            l1s.push(d);
            let name = format!("ideal_l1[{}]", p.label);
            results.push(if axis == Axis::V0 && k + 1 == certified.len() {
                Check::at_most(name, d, tol.ideal_l1)
            } else {
                Check::info(name, d)
            });
        }
        if axis == Axis::V0 {
            let monotone = l1s.windows(2).all(|w| w[1] < w[0]);
            results.push(Check::flag("ideal_l1_monotone", l1s.len() as f64, monotone && l1s.len() >= 2));
        }
    }

    match axis {
        Axis::V0 => {
            let pts: Vec<(f64, f64)> = ok
                .iter()
                .filter(|(_, o)| o.reflection.plateaued && o.v0 > 0.0 && o.reflection.value < 1.0)
                .map(|(_, o)| (o.v0, 1.0 - o.reflection.value))
                .collect();
            match log_log_slope(&pts) {
                Some(s) => results.push(Check::near("crossed_slope", s, tol.slope_target, tol.slope_tolerance)),
                None => results.push(Check::failed("crossed_slope", "fewer than two certified points")),
            }
        }
        Axis::Profile => {
            for (i, (a, pa, _)) in certified.iter().enumerate() {
                for (b, pb, _) in &certified[i + 1..] {
                    let d = distance(pa, pb)?.l1;
                    results.push(Check::at_most(
                        format!("profile_l1[{}|{}]", a.profile, b.profile),
                        d,
                        tol.profile_l1,
                    ));
                }
            }
            if certified.len() < 2 {
                results.push(Check::failed("profile_l1", "fewer than two certified points"));
            }
        }
    }

    let params = json!({
        "axis": match axis { Axis::V0 => "v0", Axis::Profile => "profile" },
        "points": points.iter().map(|p| json!({"label": p.label, "dir": p.dir, "v0_energy": p.v0, "profile": p.profile})).collect::<Vec<_>>(),
        "config": cfg,
    });
    let mut report = Report::new(params, results);
    report.partial = Some(partial);
    report.write(&out.join("sweep.json"))?;
    write_meta(out, "sweep")?;
    Ok(report)
}
