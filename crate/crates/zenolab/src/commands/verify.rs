use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use serde_json::json;
use zeno_core::arrival::{backflow_witness, compare_distributions, FreeEvolution};
use zeno_core::evolve::{evolve, EvolutionConfig, Sponge};
use zeno_core::pdx::{
    constant_c, edge_kernel, edge_kernel_grid, free_propagator, free_propagator_dx, pdx_reconstruct, resolvent_check,
    special_integrals, ConstantMode, PdxOptions,
};
use zeno_core::qcore::{make_gaussian, GaussianPacketSpec};
use zeno_core::{PhysicalConstants, TimeAxis, TimeSeries};

use crate::config::RunConfig;
use crate::error::LabResult;
use crate::io::{complex_csv, write_atomic, write_meta, write_series, Check, Report};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Pdx,
    Constants,
    Ideal,
}

impl Suite {
    fn name(self) -> &'static str {
        match self {
            Suite::Pdx => "pdx",
            Suite::Constants => "constants",
            Suite::Ideal => "ideal",
        }
    }
}

/// Runs `f`, turning an error into a failed entry so the suite continues.
fn guarded(results: &mut Vec<Check>, name: &str, f: impl FnOnce(&mut Vec<Check>) -> LabResult<()>) {
    let mut local = Vec::new();
    match f(&mut local) {
        Ok(()) => results.extend(local),
        Err(e) => results.push(Check::failed(name, e)),
    }
}

fn constants_suite(cfg: &RunConfig, c: PhysicalConstants, results: &mut Vec<Check>) {
    guarded(results, "half_power_integral", |r| {
        let s = special_integrals()?;
        r.push(Check::info("half_power_integral", s.i31));
        r.push(Check::at_most("half_power_integral_relative", s.i31_relative_error, cfg.tolerances.quadrature_relative));
        Ok(())
    });
    for &v0 in &cfg.verify.constant_v0_energy {
        let name = format!("zeno_constant_relative[v0={v0}]");
        guarded(results, &name, |r| {
            let numeric = constant_c(v0, &c, ConstantMode::Numeric)?;
            let closed = constant_c(v0, &c, ConstantMode::ClosedForm)?;
            r.push(Check::info(format!("zeno_constant[v0={v0}]"), numeric));
            r.push(Check::at_most(name.clone(), (numeric - closed).abs() / closed, cfg.tolerances.constant_relative));
            Ok(())
        });
    }
    for &[x, v0] in &cfg.verify.resolvent_points {
        let name = format!("resolvent_relative[x={x},v0={v0}]");
        guarded(results, &name, |r| {
            let chk = resolvent_check(x, v0, &c)?;
            r.push(Check::at_most(name.clone(), chk.relative_error, cfg.tolerances.quadrature_relative));
            Ok(())
        });
    }
}

/// Quasi-random points of `[0, 1)²` from the additive golden-ratio sequence.
fn weyl(n: usize) -> impl Iterator<Item = (f64, f64)> {
    let (a, b) = (0.754_877_666_246_692_7, 0.569_840_290_998_053_3);
    (1..=n).map(move |i| ((i as f64 * a).fract(), (i as f64 * b).fract()))
}

/// Worst `|∂ₓ[g(x) - g(-x)]|₀ / (2 ∂ₓg(0)) - 1|` from a five-point stencil.
fn image_identity(samples: usize, c: &PhysicalConstants) -> LabResult<f64> {
    let mut worst: f64 = 0.0;
    for (u, w) in weyl(samples) {
        let t = 0.05 + 2.95 * u;
        let x0 = 0.05 + 3.95 * w;
        let k = c.mass * x0 / (c.hbar * t);
        let h = 1e-3 / k.max(1.0);
        let f = |x: f64| -> LabResult<Complex64> { Ok(free_propagator(x, t, x0, c)? - free_propagator(-x, t, x0, c)?) };
        let slope = ((f(h)? - f(-h)?) * 8.0 - (f(2.0 * h)? - f(-2.0 * h)?)) / (12.0 * h);
        let free = free_propagator_dx(0.0, t, x0, c)?;
        worst = worst.max((slope / (free * 2.0) - 1.0).norm());
    }
    Ok(worst)
}

fn pdx_suite(cfg: &RunConfig, c: PhysicalConstants, out: &Path, results: &mut Vec<Check>) {
    let v = &cfg.verify;
    let tol = &cfg.tolerances;
    guarded(results, "image_identity", |r| {
        r.push(Check::at_most("image_identity", image_identity(v.image_samples, &c)?, tol.image_identity));
        Ok(())
    });
    guarded(results, "pdx_relative", |r| {
        let grid = v.pdx_grid.build()?;
        let psi = make_gaussian(&cfg.packet.spec()?, &grid)?;
        let pot = cfg.potential(v.pdx_v0_energy, &cfg.potential.profile)?;
        let ecfg = EvolutionConfig::new(v.pdx_reference_dt_time, v.pdx_tau_time, pot.clone())
            .with_constants(c)
            .without_states()
            .with_record_stride(usize::MAX);
        let direct = evolve(&psi, &ecfg)?.final_state.value_at(v.pdx_x1_length)?;
        let rec = pdx_reconstruct(&psi, v.pdx_tau_time, v.pdx_x1_length, &pot, c, &PdxOptions::default())?;
        r.push(Check::info("pdx_error_estimate", rec.error_estimate / direct.norm()));
        r.push(Check::at_most("pdx_relative", (rec.value - direct).norm() / direct.norm(), tol.pdx_relative));
        Ok(())
    });
    guarded(results, "edge_kernel_relative", |r| {
        let grid = v.edge_grid.build()?;
        let k = edge_kernel_grid(&grid, v.edge_v0_energy, c, v.edge_dt_time, v.edge_u_max_time, Some(Sponge::default()))?;
        let closed: Vec<Complex64> =
            k.samples.iter().map(|(u, _)| edge_kernel(u, v.edge_v0_energy, &c)).collect::<Result<_, _>>()?;
        let closed = TimeSeries::new(k.samples.axis(), closed)?;
        write_atomic(&out.join("edge_kernel_grid.csv"), complex_csv(&k.samples).as_bytes())?;
        write_atomic(&out.join("edge_kernel_closed.csv"), complex_csv(&closed).as_bytes())?;
        let worst = k
            .samples
            .iter()
            .zip(&closed.values)
            .filter(|((u, _), _)| *u >= v.edge_u_min_time * (1.0 - 1e-12))
            .map(|((_, g), e)| (g - e).norm() / e.norm())
            .fold(0.0, f64::max);
        r.push(Check::at_most("edge_kernel_relative", worst, tol.edge_relative));
        Ok(())
    });
    guarded(results, "edge_kernel_weak_coupling", |r| {
        // deviation from the free kernel must be z/2 + O(z²), z = V0 u / ħ
        let u = 0.3;
        let free = free_propagator(0.0, u, 0.0, &c)?;
        let mut worst: f64 = 0.0;
        for v0 in [1e-3, 1e-2] {
            let z = v0 * u / c.hbar;
            let rel = (edge_kernel(u, v0, &c)? - free).norm() / free.norm();
            worst = worst.max((rel - z / 2.0).abs() / (z * z));
        }
        r.push(Check::at_most("edge_kernel_weak_coupling", worst, 1.0));
        Ok(())
    });
}

fn ideal_suite(cfg: &RunConfig, c: PhysicalConstants, out: &Path, results: &mut Vec<Check>) {
    let v = &cfg.verify;
    let tol = &cfg.tolerances;
    let mut kijowski_min = f64::INFINITY;
    guarded(results, "backflow_min_current", |r| {
        let grid = v.backflow_grid.build()?;
        let [ka, kb] = v.backflow_k0_wavenumber;
        let a = GaussianPacketSpec::new(v.backflow_x0_length, v.backflow_sigma_length, ka)?;
        let b = GaussianPacketSpec::new(v.backflow_x0_length, v.backflow_sigma_length, kb)?;
        let times = TimeAxis::spanning(0.0, v.backflow_t_max_time, v.backflow_time_points)?;
        let w = backflow_witness(&grid, &a, &b, times, c, v.backflow_phases)?;
        let free = FreeEvolution::new(&w.state, c)?;
        write_series(&out.join("backflow_current.csv"), &free.current(times)?)?;
        write_series(&out.join("backflow_kijowski.csv"), &free.kijowski(times, f64::INFINITY)?)?;
        let mut state = String::from("x,re,im\n");
        for (j, z) in w.state.amplitudes().iter().enumerate() {
            let _ = writeln!(state, "{:.16e},{:.16e},{:.16e}", grid.x(j), z.re, z.im);
        }
        write_atomic(&out.join("backflow_state.csv"), state.as_bytes())?;
        kijowski_min = kijowski_min.min(w.min_kijowski);
        r.push(Check::info("backflow_relative_phase", w.relative_phase));
        r.push(Check::info("backflow_time", w.min_current_time));
        r.push(Check::flag("backflow_min_current", w.min_current, w.min_current < 0.0));
        Ok(())
    });
    guarded(results, "distribution_l1", |r| {
        let grid = cfg.grid.build()?;
        let spec = GaussianPacketSpec::new(v.mono_x0_length, v.mono_sigma_length, v.mono_k0_wavenumber)?;
        let spread = spec.sigma_k() / spec.k0.abs();
        r.push(Check::at_most("mono_spread", spread, tol.mono_spread));
        let psi = make_gaussian(&spec, &grid)?;
        let times = TimeAxis::spanning(0.0, v.mono_t_max_time, v.mono_time_points)?;
        let free = FreeEvolution::new(&psi, c)?;
        let kij = free.kijowski(times, spec.tail_tolerance)?;
        kijowski_min = kijowski_min.min(kij.min());
        let report = compare_distributions([
            ("normalized_pdp", free.normalized_pdp(times)?),
            ("kijowski", kij),
            ("current", free.current(times)?.map(|j| j.abs())),
        ])?;
        for (pair, d) in &report.distances {
            r.push(Check::at_most(format!("distribution_l1[{pair}]"), d.l1, tol.distribution_l1));
        }
        let std_free = FreeEvolution::new(&cfg.initial_state()?, c)?;
        kijowski_min = kijowski_min.min(std_free.kijowski(times, cfg.packet.tail_tolerance)?.min());
        Ok(())
    });
    if kijowski_min.is_finite() {
        results.push(Check::flag("kijowski_min", kijowski_min, kijowski_min >= 0.0));
    }
}

/// `verify`: closed-form and cross-method checks; failures are recorded, not fatal.
pub fn cmd_verify(cfg: &RunConfig, suite: Suite, out: &Path) -> LabResult<Report> {
    let c = cfg.constants()?;
    let mut results = Vec::new();
    match suite {
        Suite::Constants => constants_suite(cfg, c, &mut results),
        Suite::Pdx => pdx_suite(cfg, c, out, &mut results),
        Suite::Ideal => ideal_suite(cfg, c, out, &mut results),
    }
    let params = json!({
        "suite": suite.name(),
        "constants": cfg.constants,
        "packet": cfg.packet,
        "verify": cfg.verify,
        "tolerances": cfg.tolerances,
    });
    let report = Report::new(params, results);
    report.write(&out.join("verify.json"))?;
    write_meta(out, &format!("verify {}", suite.name()))?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weyl_points_fill_the_square() {
        let pts: Vec<_> = weyl(400).collect();
        for q in 0..4 {
            let lo = q as f64 / 4.0;
            let n = pts.iter().filter(|(a, _)| (lo..lo + 0.25).contains(a)).count();
            assert!((90..=110).contains(&n), "{n}");
        }
    }
}
