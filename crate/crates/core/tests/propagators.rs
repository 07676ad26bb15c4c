use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use zeno_core::evolve::{evolve, EvolutionConfig, Sponge};
use zeno_core::pdx::*;
use zeno_core::qcore::{make_gaussian, AbsorbingPotential, GaussianPacketSpec, PhysicalConstants, SpatialGrid};

fn unit() -> PhysicalConstants {
    PhysicalConstants::default()
}

fn simpson(f: impl Fn(f64) -> Complex64, a: f64, b: f64, n: usize) -> Complex64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * (h / 3.0)
}

/// Applies `g_f(t)` to samples of a state on `[a, b]` by Simpson quadrature.
fn propagate(samples: &[Complex64], a: f64, b: f64, t: f64, out_x: &[f64]) -> Vec<Complex64> {
    let n = samples.len() - 1;
    let h = (b - a) / n as f64;
    out_x
        .iter()
        .map(|&x| {
            let mut s = Complex64::new(0.0, 0.0);
            for (i, v) in samples.iter().enumerate() {
                let w = if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
                s += free_propagator(x, t, a + i as f64 * h, &unit()).unwrap() * v * w;
            }
            s * (h / 3.0)
        })
        .collect()
}

#[test]
fn gaussian_spreads_and_propagator_composes() {
    let sigma = 1.0;
    let gauss = |x: f64| Complex64::new((2.0 * PI * sigma * sigma).powf(-0.25) * (-x * x / (4.0 * sigma * sigma)).exp(), 0.0);
    let (a, b, n) = (-12.0, 12.0, 6000);
    let xs: Vec<f64> = (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect();
    let psi0: Vec<Complex64> = xs.iter().map(|&x| gauss(x)).collect();
    let (t1, t2) = (0.3, 0.5);
    let mid = propagate(&psi0, a, b, t1, &xs);
    let two_step = propagate(&mid, a, b, t2, &xs);
    let one_step = propagate(&psi0, a, b, t1 + t2, &xs);
    let worst = two_step.iter().zip(&one_step).skip(2000).take(2001).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max);
    assert!(worst < 1e-6, "{worst}");
    let h = (b - a) / n as f64;
    let density = |x: f64| {
        let i = ((x - a) / h).round() as usize;
        Complex64::new(x * x * one_step[i].norm_sqr(), 0.0)
    };
    let var = simpson(density, a, b, n).re;
    let t = t1 + t2;
    let want = sigma * sigma * (1.0 + (t / (2.0 * sigma * sigma)).powi(2));
    assert!((var - want).abs() < 1e-6, "{var} vs {want}");
}

/// Five-point derivative of the image combination at `x = 0`.
fn image_slope(t: f64, x0: f64) -> Complex64 {
    let c = unit();
    let k = c.mass * x0 / (c.hbar * t);
    let h = 1e-3 / k.max(1.0);
    let f = |x: f64| free_propagator(x, t, x0, &c).unwrap() - free_propagator(-x, t, x0, &c).unwrap();
    (f(-2.0 * h) - f(2.0 * h) * 1.0 + (f(h) - f(-h)) * 8.0) / (12.0 * h)
}

proptest! {
    #[test]
    fn image_slope_is_twice_the_free_slope(t in 0.05f64..3.0, x0 in 0.05f64..4.0) {
        let c = unit();
        let free = free_propagator_dx(0.0, t, x0, &c).unwrap();
        let numeric = image_slope(t, x0);
        prop_assert!((numeric / free - 2.0).norm() < 1e-10, "{}", (numeric / free - 2.0).norm());
        let closed = restricted_propagator_dx_origin(t, x0, &c).unwrap();
        prop_assert!((closed / free - 2.0).norm() < 1e-14);
    }

    #[test]
    fn restricted_propagator_is_symmetric(t in 0.05f64..3.0, x0 in 0.01f64..4.0, x1 in 0.01f64..4.0) {
        let c = unit();
        let a = restricted_propagator(x1, t, x0, &c).unwrap();
        let b = restricted_propagator(x0, t, x1, &c).unwrap();
        prop_assert!((a - b).norm() <= 1e-12 * (1.0 + a.norm()));
    }
}

#[test]
fn edge_kernel_limits() {
    let c = unit();
    let logs: Vec<(f64, f64)> = [1.0, 2.0, 4.0, 8.0].iter().map(|&u| (f64::ln(u), edge_kernel(u, 100.0, &c).unwrap().norm().ln())).collect();
    for w in logs.windows(2) {
        let slope = (w[1].1 - w[0].1) / (w[1].0 - w[0].0);
        assert!((slope + 1.5).abs() < 1e-3, "{slope}");
    }
    let u = 0.3;
    let free = free_propagator(0.0, u, 0.0, &c).unwrap();
    for v0 in [1e-3, 1e-2] {
        let z = v0 * u;
        let rel = (edge_kernel(u, v0, &c).unwrap() - free).norm() / free.norm();
        assert!((rel - z / 2.0).abs() < z * z, "{rel}");
    }
    assert!(edge_kernel(0.0, 1.0, &c).is_err());
}

#[test]
fn edge_kernel_matches_grid_estimate() {
    let c = unit();
    let g = SpatialGrid::new(-10.24, 10.24, 16384).unwrap();
    let k = edge_kernel_grid(&g, 50.0, c, 5e-5, 0.5, Some(Sponge::default())).unwrap();
    let mut worst: f64 = 0.0;
    for (u, v) in k.samples.iter() {
        if u >= 0.05 - 1e-12 {
            let e = edge_kernel(u, 50.0, &c).unwrap();
            worst = worst.max((v - e).norm() / e.norm());
        }
    }
    assert!(worst < 0.02, "{worst}");
}

#[test]
fn pdx_reconstruction_matches_direct_evolution() {
    let c = unit();
    let g = SpatialGrid::new(-10.24, 30.72, 32768).unwrap();
    let psi = make_gaussian(&GaussianPacketSpec::new(10.0, 1.0, -5.0).unwrap(), &g).unwrap();
    let pot = AbsorbingPotential::step(100.0).unwrap();
    let direct = evolve(&psi, &EvolutionConfig::new(1e-4, 2.5, pot.clone()).without_states())
        .unwrap()
        .final_state
        .value_at(-0.1)
        .unwrap();
    let coarse = pdx_reconstruct(&psi, 2.5, -0.1, &pot, c, &PdxOptions::default()).unwrap();
    assert!((coarse.value - direct).norm() < 1e-2 * direct.norm(), "{} vs {direct}", coarse.value);
    let opts = PdxOptions { mesh: ColumnMesh::default().refined(), ..Default::default() };
    let fine = pdx_reconstruct(&psi, 2.5, -0.1, &pot, c, &opts).unwrap();
    assert!((fine.value - direct).norm() < 1e-2 * direct.norm());
    let ratio = coarse.error_estimate / fine.error_estimate;
    assert!((3.0..=5.0).contains(&ratio), "{ratio}");
}

#[test]
fn pdx_reconstruction_vanishes_before_crossing() {
    let c = unit();
    let g = SpatialGrid::new(-10.24, 30.72, 16384).unwrap();
    let psi = make_gaussian(&GaussianPacketSpec::new(10.0, 1.0, -5.0).unwrap(), &g).unwrap();
    let pot = AbsorbingPotential::step(100.0).unwrap();
    let r = pdx_reconstruct(&psi, 0.2, -0.1, &pot, c, &PdxOptions::default()).unwrap();
    assert!(r.value.norm() < 1e-8, "{}", r.value);
    assert!(pdx_reconstruct(&psi, 0.2, 0.1, &pot, c, &PdxOptions::default()).is_err());
}

#[test]
fn phi_closed_form_values() {
    let c = unit();
    let p0 = phi_closed_form(0.0, 100.0, &c).unwrap();
    assert!((p0.norm() - 0.141421356237).abs() < 1e-9);
    let kappa = 10.0;
    let (x1, x2) = (-0.05, -0.25);
    let a = phi_function(x1, 100.0, 1.0, &c).unwrap();
    let b = phi_function(x2, 100.0, 1.0, &c).unwrap();
    let slope = (b.value.norm().ln() - a.value.norm().ln()) / (x2.abs() - x1.abs());
    assert!((slope / -kappa - 1.0).abs() < 0.01, "{slope}");
    assert!((a.value - a.closed_form).norm() < 0.01 * a.closed_form.norm());
    assert!(phi_function(0.0, 100.0, 1.0, &c).is_err());
}

#[test]
fn phi_matches_grid_quadrature() {
    let c = unit();
    let g = SpatialGrid::new(-10.24, 10.24, 16384).unwrap();
    let est = phi_grid_estimate(&g, -0.05, 100.0, 1.0, c, &ColumnMesh::default(), Some(Sponge::default())).unwrap();
    let exact = phi_closed_form(-0.05, 100.0, &c).unwrap();
    let rel = (est.extrapolated - exact).norm() / exact.norm();
    assert!(rel < 0.02, "{rel}");
    assert!((est.at_tau - exact).norm() < (est.at_quarter - exact).norm());
}

#[test]
fn zeno_constant() {
    let c = unit();
    assert!((constant_c(400.0, &c, ConstantMode::ClosedForm).unwrap() - 0.1).abs() < 1e-15);
    let ratio = constant_c(400.0, &c, ConstantMode::ClosedForm).unwrap() / constant_c(100.0, &c, ConstantMode::ClosedForm).unwrap();
    assert_eq!(ratio, 0.5);
    for v0 in [100.0, 400.0] {
        let n = constant_c(v0, &c, ConstantMode::Numeric).unwrap();
        let closed = constant_c(v0, &c, ConstantMode::ClosedForm).unwrap();
        assert!((n - closed).abs() < 0.01 * closed, "{v0}: {n}");
    }
    assert!(constant_c(0.0, &c, ConstantMode::Numeric).is_err());
}

#[test]
fn special_integral_values() {
    let s = special_integrals().unwrap();
    assert!((s.i31 - 3.5449077).abs() < 1e-6);
    assert!(s.i31_relative_error < 1e-6);
    assert!(s.i30_relative_error < 1e-6);
    assert!(s.i30_origin_relative_error < 1e-6);
}
