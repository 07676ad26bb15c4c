use std::f64::consts::PI;

use num_complex::Complex64;
use zeno_core::arrival::*;
use zeno_core::qcore::{make_gaussian, observables, GaussianPacketSpec, PhysicalConstants, SpatialGrid, WaveFunction};
use zeno_core::{Error, TimeAxis, TimeSeries};

fn standard_grid() -> SpatialGrid {
    SpatialGrid::new(-40.0, 60.0, 4096).unwrap()
}

fn packet(x0: f64, sigma: f64, k0: f64) -> WaveFunction {
    make_gaussian(&GaussianPacketSpec::new(x0, sigma, k0).unwrap(), &standard_grid()).unwrap()
}

/// Analytic momentum amplitude of the Gaussian `exp(-(x-x0)²/4σ² + ik0x)`.
fn psi_tilde(k: f64, x0: f64, sigma: f64, k0: f64) -> Complex64 {
    let amp = (2.0 * sigma * sigma / PI).powf(0.25) * (-(sigma * (k - k0)).powi(2)).exp();
    Complex64::from_polar(amp, -(k - k0) * x0 + k0 * x0)
}

/// Composite Simpson over `[a, b]` with `n` (even) panels.
fn simpson(f: impl Fn(f64) -> Complex64, a: f64, b: f64, n: usize) -> Complex64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * (h / 3.0)
}

/// `⟨0|p|ψ_f(τ)⟩` and the Kijowski amplitude by direct quadrature over `k`.
fn momentum_quadrature(t: f64, x0: f64, sigma: f64, k0: f64) -> (Complex64, Complex64) {
    let sk = 1.0 / (2.0 * sigma);
    let (a, b) = (k0 - 12.0 * sk, k0 + 12.0 * sk);
    let phase = |k: f64| Complex64::from_polar(1.0 / (2.0 * PI).sqrt(), -0.5 * k * k * t);
    let p = simpson(|k| psi_tilde(k, x0, sigma, k0) * phase(k) * k, a, b, 4000);
    let kij = simpson(
        |k| if k < 0.0 { psi_tilde(k, x0, sigma, k0) * phase(k) * (-k).sqrt() } else { Complex64::new(0.0, 0.0) },
        a,
        b.min(0.0),
        4000,
    );
    (p, kij)
}

fn window(t_end: f64, n: usize) -> TimeAxis {
    TimeAxis::spanning(0.0, t_end, n).unwrap()
}

#[test]
fn slope_at_origin_matches_momentum_quadrature() {
    let c = PhysicalConstants::default();
    let psi = free_evolve(&packet(10.0, 1.0, -5.0), 2.0, c).unwrap();
    let got = observables(&psi, &c).unwrap().dpsi_at_0;
    let (p, _) = momentum_quadrature(2.0, 10.0, 1.0, -5.0);
    let want = p * Complex64::i();
    assert!((got.norm_sqr() - want.norm_sqr()).abs() <= 1e-8 * want.norm_sqr(), "{got} vs {want}");
}

#[test]
fn pdp_matches_quadrature_and_peaks_at_classical_time() {
    let c = PhysicalConstants::default();
    let times = window(4.0, 400);
    let pdp = pdp_density(&packet(10.0, 1.0, -5.0), times, c).unwrap();
    for j in (0..times.len).step_by(37) {
        let (p, _) = momentum_quadrature(times.time(j), 10.0, 1.0, -5.0);
        let want = p.norm_sqr();
        assert!((pdp.values[j] - want).abs() <= 1e-8 * want.max(1e-12), "t={}", times.time(j));
    }
    assert!((pdp.argmax_time() - 2.0).abs() < 0.1, "peak at {}", pdp.argmax_time());
}

#[test]
fn even_real_state_has_no_slope() {
    let g = standard_grid();
    let psi = WaveFunction::from_fn(g, |x| Complex64::new((-x * x / 4.0).exp(), 0.0)).unwrap().normalized().unwrap();
    let pdp = pdp_density(&psi, window(2.0, 20), PhysicalConstants::default()).unwrap();
    assert!(pdp.values.iter().all(|v| v.abs() < 1e-10));
}

#[test]
fn normalized_density_mass_and_mean() {
    let c = PhysicalConstants::default();
    let sk = 0.5;
    // For purely negative momenta the flux integral is ⟨|k|⟩/|⟨k⟩| and the mean time m x0/(ħ⟨|k|⟩).
    let w = |k: f64| Complex64::new(psi_tilde(k, 10.0, 1.0, -5.0).norm_sqr(), 0.0);
    let norm = simpson(w, -5.0 - 12.0 * sk, -5.0 + 12.0 * sk, 4000).re;
    let abs_k = simpson(|k| w(k) * k.abs(), -5.0 - 12.0 * sk, -5.0 + 12.0 * sk, 4000).re / norm;
    let mean_k = simpson(|k| w(k) * k, -5.0 - 12.0 * sk, -5.0 + 12.0 * sk, 4000).re / norm;
    let pn = normalized_pdp(&packet(10.0, 1.0, -5.0), window(6.0, 6000), c).unwrap();
    let m = moments(&pn);
    assert!((m.mass - abs_k / mean_k.abs()).abs() < 1e-4, "{m:?}");
    assert!((m.mass - 1.0).abs() < 1e-4);
    assert!((m.mean - 10.0 / abs_k).abs() < 1e-3, "{m:?}");
    assert!((m.mean - 2.0).abs() < 0.04);
}

#[test]
fn kijowski_matches_quadrature_and_differs_from_normalized_pdp() {
    let c = PhysicalConstants::default();
    let times = window(8.0, 1600);
    let psi = packet(10.0, 1.0, -5.0);
    let kij = kijowski_density(&psi, times, c).unwrap();
    let pn = normalized_pdp(&psi, times, c).unwrap();
    let mut oracle_k = Vec::new();
    let mut oracle_n = Vec::new();
    for t in times.times() {
        let (p, k) = momentum_quadrature(t, 10.0, 1.0, -5.0);
        oracle_k.push(k.norm_sqr());
        oracle_n.push(p.norm_sqr() / 5.0);
    }
    let ok = TimeSeries::new(times, oracle_k).unwrap();
    let on = TimeSeries::new(times, oracle_n).unwrap();
    assert!(distance(&kij, &ok).unwrap().linf < 1e-8);
    let want = distance(&ok, &on).unwrap().l1;
    let got = distance(&kij, &pn).unwrap().l1;
    assert!((got - want).abs() < 1e-4, "{got} vs {want}");
    assert!(kij.values.iter().all(|v| *v >= 0.0));
    assert!((kij.integral() - 1.0).abs() < 1e-4);
}

#[test]
fn quasi_monochromatic_packet_distributions_agree() {
    let c = PhysicalConstants::default();
    let g = SpatialGrid::new(-40.0, 60.0, 4096).unwrap();
    // σ_k / |k0| = 0.04
    let psi = make_gaussian(&GaussianPacketSpec::new(15.0, 2.5, -5.0).unwrap(), &g).unwrap();
    let times = window(12.0, 6000);
    let f = FreeEvolution::new(&psi, c).unwrap();
    let r = compare_distributions([
        ("normalized_pdp", f.normalized_pdp(times).unwrap()),
        ("kijowski", f.kijowski(times, 1e-8).unwrap()),
        ("current", f.current(times).unwrap()),
    ])
    .unwrap();
    for (pair, d) in &r.distances {
        assert!(d.l1 <= 0.01, "{pair}: {d:?}");
    }
}

#[test]
fn global_phase_invariance() {
    let c = PhysicalConstants::default();
    let times = window(4.0, 200);
    let psi = packet(10.0, 1.0, -5.0);
    let f = FreeEvolution::new(&psi, c).unwrap();
    let base = [f.pdp(times).unwrap(), f.normalized_pdp(times).unwrap(), f.current(times).unwrap(), f.kijowski(times, 1e-8).unwrap()];
    // Sign flips commute exactly with every floating-point operation involved; other
    // phases reorder roundings inside the FFT butterflies.
    for (phase, exact) in [(Complex64::new(-1.0, 0.0), true), (Complex64::i(), false), (Complex64::from_polar(1.0, 0.3), false)] {
        let g = FreeEvolution::new(&psi.scaled(phase), c).unwrap();
        let other = [g.pdp(times).unwrap(), g.normalized_pdp(times).unwrap(), g.current(times).unwrap(), g.kijowski(times, 1e-8).unwrap()];
        for (a, b) in base.iter().zip(&other) {
            if exact {
                assert_eq!(a.values, b.values);
            } else {
                let scale = a.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                for (x, y) in a.values.iter().zip(&b.values) {
                    assert!((x - y).abs() <= 1e-12 * scale);
                }
            }
        }
    }
}

#[test]
fn time_translation_covariance() {
    let c = PhysicalConstants::default();
    let psi = packet(10.0, 1.0, -5.0);
    let later = free_evolve(&psi, 0.5, c).unwrap();
    let a = FreeEvolution::new(&psi, c).unwrap();
    let b = FreeEvolution::new(&later, c).unwrap();
    let shifted = TimeAxis::new(0.5, 0.01, 300).unwrap();
    let plain = TimeAxis::new(0.0, 0.01, 300).unwrap();
    let pairs = [
        (a.pdp(shifted).unwrap(), b.pdp(plain).unwrap()),
        (a.current(shifted).unwrap(), b.current(plain).unwrap()),
        (a.kijowski(shifted, 1e-8).unwrap(), b.kijowski(plain, 1e-8).unwrap()),
    ];
    for (x, y) in pairs {
        for (u, v) in x.values.iter().zip(&y.values) {
            assert!((u - v).abs() < 1e-10);
        }
    }
}

#[test]
fn single_packet_current_is_positive_and_normalized() {
    let c = PhysicalConstants::default();
    let j = current_density(&packet(10.0, 1.0, -5.0), window(8.0, 8000), c).unwrap();
    assert!(j.min() >= -1e-10);
    assert!((j.integral() - 1.0).abs() < 1e-3);
}

#[test]
fn backflow_witness_exists_and_kijowski_stays_positive() {
    let g = SpatialGrid::new(-60.0, 60.0, 8192).unwrap();
    let a = GaussianPacketSpec::new(10.0, 1.5, -2.0).unwrap();
    let b = GaussianPacketSpec::new(10.0, 1.5, -6.0).unwrap();
    let w = backflow_witness(&g, &a, &b, window(16.0, 4000), PhysicalConstants::default(), 32).unwrap();
    assert!(w.min_current < -1e-4, "{}", w.min_current);
    assert!(w.min_kijowski >= 0.0);
}

#[test]
fn kijowski_rejects_positive_momenta() {
    let g = standard_grid();
    let psi = WaveFunction::from_fn(g, |x| Complex64::from_polar((-(x - 10.0).powi(2) / 4.0).exp(), 0.5 * x)).unwrap();
    let r = kijowski_density(&psi, window(1.0, 10), PhysicalConstants::default());
    assert!(matches!(r, Err(Error::TailViolation { .. })));
}

#[test]
fn normalization_rejects_stationary_packet() {
    let g = standard_grid();
    let psi = WaveFunction::from_fn(g, |x| Complex64::new((-(x - 10.0).powi(2) / 4.0).exp(), 0.0)).unwrap();
    let r = normalized_pdp(&psi, window(1.0, 10), PhysicalConstants::default());
    assert!(matches!(r, Err(Error::Degenerate(_))));
}

#[test]
fn normalize_synthetic_distribution() {
    let gamma = 0.3;
    let axis = window(60.0, 60_000);
    let pi = TimeSeries::new(axis, axis.times().map(|t| 0.5 * gamma * (-gamma * t).exp()).collect()).unwrap();
    let est = zeno_core::evolve::ReflectionEstimate { value: 0.5, residual: 0.0, plateaued: true };
    let out = normalize_distribution(&pi, &est).unwrap();
    for (t, v) in out.iter() {
        assert!((v - gamma * (-gamma * t).exp()).abs() < 1e-15);
    }
}
