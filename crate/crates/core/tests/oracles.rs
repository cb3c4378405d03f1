//! Independent oracles for the Jacobian, the twisted-state spectra and the
//! single-precision path.

use std::f64::consts::PI;

use multiplex_core::composition::random_phases;
use multiplex_core::stability::{equilibrium_residual, jacobian_direct};
use multiplex_core::*;

/// Central differences of the assembled right-hand side.
fn finite_difference_jacobian(weights: &Matrix, theta: &Phases, h: f64) -> Matrix {
    let n = theta.len();
    let omega = FrequencyVector::zeros(n);
    let mut out = Matrix::zeros(n, n);
    for j in 0..n {
        let mut plus = theta.clone();
        let mut minus = theta.clone();
        plus.phases[j] += h;
        minus.phases[j] -= h;
        let fp = kuramoto_rhs(&plus, &omega, weights).unwrap();
        let fm = kuramoto_rhs(&minus, &omega, weights).unwrap();
        for i in 0..n {
            out.set(i, j, (fp[i] - fm[i]) / (2.0 * h));
        }
    }
    out
}

#[test]
fn jacobians_agree_with_finite_differences() {
    for seed in 0..10u64 {
        let mut rng = SeededRng::new(1000 + seed);
        let n = 3 + (seed as usize % 5);
        let m = 2 + (seed as usize % 3);
        let sys = MultiplexSystem::without_frequencies(
            gen_erdos_renyi(n, 0.6, &mut rng).unwrap(),
            gen_ring(m).unwrap(),
            0.5 + seed as f64 * 0.1,
            1.5,
        )
        .unwrap();
        let psi = random_phases::<f64>(n, &mut rng);
        let phi = random_phases::<f64>(m, &mut rng);
        let (weights, _) = assemble_multiplex(&sys).unwrap();
        let theta = compose_state(&psi, &phi);

        let direct = jacobian_direct(&weights, &theta).unwrap();
        let blocks = jacobian_multiplex(&sys, &psi, &phi).unwrap();
        assert!(blocks.max_abs_diff(&direct) <= 1e-12, "seed {seed}");
        let fd = finite_difference_jacobian(&weights, &theta, 1e-6);
        assert!(fd.max_abs_diff(&direct) <= 1e-6, "seed {seed}: {}", fd.max_abs_diff(&direct));
    }
}

/// Eigenvalues of the Jacobian at twisted state `p` on a circulant graph of
/// half-width `h`: `Σ_{k=1}^{h} 2 cos(2πpk/n) (cos(2πmk/n) − 1)`.
fn circulant_twisted_spectrum(n: usize, h: usize, p: i64, eps: f64) -> Vec<f64> {
    let mut out: Vec<f64> = (0..n)
        .map(|m| {
            (1..=h)
                .map(|k| {
                    let a = 2.0 * PI * (p as f64) * k as f64 / n as f64;
                    let b = 2.0 * PI * (m * k) as f64 / n as f64;
                    2.0 * eps * a.cos() * (b.cos() - 1.0)
                })
                .sum()
        })
        .collect();
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out
}

#[test]
fn twisted_spectra_match_circulant_formula() {
    for (n, h) in [(7, 1), (12, 2), (20, 4), (31, 7)] {
        let a = gen_circulant::<f64>(n, h).unwrap().scaled(0.7);
        for p in 0..=(n as i64 / 2) {
            let psi = twisted_state::<f64>(n, p);
            let residual = equilibrium_residual(&a, &FrequencyVector::zeros(n), &psi).unwrap();
            assert!(residual <= 1e-12, "n={n} h={h} p={p} residual {residual}");
            let got = spectrum_sym(&jacobian_single_layer(&a, &psi).unwrap()).unwrap();
            let want = circulant_twisted_spectrum(n, h, p, 0.7);
            for (g, w) in got.iter().zip(&want) {
                assert!((g - w).abs() <= 1e-10, "n={n} h={h} p={p}: {g} vs {w}");
            }
        }
    }
}

#[test]
fn fig5_intra_twisted_stability_depends_on_range() {
    let psi = twisted_state::<f64>(100, 2);
    let at = |h| {
        let a = gen_circulant::<f64>(100, h).unwrap();
        classify_stability(&spectrum_sym(&jacobian_single_layer(&a, &psi).unwrap()).unwrap(), 1e-9)
            .unwrap()
            .classification
    };
    assert_eq!(at(10), Classification::Stable);
    assert_eq!(at(20), Classification::Unstable);
}

#[test]
fn single_precision_tracks_double() {
    let a64 = gen_ring::<f64>(8).unwrap();
    let a32 = gen_ring::<f32>(8).unwrap();
    let x64 = PhaseState::<f64>::new((0..8).map(|i| (i as f64 * 0.7).sin()).collect());
    let x32 = PhaseState::<f32>::new(x64.phases.iter().map(|&x| x as f32).collect());
    let t64 = integrate_euler(&x64, &FrequencyVector::zeros(8), &a64, 0.01, 500, 500).unwrap();
    let t32 = integrate_euler(&x32, &FrequencyVector::zeros(8), &a32, 0.01f32, 500, 500).unwrap();
    for (a, b) in t64.last().phases.iter().zip(&t32.last().phases) {
        assert!((a - *b as f64).abs() < 1e-4);
    }
    let r32 = order_parameter(t32.last()).unwrap();
    assert!((0.0..=1.0).contains(&r32));
}

#[test]
fn euler_converges_to_rk4_as_dt_shrinks() {
    let mut rng = SeededRng::new(9);
    let a = gen_erdos_renyi::<f64>(10, 0.5, &mut rng).unwrap();
    let x0 = random_phases::<f64>(10, &mut rng);
    let omega = FrequencyVector((0..10).map(|i| 0.1 * i as f64).collect());
    let reference = integrate_rk4(&x0, &omega, &a, 1e-3, 2000, 2000).unwrap();
    let gap = |dt: f64| {
        let steps = (2.0 / dt).round() as usize;
        integrate_euler(&x0, &omega, &a, dt, steps, steps).unwrap().last().max_abs_diff(reference.last())
    };
    let (coarse, fine) = (gap(1e-2), gap(1e-3));
    // first order: ten times smaller step, roughly ten times smaller error
    assert!(fine < coarse / 5.0, "{coarse} {fine}");
}
