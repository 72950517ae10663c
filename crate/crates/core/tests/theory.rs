use std::f64::consts::PI;

use graph_energy::graph_gen::resolve_params;
use graph_energy::theory::{
    bulk_energy, delta_e_theory, er_energy_small_p, er_energy_theory, lambda2_theory,
    ppm_energy_small_p, ppm_energy_theory, threshold_offset, wigner_density, TheoryPrediction,
};

/// Midpoint rule over the semicircle support.
fn integrate(f: impl Fn(f64) -> f64, lo: f64, hi: f64, points: usize) -> f64 {
    let h = (hi - lo) / points as f64;
    (0..points).map(|i| f(lo + h * (i as f64 + 0.5))).sum::<f64>() * h
}

#[test]
fn semicircle_integrates_to_one() {
    for (sigma2, n) in [(0.0475, 1000usize), (0.01, 500), (0.0005, 10_000)] {
        let r = 2.0 * (sigma2 * n as f64).sqrt();
        let total = integrate(|x| wigner_density(x, sigma2, n), -r, r, 10_000);
        assert!((total - 1.0).abs() < 1e-4, "{total}");
    }
}

#[test]
fn bulk_term_is_n_times_mean_abs_eigenvalue() {
    for (n, k, k_ab) in [(1000usize, 50.0, 25.0), (500, 20.0, 0.0), (1000, 5.0, 5.0)] {
        let p = resolve_params(n, k, k_ab).unwrap();
        let r = 2.0 * (p.sigma2 * n as f64).sqrt();
        let quad = n as f64 * integrate(|x| x.abs() * wigner_density(x, p.sigma2, n), -r, r, 10_000);
        let closed = bulk_energy(n, p.sigma2);
        assert!(((quad - closed) / closed).abs() < 1e-4, "{quad} vs {closed}");
    }
}

#[test]
fn delta_e_raw_is_the_difference_of_the_expansions() {
    for k in [5.0, 20.0, 50.0] {
        for k_ab in [0.0, 0.2 * k, 0.5 * k] {
            let p = resolve_params(1000, k, k_ab).unwrap();
            let d = delta_e_theory(&p);
            let diff = ppm_energy_small_p(&p) - er_energy_small_p(1000, k).unwrap();
            assert!((d.raw - diff).abs() < 1e-9 * diff.abs().max(1.0), "k={k} k_ab={k_ab}");
        }
    }
}

#[test]
fn exact_and_expanded_er_energies_are_close_when_sparse() {
    for (n, k) in [(1000usize, 50.0f64), (10_000, 5.0), (500, 20.0)] {
        let exact = er_energy_theory(n, k).unwrap() - k - 1.0;
        let small = er_energy_small_p(n, k).unwrap() - k - 1.0;
        let p = k / n as f64;
        assert!(((exact - small) / exact).abs() < p * p);
    }
}

#[test]
fn energy_prediction_is_nonincreasing_in_separation() {
    for k in [20.0f64, 50.0] {
        let mut previous = f64::INFINITY;
        let steps = (4.0 * k) as usize;
        for i in 0..=steps {
            // k_ab from k down to 0 in quarter steps
            let k_ab = k - 0.25 * i as f64;
            let e = ppm_energy_theory(&resolve_params(1000, k, k_ab).unwrap());
            assert!(e <= previous + 1e-9, "k={k} k_ab={k_ab}: {e} > {previous}");
            previous = e;
        }
        let at = |k_ab: f64| ppm_energy_theory(&resolve_params(1000, k, k_ab).unwrap());
        assert!(at(k) > at(k / 2.0) && at(k / 2.0) > at(0.0));
    }
}

#[test]
fn plateau_clamps() {
    for k in [5.0f64, 20.0, 50.0] {
        for i in 0..=20 {
            let p = resolve_params(1000, k, 2.0 * k * i as f64 / 20.0).unwrap();
            assert!(lambda2_theory(&p) >= 2.0 * k.sqrt() - 1e-12);
            let t = TheoryPrediction::evaluate(&p).unwrap();
            assert_eq!(t.detectable, p.separation() > 2.0 * k.sqrt());
            if !t.detectable {
                assert_eq!(t.delta_e_anchored, 0.0);
            }
        }
    }
}

#[test]
fn left_and_right_limits_agree_at_threshold() {
    let eps = 1e-11;
    for k in [5.0f64, 20.0, 50.0] {
        // k_ab at which the separation equals 2√k
        let k_ab_star = k - k.sqrt();
        let left = resolve_params(1000, k, k_ab_star + eps).unwrap();
        let right = resolve_params(1000, k, k_ab_star - eps).unwrap();
        let rel = |a: f64, b: f64| (a - b).abs() / b.abs();
        assert!(rel(lambda2_theory(&left), lambda2_theory(&right)) < 1e-10);
        assert!(rel(ppm_energy_theory(&left), ppm_energy_theory(&right)) < 1e-10);
        let (dl, dr) = (delta_e_theory(&left), delta_e_theory(&right));
        assert!((dl.anchored - dr.anchored).abs() < 1e-10);
        assert!((dr.anchored - dr.raw - threshold_offset(k)).abs() < 1e-9);
        assert!((threshold_offset(k) + k.sqrt() * (2.0 - 4.0 / (3.0 * PI))).abs() < 1e-12);
    }
}
