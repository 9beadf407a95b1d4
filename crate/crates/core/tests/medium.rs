mod support;

use std::f64::consts::PI;

use nmsplit::constants::{angular_frequency, hz_to_rad, RB87_MASS_AMU};
use nmsplit::medium::{
    column_density_from_temperature, doppler_response, doppler_width, lorentzian_response,
    rb87_mass, rb_number_density, A0Calibration,
};
use nmsplit::{DopplerSpec, MediumParams, ResponseMode};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};

const LAMBDA: f64 = 780e-9;

fn medium(mode: ResponseMode, gamma: f64, doppler: f64, a0_la: f64) -> MediumParams {
    MediumParams {
        lambda_a: LAMBDA,
        gamma_a: gamma,
        doppler: DopplerSpec::Width(doppler),
        a0_la,
        la: 0.05,
        mode,
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn voigt_matches_quadrature_over_random_parameters() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(0x5eed_0001);
    let omega_a = angular_frequency(LAMBDA);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let gamma = hz_to_rad(rng.random_range(1e6..50e6));
        let dw = hz_to_rad(rng.random_range(50e6..1e9));
        let delta = rng.random_range(-6.0..6.0) * dw;
        let p = medium(ResponseMode::Voigt, gamma, dw, 10.0);
        let r = doppler_response(delta, &p).unwrap();
        let (alpha, n1) = support::voigt_by_quadrature(delta, gamma, dw, p.a0(), omega_a);
        worst = worst.max(rel(r.alpha, alpha)).max(rel(r.n_minus_1, n1));
    }
    eprintln!("worst relative error {worst:e}");
    assert!(worst <= 1e-6, "worst relative error {worst:e}");
}

#[test]
fn voigt_far_wing_approaches_homogeneous_dispersion() {
    let gamma = hz_to_rad(6e6);
    let dw = hz_to_rad(343e6);
    let omega_a = angular_frequency(LAMBDA);
    let p = medium(ResponseMode::Voigt, gamma, dw, 12.0);
    let delta = 30.0 * dw;
    let v = doppler_response(delta, &p).unwrap();
    let h = lorentzian_response(delta, gamma, p.a0(), omega_a).unwrap();
    assert!(rel(v.n_minus_1, h.n_minus_1) < 1e-3);
}

#[test]
fn approx_doppler_is_a_lorentzian_of_the_doppler_width() {
    let omega_a = angular_frequency(LAMBDA);
    let dw = hz_to_rad(343e6);
    let p = medium(ResponseMode::ApproxDoppler, hz_to_rad(6e6), dw, 70.0);
    for f in [-3e9, -400e6, -1e6, 0.0, 2e6, 171.5e6, 900e6] {
        let d = hz_to_rad(f);
        let r = doppler_response(d, &p).unwrap();
        let (a, n) = support::lorentz(d, dw, p.a0(), omega_a);
        assert!((r.alpha - a).abs() <= 1e-13 * a.abs().max(1e-300));
        assert!((r.n_minus_1 - n).abs() <= 1e-13 * n.abs().max(1e-300));
    }
    // half maximum at Δ = δω_D/2
    let half = doppler_response(0.5 * dw, &p).unwrap().alpha;
    assert!((half / p.a0() - 0.5).abs() < 1e-14);
}

#[test]
fn doppler_width_from_first_principles() {
    for t_c in [105.0, 110.0, 115.0, 120.0] {
        let t = t_c + 273.15;
        let w = doppler_width(t, rb87_mass(), LAMBDA).unwrap();
        let oracle = support::thermal_doppler_width(t, RB87_MASS_AMU, LAMBDA);
        assert!(rel(w, oracle) < 1e-8, "{t_c} C");
    }
    let thermal = medium(ResponseMode::Voigt, 1.0, 0.0, 1.0);
    let thermal = MediumParams {
        doppler: DopplerSpec::Thermal {
            temperature: 378.15,
            mass: rb87_mass(),
        },
        ..thermal
    };
    assert!(
        rel(
            thermal.doppler_width(),
            doppler_width(378.15, rb87_mass(), LAMBDA).unwrap()
        ) < 1e-15
    );
}

#[test]
fn density_follows_the_vapor_pressure_curve() {
    let kb = 1.380649e-23;
    for t in [300.0, 378.15, 393.15, 450.0] {
        let n = rb_number_density(t).unwrap();
        let oracle = support::rb_vapor_pressure_pa(t) / (kb * t);
        assert!(rel(n, oracle) < 1e-9, "{t}");
        let col = column_density_from_temperature(t, 0.05, 0.2783).unwrap();
        assert!(rel(col, oracle * 0.05 * 0.2783) < 1e-9);
    }
    assert!(rb_number_density(200.0).is_err());
    assert!(rb_number_density(700.0).is_err());
}

#[test]
fn density_grows_steeply_with_temperature() {
    let a = column_density_from_temperature(378.15, 0.05, 1.0).unwrap();
    let b = column_density_from_temperature(393.15, 0.05, 1.0).unwrap();
    // about a factor 2.5 over 15 K near 105 C
    assert!(b / a > 2.0 && b / a < 3.5, "{}", b / a);
}

#[test]
fn analytic_cross_section_scales_with_width_ratio() {
    let gamma = hz_to_rad(6e6);
    let narrow = A0Calibration::Analytic {
        lambda_a: LAMBDA,
        gamma_a: gamma,
        doppler_width: hz_to_rad(300e6),
    };
    let wide = A0Calibration::Analytic {
        lambda_a: LAMBDA,
        gamma_a: gamma,
        doppler_width: hz_to_rad(600e6),
    };
    assert!((narrow.sigma() / wide.sigma() - 2.0).abs() < 1e-12);
}

proptest! {
    #[test]
    fn response_parity(
        f in -5e9f64..5e9,
        gamma_mhz in 0.5f64..50.0,
        dw_mhz in 10f64..1000.0,
        a0_la in 0.0f64..300.0,
        mode in prop_oneof![Just(ResponseMode::Homogeneous), Just(ResponseMode::ApproxDoppler), Just(ResponseMode::Voigt)],
    ) {
        let p = medium(mode, hz_to_rad(gamma_mhz * 1e6), hz_to_rad(dw_mhz * 1e6), a0_la);
        let d = hz_to_rad(f);
        let plus = p.response(d);
        let minus = p.response(-d);
        let tol = |x: f64| 1e-12 * x.abs().max(f64::MIN_POSITIVE);
        prop_assert!((plus.alpha - minus.alpha).abs() <= tol(plus.alpha));
        prop_assert!((plus.n_minus_1 + minus.n_minus_1).abs() <= tol(plus.n_minus_1));
        prop_assert!(plus.alpha >= 0.0);
        prop_assert!(plus.alpha <= p.a0() * (1.0 + 1e-12));
        // above resonance the index is pulled below one in every mode
        if d > 0.0 { prop_assert!(plus.n_minus_1 <= 0.0); }
    }

    #[test]
    fn voigt_is_bounded_by_its_components(
        f in -3e9f64..3e9,
        gamma_mhz in 1f64..50.0,
        dw_mhz in 50f64..1000.0,
    ) {
        let gamma = hz_to_rad(gamma_mhz * 1e6);
        let dw = hz_to_rad(dw_mhz * 1e6);
        let v = medium(ResponseMode::Voigt, gamma, dw, 10.0);
        let h = medium(ResponseMode::Homogeneous, gamma, dw, 10.0);
        // convolution never raises the absorption above the homogeneous peak
        prop_assert!(v.response(hz_to_rad(f)).alpha <= h.response(0.0).alpha);
        let total = 0.5 * PI * gamma;
        // line area a0·πγ/2 is preserved, which caps the Gaussian-limited centre height
        prop_assert!(v.response(0.0).alpha * dw * PI.sqrt() <= total * v.a0() * (1.0 + 1e-9));
    }
}
