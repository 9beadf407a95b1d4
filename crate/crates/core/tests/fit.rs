use nmsplit::cavity::calibrate_excess_loss;
use nmsplit::constants::hz_to_rad;
use nmsplit::fit::{fit_parameters, residual, FitParam, FitProblem, FreeParam, ParamVector};
use nmsplit::spectrum::sweep_fsr;
use nmsplit::{CavityParams, DopplerSpec, Execution, MediumParams, Model, ResponseMode, Spectrum};
use rand::SeedableRng;
use rand_distr::{Distribution, Normal};

fn fig1(a0_la: f64) -> Model {
    let cavity = CavityParams {
        lc: 0.177,
        la: 0.05,
        r1: 0.90,
        r2: 0.995,
        excess_loss: calibrate_excess_loss(20.0, 0.90, 0.995).unwrap(),
        lambda: 780e-9,
    };
    let medium = MediumParams {
        lambda_a: 780e-9,
        gamma_a: hz_to_rad(6e6),
        doppler: DopplerSpec::Width(hz_to_rad(343e6)),
        a0_la,
        la: 0.05,
        mode: ResponseMode::ApproxDoppler,
    };
    Model::new(cavity, medium).unwrap()
}

fn synthetic(a0_la: f64, step_hz: f64) -> Spectrum {
    let mut s = sweep_fsr(&fig1(a0_la), 3.5, step_hz, Execution::default()).unwrap();
    s.model = None;
    s
}

fn a0_problem(observed: Spectrum, lo: f64, hi: f64, start: f64) -> FitProblem {
    let base = fig1(start);
    let initial = ParamVector::from_model(&base);
    FitProblem::new(
        observed,
        base,
        vec![FreeParam {
            param: FitParam::A0La,
            lo,
            hi,
        }],
        initial,
    )
    .unwrap()
}

#[test]
fn noiseless_round_trip() {
    let p = a0_problem(synthetic(70.0, 1e6), 1.0, 400.0, 50.0);
    let r = fit_parameters(&p).unwrap();
    assert!(r.converged, "{r:?}");
    assert!(
        (r.best_fit.a0_la / 70.0 - 1.0).abs() < 0.01,
        "{}",
        r.best_fit.a0_la
    );
    assert!(r.residual < 1e-8);
}

#[test]
fn noisy_round_trip_median() {
    let clean = synthetic(70.0, 2e6);
    let noise = Normal::new(0.0, 0.01).unwrap();
    let mut rng = rand::rngs::StdRng::seed_from_u64(20);
    let mut fits: Vec<f64> = (0..20)
        .map(|_| {
            let mut s = clean.clone();
            s.transmission
                .iter_mut()
                .for_each(|t| *t += noise.sample(&mut rng));
            fit_parameters(&a0_problem(s, 1.0, 400.0, 50.0))
                .unwrap()
                .best_fit
                .a0_la
        })
        .collect();
    fits.sort_by(f64::total_cmp);
    let median = 0.5 * (fits[9] + fits[10]);
    assert!(
        (median / 70.0 - 1.0).abs() < 0.05,
        "median {median}, all {fits:?}"
    );
}

#[test]
fn unknown_amplitude_is_profiled_out() {
    let mut s = synthetic(70.0, 1e6);
    s.transmission.iter_mut().for_each(|t| *t *= 0.37);
    let mut p = a0_problem(s, 1.0, 400.0, 50.0);
    p.profile_scale = true;
    let r = fit_parameters(&p).unwrap();
    assert!(r.converged);
    assert!((r.best_fit.a0_la / 70.0 - 1.0).abs() < 1e-3);
    assert!((r.scale - 0.37).abs() < 1e-4, "{}", r.scale);
}

#[test]
fn several_free_parameters() {
    let truth = fig1(70.0);
    let mut shifted = truth;
    shifted.cavity.excess_loss = 0.15;
    let mut s = sweep_fsr(&shifted, 3.5, 1e6, Execution::default()).unwrap();
    s.model = None;
    let base = fig1(50.0);
    let free = vec![
        FreeParam {
            param: FitParam::A0La,
            lo: 1.0,
            hi: 400.0,
        },
        FreeParam {
            param: FitParam::ExcessLoss,
            lo: 0.05,
            hi: 0.3,
        },
    ];
    let p = FitProblem::new(s, base, free, ParamVector::from_model(&base)).unwrap();
    let r = fit_parameters(&p).unwrap();
    assert!(r.converged, "{r:?}");
    assert!((r.best_fit.a0_la / 70.0 - 1.0).abs() < 0.01);
    assert!((r.best_fit.excess_loss - 0.15).abs() < 1e-3);
}

#[test]
fn fits_are_reproducible_across_execution_modes() {
    let mut a = a0_problem(synthetic(70.0, 2e6), 1.0, 400.0, 50.0);
    let mut b = a.clone();
    a.options.exec = Execution::Sequential;
    b.options.exec = Execution::Parallel;
    let ra = fit_parameters(&a).unwrap();
    assert_eq!(ra, fit_parameters(&b).unwrap());
    assert_eq!(ra, fit_parameters(&a).unwrap());
}

#[test]
fn best_fit_is_a_local_minimum() {
    let clean = synthetic(70.0, 2e6);
    let mut s = clean.clone();
    let noise = Normal::new(0.0, 0.01).unwrap();
    let mut rng = rand::rngs::StdRng::seed_from_u64(7);
    s.transmission
        .iter_mut()
        .for_each(|t| *t += noise.sample(&mut rng));
    let p = a0_problem(s, 1.0, 400.0, 50.0);
    let r = fit_parameters(&p).unwrap();
    for h in [1e-3, 1e-2, 1e-1] {
        for sign in [-1.0, 1.0] {
            let mut q = r.best_fit;
            q.a0_la += sign * h;
            assert!(residual(&q, &p).unwrap() >= r.residual, "step {}", sign * h);
        }
    }
}

#[test]
fn bounds_excluding_the_truth_do_not_converge() {
    let p = a0_problem(synthetic(70.0, 1e6), 75.0, 90.0, 80.0);
    let r = fit_parameters(&p).unwrap();
    assert!(!r.converged);
    assert_eq!(r.at_bound, vec![FitParam::A0La]);
    assert_eq!(r.best_fit.a0_la, 75.0);
}

#[test]
fn invalid_problems_are_rejected() {
    let s = synthetic(70.0, 2e6);
    let base = fig1(50.0);
    let init = ParamVector::from_model(&base);
    let bad_bounds = vec![FreeParam {
        param: FitParam::A0La,
        lo: 10.0,
        hi: 5.0,
    }];
    assert!(FitProblem::new(s.clone(), base, bad_bounds, init).is_err());
    let outside = vec![FreeParam {
        param: FitParam::A0La,
        lo: 60.0,
        hi: 80.0,
    }];
    assert!(FitProblem::new(s.clone(), base, outside, init).is_err());
    let twice = vec![
        FreeParam {
            param: FitParam::A0La,
            lo: 1.0,
            hi: 80.0,
        },
        FreeParam {
            param: FitParam::A0La,
            lo: 1.0,
            hi: 80.0,
        },
    ];
    assert!(FitProblem::new(s, base, twice, init).is_err());
}
