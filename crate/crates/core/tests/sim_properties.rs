mod common;

use std::f64::consts::PI;

use proptest::prelude::*;
use rshaper_core::*;

fn plant() -> StateSpaceModelF64 {
    paper_verbatim_statespace()
}

fn controller(kp: f64, kd: Option<f64>) -> ControllerConfigF64 {
    ControllerConfig {
        pi: PiController::new(kp, 150.0).unwrap(),
        comp: kd.map(|kd| DelayCompensator::new(kd, 0.1923).unwrap()),
        gravity_ff: 0.0,
    }
}

#[test]
fn pulse_response_rings_at_the_resonance() {
    let cfg = SimConfig::new(1e-4, 20.0).unwrap();
    let sc = Scenario::pulse(1.0, 0.05, 0.0);
    let tr = simulate_open_loop(
        &plant(),
        &sc.sampled_input(cfg.dt, cfg.steps() + 1),
        0.0,
        &cfg,
    )
    .unwrap();
    let tail = &tr.x[tr.len() - 10_000..];
    let rest = tail.iter().sum::<f64>() / tail.len() as f64;
    let crossings: Vec<f64> =
        tr.x.windows(2)
            .zip(&tr.t)
            .take_while(|(_, &t)| t < 3.0)
            .filter(|(w, &t)| t > 0.1 && (w[0] - rest).signum() != (w[1] - rest).signum())
            .map(|(w, &t)| t + 1e-4 * (rest - w[0]) / (w[1] - w[0]))
            .collect();
    assert!(crossings.len() >= 6);
    let period = 2.0 * (crossings.last().unwrap() - crossings[0]) / (crossings.len() - 1) as f64;
    let expected = 2.0 * PI / 16.3;
    assert!(
        (period - expected).abs() / expected < 0.02,
        "{period} vs {expected}"
    );
}

#[test]
fn sinusoid_amplitude_matches_frequency_response() {
    let w = 16.3;
    let g = RationalTransfer::from_statespace(&plant()).unwrap();
    let period = 2.0 * PI / w;
    let cfg = SimConfig::new(1e-4, 30.0 * period).unwrap();
    let u: Vec<f64> = (0..=cfg.steps())
        .map(|k| 0.2 * (w * k as f64 * cfg.dt).sin())
        .collect();
    let tr = simulate_open_loop(&plant(), &u, 0.0, &cfg).unwrap();
    let start = tr.t.iter().position(|&t| t >= 10.0 * period).unwrap();
    let amp = common::fitted_amplitude(&tr.t[start..], &tr.x[start..], w);
    let expected = 0.2 * g.eval_jw(w).unwrap().norm();
    assert!(
        (amp - expected).abs() / expected < 0.05,
        "{amp} vs {expected}"
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn open_loop_is_linear(alpha in -5.0f64..5.0, u in prop::collection::vec(-1.0f64..1.0, 50)) {
        let cfg = SimConfig::new(1e-3, 2.0).unwrap();
        let input: Vec<f64> = (0..=cfg.steps()).map(|k| u[k * u.len() / (cfg.steps() + 1)]).collect();
        let scaled: Vec<f64> = input.iter().map(|v| alpha * v).collect();
        let a = simulate_open_loop(&plant(), &input, 0.0, &cfg).unwrap();
        let b = simulate_open_loop(&plant(), &scaled, 0.0, &cfg).unwrap();
        let scale = a.x.iter().fold(0.0f64, |m, v| m.max(v.abs())) * alpha.abs();
        for (xa, xb) in a.x.iter().zip(&b.x) {
            prop_assert!((alpha * xa - xb).abs() <= 1e-10 * scale.max(f64::MIN_POSITIVE));
        }
    }
}

#[test]
fn identical_configs_give_identical_traces() {
    let cfg = SimConfig::new(1e-4, 2.0).unwrap();
    let sc = Scenario::combo(0.005, 0.0, 0.01, 1.0);
    let a = simulate_closed_loop(&plant(), &controller(100.0, Some(100.0)), &sc, &cfg).unwrap();
    let b = simulate_closed_loop(&plant(), &controller(100.0, Some(100.0)), &sc, &cfg).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.to_csv_string(), b.to_csv_string());
}

#[test]
fn zero_gain_compensator_equals_no_compensator() {
    let cfg = SimConfig::new(1e-4, 3.0).unwrap();
    let sc = Scenario::step(0.005, 0.0);
    let a = simulate_closed_loop(&plant(), &controller(50.0, Some(0.0)), &sc, &cfg).unwrap();
    let b = simulate_closed_loop(&plant(), &controller(50.0, None), &sc, &cfg).unwrap();
    for (xa, xb) in a.x.iter().zip(&b.x) {
        assert!((xa - xb).abs() <= 1e-12 * 0.005);
    }
}

#[test]
fn step_halving_converges() {
    let sc = Scenario::step(0.005, 0.0);
    for (kp, kd) in [(100.0, Some(100.0)), (50.0, None), (200.0, Some(100.0))] {
        let a = simulate_closed_loop(
            &plant(),
            &controller(kp, kd),
            &sc,
            &SimConfig::new(1e-4, 10.0).unwrap(),
        )
        .unwrap();
        let b = simulate_closed_loop(
            &plant(),
            &controller(kp, kd),
            &sc,
            &SimConfig::new(5e-5, 10.0).unwrap(),
        )
        .unwrap();
        let (xa, xb) = (a.x.last().unwrap(), b.x.last().unwrap());
        assert!(
            (xa - xb).abs() / xb.abs() < 1e-3,
            "({kp},{kd:?}): {xa} vs {xb}"
        );
    }
}

#[test]
fn pi_only_loop_grows() {
    let cfg = SimConfig::new(1e-4, 20.0).unwrap();
    let tr = simulate_closed_loop(
        &plant(),
        &controller(100.0, None),
        &Scenario::step(0.005, 0.0),
        &cfg,
    )
    .unwrap();
    let v = classify_trace(&tr, 0.005, 0.02);
    assert_eq!(v.verdict, Verdict::Diverged);
    let envelope = |range: std::ops::Range<f64>| {
        tr.t.iter()
            .zip(&tr.x)
            .filter(|(t, _)| range.contains(t))
            .fold(0.0f64, |m, (_, x)| m.max((x - 0.005).abs()))
    };
    assert!(envelope(5.0..10.0) < envelope(10.0..15.0));
    assert!(envelope(10.0..15.0) < envelope(15.0..20.0));
}

#[test]
fn compensated_loop_rejects_a_disturbance() {
    let cfg = SimConfig::new(1e-4, 20.0).unwrap();
    let sc = Scenario::combo(0.005, 0.0, 0.02, 10.0);
    let tr = simulate_closed_loop(&plant(), &controller(100.0, Some(100.0)), &sc, &cfg).unwrap();
    let kick =
        tr.t.iter()
            .zip(&tr.x)
            .filter(|(t, _)| **t > 10.0)
            .fold(0.0f64, |m, (_, x)| m.max((x - 0.005).abs()));
    assert!(
        kick > 0.02 * 0.005,
        "the impulse should leave the band, got {kick}"
    );
    let v = classify_trace(&tr, 0.005, 0.02);
    assert_eq!(v.verdict, Verdict::Settled);
    assert!(v.settling_time.unwrap() > 10.0);
}

#[test]
fn zero_step_stays_settled() {
    let cfg = SimConfig::new(1e-4, 1.0).unwrap();
    let tr = simulate_closed_loop(
        &plant(),
        &controller(100.0, Some(100.0)),
        &Scenario::step(0.0, 0.0),
        &cfg,
    )
    .unwrap();
    let v = classify_trace(&tr, 0.0, 0.02);
    assert_eq!(v.verdict, Verdict::Settled);
    assert_eq!(v.settling_time, Some(0.0));
}

#[test]
fn gravity_feedforward_offsets_recorded_voltage() {
    let ug = gravity_feedforward(&nominal_params::<f64>());
    let cfg = SimConfig::new(1e-4, 1.0).unwrap();
    let mut with = controller(100.0, Some(100.0));
    with.gravity_ff = ug;
    let sc = Scenario::step(0.005, 0.0);
    let a = simulate_closed_loop(&plant(), &with, &sc, &cfg).unwrap();
    let b = simulate_closed_loop(&plant(), &controller(100.0, Some(100.0)), &sc, &cfg).unwrap();
    assert_eq!(a.x, b.x);
    assert!(a
        .u
        .iter()
        .zip(&b.u)
        .all(|(ua, ub)| (ua - ub - ug).abs() < 1e-12));
}
