#![allow(dead_code)]

use locillusion::*;
use rand::Rng;

/// Random LQR scenario with well-separated towers and a run capped at
/// `stages`.
pub fn random_lqr_scenario<R: Rng>(rng: &mut R, stages: usize) -> ValidatedScenario {
    let mut pt = |r: f64| Point2::new(rng.gen_range(-r..r), rng.gen_range(-r..r));
    let towers = loop {
        let (a, b, c) = (pt(100.0), pt(100.0), pt(100.0));
        let scale = a.distance_sq(b).max(a.distance_sq(c)).max(b.distance_sq(c));
        if (b - a).cross(c - a).abs() > 1e-2 * scale {
            break [a, b, c];
        }
    };
    let mut s = default_scenario();
    s.towers = TowerArray::new(
        towers,
        [rng.gen_range(0.1..10.0), rng.gen_range(0.1..10.0), rng.gen_range(0.1..10.0)],
    );
    let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    s.receiver.gain = sign * rng.gen_range(0.05..1.0);
    s.receiver.goal = Point2::new(rng.gen_range(-60.0..60.0), rng.gen_range(-60.0..60.0));
    s.producer.goal = Point2::new(rng.gen_range(-60.0..60.0), rng.gen_range(-60.0..60.0));
    s.producer.q = Matrix::diag(&[
        rng.gen_range(0.1..5.0),
        rng.gen_range(0.1..5.0),
        rng.gen_range(0.1..5.0),
        rng.gen_range(0.1..5.0),
    ]);
    s.producer.r = Matrix::diag(&[rng.gen_range(0.1..5.0), rng.gen_range(0.1..5.0)]);
    s.initial_position = Point2::new(rng.gen_range(-60.0..60.0), rng.gen_range(-60.0..60.0));
    s.initial_estimate = Point2::new(rng.gen_range(-60.0..60.0), rng.gen_range(-60.0..60.0));
    s.termination_epsilon = 1e-12;
    s.max_stages = stages;
    validate_scenario(s).expect("generated scenario is valid")
}

/// Largest per-stage gap between the logged (ω, e) trajectory and the linear
/// recursion `ω ← ω + K_r e`, `e ← e − u` driven by the logged controls.
pub fn linear_equivalence_gap(scenario: &Scenario, log: &TrajectoryLog) -> f64 {
    let first = &log.records[0];
    let mut omega = first.omega_r;
    let mut e = first.e.expect("first stage is plausible");
    let mut worst: f64 = 0.0;
    for (k, rec) in log.records.iter().enumerate() {
        if k > 0 {
            let prev = &log.records[k - 1];
            omega += scenario.receiver.gain * e;
            e = e - prev.u_p;
        }
        let logged_e = rec.e.expect("plausible stage");
        worst = worst.max((rec.omega_r - omega).norm()).max((logged_e - e).norm());
    }
    worst
}
