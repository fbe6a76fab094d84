//! Exit criteria. Prints one PASS/FAIL line per criterion and fails if any
//! criterion fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use locillusion::lqr::LinearSystem;
use locillusion::receiver::BOX_TOL;
use locillusion::report::csv_string;
use locillusion::sim::Producer;
use locillusion::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn timed(f: impl FnOnce() -> Outcome) -> (Outcome, Duration) {
    let t = Instant::now();
    let o = f();
    (o, t.elapsed())
}

fn with_deadline(limit: Duration, f: impl FnOnce() -> Outcome) -> Outcome {
    let (o, took) = timed(f);
    let in_time = took < limit;
    outcome(
        o.pass && in_time,
        format!("{}; runtime {:.3}s (limit {:.0}s)", o.detail, took.as_secs_f64(), limit.as_secs_f64()),
    )
}

/// 1. Gain within 0.005 of the printed matrix, DARE residual < 1e-8, < 1 s.
fn lqr_gain_reproduction() -> Outcome {
    with_deadline(Duration::from_secs(1), || {
        let printed = [[-0.54, 0.0, -0.87, 0.0], [0.0, -0.54, 0.0, -0.87]];
        let sol = match lqr_gain(&build_system(0.3).unwrap(), &Matrix::identity(4), &Matrix::identity(2)) {
            Ok(s) => s,
            Err(e) => return outcome(false, e.to_string()),
        };
        let worst = (0..2)
            .flat_map(|i| (0..4).map(move |j| (i, j)))
            .map(|(i, j)| (sol.gain[(i, j)] - printed[i][j]).abs())
            .fold(0.0, f64::max);
        outcome(
            worst < 0.005 && sol.residual < 1e-8,
            format!("max entry error {worst:.2e}, DARE residual {:.2e}", sol.residual),
        )
    })
}

/// 2. LQR run: stage 31 ± 3, ‖ι − x_G‖ < 0.005, ‖ω‖ < 2, V strictly
///    decreasing, under 1 s.
fn lqr_closed_loop() -> Outcome {
    with_deadline(Duration::from_secs(1), || {
        let s = validate_scenario(default_scenario()).unwrap();
        let producer = Producer::from_scenario(&s).unwrap();
        let Producer::Lqr(sol) = &producer else { unreachable!() };
        let log = match sim::run_with_producer(&s, &producer) {
            Ok(l) => l,
            Err(e) => return outcome(false, e.to_string()),
        };
        let last = log.last();
        let est_gap = last.iota.point().map_or(f64::INFINITY, |p| p.distance(s.receiver.goal));
        let pos_gap = last.omega_r.distance(s.producer.goal);
        let v: Vec<f64> = log
            .records
            .iter()
            .map(|r| ExtendedState::new(r.omega_r - s.producer.goal, r.e.unwrap_or_default()).quadratic_form(&sol.p))
            .collect();
        let decreasing = v.windows(2).all(|w| w[1] < w[0]);
        let stage_ok = (28..=34).contains(&log.terminated_at);
        outcome(
            log.termination_reason == TerminationReason::GoalReached
                && stage_ok
                && est_gap < 0.005
                && pos_gap < 2.0
                && decreasing,
            format!(
                "terminated at stage {} ({}), target 31±3; estimate gap {est_gap:.2e}; position gap {pos_gap:.2e}; V decreasing: {decreasing}",
                log.terminated_at,
                log.termination_reason.as_str()
            ),
        )
    })
}

/// 3. MPC run: stage 64 ± 5, every action in Θ, every stage plausible, < 10 s.
fn mpc_closed_loop() -> Outcome {
    with_deadline(Duration::from_secs(10), || {
        let s = validate_scenario(default_scenario().with_mode(ProducerMode::Mpc)).unwrap();
        let log = match run_closed_loop(&s) {
            Ok(l) => l,
            Err(e) => return outcome(false, e.to_string()),
        };
        let th = s.receiver.theta;
        let in_theta = log.records.iter().all(|r| {
            r.u_p.x >= th.min.x - BOX_TOL
                && r.u_p.x <= th.max.x + BOX_TOL
                && r.u_p.y >= th.min.y - BOX_TOL
                && r.u_p.y <= th.max.y + BOX_TOL
        });
        let plausible = log.records.iter().all(|r| r.plausible);
        let stage_ok = (59..=69).contains(&log.terminated_at);
        outcome(
            log.termination_reason == TerminationReason::GoalReached && stage_ok && in_theta && plausible,
            format!(
                "terminated at stage {} ({}), target 64±5; actions in Θ: {in_theta}; all plausible: {plausible}",
                log.terminated_at,
                log.termination_reason.as_str()
            ),
        )
    })
}

fn random_layout(rng: &mut ChaCha8Rng) -> TowerArray {
    loop {
        let mut pt = || Point2::new(rng.gen_range(-100.0..100.0), rng.gen_range(-100.0..100.0));
        let (a, b, c) = (pt(), pt(), pt());
        let scale = a.distance_sq(b).max(a.distance_sq(c)).max(b.distance_sq(c));
        if (b - a).cross(c - a).abs() > 1e-2 * scale {
            let cal = [rng.gen_range(0.1..10.0), rng.gen_range(0.1..10.0), rng.gen_range(0.1..10.0)];
            return TowerArray::new([a, b, c], cal);
        }
    }
}

/// 4. 1000 random spoofs recover the target within 1e-9 with readings
///    at most s_c, under 5 s.
fn spoofing_round_trip() -> Outcome {
    with_deadline(Duration::from_secs(5), || {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut worst: f64 = 0.0;
        let mut bound_ok = true;
        for _ in 0..1000 {
            let towers = random_layout(&mut rng);
            let truth = Point2::new(rng.gen_range(-200.0..200.0), rng.gen_range(-200.0..200.0));
            let target = Point2::new(rng.gen_range(-200.0..200.0), rng.gen_range(-200.0..200.0));
            let s = synthesize_intensities(&towers, truth, target);
            let obs = measure_intensities(&towers, truth, s).unwrap();
            bound_ok &= (0..3).all(|i| obs.0[i] <= towers.calibration[i]);
            worst = worst.max(trilaterate(&towers, &obs).point().map_or(f64::INFINITY, |p| p.distance(target)));
        }
        outcome(worst < 1e-9 && bound_ok, format!("max recovery error {worst:.2e}; readings within calibration: {bound_ok}"))
    })
}

/// 5. Nonlinear loop within 1e-6 of the linear recursion, 50 scenarios × 30 stages.
fn linear_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let s = common::random_lqr_scenario(&mut rng, 30);
        match run_closed_loop(&s) {
            Ok(log) if log.records.len() == 30 => worst = worst.max(common::linear_equivalence_gap(&s, &log)),
            Ok(log) => return outcome(false, format!("run stopped early at stage {}", log.terminated_at)),
            Err(e) => return outcome(false, e.to_string()),
        }
    }
    outcome(worst < 1e-6, format!("max per-stage gap {worst:.2e}"))
}

/// 6. Rank 4 for 20 random nonzero gains, rank 2 for zero gain.
fn controllability() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let full = (0..20).all(|_| {
        let kr = rng.gen_range(0.01..5.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        controllability_rank(&build_system(kr).unwrap()) == 4
    });
    let zero = controllability_rank(&LinearSystem::from_gain_unchecked(0.0));
    outcome(full && zero == 2, format!("random gains full rank: {full}; rank at K_r = 0: {zero}"))
}

/// 7. 50 random QPs: KKT < 1e-8, beat 1e4 feasible samples, unbounded case
///    matches the linear solve within 1e-9.
fn qp_solver() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst_kkt: f64 = 0.0;
    let mut worst_direct: f64 = 0.0;
    let mut beaten = 0usize;
    for _ in 0..50 {
        let n = rng.gen_range(1..=30);
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = rng.gen_range(-1.0..1.0);
            }
        }
        let h = &(&m.transpose() * &m) + &Matrix::identity(n).scale(rng.gen_range(0.1..1.1));
        let g: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let lower: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..0.0)).collect();
        let upper: Vec<f64> = lower.iter().map(|l| l + rng.gen_range(0.1..3.0)).collect();

        let qp = BoxQp::new(h.clone(), g.clone(), lower, upper).unwrap();
        let res = match solve_box_qp(&qp, QpOptions::default()) {
            Ok(r) => r,
            Err(e) => return outcome(false, e.to_string()),
        };
        worst_kkt = worst_kkt.max(kkt_residual(&qp, &res.x).unwrap_or(f64::INFINITY));
        let best = qp.objective(&res.x);
        for _ in 0..10_000 {
            let z: Vec<f64> = (0..n).map(|i| rng.gen_range(qp.lower[i]..=qp.upper[i])).collect();
            if qp.objective(&z) < best {
                beaten += 1;
            }
        }

        let direct = h.solve_vec(&g.iter().map(|v| -v).collect::<Vec<_>>()).unwrap();
        let free = solve_box_qp(&BoxQp::unconstrained(h, g), QpOptions::default()).unwrap();
        worst_direct = free.x.iter().zip(&direct).map(|(a, b)| (a - b).abs()).fold(worst_direct, f64::max);
    }
    outcome(
        worst_kkt < 1e-8 && beaten == 0 && worst_direct < 1e-9,
        format!("max KKT residual {worst_kkt:.2e}; samples beating solver: {beaten}; unbounded vs direct {worst_direct:.2e}"),
    )
}

/// 8. Scalar Riccati gives the golden ratio within 1e-8.
fn scalar_riccati() -> Outcome {
    let one = Matrix::identity(1);
    match solve_dare(&one, &one, &one, &one, lqr::DARE_TOL, lqr::DARE_MAX_ITER) {
        Ok(p) => {
            let err = (p[(0, 0)] - (1.0 + 5f64.sqrt()) / 2.0).abs();
            outcome(err < 1e-8, format!("|P − φ| = {err:.2e}"))
        }
        Err(e) => outcome(false, e.to_string()),
    }
}

/// 9. Two runs of the same scenario give byte-identical CSV.
fn determinism() -> Outcome {
    let mut same = true;
    for mode in [ProducerMode::Lqr, ProducerMode::Mpc] {
        let s = validate_scenario(default_scenario().with_mode(mode)).unwrap();
        let a = csv_string(&run_closed_loop(&s).unwrap());
        let b = csv_string(&run_closed_loop(&s).unwrap());
        same &= a.as_bytes() == b.as_bytes();
    }
    outcome(same, format!("lqr and mpc CSV identical across runs: {same}"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("1 LQR gain reproduction", lqr_gain_reproduction),
        ("2 LQR closed-loop reproduction", lqr_closed_loop),
        ("3 MPC closed-loop reproduction", mpc_closed_loop),
        ("4 spoofing round trip", spoofing_round_trip),
        ("5 linear equivalence", linear_equivalence),
        ("6 controllability", controllability),
        ("7 box QP solver", qp_solver),
        ("8 scalar Riccati", scalar_riccati),
        ("9 determinism", determinism),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let o = check();
        if !o.pass {
            failed += 1;
        }
        println!("criterion {name}: {} — {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
