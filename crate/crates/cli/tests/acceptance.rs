//! Acceptance suite: one test per release criterion, each printing a
//! pass/fail line (visible with `--nocapture`).
//!
//! Run with:
//! `cargo test -p tristep-cli --test acceptance -- --nocapture`

use std::time::Instant;
use tristep_core::catalog;
use tristep_core::engine::{
    self, fejer_check, ProcessMode, RunSettings, SelectionStrategy, StopReason, StopRule,
};
use tristep_core::error::Error;
use tristep_core::geometry::{hausdorff, hausdorff_sampled, CompactSet, Vector};
use tristep_core::mappings::{check_condition_c, check_nonexpansive, uniform_grid_1d};
use tristep_core::oracles::{
    four_point_identity_check, lemma25_check, random_simplex_tuples, tan_xu_limit, SequenceTriple,
};
use tristep_core::schedules::{ErrorRule, Schedule, SeqRule};

fn criterion(n: u32, desc: &str, ok: bool) {
    println!("criterion {n:>2} {}: {desc}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {n} failed: {desc}");
}

fn scalar(x: f64) -> Vector {
    Vector::scalar(x).unwrap()
}

fn settings(mode: ProcessMode, stop: StopRule) -> RunSettings {
    RunSettings {
        mode,
        strategy: SelectionStrategy::Nearest,
        seed: 1,
        stop,
        nonsingleton_policy: Default::default(),
    }
}

/// Theorem-level convergence of process A on the half-interval triple with
/// the strict-valid built-in schedule, under zero and seeded bounded errors.
#[test]
fn criterion_1_process_a_convergence() {
    let problem = catalog::problem("half_interval", &[]).unwrap();
    let zero = Schedule::builtin("constant_decay", 1).unwrap();
    assert!(zero.validate(10_000, true).unwrap().strict_ok);
    let seeded = zero
        .clone()
        .with_errors(ErrorRule::SeededUniform {
            lower: scalar(0.0),
            upper: scalar(1.0),
            seed: 7,
        })
        .unwrap();
    assert!(seeded.validate(10_000, true).unwrap().strict_ok);

    for (name, schedule) in [("zero errors", &zero), ("seeded bounded errors", &seeded)] {
        let started = Instant::now();
        let trace = engine::run(
            &problem,
            &scalar(1.0),
            schedule,
            &settings(ProcessMode::A, StopRule::residual(10_000, 1e-8)),
        )
        .unwrap();
        let elapsed = started.elapsed();
        let last = trace.final_record().unwrap();
        let max_residual = last.residuals.iter().cloned().fold(0.0, f64::max);
        let ok = trace.len() <= 10_000
            && max_residual <= 1e-6
            && last.dist_f.unwrap() <= 1e-6
            && elapsed.as_secs_f64() < 1.0;
        criterion(
            1,
            &format!(
                "process A on half_interval ({name}): max residual {max_residual:.2e}, \
                 dist to fixed set {:.2e}, {} iterations in {:.0} ms",
                last.dist_f.unwrap(),
                trace.len(),
                elapsed.as_secs_f64() * 1e3
            ),
            ok,
        );
    }
}

/// Convergence of process B (metric-projection images) on the shrinking-ball
/// triple in the plane.
#[test]
fn criterion_2_process_b_convergence() {
    let problem = catalog::problem("shrink_ball", &[]).unwrap();
    let schedule = Schedule::builtin("constant_decay", 2).unwrap();
    let x1 = Vector::new(vec![0.8, 0.0]).unwrap();
    let trace = engine::run(
        &problem,
        &x1,
        &schedule,
        &settings(ProcessMode::B, StopRule::residual(10_000, 1e-6)),
    )
    .unwrap();
    let last = trace.final_record().unwrap();
    let max_residual = last.residuals.iter().cloned().fold(0.0, f64::max);
    criterion(
        2,
        &format!(
            "process B on shrink_ball reaches residual {max_residual:.2e} \
             in {} iterations (stop: {})",
            trace.len(),
            trace.meta.stop_reason
        ),
        trace.meta.stop_reason == StopReason::ResidualTol
            && max_residual <= 1e-6
            && trace.len() <= 10_000,
    );
}

/// The engine's first iterate on T x = {x/2} with a = 1/2, c = d = 1/4,
/// alpha = beta = 1/4 matches plain scalar arithmetic exactly.
#[test]
fn criterion_3_single_step_oracle() {
    // Scalar brute force, no engine types involved.
    let (a, c, d, alpha, beta) = (0.5f64, 0.25f64, 0.25f64, 0.25f64, 0.25f64);
    let x = 1.0f64;
    let z = x / 2.0;
    let u_prime = x / 2.0;
    let w = (1.0 - a) * x + a * z;
    let u = w / 2.0;
    let v_prime = w / 2.0;
    let y = (1.0 - c - d) * x + c * u + d * u_prime;
    let v = y / 2.0;
    let x2_oracle = (1.0 - alpha - beta) * x + alpha * v + beta * v_prime;
    assert_eq!(x2_oracle, 175.0 / 256.0);

    let problem = catalog::problem("halving", &[]).unwrap();
    let schedule = Schedule::new(
        "single_step",
        1,
        tristep_core::schedules::CoeffRules {
            a: SeqRule::constant(0.5),
            b: SeqRule::ZERO,
            c: SeqRule::constant(0.25),
            d: SeqRule::constant(0.25),
            e: SeqRule::ZERO,
            alpha: SeqRule::constant(0.25),
            beta: SeqRule::constant(0.25),
            gamma: SeqRule::ZERO,
        },
        (0.3, 0.75),
        ErrorRule::Zero,
    )
    .unwrap();
    let trace = engine::run(
        &problem,
        &scalar(1.0),
        &schedule,
        &settings(ProcessMode::A, StopRule { max_iter: 2, residual_tol: None, stagnation: None }),
    )
    .unwrap();
    let x2 = trace.records[1].x.coords()[0];
    criterion(
        3,
        &format!("single-step oracle: engine x2 = {x2:.17} vs 175/256 = {:.17}", 175.0 / 256.0),
        (x2 - 175.0 / 256.0).abs() < 1e-15,
    );
}

/// The per-step Fejér bound holds along every trace of criteria 1 and 2,
/// for every known fixed point.
#[test]
fn criterion_4_fejer_monitor() {
    let mut all_ok = true;

    let half = catalog::problem("half_interval", &[]).unwrap();
    let zero = Schedule::builtin("constant_decay", 1).unwrap();
    let seeded = zero
        .clone()
        .with_errors(ErrorRule::SeededUniform {
            lower: scalar(0.0),
            upper: scalar(1.0),
            seed: 7,
        })
        .unwrap();
    let shrink = catalog::problem("shrink_ball", &[]).unwrap();
    let plane = Schedule::builtin("constant_decay", 2).unwrap();

    let traces = [
        engine::run(
            &half,
            &scalar(1.0),
            &zero,
            &settings(ProcessMode::A, StopRule::residual(10_000, 1e-8)),
        )
        .unwrap(),
        engine::run(
            &half,
            &scalar(1.0),
            &seeded,
            &settings(ProcessMode::A, StopRule::residual(10_000, 1e-8)),
        )
        .unwrap(),
        engine::run(
            &shrink,
            &Vector::new(vec![0.8, 0.0]).unwrap(),
            &plane,
            &settings(ProcessMode::B, StopRule::residual(10_000, 1e-6)),
        )
        .unwrap(),
    ];
    let problems = [&half, &half, &shrink];
    for (trace, problem) in traces.iter().zip(problems) {
        for p in &problem.fixed_points.as_ref().unwrap().points {
            let report = fejer_check(trace, p, None, 1e-9).unwrap();
            all_ok &= report.passed;
        }
    }
    criterion(4, "Fejér bound holds on every criterion-1/2 trace at tol 1e-9", all_ok);
}

/// Closed-form Hausdorff values dominate and agree with the sampled
/// estimator, and the metric axioms hold on random same-kind instances.
#[test]
fn criterion_5_hausdorff_correctness() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);

    let mut random_set = |kind: usize, dim: usize| -> CompactSet {
        let coords =
            |r: &mut rand_chacha::ChaCha8Rng| -> Vec<f64> { (0..dim).map(|_| r.random::<f64>() * 2.0 - 1.0).collect() };
        match kind {
            0 => CompactSet::singleton(Vector::new(coords(&mut rng)).unwrap()),
            1 => {
                let n = 1 + (rng.random::<u32>() % 5) as usize;
                CompactSet::points(
                    (0..n).map(|_| Vector::new(coords(&mut rng)).unwrap()).collect(),
                )
                .unwrap()
            }
            2 => {
                let c = Vector::new(coords(&mut rng)).unwrap();
                CompactSet::ball(c, rng.random::<f64>()).unwrap()
            }
            _ => {
                let lo = Vector::new(coords(&mut rng)).unwrap();
                let extent: Vec<f64> = (0..dim).map(|_| rng.random::<f64>()).collect();
                let hi = Vector::new(
                    lo.coords().iter().zip(&extent).map(|(l, e)| l + e).collect(),
                )
                .unwrap();
                CompactSet::axis_box(lo, hi).unwrap()
            }
        }
    };

    let mut worst_gap: f64 = 0.0;
    for kind in 0..4 {
        for i in 0..100 {
            let dim = 1 + i % 3;
            let a = random_set(kind, dim);
            let b = random_set(kind, dim);
            let exact = hausdorff(&a, &b).unwrap();
            assert!(exact.exact);
            let sampled = hausdorff_sampled(&a, &b, 100_000, 9000 + i as u64).unwrap();
            assert!(
                sampled <= exact.value + 1e-12,
                "sampled {sampled} exceeds closed form {} for {a:?} vs {b:?}",
                exact.value
            );
            worst_gap = worst_gap.max(exact.value - sampled);
        }
    }

    let mut axioms_ok = true;
    for i in 0..100 {
        let kind = i % 4;
        let dim = 1 + i % 3;
        let a = random_set(kind, dim);
        let b = random_set(kind, dim);
        let c = random_set(kind, dim);
        let ab = hausdorff(&a, &b).unwrap().value;
        let ba = hausdorff(&b, &a).unwrap().value;
        let bc = hausdorff(&b, &c).unwrap().value;
        let ac = hausdorff(&a, &c).unwrap().value;
        axioms_ok &= (ab - ba).abs() <= 1e-9;
        axioms_ok &= hausdorff(&a, &a).unwrap().value == 0.0;
        axioms_ok &= ac <= ab + bc + 1e-9;
    }

    criterion(
        5,
        &format!(
            "sampled Hausdorff within {worst_gap:.2e} of closed forms (100 pairs/kind, n=1e5); \
             metric axioms hold on 100 random triples"
        ),
        worst_gap <= 2e-3 && axioms_ok,
    );
}

/// Four-point convexity identity with φ(t) = t² on random tuples.
#[test]
fn criterion_6_convexity_identity() {
    let mut all_ok = true;
    for dim in [1usize, 2, 3] {
        let (tuples, weights) = random_simplex_tuples(1_000, dim, 4242);
        let report = four_point_identity_check(&tuples, &weights, 1e-10).unwrap();
        all_ok &= report.passed;
    }
    criterion(6, "four-point identity holds to 1e-10 on 1000 random tuples in d ∈ {1,2,3}", all_ok);
}

/// The perturbed-recurrence oracle: settled tail for summable inputs,
/// rejection of the harmonic input.
#[test]
fn criterion_7_recurrence_limit_oracle() {
    let summable = SequenceTriple {
        a1: 1.0,
        delta: SeqRule::PowerDecay { scale: 1.0, shift: 0.0, power: 2.0 },
        b: SeqRule::PowerDecay { scale: 1.0, shift: 0.0, power: 2.0 },
    };
    let res = tan_xu_limit(&summable, 100_000, 1e-4).unwrap();

    let harmonic = SequenceTriple {
        a1: 1.0,
        delta: SeqRule::ZERO,
        b: SeqRule::PowerDecay { scale: 1.0, shift: 0.0, power: 1.0 },
    };
    let rejected = matches!(tan_xu_limit(&harmonic, 100_000, 1e-4), Err(Error::NotSummable { .. }));

    criterion(
        7,
        &format!(
            "recurrence with delta=b=1/n^2 settles (tail oscillation {:.2e} < 1e-4); \
             b=1/n rejected by the summability proxy",
            res.tail_oscillation
        ),
        res.report.passed && res.tail_oscillation < 1e-4 && rejected,
    );
}

/// Checker calibration: suzuki separates condition (C) from
/// nonexpansiveness; the expanding control fails (C); the Hausdorff bound
/// holds where condition (C) does.
#[test]
fn criterion_8_condition_checkers() {
    let suzuki = catalog::problem("suzuki", &[]).unwrap();
    let grid = uniform_grid_1d(0.0, 3.0, 3001).unwrap();
    let c = check_condition_c(&suzuki.maps[0], &grid, 1e-9).unwrap();
    let ne = check_nonexpansive(&suzuki.maps[0], &grid, 1e-9).unwrap();

    let expanding = catalog::problem("expanding", &[]).unwrap();
    let egrid = uniform_grid_1d(0.0, 1.0, 101).unwrap();
    let ec = check_condition_c(&expanding.maps[0], &egrid, 1e-9).unwrap();

    let half = catalog::problem("half_interval", &[]).unwrap();
    let pairs_of = |grid: &[Vector]| {
        let mut pairs = Vec::with_capacity(grid.len() * grid.len());
        for x in grid {
            for y in grid {
                pairs.push((x.clone(), y.clone()));
            }
        }
        pairs
    };
    let half_grid = uniform_grid_1d(0.0, 1.0, 101).unwrap();
    let suzuki_grid = uniform_grid_1d(0.0, 3.0, 101).unwrap();
    let l25_half = lemma25_check(&half.maps[0], &pairs_of(&half_grid), 1e-12).unwrap();
    let l25_suzuki = lemma25_check(&suzuki.maps[0], &pairs_of(&suzuki_grid), 1e-12).unwrap();

    criterion(
        8,
        &format!(
            "suzuki on 3001-pt grid: condition (C) {} / nonexpansive {}; expanding fails (C) \
             with {} violations; Hausdorff bound holds on half_interval and suzuki",
            c.passed,
            ne.passed,
            ec.violations.len()
        ),
        c.passed && !ne.passed && !ec.passed && l25_half.passed && l25_suzuki.passed,
    );
}

/// Byte-identical trace CSVs from repeated identical CLI invocations.
#[test]
fn criterion_9_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("exp.toml");
    let config = r#"
        [problem]
        catalog = "half_interval"
        x1 = [1.0]

        [schedule]
        builtin = "constant_decay"
        [schedule.errors]
        kind = "seeded_uniform"
        lower = [0.0]
        upper = [1.0]
        seed = 11

        [run]
        mode = "A"
        strategy = "seeded_random"
        seeds = [1, 2]
        max_iter = 2000
        residual_tol = 1e-7
    "#;
    std::fs::write(&config_path, config).unwrap();

    let run_into = |out: &std::path::Path| {
        let status = std::process::Command::new(env!("CARGO_BIN_EXE_tristep"))
            .args(["run", "--config"])
            .arg(&config_path)
            .arg("--out")
            .arg(out)
            .status()
            .unwrap();
        assert!(status.success(), "tristep run exited with {status}");
    };
    let out1 = dir.path().join("first");
    let out2 = dir.path().join("second");
    run_into(&out1);
    run_into(&out2);

    let mut identical = true;
    for seed in [1u64, 2] {
        let a = std::fs::read(out1.join(format!("trace_seed{seed}.csv"))).unwrap();
        let b = std::fs::read(out2.join(format!("trace_seed{seed}.csv"))).unwrap();
        identical &= a == b;
        identical &= !a.is_empty();
    }
    criterion(9, "repeated CLI runs with identical configs emit byte-identical trace CSVs", identical);
}

/// The Mann-degenerate schedule reproduces the classical Mann iterate on
/// T x = {x/2} step for step.
#[test]
fn criterion_10_mann_degenerate() {
    let problem = catalog::problem("halving", &[]).unwrap();
    let schedule = Schedule::builtin("mann", 1).unwrap();
    // Degenerate mode: permitted only under non-strict validation.
    assert!(schedule.validate(100, true).is_err());
    assert!(!schedule.validate(100, false).unwrap().strict_ok);

    let trace = engine::run(
        &problem,
        &scalar(1.0),
        &schedule,
        &settings(
            ProcessMode::A,
            StopRule { max_iter: 60, residual_tol: None, stagnation: None },
        ),
    )
    .unwrap();
    let alpha = 0.5;
    let mut expect = 1.0f64;
    let mut worst = 0.0f64;
    for rec in &trace.records {
        worst = worst.max((rec.x.coords()[0] - expect).abs());
        expect = (1.0 - alpha) * expect + alpha * (expect / 2.0);
    }
    criterion(
        10,
        &format!("Mann-degenerate run matches (1-α)x + αx/2 per step (max gap {worst:.1e})"),
        worst < 1e-15,
    );
}
