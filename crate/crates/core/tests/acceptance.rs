//! Acceptance gate. Each test prints one pass/fail line for its criterion
//! and asserts at the stated tolerance and time budget; run with
//! `cargo test --test acceptance -- --nocapture` to see the lines.

use std::f64::consts::{PI, SQRT_2, TAU};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use edr_core::circuit::{
    chain_distribution, marginal_joint, x_projective_povm, Basis, ChainConfig, MarginalPair,
    MeasurementStage,
};
use edr_core::edr::{
    direct_disturbance, direct_error, edr_report, min_disturbance_bound, three_state_disturbance,
    three_state_error, weak_probe_disturbance, weak_probe_error, BoundKind, EdrPoint, Method,
};
use edr_core::qcore::{apply_channel, commutator_bound, ops, std_dev, StateVector};
use edr_core::sweep::{run_sweep, ApparatusConfig, StatMode, StatisticsConfig, SweepConfig};

fn gate(criterion: &str, pass: bool, detail: &str) {
    let tag = if pass { "PASS" } else { "FAIL" };
    println!("criterion {criterion} {tag}: {detail}");
    assert!(pass, "criterion {criterion}: {detail}");
}

fn within_budget(start: Instant, budget: Duration) -> (bool, f64) {
    let elapsed = start.elapsed();
    (elapsed <= budget, elapsed.as_secs_f64())
}

fn grid21() -> Vec<f64> {
    (0..21).map(|i| f64::from(i) / 20.0).collect()
}

fn random_state(rng: &mut ChaCha12Rng) -> StateVector<f64> {
    let u: f64 = rng.random_range(-1.0..=1.0);
    let phi: f64 = rng.random_range(0.0..TAU);
    StateVector::bloch(u.acos(), phi)
}

#[test]
fn criterion_1_ideal_trade_off_curves() {
    let start = Instant::now();
    let mut rng = ChaCha12Rng::seed_from_u64(11);
    let mut max_dev = 0.0f64;
    for s in grid21() {
        let stage = MeasurementStage::from_strength(s, Basis::Z).unwrap();
        // s = cos 2theta, so the complementary coupling is sqrt(1 - s^2)
        let want_eps = (2.0 * (1.0 - s)).sqrt();
        let want_eta = (2.0 * (1.0 - (1.0 - s * s).sqrt())).sqrt();
        for _ in 0..100 {
            let psi = random_state(&mut rng);
            let eps = direct_error(&stage, &psi).unwrap();
            let eta = direct_disturbance(&stage, &psi).unwrap();
            max_dev = max_dev
                .max((eps - want_eps).abs())
                .max((eta - want_eta).abs());
        }
    }
    let (in_time, secs) = within_budget(start, Duration::from_secs(1));
    gate(
        "1 ideal trade-off curves",
        max_dev < 1e-10 && in_time,
        &format!("max closed-form deviation {max_dev:.2e} over 21 strengths x 100 states ({secs:.2}s, budget 1s)"),
    );
}

#[test]
fn criterion_2_strength_endpoints() {
    let mut rng = ChaCha12Rng::seed_from_u64(12);
    let mut max_dev = 0.0f64;
    for _ in 0..10 {
        let psi = random_state(&mut rng);
        let weak = MeasurementStage::from_strength(0.0, Basis::Z).unwrap();
        let strong = MeasurementStage::from_strength(1.0, Basis::Z).unwrap();
        max_dev = max_dev
            .max((direct_error(&weak, &psi).unwrap() - SQRT_2).abs())
            .max(direct_disturbance(&weak, &psi).unwrap().abs())
            .max(direct_error(&strong, &psi).unwrap().abs())
            .max((direct_disturbance(&strong, &psi).unwrap() - SQRT_2).abs());
    }
    gate(
        "2 strength endpoints",
        max_dev < 1e-10,
        &format!("(eps, eta) hits (sqrt2, 0) and (0, sqrt2) within {max_dev:.2e}"),
    );
}

#[test]
fn criterion_3_method_agreement() {
    let start = Instant::now();
    let psi = StateVector::y_plus();
    let post = x_projective_povm();
    let mut max_dev = 0.0f64;
    for s in grid21() {
        let ma = MeasurementStage::from_strength(s, Basis::Z).unwrap();
        let eps_direct = direct_error(&ma, &psi).unwrap();
        let eta_direct = direct_disturbance(&ma, &psi).unwrap();

        let eps_three = three_state_error(&ma, &psi).unwrap();
        let eta_three = three_state_disturbance(&ma, &post, &psi).unwrap();
        max_dev = max_dev
            .max((eps_three - eps_direct).abs())
            .max((eta_three - eta_direct).abs());

        for g in [0.05, 0.104, 0.3, 1.0] {
            let wp_z = MeasurementStage::from_strength(g, Basis::Z).unwrap();
            let wp_x = MeasurementStage::from_strength(g, Basis::X).unwrap();
            let error_chain = ChainConfig::new(psi.clone(), wp_z, ma.clone()).unwrap();
            let disturbance_chain = ChainConfig::new(psi.clone(), wp_x, ma.clone()).unwrap();
            let table_e = marginal_joint(
                &chain_distribution(&error_chain).unwrap(),
                MarginalPair::WpMa,
            );
            let table_d = marginal_joint(
                &chain_distribution(&disturbance_chain).unwrap(),
                MarginalPair::WpPost,
            );
            let eps_weak = weak_probe_error(&table_e, g).unwrap();
            let eta_weak = weak_probe_disturbance(&table_d, g).unwrap();
            max_dev = max_dev
                .max((eps_weak - eps_direct).abs())
                .max((eta_weak - eta_direct).abs());
        }
    }
    let (in_time, secs) = within_budget(start, Duration::from_secs(5));
    gate(
        "3 method agreement",
        max_dev < 1e-9 && in_time,
        &format!(
            "three-state and weak-probe match direct within {max_dev:.2e} ({secs:.2}s, budget 5s)"
        ),
    );
}

#[test]
fn criterion_4_post_probe_bound() {
    let g = 0.104f64;
    let wp = MeasurementStage::from_strength(g, Basis::Z).unwrap();
    let rho = apply_channel(wp.kraus(), &StateVector::y_plus().to_density()).unwrap();
    let c = commutator_bound(&ops::pauli_z::<f64>(), &ops::pauli_x::<f64>(), &rho).unwrap();
    let want = (1.0 - g * g).sqrt();
    let pass =
        (c - want).abs() < 1e-12 && (c - 0.995).abs() <= 5e-4 && format!("{c:.5}") == "0.99458";
    gate(
        "4 post-probe bound",
        pass,
        &format!(
            "bound entering the main apparatus is {c:.5} (|C - 0.995| = {:.1e})",
            (c - 0.995).abs()
        ),
    );
}

#[test]
fn criterion_5_relation_ordering_and_validity() {
    let start = Instant::now();

    // balanced strength: theta = pi/8 between the Z and X couplings
    let s = (PI / 4.0).cos();
    let psi = StateVector::y_plus();
    let ma = MeasurementStage::from_strength(s, Basis::Z).unwrap();
    let point = EdrPoint::new(
        s,
        direct_error(&ma, &psi).unwrap(),
        direct_disturbance(&ma, &psi).unwrap(),
        std_dev(&ops::pauli_z::<f64>(), &psi).unwrap(),
        std_dev(&ops::pauli_x::<f64>(), &psi).unwrap(),
        commutator_bound(&ops::pauli_z::<f64>(), &ops::pauli_x::<f64>(), &psi).unwrap(),
        Method::Direct,
    )
    .unwrap();
    let report = edr_report(point).unwrap();
    let e = (2.0 - SQRT_2).sqrt();
    let want_heisenberg = 2.0 - SQRT_2;
    let want_ozawa = e * e + 2.0 * e;
    let want_branciard = (2.0 * (2.0 - SQRT_2)).sqrt();
    let closed = (report.lhs_heisenberg - want_heisenberg).abs() < 1e-6
        && (report.lhs_ozawa - want_ozawa).abs() < 1e-6
        && (report.lhs_branciard - want_branciard).abs() < 1e-6;
    let ordered = report.lhs_heisenberg < report.point.c_bound
        && report.lhs_ozawa >= report.point.c_bound
        && report.lhs_branciard >= report.point.c_bound;

    let mut rng = ChaCha12Rng::seed_from_u64(15);
    let mut min_slack = f64::INFINITY;
    for _ in 0..10_000 {
        let psi = random_state(&mut rng);
        let s: f64 = rng.random_range(0.0..=1.0);
        let ma = MeasurementStage::from_strength(s, Basis::Z).unwrap();
        let c = commutator_bound(&ops::pauli_z::<f64>(), &ops::pauli_x::<f64>(), &psi).unwrap();
        let point = EdrPoint::new(
            s,
            direct_error(&ma, &psi).unwrap(),
            direct_disturbance(&ma, &psi).unwrap(),
            std_dev(&ops::pauli_z::<f64>(), &psi).unwrap(),
            std_dev(&ops::pauli_x::<f64>(), &psi).unwrap(),
            c,
            Method::Direct,
        )
        .unwrap();
        let report = edr_report(point).unwrap();
        min_slack = min_slack
            .min(report.lhs_ozawa - c)
            .min(report.lhs_branciard - c)
            .min(report.lhs_branciard_tight - c);
    }
    let never_violated = min_slack >= -1e-9;
    let (in_time, secs) = within_budget(start, Duration::from_secs(10));
    gate(
        "5 relation ordering and validity",
        closed && ordered && never_violated && in_time,
        &format!(
            "balanced point gives {:.5} < C while Ozawa {:.5} and Branciard {:.5} hold; min slack {min_slack:.2e} over 10000 random points ({secs:.2}s, budget 10s)",
            report.lhs_heisenberg, report.lhs_ozawa, report.lhs_branciard
        ),
    );
}

#[test]
fn criterion_6_tight_saturation() {
    let psi = StateVector::y_plus();
    let mut max_circle = 0.0f64;
    let mut max_tight = 0.0f64;
    for s in grid21() {
        let ma = MeasurementStage::from_strength(s, Basis::Z).unwrap();
        let point = EdrPoint::new(
            s,
            direct_error(&ma, &psi).unwrap(),
            direct_disturbance(&ma, &psi).unwrap(),
            1.0,
            1.0,
            1.0,
            Method::Direct,
        )
        .unwrap();
        let report = edr_report(point).unwrap();
        let circle = report.tilde_eps * report.tilde_eps + report.tilde_eta * report.tilde_eta;
        max_circle = max_circle.max((circle - 1.0).abs());
        max_tight = max_tight.max((report.lhs_branciard_tight - 1.0).abs());
    }
    gate(
        "6 tight saturation",
        max_circle < 1e-10 && max_tight < 1e-10,
        &format!("rescaled errors sit on the unit circle within {max_circle:.2e}, tight side equals 1 within {max_tight:.2e}"),
    );
}

#[test]
fn criterion_7_bound_plug_back() {
    // each grid spans the span where the inverted curve saturates its
    // relation: eta = C/eps only fits [0, 2] from 0.5 up, Ozawa and
    // Branciard reach eta = 0 at eps = C, the tight circle closes at sqrt2
    let ranges = [
        (BoundKind::Heisenberg, 0.5, 2.0),
        (BoundKind::Ozawa, 0.0, 1.0),
        (BoundKind::Branciard, 0.0, 1.0),
        (BoundKind::BranciardTight, 0.0, SQRT_2),
    ];
    let mut max_dev = 0.0f64;
    for (kind, lo, hi) in ranges {
        for i in 0..50 {
            let eps = lo + (hi - lo) * f64::from(i) / 49.0;
            let eta = min_disturbance_bound(kind, eps, 1.0, 1.0, 1.0).unwrap();
            let report =
                edr_report(EdrPoint::new(0.0, eps, eta, 1.0, 1.0, 1.0, Method::Direct).unwrap())
                    .unwrap();
            let lhs = match kind {
                BoundKind::Heisenberg => report.lhs_heisenberg,
                BoundKind::Ozawa => report.lhs_ozawa,
                BoundKind::Branciard => report.lhs_branciard,
                BoundKind::BranciardTight => report.lhs_branciard_tight,
            };
            max_dev = max_dev.max((lhs - 1.0).abs());
        }
    }
    gate(
        "7 bound plug-back",
        max_dev < 1e-8,
        &format!(
            "minimum-disturbance curves reproduce C = 1 within {max_dev:.2e} on 50-point grids"
        ),
    );
}

#[test]
fn criterion_8_counting_statistics() {
    let start = Instant::now();
    let cfg = SweepConfig {
        methods: vec![Method::WeakProbe],
        statistics: StatisticsConfig::monte_carlo(1_000_000, 10, 2),
        ..SweepConfig::default()
    };
    let rows = run_sweep(&cfg).unwrap();
    assert_eq!(rows.len(), 21);
    // worst point as a fraction of the 3 rms / sqrt(reps) tolerance; the
    // mean of a square-rooted estimate never lands exactly on the curve,
    // so nonzero spread and a sub-unit ratio are the realism gates
    let mut worst = 0.0f64;
    let mut min_rms = f64::INFINITY;
    for row in &rows {
        let analytic = (2.0 * (1.0 - row.strength)).sqrt();
        let rms = row.eps_err.unwrap();
        min_rms = min_rms.min(rms);
        worst = worst.max((row.eps - analytic).abs() / (3.0 * rms / 10f64.sqrt()));
    }
    let (in_time, secs) = within_budget(start, Duration::from_secs(60));
    gate(
        "8 counting statistics",
        min_rms > 0.0 && worst <= 1.0 && in_time,
        &format!("per-point error means stay within 3 rms/sqrt(10) of the ideal curve (worst ratio {worst:.2}, min rms {min_rms:.1e}) at 1e6 events x 10 repetitions ({secs:.2}s, budget 60s)"),
    );
}

#[test]
fn criterion_9_imperfect_optics() {
    let cfg = SweepConfig {
        apparatus: ApparatusConfig::spec_with_defaults(),
        ..SweepConfig::default()
    };
    assert_eq!(cfg.statistics.mode, StatMode::Exact);
    let rows = run_sweep(&cfg).unwrap();
    let eps_floor = rows
        .iter()
        .find(|r| r.method == Method::Direct && r.strength == 1.0)
        .unwrap()
        .eps;
    let eta_floor = rows
        .iter()
        .find(|r| r.method == Method::Direct && r.strength == 0.0)
        .unwrap()
        .eta;
    let all_hold = rows.iter().all(|r| r.ozawa_ok && r.branciard_ok);
    gate(
        "9 imperfect optics",
        eps_floor > 0.0 && eta_floor > 0.0 && all_hold,
        &format!("leaky splitters floor the curves at eps(1) = {eps_floor:.4}, eta(0) = {eta_floor:.4}; Ozawa and Branciard hold on all {} rows", rows.len()),
    );
}
