mod common;

use common::*;
use nopa_bell::bell::{optimal_gamma, AngleSet, BellKind};
use nopa_bell::sampler::{
    estimate_bell, lhv_estimate, lhv_saturating_angles, number_probability_table,
    sample_joint_number, sample_joint_spin, sequential_collapse_distribution,
    spin_probability_table, EstimateRequest, Measurement, MeasurementPlan,
};
use nopa_bell::TruncatedFockSpace;
use std::f64::consts::FRAC_PI_2;

// tanh 2 and arctan(tanh 2), 30-digit references
const K1: f64 = 0.964_027_580_075_816_9;
const COS_GAMMA_STAR: f64 = 0.719_937_147_768_361_3;

fn plan(
    alpha: f64,
    beta: f64,
    measurement: Measurement,
    r: f64,
    depth: u32,
    shots: u64,
    seed: u64,
) -> MeasurementPlan {
    MeasurementPlan {
        alpha,
        beta,
        measurement,
        r,
        space: TruncatedFockSpace::new(depth).unwrap(),
        shots,
        seed,
    }
}

/// Joint probability by dense projector products on the full tensor space.
fn dense_number_probability(p: &MeasurementPlan, na: usize, nb: usize, bits: u32) -> f64 {
    let dim = p.space.dim();
    let side = |theta: f64, n: usize| {
        let mut proj = identity(dim);
        for k in 0..bits {
            let sign = if (n >> k) & 1 == 0 { 1.0 } else { -1.0 };
            proj *= (identity(dim) + spin_theta(theta, 1 << k, dim) * c(sign)) * c(0.5);
        }
        proj
    };
    let v = schmidt_vector(&nopa_reference(p.r, dim));
    expectation(&v, &kron(&side(p.alpha, na), &side(p.beta, nb))).re
}

#[test]
fn sequential_collapse_matches_table_and_dense_oracle() {
    for (bits, depth) in [(1u32, 2u32), (2, 3), (3, 4), (2, 4)] {
        for (alpha, beta, r) in [(0.3, -1.1, 0.8), (0.0, FRAC_PI_2, 1.4), (2.0, 0.7, 0.2)] {
            let p = plan(alpha, beta, Measurement::Number { bits }, r, depth, 1, 0);
            let table = number_probability_table(&p).unwrap();
            let seq = sequential_collapse_distribution(&p).unwrap();
            assert!((table.total() - 1.0).abs() < 1e-10);
            let n = 1usize << bits;
            for na in 0..n {
                for nb in 0..n {
                    let oracle = dense_number_probability(&p, na, nb, bits);
                    let key = (na as i64, nb as i64);
                    assert!((table.get(key) - oracle).abs() < 1e-12, "table {key:?}");
                    assert!((seq.get(key) - oracle).abs() < 1e-12, "sequential {key:?}");
                }
            }
        }
    }
}

#[test]
fn spin_table_complete() {
    for r in [0.0, 0.5, 2.0] {
        for d in [1usize, 2, 4] {
            let t = spin_probability_table(&plan(0.4, -0.9, Measurement::Spin { d }, r, 5, 1, 0))
                .unwrap();
            assert!((t.total() - 1.0).abs() < 1e-10);
        }
    }
}

#[test]
fn deterministic_across_thread_counts() {
    let p = plan(
        0.2,
        1.0,
        Measurement::Number { bits: 3 },
        1.0,
        6,
        700_001,
        99,
    );
    let one = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let four = rayon::ThreadPoolBuilder::new()
        .num_threads(4)
        .build()
        .unwrap();
    let a = one.install(|| sample_joint_number(&p).unwrap());
    let b = four.install(|| sample_joint_number(&p).unwrap());
    assert_eq!(a, b);
    assert_eq!(a.shots, 700_001);
    let sp = plan(0.2, 1.0, Measurement::Spin { d: 1 }, 1.0, 6, 300_000, 5);
    assert_eq!(
        one.install(|| sample_joint_spin(&sp).unwrap()),
        four.install(|| sample_joint_spin(&sp).unwrap())
    );
}

#[test]
fn empirical_spin_correlation_at_gamma_star() {
    let gamma = K1.atan();
    let b = sample_joint_spin(&plan(
        0.0,
        gamma,
        Measurement::Spin { d: 1 },
        1.0,
        6,
        100_000,
        11,
    ))
    .unwrap();
    let (e, _) = b.spin_correlation();
    let sigma = ((1.0 - COS_GAMMA_STAR * COS_GAMMA_STAR) / 100_000.0).sqrt();
    assert!((e - COS_GAMMA_STAR).abs() <= 3.0 * sigma, "E={e}");
}

#[test]
fn empirical_number_xor() {
    let gamma = 0.9;
    let b = sample_joint_number(&plan(
        0.0,
        gamma,
        Measurement::Number { bits: 2 },
        1.0,
        6,
        200_000,
        4,
    ))
    .unwrap();
    let (mean, se) = b.mean_and_stderr(|a, b| (a ^ b) as f64);
    // per bit: E(B xor B') = (1 - cos gamma) / 2 at alpha = 0
    let expect = 3.0 * (1.0 - gamma.cos()) / 2.0;
    assert!((mean - expect).abs() <= 3.0 * se, "{mean} vs {expect}");
}

#[test]
fn estimates_match_closed_forms() {
    let space = TruncatedFockSpace::new(6).unwrap();
    let chsh = estimate_bell(
        &BellKind::Chsh { d: 1 },
        &EstimateRequest {
            gamma: optimal_gamma(1, 1.0).unwrap().gamma,
            r: 1.0,
            space,
            shots: 1_000_000,
            seed: 1,
            target_standard_error: Some(3e-3),
        },
    )
    .unwrap();
    let se = chsh.report.standard_error.unwrap();
    assert!(se < 3e-3 && se > 1e-3);
    assert!(chsh.z_score().abs() <= 3.0);
    assert!(chsh.report.warnings.is_empty());

    let kind = BellKind::NumberXor { d: 2 };
    let g = nopa_bell_opt(&kind);
    let num = estimate_bell(
        &kind,
        &EstimateRequest {
            gamma: g,
            r: 1.0,
            space,
            shots: 1_000_000,
            seed: 2,
            target_standard_error: None,
        },
    )
    .unwrap();
    assert!((num.analytic_lhs - 4.036_135_979_849_349).abs() < 1e-12);
    assert!(num.z_score().abs() <= 3.0, "z={}", num.z_score());
}

fn nopa_bell_opt(kind: &BellKind) -> f64 {
    nopa_bell::bell::nopa_bell(kind, 0.0, 1.0)
        .unwrap()
        .optimum
        .gamma
}

#[test]
fn no_violation_without_squeezing() {
    let space = TruncatedFockSpace::new(4).unwrap();
    for kind in [
        BellKind::Chsh { d: 1 },
        BellKind::BitXor { k: 1 },
        BellKind::NumberXor { d: 2 },
        BellKind::Hamming { d: 3 },
    ] {
        let est = estimate_bell(
            &kind,
            &EstimateRequest {
                gamma: 0.6,
                r: 0.0,
                space,
                shots: 50_000,
                seed: 3,
                target_standard_error: None,
            },
        )
        .unwrap();
        let se = est.report.standard_error.unwrap();
        assert!(
            est.report.violation <= 3.0 * se,
            "{kind:?}: {:?}",
            est.report
        );
    }
}

#[test]
fn lhv_examples() {
    let same = AngleSet {
        alpha: 0.5,
        beta: 0.5,
        gamma: 0.5,
        delta: 0.5,
    };
    let e = lhv_estimate(&same, 10_000, 1).unwrap();
    assert_eq!(e.report.lhs_value, 2.0);
    let sat = lhv_estimate(&lhv_saturating_angles(), 1_000_000, 2).unwrap();
    assert!((sat.exact_lhs - 2.0).abs() < 1e-12);
    let se = sat.report.standard_error.unwrap();
    assert!((sat.report.lhs_value - 2.0).abs() <= 3.0 * se);
}
