use nopa_bell::bell::{bit_bell_nopa, chsh_functional, nopa_bell, number_bell_nopa, AngleSet, BellKind};
use nopa_bell::bits::{bit_operator, BitIndex, NumberBasis};
use nopa_bell::correlations::{numeric_correlation, CorrelationQuery};
use nopa_bell::pseudospin::{build_spin, SpinAxis};
use nopa_bell::sampler::{
    number_probability_table, sample_joint_spin, spin_probability_table, LhvModel, Measurement,
    MeasurementPlan,
};
use nopa_bell::{StateVector, Truncation, TruncatedFockSpace};
use proptest::prelude::*;

fn axes(theta: f64) -> [SpinAxis; 4] {
    [SpinAxis::X, SpinAxis::Y, SpinAxis::Z, SpinAxis::Theta(theta)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn spins_hermitian_and_ladder_adjoint(theta in -7.0..7.0f64, depth in 1u32..=6, dk in 0u32..6) {
        prop_assume!(dk < depth);
        let s = TruncatedFockSpace::new(depth).unwrap();
        let d = 1usize << dk;
        for axis in axes(theta) {
            prop_assert!(build_spin(axis, d, s).unwrap().is_hermitian(0.0));
        }
        let plus = build_spin(SpinAxis::Plus, d, s).unwrap();
        let minus = build_spin(SpinAxis::Minus, d, s).unwrap();
        prop_assert_eq!(plus, minus.adjoint());
    }

    #[test]
    fn number_states_have_zero_x_mean(n in 0usize..32, k in 0u32..5) {
        let s = TruncatedFockSpace::new(5).unwrap();
        let sx = build_spin(SpinAxis::X, 1 << k, s).unwrap();
        let v = StateVector::basis(s, n).unwrap();
        prop_assert_eq!(v.expectation(&sx).unwrap().re, 0.0);
        let b = bit_operator(NumberBasis::X, BitIndex(k), s).unwrap();
        prop_assert_eq!(v.expectation(&b).unwrap().re, 0.5);
    }

    #[test]
    fn number_bell_is_weighted_bit_sum(gamma in -3.1..3.1f64, r in 0.0..4.0f64, d in 1u32..=5) {
        let total = number_bell_nopa(gamma, d, r).unwrap().report.lhs_value;
        let parts: f64 = (0..d)
            .map(|k| (1u64 << k) as f64 * bit_bell_nopa(gamma, k, r).unwrap().report.lhs_value)
            .sum();
        prop_assert!((total - parts).abs() <= 1e-12 * parts.max(1.0));
    }

    #[test]
    fn max_violation_monotone(r1 in 0.0..5.0f64, r2 in 0.0..5.0f64, d in 1u32..=4) {
        let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
        for kind in [BellKind::Chsh { d: d as usize }, BellKind::NumberXor { d }, BellKind::Hamming { d }] {
            let a = nopa_bell(&kind, 0.0, lo).unwrap().optimum.max_lhs;
            let b = nopa_bell(&kind, 0.0, hi).unwrap().optimum.max_lhs;
            prop_assert!(a <= b + 1e-12);
        }
    }

    #[test]
    fn correlation_symmetric_and_bilinear(a in -4.0..4.0f64, b in -4.0..4.0f64, r in 0.0..2.0f64, dk in 0u32..3) {
        let s = TruncatedFockSpace::new(5).unwrap();
        let d = 1usize << dk;
        let at = |x: f64, y: f64| numeric_correlation(
            &CorrelationQuery::new(x, y, d, r).unwrap(), s, Truncation::Renormalized,
        ).unwrap().numeric;
        let h = std::f64::consts::FRAC_PI_2;
        let predicted = a.cos() * b.cos() * at(0.0, 0.0) + a.cos() * b.sin() * at(0.0, h)
            + a.sin() * b.cos() * at(h, 0.0) + a.sin() * b.sin() * at(h, h);
        prop_assert!((at(a, b) - predicted).abs() <= 1e-9);
        prop_assert!((at(a, b) - at(b, a)).abs() <= 1e-12);
    }

    #[test]
    fn lhv_model_respects_chsh(a in -7.0..7.0f64, b in -7.0..7.0f64, g in -7.0..7.0f64, dl in -7.0..7.0f64) {
        let m = LhvModel;
        let rep = chsh_functional(m.correlation(a, g), m.correlation(a, dl), m.correlation(b, g), m.correlation(b, dl)).unwrap();
        prop_assert!(rep.lhs_value <= 2.0 + 1e-12);
        let angles = AngleSet { alpha: a, beta: b, gamma: g, delta: dl };
        prop_assert!(angles.validate().is_ok());
    }

    #[test]
    fn joint_tables_complete(alpha in -3.2..3.2f64, beta in -3.2..3.2f64, r in 0.0..3.0f64, bits in 1u32..=3) {
        let plan = |measurement| MeasurementPlan {
            alpha, beta, measurement, r,
            space: TruncatedFockSpace::new(4).unwrap(),
            shots: 1, seed: 0,
        };
        let n = number_probability_table(&plan(Measurement::Number { bits })).unwrap();
        prop_assert!((n.total() - 1.0).abs() <= 1e-10);
        let sp = spin_probability_table(&plan(Measurement::Spin { d: 1usize << (bits - 1) })).unwrap();
        prop_assert!((sp.total() - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn sampling_deterministic_per_seed(seed in any::<u64>(), shots in 1u64..200_000) {
        let plan = MeasurementPlan {
            alpha: 0.3, beta: -0.8, measurement: Measurement::Spin { d: 2 }, r: 0.7,
            space: TruncatedFockSpace::new(4).unwrap(), shots, seed,
        };
        let a = sample_joint_spin(&plan).unwrap();
        prop_assert_eq!(a.counts.values().sum::<u64>(), shots);
        prop_assert_eq!(a, sample_joint_spin(&plan).unwrap());
    }
}
