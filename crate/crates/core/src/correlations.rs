//! Two-mode squeezed state correlations of planar pseudospins.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fock::{self, nopa_coefficients, schmidt_expectation, TruncatedFockSpace, Truncation};
use crate::pseudospin::{SpinAxis, SpinFamily};

/// `K = tanh 2r`.
pub fn squeeze_k(r: f64) -> f64 {
    (2.0 * r).tanh()
}

/// `K_d = 2 tanh^d r / (1 + tanh^(2d) r)`.
///
/// Evaluated as `sech(d * |ln tanh r|)`, which is the same quantity written
/// in a form that keeps full precision when `tanh r` is close to one.
pub fn squeeze_kd(r: f64, d: usize) -> f64 {
    if r == 0.0 {
        return 0.0;
    }
    let y = -(d as f64) * fock::ln_tanh(r);
    1.0 / y.cosh()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationQuery {
    pub alpha: f64,
    pub beta: f64,
    pub d: usize,
    pub r: f64,
}

impl CorrelationQuery {
    pub fn new(alpha: f64, beta: f64, d: usize, r: f64) -> Result<Self> {
        if !alpha.is_finite() || !beta.is_finite() {
            return Err(Error::InvalidParameter("angles must be finite".into()));
        }
        if d == 0 {
            return Err(Error::InvalidParameter("grouping d must be >= 1".into()));
        }
        fock::check_squeezing(r)?;
        Ok(Self { alpha, beta, d, r })
    }
}

/// `<s_(alpha,d) s'_(beta,d)> = cos a cos b + K_d sin a sin b`.
pub fn analytic_correlation(q: &CorrelationQuery) -> f64 {
    q.alpha.cos() * q.beta.cos() + squeeze_kd(q.r, q.d) * q.alpha.sin() * q.beta.sin()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericCorrelation {
    pub numeric: f64,
    pub analytic: f64,
    pub abs_err: f64,
    pub tail_weight: f64,
}

impl NumericCorrelation {
    /// Envelope used to judge truncation error.
    pub fn error_bound(&self) -> f64 {
        10.0 * self.tail_weight
    }
}

/// Evaluates the correlation on the truncated state with sparse operators.
pub fn numeric_correlation(
    q: &CorrelationQuery,
    space: TruncatedFockSpace,
    mode: Truncation,
) -> Result<NumericCorrelation> {
    let fam = SpinFamily::new(q.d, space)?;
    let state = nopa_coefficients(q.r, space, mode)?;
    let a = fam.build(SpinAxis::Theta(q.alpha));
    let b = fam.build(SpinAxis::Theta(q.beta));
    let numeric = schmidt_expectation(&state, &a, &b)?.re;
    let analytic = analytic_correlation(q);
    Ok(NumericCorrelation {
        numeric,
        analytic,
        abs_err: (numeric - analytic).abs(),
        tail_weight: state.tail_weight(),
    })
}

/// Parallel sweep; output order matches input order.
pub fn numeric_correlation_sweep(
    queries: &[CorrelationQuery],
    space: TruncatedFockSpace,
    mode: Truncation,
) -> Result<Vec<NumericCorrelation>> {
    queries
        .par_iter()
        .map(|q| numeric_correlation(q, space, mode))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    // tanh(2) and 2t^2/(1+t^4) with t = tanh 1, 30-digit references
    const K1_R1: f64 = 0.964_027_580_075_816_9;
    const K2_R1: f64 = 0.868_022_658_343_622_1;

    #[test]
    fn k_values() {
        assert_eq!(squeeze_k(0.0), 0.0);
        assert!(squeeze_k(20.0) > 1.0 - 1e-12);
        assert!((squeeze_k(1.0) - K1_R1).abs() < 1e-15);
        assert!((squeeze_kd(1.0, 2) - K2_R1).abs() < 1e-14);
    }

    #[test]
    fn kd_reduces_to_k() {
        for i in 1..=200 {
            let r = i as f64 * 0.025;
            assert!((squeeze_kd(r, 1) - squeeze_k(r)).abs() < 1e-14, "r={r}");
        }
    }

    #[test]
    fn kd_direct_form() {
        for r in [0.05f64, 0.3, 1.0, 2.2] {
            let t = r.tanh();
            for d in 1..6 {
                let direct = 2.0 * t.powi(d as i32) / (1.0 + t.powi(2 * d as i32));
                assert!((squeeze_kd(r, d) - direct).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn kd_decreasing_in_d() {
        for &r in &[0.1, 0.7, 1.5, 3.0] {
            assert!(squeeze_kd(r, 4) < squeeze_kd(r, 2));
            assert!(squeeze_kd(r, 2) < squeeze_kd(r, 1));
        }
    }

    #[test]
    fn analytic_corners() {
        let q = CorrelationQuery::new(0.0, 0.0, 3, 0.7).unwrap();
        assert_eq!(analytic_correlation(&q), 1.0);
        let q = CorrelationQuery::new(FRAC_PI_2, FRAC_PI_2, 2, 1.0).unwrap();
        assert!((analytic_correlation(&q) - K2_R1).abs() < 1e-14);
        let q = CorrelationQuery::new(0.0, FRAC_PI_2, 1, 1.0).unwrap();
        assert!(analytic_correlation(&q).abs() < 1e-15);
        assert!(CorrelationQuery::new(f64::NAN, 0.0, 1, 1.0).is_err());
        assert!(CorrelationQuery::new(0.0, 0.0, 0, 1.0).is_err());
    }

    #[test]
    fn numeric_examples() {
        let s = TruncatedFockSpace::new(6).unwrap();
        let zz = numeric_correlation(
            &CorrelationQuery::new(0.0, 0.0, 1, 1.3).unwrap(),
            s,
            Truncation::Renormalized,
        )
        .unwrap();
        assert!((zz.numeric - 1.0).abs() < 1e-15);

        let xx = numeric_correlation(
            &CorrelationQuery::new(FRAC_PI_2, FRAC_PI_2, 1, 1.0).unwrap(),
            s,
            Truncation::Renormalized,
        )
        .unwrap();
        assert!((xx.numeric - K1_R1).abs() < 1e-6);

        let diag = numeric_correlation(
            &CorrelationQuery::new(FRAC_PI_4, FRAC_PI_4, 2, 1.0).unwrap(),
            s,
            Truncation::Renormalized,
        )
        .unwrap();
        assert!((diag.numeric - 0.934_011_329_171_811).abs() < 1e-6);
        assert!(numeric_correlation(
            &CorrelationQuery::new(0.0, 0.0, 3, 1.0).unwrap(),
            s,
            Truncation::Renormalized
        )
        .is_err());
    }

    #[test]
    fn raw_mode_reports_tail() {
        let s = TruncatedFockSpace::new(3).unwrap();
        let q = CorrelationQuery::new(FRAC_PI_2, FRAC_PI_2, 1, 1.0).unwrap();
        let raw = numeric_correlation(&q, s, Truncation::Raw).unwrap();
        assert!(raw.tail_weight > 0.01);
        assert!(raw.abs_err <= raw.error_bound());
        assert!(raw.abs_err > 1e-6);
    }

    #[test]
    fn sweep_preserves_order() {
        let s = TruncatedFockSpace::new(5).unwrap();
        let qs: Vec<_> = (0..20)
            .map(|i| CorrelationQuery::new(0.1 * i as f64, 0.3, 2, 0.2 + 0.05 * i as f64).unwrap())
            .collect();
        let swept = numeric_correlation_sweep(&qs, s, Truncation::Renormalized).unwrap();
        for (q, res) in qs.iter().zip(&swept) {
            assert_eq!(
                *res,
                numeric_correlation(q, s, Truncation::Renormalized).unwrap()
            );
        }
    }
}
