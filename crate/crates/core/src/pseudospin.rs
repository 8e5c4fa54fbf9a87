//! Parity pseudospin operators with d-by-d grouping of number states.
//!
//! For grouping `d`, number states are split into blocks of `d`; blocks with
//! even index carry parity `+1` and odd blocks `-1`. The raising operator
//! pairs state `2dn + k` with `2dn + k + d`. With `d = 1` this is the usual
//! parity spin, and the family `d = 2^k` forms a commuting hierarchy.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fock::TruncatedFockSpace;
use crate::operator::{SparseOperator, C64};

/// Residual above which an identity check is reported as failed.
pub const IDENTITY_TOLERANCE: f64 = 1e-12;

/// Number of equispaced angles in `[0, 2pi)` used for `s_theta^2 = I`.
pub const THETA_SAMPLES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpinAxis {
    Z,
    X,
    Y,
    Plus,
    Minus,
    /// `cos(theta) s_z + sin(theta) s_x`.
    Theta(f64),
}

impl SpinAxis {
    pub fn name(&self) -> String {
        match self {
            SpinAxis::Z => "z".into(),
            SpinAxis::X => "x".into(),
            SpinAxis::Y => "y".into(),
            SpinAxis::Plus => "+".into(),
            SpinAxis::Minus => "-".into(),
            SpinAxis::Theta(t) => format!("theta({t})"),
        }
    }
}

/// A grouping `d` validated against a space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpinFamily {
    grouping: usize,
    space: TruncatedFockSpace,
}

impl SpinFamily {
    pub fn new(grouping: usize, space: TruncatedFockSpace) -> Result<Self> {
        if !space.supports_grouping(grouping) {
            return Err(Error::TruncationIncompatible {
                d: grouping,
                dim: space.dim(),
            });
        }
        Ok(Self { grouping, space })
    }

    pub fn grouping(&self) -> usize {
        self.grouping
    }

    pub fn space(&self) -> TruncatedFockSpace {
        self.space
    }

    pub fn build(&self, axis: SpinAxis) -> SparseOperator {
        let d = self.grouping;
        let m = self.space.dim();
        let one = C64::new(1.0, 0.0);
        let plus_pairs = || {
            (0..m / (2 * d)).flat_map(move |block| {
                (0..d).map(move |k| (2 * d * block + k, 2 * d * block + k + d))
            })
        };
        let op = match axis {
            SpinAxis::Z => {
                return SparseOperator::diagonal(
                    (0..m)
                        .map(|n| if (n / d).is_multiple_of(2) { one } else { -one })
                        .collect(),
                )
            }
            SpinAxis::Plus => {
                SparseOperator::from_triplets(m, plus_pairs().map(|(lo, hi)| (lo, hi, one)))
            }
            SpinAxis::Minus => {
                SparseOperator::from_triplets(m, plus_pairs().map(|(lo, hi)| (hi, lo, one)))
            }
            SpinAxis::X => SparseOperator::from_triplets(
                m,
                plus_pairs().flat_map(|(lo, hi)| [(lo, hi, one), (hi, lo, one)]),
            ),
            SpinAxis::Y => {
                let i = C64::new(0.0, 1.0);
                SparseOperator::from_triplets(
                    m,
                    plus_pairs().flat_map(|(lo, hi)| [(lo, hi, -i), (hi, lo, i)]),
                )
            }
            SpinAxis::Theta(theta) => {
                let (s, c) = theta.sin_cos();
                let z = (0..m).map(|n| {
                    let sign = if (n / d).is_multiple_of(2) { 1.0 } else { -1.0 };
                    (n, n, C64::new(sign * c, 0.0))
                });
                let x = plus_pairs()
                    .flat_map(|(lo, hi)| [(lo, hi, C64::new(s, 0.0)), (hi, lo, C64::new(s, 0.0))]);
                SparseOperator::from_triplets(m, z.chain(x))
            }
        };
        // indices are generated in range, so construction cannot fail
        op.expect("pseudospin indices in range")
    }
}

/// Pseudospin operator along `axis` with grouping `d` on `space`.
pub fn build_spin(axis: SpinAxis, d: usize, space: TruncatedFockSpace) -> Result<SparseOperator> {
    if let SpinAxis::Theta(t) = axis {
        if !t.is_finite() {
            return Err(Error::InvalidParameter(format!("non-finite angle {t}")));
        }
    }
    Ok(SpinFamily::new(d, space)?.build(axis))
}

/// `AB - BA`.
pub fn commutator(a: &SparseOperator, b: &SparseOperator) -> Result<SparseOperator> {
    a.commutator(b)
}

/// One named identity check and its worst residual.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityCheck {
    pub name: String,
    pub residual: f64,
}

impl IdentityCheck {
    pub fn passed(&self) -> bool {
        self.residual <= IDENTITY_TOLERANCE
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct AlgebraReport {
    pub checks: Vec<IdentityCheck>,
    /// Number of operator pairs examined (hierarchy reports).
    pub pairs_checked: usize,
}

impl AlgebraReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(IdentityCheck::passed)
    }

    pub fn max_residual(&self) -> f64 {
        self.checks.iter().map(|c| c.residual).fold(0.0, f64::max)
    }

    fn push(&mut self, name: impl Into<String>, residual: f64) {
        self.checks.push(IdentityCheck {
            name: name.into(),
            residual,
        });
    }
}

/// Checks the spin-1/2 algebra of the grouping-`d` family on the truncated
/// space. Failures are reported through the residuals, not as errors.
pub fn verify_spin_algebra(d: usize, space: TruncatedFockSpace) -> Result<AlgebraReport> {
    let fam = SpinFamily::new(d, space)?;
    let id = space.identity();
    let z = fam.build(SpinAxis::Z);
    let x = fam.build(SpinAxis::X);
    let y = fam.build(SpinAxis::Y);
    let plus = fam.build(SpinAxis::Plus);
    let minus = fam.build(SpinAxis::Minus);

    let mut report = AlgebraReport::default();
    report.push(
        "[s_z, s_+] = 2 s_+",
        z.commutator(&plus)?.max_abs_diff(&plus.scale_real(2.0))?,
    );
    report.push(
        "[s_z, s_-] = -2 s_-",
        z.commutator(&minus)?
            .max_abs_diff(&minus.scale_real(-2.0))?,
    );
    report.push(
        "[s_+, s_-] = s_z",
        plus.commutator(&minus)?.max_abs_diff(&z)?,
    );
    report.push("s_+ = (s_-)^dagger", plus.max_abs_diff(&minus.adjoint())?);
    report.push("s_x^2 = I", x.matmul(&x)?.max_abs_diff(&id)?);
    report.push("s_y^2 = I", y.matmul(&y)?.max_abs_diff(&id)?);
    report.push("s_z^2 = I", z.matmul(&z)?.max_abs_diff(&id)?);
    let mut theta_worst: f64 = 0.0;
    for i in 0..THETA_SAMPLES {
        let theta = 2.0 * PI * i as f64 / THETA_SAMPLES as f64;
        let s = fam.build(SpinAxis::Theta(theta));
        theta_worst = theta_worst.max(s.matmul(&s)?.max_abs_diff(&id)?);
    }
    report.push("s_theta^2 = I", theta_worst);
    Ok(report)
}

/// Checks that the levels `d = 2^j` and `d = 2^k` (`j != k <= max_k`)
/// commute for every pair of axes in `{x, y, z}`.
pub fn verify_hierarchy(max_k: u32, space: TruncatedFockSpace) -> Result<AlgebraReport> {
    verify_hierarchy_axes(max_k, space, &[SpinAxis::X, SpinAxis::Y, SpinAxis::Z])
}

pub fn verify_hierarchy_axes(
    max_k: u32,
    space: TruncatedFockSpace,
    axes: &[SpinAxis],
) -> Result<AlgebraReport> {
    let top = 1usize
        .checked_shl(max_k + 1)
        .filter(|&t| t <= space.dim())
        .ok_or(Error::DepthExceeded {
            needed: max_k + 1,
            dim: space.dim(),
        })?;
    if !space.dim().is_multiple_of(top) {
        return Err(Error::TruncationIncompatible {
            d: top / 2,
            dim: space.dim(),
        });
    }
    let levels: Vec<Vec<(SpinAxis, SparseOperator)>> = (0..=max_k)
        .map(|k| {
            let fam = SpinFamily::new(1 << k, space)?;
            Ok(axes.iter().map(|&a| (a, fam.build(a))).collect())
        })
        .collect::<Result<_>>()?;

    let mut report = AlgebraReport::default();
    for j in 0..levels.len() {
        for k in j + 1..levels.len() {
            let mut worst: f64 = 0.0;
            for (_, a) in &levels[j] {
                for (_, b) in &levels[k] {
                    worst = worst.max(a.commutator(b)?.max_abs());
                    report.pairs_checked += 1;
                }
            }
            report.push(
                format!("[s_(.,{}), s_(.,{})] = 0", 1usize << j, 1usize << k),
                worst,
            );
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space(dim: usize) -> TruncatedFockSpace {
        TruncatedFockSpace::with_dimension(dim).unwrap()
    }

    fn real_diag(op: &SparseOperator) -> Vec<f64> {
        (0..op.dim()).map(|n| op.get(n, n).re).collect()
    }

    #[test]
    fn z_parity_d1() {
        let z = build_spin(SpinAxis::Z, 1, space(4)).unwrap();
        assert_eq!(real_diag(&z), vec![1.0, -1.0, 1.0, -1.0]);
        assert_eq!(z.nnz(), 4);
    }

    #[test]
    fn z_parity_d2() {
        let z = build_spin(SpinAxis::Z, 2, space(8)).unwrap();
        assert_eq!(
            real_diag(&z),
            vec![1.0, 1.0, -1.0, -1.0, 1.0, 1.0, -1.0, -1.0]
        );
    }

    #[test]
    fn plus_d2_entries() {
        let p = build_spin(SpinAxis::Plus, 2, space(8)).unwrap();
        let one = C64::new(1.0, 0.0);
        assert_eq!(
            p.entries(),
            &[(0, 2, one), (1, 3, one), (4, 6, one), (5, 7, one)]
        );
    }

    #[test]
    fn plus_d3_matches_written_out_form() {
        let p = build_spin(SpinAxis::Plus, 3, space(12)).unwrap();
        let pairs: Vec<_> = p.entries().iter().map(|&(r, c, _)| (r, c)).collect();
        assert_eq!(
            pairs,
            vec![(0, 3), (1, 4), (2, 5), (6, 9), (7, 10), (8, 11)]
        );
    }

    #[test]
    fn incompatible_grouping() {
        assert_eq!(
            build_spin(SpinAxis::X, 3, space(16)).unwrap_err(),
            Error::TruncationIncompatible { d: 3, dim: 16 }
        );
        assert!(build_spin(SpinAxis::Theta(f64::NAN), 1, space(4)).is_err());
    }

    #[test]
    fn commutator_z_plus_d1() {
        let s = space(16);
        let z = build_spin(SpinAxis::Z, 1, s).unwrap();
        let p = build_spin(SpinAxis::Plus, 1, s).unwrap();
        assert_eq!(commutator(&z, &p).unwrap(), p.scale_real(2.0));
    }

    #[test]
    fn z2_z3_commute_but_x2_x3_do_not() {
        let s = space(24);
        let z2 = build_spin(SpinAxis::Z, 2, s).unwrap();
        let z3 = build_spin(SpinAxis::Z, 3, s).unwrap();
        assert!(commutator(&z2, &z3).unwrap().is_zero());
        let x2 = build_spin(SpinAxis::X, 2, s).unwrap();
        let x3 = build_spin(SpinAxis::X, 3, s).unwrap();
        assert!(!commutator(&x2, &x3).unwrap().is_zero());
    }

    #[test]
    fn algebra_d1_exact() {
        let rep = verify_spin_algebra(1, space(16)).unwrap();
        assert!(rep.passed());
        // integer-valued identities are exact
        for c in rep.checks.iter().filter(|c| !c.name.contains("theta")) {
            assert_eq!(c.residual, 0.0, "{}", c.name);
        }
    }

    #[test]
    fn same_level_does_not_commute() {
        let s = space(16);
        let x = build_spin(SpinAxis::X, 2, s).unwrap();
        let z = build_spin(SpinAxis::Z, 2, s).unwrap();
        assert!(!commutator(&x, &z).unwrap().is_zero());
    }

    #[test]
    fn hierarchy_counts_and_depth() {
        let rep = verify_hierarchy(2, space(16)).unwrap();
        assert!(rep.passed());
        assert_eq!(rep.pairs_checked, 27);
        assert_eq!(rep.max_residual(), 0.0);
        assert!(verify_hierarchy(4, space(16)).is_err());
        let zonly = verify_hierarchy_axes(3, space(32), &[SpinAxis::Z]).unwrap();
        assert_eq!(zonly.max_residual(), 0.0);
    }

    #[test]
    fn hermiticity() {
        let s = space(16);
        for d in [1, 2, 4, 8] {
            for axis in [SpinAxis::X, SpinAxis::Y, SpinAxis::Z, SpinAxis::Theta(0.3)] {
                assert!(build_spin(axis, d, s).unwrap().is_hermitian(0.0));
            }
            let p = build_spin(SpinAxis::Plus, d, s).unwrap();
            let m = build_spin(SpinAxis::Minus, d, s).unwrap();
            assert_eq!(p, m.adjoint());
        }
    }
}
