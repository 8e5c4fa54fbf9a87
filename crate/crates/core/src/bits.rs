//! Bits of the number index as qubits.
//!
//! The level-`2^k` pseudospin reads bit `k` of `n`: `s_(z,2^k) = 1 - 2 b_k`.
//! Replacing `z` by `x`, `y` or a planar angle gives bit observables in other
//! bases, and summing `2^k b_k` gives (truncated) number operators.

use crate::error::{Error, Result};
use crate::fock::{StateVector, TruncatedFockSpace};
use crate::operator::{SparseOperator, C64};
use crate::pseudospin::{build_spin, SpinAxis};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NumberBasis {
    Z,
    X,
    Y,
    Theta(f64),
}

impl NumberBasis {
    fn spin_axis(self) -> SpinAxis {
        match self {
            NumberBasis::Z => SpinAxis::Z,
            NumberBasis::X => SpinAxis::X,
            NumberBasis::Y => SpinAxis::Y,
            NumberBasis::Theta(t) => SpinAxis::Theta(t),
        }
    }
}

/// Index `k` of a binary digit of the photon number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BitIndex(pub u32);

impl BitIndex {
    /// Pseudospin grouping `2^k` that reads this bit.
    pub fn grouping(self) -> usize {
        1usize << self.0
    }

    fn check(self, space: TruncatedFockSpace) -> Result<()> {
        let fits = 1usize
            .checked_shl(self.0 + 1)
            .is_some_and(|block| block <= space.dim() && space.dim().is_multiple_of(block));
        if !fits {
            return Err(Error::DepthExceeded {
                needed: self.0 + 1,
                dim: space.dim(),
            });
        }
        Ok(())
    }
}

#[inline]
pub fn popcount(x: u64) -> u32 {
    x.count_ones()
}

/// `(I - s_(basis, 2^k)) / 2`, a projector reading bit `k`.
pub fn bit_operator(
    basis: NumberBasis,
    k: BitIndex,
    space: TruncatedFockSpace,
) -> Result<SparseOperator> {
    k.check(space)?;
    let s = build_spin(basis.spin_axis(), k.grouping(), space)?;
    space
        .identity()
        .linear_combination(C64::new(0.5, 0.0), &s, C64::new(-0.5, 0.0))
}

/// `n_(basis, d) = sum_{k<d} 2^k b_k`, spectrum `{0, ..., 2^d - 1}`.
pub fn truncated_number_operator(
    basis: NumberBasis,
    bits: u32,
    space: TruncatedFockSpace,
) -> Result<SparseOperator> {
    if bits == 0 {
        return Err(Error::InvalidParameter("bit count must be >= 1".into()));
    }
    BitIndex(bits - 1).check(space)?;
    let mut acc = SparseOperator::zero(space.dim());
    for k in 0..bits {
        let b = bit_operator(basis, BitIndex(k), space)?;
        acc = acc.add(&b.scale_real((1u64 << k) as f64))?;
    }
    Ok(acc)
}

/// Basis of a simultaneous eigenvector of the level-`2^k` family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EigenBasis {
    X,
    Y,
}

/// Unnormalized `|m_x>` or `|m_y>` expanded in number states, with
/// `<0_z|m> = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenCoeffVector {
    pub m: u64,
    pub basis: EigenBasis,
    pub coefficients: Vec<C64>,
    pub space: TruncatedFockSpace,
}

impl EigenCoeffVector {
    /// Unit-norm truncated state with the same direction.
    pub fn normalized(&self) -> StateVector {
        let norm = (self.coefficients.len() as f64).sqrt();
        StateVector::new(
            self.space,
            self.coefficients.iter().map(|c| c / norm).collect(),
        )
        .expect("coefficient length matches space")
    }

    /// The raw coefficients as an (unnormalized) state vector.
    pub fn as_state(&self) -> StateVector {
        StateVector::new(self.space, self.coefficients.clone())
            .expect("coefficient length matches space")
    }
}

fn check_label(m: u64, space: TruncatedFockSpace) -> Result<()> {
    if !space.is_power_of_two() {
        return Err(Error::InvalidParameter(format!(
            "eigenvectors need a power-of-two dimension, got {}",
            space.dim()
        )));
    }
    if m >= space.dim() as u64 {
        return Err(Error::OutOfRange {
            index: m as usize,
            dim: space.dim(),
        });
    }
    Ok(())
}

fn sign(parity: u32) -> f64 {
    if parity.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// `|m_x> = sum_n (-1)^N(m & n) |n>`.
pub fn xbasis_eigenvector(m: u64, space: TruncatedFockSpace) -> Result<EigenCoeffVector> {
    check_label(m, space)?;
    let coefficients = (0..space.dim() as u64)
        .map(|n| C64::new(sign(popcount(m & n)), 0.0))
        .collect();
    Ok(EigenCoeffVector {
        m,
        basis: EigenBasis::X,
        coefficients,
        space,
    })
}

/// `|m_y> = sum_n (-1)^N(m & n) i^N(n) |n>`.
pub fn ybasis_eigenvector(m: u64, space: TruncatedFockSpace) -> Result<EigenCoeffVector> {
    check_label(m, space)?;
    const I_POWERS: [C64; 4] = [
        C64::new(1.0, 0.0),
        C64::new(0.0, 1.0),
        C64::new(-1.0, 0.0),
        C64::new(0.0, -1.0),
    ];
    let coefficients = (0..space.dim() as u64)
        .map(|n| I_POWERS[(popcount(n) % 4) as usize] * sign(popcount(m & n)))
        .collect();
    Ok(EigenCoeffVector {
        m,
        basis: EigenBasis::Y,
        coefficients,
        space,
    })
}

/// `a (+) b = a + b - 2ab`, operand order preserved.
pub fn quantum_xor(a: &SparseOperator, b: &SparseOperator) -> Result<SparseOperator> {
    let ab = a.matmul(b)?;
    a.add(b)?.sub(&ab.scale_real(2.0))
}

/// `(X + X^dagger) / 2`.
pub fn hermitian_part(op: &SparseOperator) -> SparseOperator {
    op.linear_combination(C64::new(0.5, 0.0), &op.adjoint(), C64::new(0.5, 0.0))
        .expect("same dimension")
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionReport {
    pub dim: usize,
    pub residual: f64,
}

impl DecompositionReport {
    pub fn passed(&self) -> bool {
        self.residual == 0.0
    }
}

/// Checks `N_2 (x) N'_2 = B0B0' + 4 B1B1' + 2 (B0B1' + B1B0')` on the
/// tensor product of two copies of `space`.
pub fn product_decomposition_check(space: TruncatedFockSpace) -> Result<DecompositionReport> {
    if space.dim() < 4 {
        return Err(Error::DepthExceeded {
            needed: 2,
            dim: space.dim(),
        });
    }
    let n2 = truncated_number_operator(NumberBasis::Z, 2, space)?;
    let b0 = bit_operator(NumberBasis::Z, BitIndex(0), space)?;
    let b1 = bit_operator(NumberBasis::Z, BitIndex(1), space)?;
    let lhs = n2.kron(&n2);
    let rhs = b0
        .kron(&b0)
        .add(&b1.kron(&b1).scale_real(4.0))?
        .add(&b0.kron(&b1).add(&b1.kron(&b0))?.scale_real(2.0))?;
    Ok(DecompositionReport {
        dim: lhs.dim(),
        residual: lhs.max_abs_diff(&rhs)?,
    })
}
