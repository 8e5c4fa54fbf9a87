//! Dense brute-force oracles, written from the defining formulas and
//! independent of the sparse implementation.
#![allow(dead_code)]

use nalgebra::DMatrix;
use nopa_bell::{SparseOperator, C64};

pub type Dense = DMatrix<C64>;

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn dense(op: &SparseOperator) -> Dense {
    let mut m = Dense::zeros(op.dim(), op.dim());
    for &(r, col, v) in op.entries() {
        m[(r, col)] = v;
    }
    m
}

pub fn max_abs(m: &Dense) -> f64 {
    m.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

/// Parity `(-1)^floor(n/d)` on the diagonal.
pub fn spin_z(d: usize, dim: usize) -> Dense {
    Dense::from_fn(dim, dim, |i, j| {
        if i == j {
            c(if (i / d).is_multiple_of(2) { 1.0 } else { -1.0 })
        } else {
            c(0.0)
        }
    })
}

/// `|2dn+k><2dn+k+d|` for every complete block.
pub fn spin_plus(d: usize, dim: usize) -> Dense {
    Dense::from_fn(dim, dim, |i, j| {
        let in_lower_half = (i % (2 * d)) < d;
        if in_lower_half && j == i + d && j < dim {
            c(1.0)
        } else {
            c(0.0)
        }
    })
}

pub fn spin_x(d: usize, dim: usize) -> Dense {
    let p = spin_plus(d, dim);
    &p + p.adjoint()
}

pub fn spin_y(d: usize, dim: usize) -> Dense {
    let p = spin_plus(d, dim);
    let m = p.adjoint();
    (&p - &m) * C64::new(0.0, -1.0)
}

pub fn spin_theta(theta: f64, d: usize, dim: usize) -> Dense {
    spin_z(d, dim) * c(theta.cos()) + spin_x(d, dim) * c(theta.sin())
}

pub fn identity(dim: usize) -> Dense {
    Dense::identity(dim, dim)
}

pub fn kron(a: &Dense, b: &Dense) -> Dense {
    a.kronecker(b)
}

/// `sum_n c_n |n>|n>` as a dense vector on the product space.
pub fn schmidt_vector(coeffs: &[f64]) -> nalgebra::DVector<C64> {
    let m = coeffs.len();
    let mut v = nalgebra::DVector::from_element(m * m, c(0.0));
    for (n, &cn) in coeffs.iter().enumerate() {
        v[n * m + n] = c(cn);
    }
    v
}

pub fn expectation(v: &nalgebra::DVector<C64>, op: &Dense) -> C64 {
    (v.adjoint() * op * v)[(0, 0)]
}

/// Sorted real eigenvalues of a Hermitian matrix.
pub fn hermitian_eigenvalues(m: &Dense) -> Vec<f64> {
    let eig = m.clone().symmetric_eigen();
    let mut ev: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

/// Geometric NOPA amplitudes `t^n / cosh r`, renormalized on `dim` levels.
pub fn nopa_reference(r: f64, dim: usize) -> Vec<f64> {
    let t = r.tanh();
    let raw: Vec<f64> = (0..dim).map(|n| t.powi(n as i32) / r.cosh()).collect();
    let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
    raw.into_iter().map(|x| x / norm).collect()
}
