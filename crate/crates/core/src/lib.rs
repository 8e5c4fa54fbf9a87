//! Parity pseudospins on truncated Fock spaces, the qubits carried by the
//! binary digits of the photon number, and the Bell inequalities they give
//! for the two-mode squeezed vacuum.

pub mod bell;
pub mod bits;
pub mod cli;
pub mod correlations;
pub mod error;
pub mod fock;
pub mod operator;
pub mod pseudospin;
pub mod sampler;

pub use error::{Error, Result};
pub use fock::{
    apply, nopa_coefficients, schmidt_expectation, SchmidtState, StateVector, TruncatedFockSpace,
    Truncation,
};
pub use operator::{SparseOperator, C64};
