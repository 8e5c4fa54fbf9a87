//! Truncated Fock space, state vectors and the two-mode squeezed (NOPA) state.

use crate::error::{Error, Result};
use crate::operator::{SparseOperator, C64};

/// Largest supported bit depth. 2^30 basis states is far beyond anything the
/// sparse routines are meant for, but it keeps `1 << depth` safely in range.
pub const MAX_BIT_DEPTH: u32 = 30;

/// Tail weight accepted by the automatic truncation selector.
pub const AUTO_TAIL_TOLERANCE: f64 = 1e-9;
pub const AUTO_MIN_DEPTH: u32 = 4;
pub const AUTO_MAX_DEPTH: u32 = 16;

/// The basis `{|0>, ..., |M-1>}`. Normally `M = 2^D`; other dimensions are
/// accepted for pseudospin groupings `d` with `2d | M` (e.g. `M = 12`, `d = 3`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TruncatedFockSpace {
    dim: usize,
}

impl TruncatedFockSpace {
    /// Space of `2^bit_depth` states.
    pub fn new(bit_depth: u32) -> Result<Self> {
        if bit_depth == 0 || bit_depth > MAX_BIT_DEPTH {
            return Err(Error::InvalidParameter(format!(
                "bit depth must be in 1..={MAX_BIT_DEPTH}, got {bit_depth}"
            )));
        }
        Ok(Self {
            dim: 1usize << bit_depth,
        })
    }

    /// Space of exactly `dim` states (any even `dim >= 2`).
    pub fn with_dimension(dim: usize) -> Result<Self> {
        if dim < 2 || !dim.is_multiple_of(2) || dim > 1usize << MAX_BIT_DEPTH {
            return Err(Error::InvalidParameter(format!(
                "truncation dimension must be even and in 2..=2^{MAX_BIT_DEPTH}, got {dim}"
            )));
        }
        Ok(Self { dim })
    }

    /// Smallest depth whose NOPA tail weight `tanh^(2M) r` is at most
    /// [`AUTO_TAIL_TOLERANCE`], clamped to `[AUTO_MIN_DEPTH, AUTO_MAX_DEPTH]`.
    pub fn auto_for_squeezing(r: f64) -> Result<Self> {
        check_squeezing(r)?;
        let ln_t = ln_tanh(r);
        let mut depth = AUTO_MIN_DEPTH;
        while depth < AUTO_MAX_DEPTH {
            let m = (1u64 << depth) as f64;
            if 2.0 * m * ln_t <= AUTO_TAIL_TOLERANCE.ln() {
                break;
            }
            depth += 1;
        }
        Self::new(depth)
    }

    /// Number of complete bits, `floor(log2 M)`; equals `D` when `M = 2^D`.
    pub fn bit_depth(&self) -> u32 {
        self.dim.ilog2()
    }

    pub fn is_power_of_two(&self) -> bool {
        self.dim.is_power_of_two()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Whether the pseudospin grouping `d` tiles the space exactly (`2d | M`).
    pub fn supports_grouping(&self, d: usize) -> bool {
        d >= 1 && self.dim.is_multiple_of(2 * d)
    }

    pub fn identity(&self) -> SparseOperator {
        SparseOperator::identity(self.dim())
    }
}

/// A pure state on a truncated space.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<C64>,
    space: TruncatedFockSpace,
}

impl StateVector {
    pub fn new(space: TruncatedFockSpace, amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() != space.dim() {
            return Err(Error::DimensionMismatch {
                left: space.dim(),
                right: amplitudes.len(),
            });
        }
        if amplitudes
            .iter()
            .any(|a| !(a.re.is_finite() && a.im.is_finite()))
        {
            return Err(Error::InvalidParameter("non-finite amplitude".into()));
        }
        Ok(Self { amplitudes, space })
    }

    /// Number state `|n>`.
    pub fn basis(space: TruncatedFockSpace, n: usize) -> Result<Self> {
        if n >= space.dim() {
            return Err(Error::OutOfRange {
                index: n,
                dim: space.dim(),
            });
        }
        let mut amplitudes = vec![C64::new(0.0, 0.0); space.dim()];
        amplitudes[n] = C64::new(1.0, 0.0);
        Ok(Self { amplitudes, space })
    }

    pub fn space(&self) -> TruncatedFockSpace {
        self.space
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm() - 1.0).abs() <= 1e-12
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::InvalidParameter(
                "cannot normalize zero vector".into(),
            ));
        }
        Ok(Self {
            amplitudes: self.amplitudes.iter().map(|a| a / n).collect(),
            space: self.space,
        })
    }

    pub fn is_zero(&self) -> bool {
        self.amplitudes.iter().all(|a| *a == C64::new(0.0, 0.0))
    }

    /// `alpha * self + beta * other`.
    pub fn combine(&self, alpha: C64, other: &Self, beta: C64) -> Result<Self> {
        if self.space != other.space {
            return Err(Error::DimensionMismatch {
                left: self.space.dim(),
                right: other.space.dim(),
            });
        }
        Ok(Self {
            amplitudes: self
                .amplitudes
                .iter()
                .zip(&other.amplitudes)
                .map(|(a, b)| alpha * a + beta * b)
                .collect(),
            space: self.space,
        })
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Result<C64> {
        if self.space != other.space {
            return Err(Error::DimensionMismatch {
                left: self.space.dim(),
                right: other.space.dim(),
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `<self| op |self>`.
    pub fn expectation(&self, op: &SparseOperator) -> Result<C64> {
        self.inner(&apply(op, self)?)
    }
}

/// Exact sparse matrix-vector product.
pub fn apply(op: &SparseOperator, v: &StateVector) -> Result<StateVector> {
    Ok(StateVector {
        amplitudes: op.apply_slice(&v.amplitudes)?,
        space: v.space,
    })
}

/// A bipartite state `sum_n c_n |n> (x) |n>` with real coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtState {
    coefficients: Vec<f64>,
    squeezing: f64,
    tail_weight: f64,
    normalized: bool,
    space: TruncatedFockSpace,
}

impl SchmidtState {
    /// Arbitrary Schmidt-diagonal state; coefficients must be nonnegative.
    pub fn from_coefficients(space: TruncatedFockSpace, coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.len() != space.dim() {
            return Err(Error::DimensionMismatch {
                left: space.dim(),
                right: coefficients.len(),
            });
        }
        if coefficients.iter().any(|c| !c.is_finite() || *c < 0.0) {
            return Err(Error::InvalidParameter(
                "Schmidt coefficients must be finite and nonnegative".into(),
            ));
        }
        let norm_sq: f64 = coefficients.iter().map(|c| c * c).sum();
        Ok(Self {
            coefficients,
            squeezing: 0.0,
            tail_weight: 0.0,
            normalized: (norm_sq - 1.0).abs() <= 1e-12,
            space,
        })
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn squeezing(&self) -> f64 {
        self.squeezing
    }

    /// Probability mass of the untruncated state above `|M-1>|M-1>`.
    pub fn tail_weight(&self) -> f64 {
        self.tail_weight
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn space(&self) -> TruncatedFockSpace {
        self.space
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coefficients.iter().map(|c| c * c).sum()
    }
}

/// Whether truncated NOPA coefficients are rescaled to unit norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Truncation {
    #[default]
    Renormalized,
    Raw,
}

pub(crate) fn check_squeezing(r: f64) -> Result<()> {
    if !r.is_finite() || r < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "squeezing must be finite and >= 0, got {r}"
        )));
    }
    Ok(())
}

/// `ln tanh r`, accurate for large `r` where `tanh r` rounds to 1.
pub(crate) fn ln_tanh(r: f64) -> f64 {
    if r == 0.0 {
        return f64::NEG_INFINITY;
    }
    let e = (-2.0 * r).exp();
    (-e).ln_1p() - e.ln_1p()
}

/// `ln cosh r` without overflow.
fn ln_cosh(r: f64) -> f64 {
    r + (-2.0 * r).exp().ln_1p() - std::f64::consts::LN_2
}

/// NOPA Schmidt coefficients `c_n = tanh^n(r) / cosh(r)` on `space`.
pub fn nopa_coefficients(
    r: f64,
    space: TruncatedFockSpace,
    mode: Truncation,
) -> Result<SchmidtState> {
    check_squeezing(r)?;
    let m = space.dim();
    let (coefficients, tail_weight) = if r == 0.0 {
        let mut c = vec![0.0; m];
        c[0] = 1.0;
        (c, 0.0)
    } else {
        let ln_t = ln_tanh(r);
        let ln_c0 = -ln_cosh(r);
        let c: Vec<f64> = (0..m).map(|n| (n as f64 * ln_t + ln_c0).exp()).collect();
        (c, (2.0 * m as f64 * ln_t).exp())
    };
    let mut state = SchmidtState {
        coefficients,
        squeezing: r,
        tail_weight,
        normalized: false,
        space,
    };
    match mode {
        Truncation::Renormalized => {
            let norm = state.norm_sqr().sqrt();
            state.coefficients.iter_mut().for_each(|c| *c /= norm);
            state.normalized = true;
        }
        Truncation::Raw => {
            state.normalized = tail_weight == 0.0;
        }
    }
    Ok(state)
}

/// `<psi| A (x) B |psi>` for `psi = sum_n c_n |n>|n>`, i.e.
/// `sum_{m,n} c_m c_n A_mn B_mn`, without forming the tensor product.
pub fn schmidt_expectation(
    state: &SchmidtState,
    a: &SparseOperator,
    b: &SparseOperator,
) -> Result<C64> {
    let dim = state.space.dim();
    for op in [a, b] {
        if op.dim() != dim {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: op.dim(),
            });
        }
    }
    let (small, large) = if a.nnz() <= b.nnz() { (a, b) } else { (b, a) };
    let c = &state.coefficients;
    let mut acc = C64::new(0.0, 0.0);
    for &(m, n, v) in small.entries() {
        let w = large.get(m, n);
        if w != C64::new(0.0, 0.0) {
            acc += v * w * (c[m] * c[n]);
        }
    }
    Ok(acc)
}
