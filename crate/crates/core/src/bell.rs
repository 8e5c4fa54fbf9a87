//! Bell functionals, their local-realist bounds and two-mode squeezed values.
//!
//! Every functional here has the shape
//! `|E(a,g) + E(a,d) - c| + |E(b,g) - E(b,d)| <= bound`. For CHSH `c = 0`
//! and the expectations are spin products; for the bitwise-XOR family the
//! expectations are weighted sums of per-bit XORs and `c = bound = sum w_k`.
//!
//! Quantum values use the settings `(alpha, beta) = (0, pi/2)` on one side
//! and `(gamma, delta) = (gamma, -gamma)` on the other, for which every
//! functional reduces to `A |cos gamma| + B |sin gamma|`.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::bits::{bit_operator, BitIndex, NumberBasis};
use crate::correlations::squeeze_kd;
use crate::error::{Error, Result};
use crate::fock::{check_squeezing, schmidt_expectation, SchmidtState};
use crate::pseudospin::{build_spin, SpinAxis};

/// Number of grid points used to cross-check closed-form optima.
pub const OPTIMUM_GRID_POINTS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BellKind {
    /// CHSH on the grouping-`d` pseudospins.
    Chsh { d: usize },
    /// Tight XOR form on a single bit `k`.
    BitXor { k: u32 },
    /// Tight XOR form on the number truncated to `d` bits, weights `2^k`.
    NumberXor { d: u32 },
    /// Tight XOR form on the Hamming weight of the XOR, weights `1`.
    Hamming { d: u32 },
    /// Tight XOR form with arbitrary nonnegative per-bit weights.
    Weighted { weights: Vec<f64> },
}

impl BellKind {
    pub fn validate(&self) -> Result<()> {
        match self {
            BellKind::Chsh { d } if *d == 0 => {
                Err(Error::InvalidParameter("grouping d must be >= 1".into()))
            }
            BellKind::NumberXor { d } | BellKind::Hamming { d } if *d == 0 => {
                Err(Error::InvalidParameter("bit count d must be >= 1".into()))
            }
            BellKind::NumberXor { d } if *d > 52 => Err(Error::InvalidParameter(
                "bit count d must be <= 52 for exact weights".into(),
            )),
            BellKind::Weighted { weights } => {
                if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
                    return Err(Error::InvalidParameter(
                        "weights must be finite and nonnegative".into(),
                    ));
                }
                if weights.iter().all(|w| *w == 0.0) {
                    return Err(Error::InvalidParameter("weights are all zero".into()));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Per-bit weights for the XOR family; `None` for CHSH.
    pub fn bit_weights(&self) -> Option<Vec<f64>> {
        match self {
            BellKind::Chsh { .. } => None,
            BellKind::BitXor { k } => {
                let mut w = vec![0.0; *k as usize + 1];
                w[*k as usize] = 1.0;
                Some(w)
            }
            BellKind::NumberXor { d } => Some((0..*d).map(|k| (1u64 << k) as f64).collect()),
            BellKind::Hamming { d } => Some(vec![1.0; *d as usize]),
            BellKind::Weighted { weights } => Some(weights.clone()),
        }
    }

    /// Local-realist bound of the tight form: 2 for CHSH, `sum w_k` otherwise.
    pub fn classical_bound(&self) -> f64 {
        match self.bit_weights() {
            None => 2.0,
            Some(w) => w.iter().sum(),
        }
    }

    pub fn label(&self) -> String {
        match self {
            BellKind::Chsh { d } => format!("chsh(d={d})"),
            BellKind::BitXor { k } => format!("bit-xor(k={k})"),
            BellKind::NumberXor { d } => format!("number-xor(d={d})"),
            BellKind::Hamming { d } => format!("hamming(d={d})"),
            BellKind::Weighted { weights } => format!("weighted({weights:?})"),
        }
    }

    /// `A |cos gamma| + B |sin gamma|` coefficients at squeezing `r`.
    pub fn nopa_profile(&self, r: f64) -> Result<NopaProfile> {
        self.validate()?;
        check_squeezing(r)?;
        Ok(match (self, self.bit_weights()) {
            (BellKind::Chsh { d }, _) => NopaProfile {
                cos_weight: 2.0,
                sin_weight: 2.0 * squeeze_kd(r, *d),
                bound: 2.0,
            },
            (_, Some(w)) => NopaProfile {
                cos_weight: w.iter().sum(),
                sin_weight: w
                    .iter()
                    .enumerate()
                    .map(|(k, wk)| {
                        if *wk == 0.0 {
                            0.0
                        } else {
                            wk * squeeze_kd(r, 1usize << k)
                        }
                    })
                    .sum(),
                bound: w.iter().sum(),
            },
            _ => unreachable!("xor kinds always carry weights"),
        })
    }
}

/// Which algebraic form of the XOR inequalities to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum XorForm {
    /// `|E + E - W| + |E - E| <= W`.
    #[default]
    Tight,
    /// `|E + E| + |E - E| <= 2W`.
    Familiar,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BellReport {
    pub kind: BellKind,
    pub lhs_value: f64,
    pub classical_bound: f64,
    pub violation: f64,
    pub standard_error: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl BellReport {
    fn new(kind: BellKind, lhs_value: f64, classical_bound: f64) -> Self {
        Self {
            kind,
            lhs_value,
            classical_bound,
            violation: lhs_value - classical_bound,
            standard_error: None,
            warnings: Vec::new(),
        }
    }

    pub fn violates(&self) -> bool {
        self.violation > 0.0
    }
}

/// Four measurement settings, two per side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngleSet {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
}

impl AngleSet {
    /// `(0, pi/2)` against `(gamma, -gamma)`.
    pub fn nopa(gamma: f64) -> Self {
        Self {
            alpha: 0.0,
            beta: FRAC_PI_2,
            gamma,
            delta: -gamma,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if [self.alpha, self.beta, self.gamma, self.delta]
            .iter()
            .all(|a| a.is_finite())
        {
            Ok(())
        } else {
            Err(Error::InvalidParameter("angles must be finite".into()))
        }
    }

    /// Setting pairs in functional order: (a,g), (a,d), (b,g), (b,d).
    pub fn pairs(&self) -> [(f64, f64); 4] {
        [
            (self.alpha, self.gamma),
            (self.alpha, self.delta),
            (self.beta, self.gamma),
            (self.beta, self.delta),
        ]
    }
}

const CORRELATION_SLACK: f64 = 1e-12;

/// `|E_ag + E_ad| + |E_bg - E_bd|`, bound 2.
pub fn chsh_functional(e_ag: f64, e_ad: f64, e_bg: f64, e_bd: f64) -> Result<BellReport> {
    for e in [e_ag, e_ad, e_bg, e_bd] {
        if e.is_nan() || e.abs() > 1.0 + CORRELATION_SLACK {
            return Err(Error::InvalidCorrelation(e));
        }
    }
    Ok(BellReport::new(
        BellKind::Chsh { d: 1 },
        (e_ag + e_ad).abs() + (e_bg - e_bd).abs(),
        2.0,
    ))
}

/// Combines four XOR expectations (functional order) into the chosen form.
pub fn xor_functional(kind: &BellKind, xors: [f64; 4], form: XorForm) -> Result<BellReport> {
    kind.validate()?;
    if matches!(kind, BellKind::Chsh { .. }) {
        return Err(Error::InvalidParameter(
            "xor_functional needs an XOR-family kind".into(),
        ));
    }
    let w = kind.classical_bound();
    for x in xors {
        if !(x >= -CORRELATION_SLACK && x <= w * (1.0 + CORRELATION_SLACK)) {
            return Err(Error::InvalidCorrelation(x));
        }
    }
    let [ag, ad, bg, bd] = xors;
    Ok(match form {
        XorForm::Tight => BellReport::new(kind.clone(), (ag + ad - w).abs() + (bg - bd).abs(), w),
        XorForm::Familiar => {
            BellReport::new(kind.clone(), (ag + ad).abs() + (bg - bd).abs(), 2.0 * w)
        }
    })
}

/// `A |cos gamma| + B |sin gamma|` with bound `bound`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NopaProfile {
    pub cos_weight: f64,
    pub sin_weight: f64,
    pub bound: f64,
}

impl NopaProfile {
    pub fn lhs(&self, gamma: f64) -> f64 {
        self.cos_weight * gamma.cos().abs() + self.sin_weight * gamma.sin().abs()
    }

    /// Closed-form maximum at `gamma = atan(B / A)`, value `sqrt(A^2 + B^2)`.
    pub fn optimum(&self) -> Optimum {
        let degenerate = self.sin_weight == 0.0;
        let gamma = if degenerate {
            0.0
        } else {
            self.sin_weight.atan2(self.cos_weight)
        };
        let max_lhs = self.cos_weight.hypot(self.sin_weight);
        let (grid_gamma, grid_max) =
            grid_search_max(|g| self.lhs(g), 0.0, FRAC_PI_2, OPTIMUM_GRID_POINTS);
        Optimum {
            gamma,
            max_lhs,
            degenerate,
            grid_gamma,
            grid_max,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Optimum {
    pub gamma: f64,
    pub max_lhs: f64,
    /// No squeezing: the functional is flat at its bound and `gamma = 0`.
    pub degenerate: bool,
    pub grid_gamma: f64,
    pub grid_max: f64,
}

impl Optimum {
    pub fn grid_discrepancy(&self) -> f64 {
        (self.max_lhs - self.grid_max).abs()
    }
}

/// Maximum of `f` on `n` equispaced points of `[lo, hi]` (inclusive).
pub fn grid_search_max<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, n: usize) -> (f64, f64) {
    let n = n.max(2);
    (0..n)
        .map(|i| {
            let x = lo + (hi - lo) * i as f64 / (n - 1) as f64;
            (x, f(x))
        })
        .fold((lo, f64::NEG_INFINITY), |best, cur| {
            if cur.1 > best.1 {
                cur
            } else {
                best
            }
        })
}

/// Closed-form quantum value at `gamma` plus the optimum over `gamma`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NopaEvaluation {
    pub gamma: f64,
    pub report: BellReport,
    pub profile: NopaProfile,
    pub optimum: Optimum,
}

pub fn nopa_bell(kind: &BellKind, gamma: f64, r: f64) -> Result<NopaEvaluation> {
    if !gamma.is_finite() {
        return Err(Error::InvalidParameter("gamma must be finite".into()));
    }
    let profile = kind.nopa_profile(r)?;
    Ok(NopaEvaluation {
        gamma,
        report: BellReport::new(kind.clone(), profile.lhs(gamma), profile.bound),
        profile,
        optimum: profile.optimum(),
    })
}

/// `2(|cos g| + K_d |sin g|)`, bound 2.
pub fn chsh_nopa(gamma: f64, d: usize, r: f64) -> Result<NopaEvaluation> {
    nopa_bell(&BellKind::Chsh { d }, gamma, r)
}

/// `|cos g| + K_(2^k) |sin g|`, bound 1.
pub fn bit_bell_nopa(gamma: f64, k: u32, r: f64) -> Result<NopaEvaluation> {
    nopa_bell(&BellKind::BitXor { k }, gamma, r)
}

/// `(2^d - 1)|cos g| + sum 2^k K_(2^k) |sin g|`, bound `2^d - 1`.
pub fn number_bell_nopa(gamma: f64, d: u32, r: f64) -> Result<NopaEvaluation> {
    nopa_bell(&BellKind::NumberXor { d }, gamma, r)
}

/// `d |cos g| + sum K_(2^k) |sin g|`, bound `d`.
pub fn hamming_bell_nopa(gamma: f64, d: u32, r: f64) -> Result<NopaEvaluation> {
    nopa_bell(&BellKind::Hamming { d }, gamma, r)
}

pub fn weighted_bell_nopa(weights: &[f64], gamma: f64, r: f64) -> Result<NopaEvaluation> {
    nopa_bell(
        &BellKind::Weighted {
            weights: weights.to_vec(),
        },
        gamma,
        r,
    )
}

/// Optimal CHSH angle for grouping `d`: `atan K_d`, value `2 sqrt(1 + K_d^2)`.
pub fn optimal_gamma(d: usize, r: f64) -> Result<Optimum> {
    Ok(BellKind::Chsh { d }.nopa_profile(r)?.optimum())
}

/// Evaluates a functional at the NOPA settings directly from sparse
/// operators on a truncated state, with no closed-form shortcuts.
///
/// XOR expectations use `<B (+) B'> = <B (x) I> + <I (x) B'> - 2 <B (x) B'>`.
pub fn numeric_nopa_bell(kind: &BellKind, gamma: f64, state: &SchmidtState) -> Result<BellReport> {
    kind.validate()?;
    let space = state.space();
    let settings = AngleSet::nopa(gamma);
    match kind.bit_weights() {
        None => {
            let BellKind::Chsh { d } = kind else {
                unreachable!()
            };
            let mut e = [0.0; 4];
            for (slot, (a, b)) in e.iter_mut().zip(settings.pairs()) {
                let sa = build_spin(SpinAxis::Theta(a), *d, space)?;
                let sb = build_spin(SpinAxis::Theta(b), *d, space)?;
                *slot = schmidt_expectation(state, &sa, &sb)?.re;
            }
            let mut report = chsh_functional(e[0], e[1], e[2], e[3])?;
            report.kind = kind.clone();
            Ok(report)
        }
        Some(weights) => {
            let id = space.identity();
            let mut x = [0.0; 4];
            for (slot, (a, b)) in x.iter_mut().zip(settings.pairs()) {
                for (k, &w) in weights.iter().enumerate() {
                    if w == 0.0 {
                        continue;
                    }
                    let bit = BitIndex(k as u32);
                    let ba = bit_operator(NumberBasis::Theta(a), bit, space)?;
                    let bb = bit_operator(NumberBasis::Theta(b), bit, space)?;
                    let xor = schmidt_expectation(state, &ba, &id)?
                        + schmidt_expectation(state, &id, &bb)?
                        - schmidt_expectation(state, &ba, &bb)? * 2.0;
                    *slot += w * xor.re;
                }
            }
            xor_functional(kind, x, XorForm::Tight)
        }
    }
}

/// Result of enumerating deterministic local strategies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalBoundReport {
    pub strategies: usize,
    pub max_bit_lhs: f64,
    pub max_chsh_lhs: f64,
    pub bit_tight: bool,
    pub chsh_tight: bool,
}

/// Enumerates every deterministic local assignment for one bit.
///
/// Each side fixes a bit value for each of the four setting labels
/// `(alpha, beta, gamma, delta)`, giving `2^4 * 2^4` strategies. A side's
/// answer depends only on its own setting, which is locality; the values are
/// fixed in advance, which is realism; bits are bounded, which is result
/// restriction. The functionals read only `A(alpha), A(beta), B(gamma),
/// B(delta)` from each strategy.
pub fn enumerate_local_strategies() -> LocalBoundReport {
    let mut max_bit: f64 = f64::NEG_INFINITY;
    let mut max_chsh: f64 = f64::NEG_INFINITY;
    let mut count = 0;
    for side_a in 0u32..16 {
        for side_b in 0u32..16 {
            count += 1;
            let bit = |table: u32, setting: u32| ((table >> setting) & 1) as f64;
            let (aa, ab) = (bit(side_a, 0), bit(side_a, 1));
            let (bg, bd) = (bit(side_b, 2), bit(side_b, 3));
            let xor = |x: f64, y: f64| x + y - 2.0 * x * y;
            let bit_lhs =
                (xor(aa, bg) + xor(aa, bd) - 1.0).abs() + (xor(ab, bg) - xor(ab, bd)).abs();
            let spin = |b: f64| 1.0 - 2.0 * b;
            let chsh = (spin(aa) * spin(bg) + spin(aa) * spin(bd)).abs()
                + (spin(ab) * spin(bg) - spin(ab) * spin(bd)).abs();
            max_bit = max_bit.max(bit_lhs);
            max_chsh = max_chsh.max(chsh);
        }
    }
    LocalBoundReport {
        strategies: count,
        max_bit_lhs: max_bit,
        max_chsh_lhs: max_chsh,
        bit_tight: max_bit == 1.0,
        chsh_tight: max_chsh == 2.0,
    }
}

/// `gamma` expressed as a multiple of pi.
pub fn in_units_of_pi(angle: f64) -> f64 {
    angle / PI
}
