//! Seeded Monte Carlo simulation of joint measurements on the truncated
//! NOPA state, plus a local hidden-variable baseline.
//!
//! RNG contract: every stream is a `ChaCha8Rng` seeded from
//! `mix(seed, index)` (SplitMix64 finalizer over the pair). Shots are cut
//! into fixed-size batches, batch `i` drawing from stream `i`, and batch
//! histograms are merged by integer addition. Results therefore depend only
//! on `(plan, seed)`, not on the number of worker threads.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bell::{
    chsh_functional, nopa_bell, xor_functional, AngleSet, BellKind, BellReport, XorForm,
};
use crate::error::{Error, Result};
use crate::fock::{
    nopa_coefficients, schmidt_expectation, SchmidtState, TruncatedFockSpace, Truncation,
};
use crate::pseudospin::{SpinAxis, SpinFamily};

/// Shots per RNG stream.
pub const BATCH_SHOTS: u64 = 1 << 16;

/// Largest joint table (`4^d` entries) sampled directly; beyond it the
/// sampler collapses the state bit by bit for every shot.
pub const MAX_TABLE_ENTRIES: usize = 1 << 16;

const NEGATIVE_PROBABILITY_SLACK: f64 = 1e-12;
const COMPLETENESS_TOLERANCE: f64 = 1e-10;

/// SplitMix64 finalizer applied to `seed ^ golden * (index + 1)`.
pub fn mix_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix_seed(seed, index))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Measurement {
    /// `s_(theta,d)` on each side, outcomes `+-1`.
    Spin { d: usize },
    /// The commuting bits `k < bits` in the planar basis, outcomes the
    /// integers `N = sum 2^k B_k`.
    Number { bits: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementPlan {
    pub alpha: f64,
    pub beta: f64,
    pub measurement: Measurement,
    pub r: f64,
    pub space: TruncatedFockSpace,
    pub shots: u64,
    pub seed: u64,
}

impl MeasurementPlan {
    fn validate(&self) -> Result<()> {
        if self.shots == 0 {
            return Err(Error::InvalidParameter("shots must be >= 1".into()));
        }
        if !self.alpha.is_finite() || !self.beta.is_finite() {
            return Err(Error::InvalidParameter("angles must be finite".into()));
        }
        match self.measurement {
            Measurement::Spin { d } => {
                SpinFamily::new(d, self.space)?;
            }
            Measurement::Number { bits } => {
                let fits =
                    (1..=30).contains(&bits) && self.space.dim().is_multiple_of(1usize << bits);
                if !fits {
                    return Err(Error::DepthExceeded {
                        needed: bits,
                        dim: self.space.dim(),
                    });
                }
            }
        }
        Ok(())
    }

    fn state(&self) -> Result<SchmidtState> {
        nopa_coefficients(self.r, self.space, Truncation::Renormalized)
    }
}

/// Histogram of joint outcomes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleBatch {
    pub measurement: Measurement,
    /// Keyed by `(side A, side B)`: spins `+-1` or truncated numbers.
    pub counts: BTreeMap<(i64, i64), u64>,
    pub shots: u64,
    pub seed: u64,
}

impl SampleBatch {
    fn empty(measurement: Measurement, seed: u64) -> Self {
        Self {
            measurement,
            counts: BTreeMap::new(),
            shots: 0,
            seed,
        }
    }

    fn record(&mut self, outcome: (i64, i64), n: u64) {
        if n > 0 {
            *self.counts.entry(outcome).or_insert(0) += n;
            self.shots += n;
        }
    }

    fn merge(mut self, other: Self) -> Self {
        for (k, v) in other.counts {
            self.record(k, v);
        }
        self
    }

    /// Sample mean and standard error of the mean of `score(a, b)`.
    pub fn mean_and_stderr<F: Fn(i64, i64) -> f64>(&self, score: F) -> (f64, f64) {
        let n = self.shots as f64;
        let mean = self
            .counts
            .iter()
            .map(|(&(a, b), &c)| c as f64 * score(a, b))
            .sum::<f64>()
            / n;
        if self.shots < 2 {
            return (mean, f64::INFINITY);
        }
        let var = self
            .counts
            .iter()
            .map(|(&(a, b), &c)| c as f64 * (score(a, b) - mean).powi(2))
            .sum::<f64>()
            / (n - 1.0);
        (mean, (var / n).sqrt())
    }

    /// Empirical `E(S_A S_B)` for spin batches.
    pub fn spin_correlation(&self) -> (f64, f64) {
        self.mean_and_stderr(|a, b| (a * b) as f64)
    }
}

/// Joint outcome probabilities, `(outcome, p)`, summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityTable {
    pub entries: Vec<((i64, i64), f64)>,
}

impl ProbabilityTable {
    fn checked(entries: Vec<((i64, i64), f64)>) -> Result<Self> {
        let mut out = Vec::with_capacity(entries.len());
        for (k, p) in entries {
            if p < -NEGATIVE_PROBABILITY_SLACK || !p.is_finite() {
                return Err(Error::Consistency(format!(
                    "probability {p} for outcome {k:?}"
                )));
            }
            out.push((k, p.max(0.0)));
        }
        let total: f64 = out.iter().map(|(_, p)| p).sum();
        if (total - 1.0).abs() > COMPLETENESS_TOLERANCE {
            return Err(Error::Consistency(format!("probabilities sum to {total}")));
        }
        Ok(Self { entries: out })
    }

    pub fn total(&self) -> f64 {
        self.entries.iter().map(|(_, p)| p).sum()
    }

    pub fn get(&self, outcome: (i64, i64)) -> f64 {
        self.entries
            .iter()
            .find(|(k, _)| *k == outcome)
            .map(|(_, p)| *p)
            .unwrap_or(0.0)
    }

    /// Draws `shots` outcomes as a multinomial histogram, via successive
    /// conditional binomials.
    fn draw<R: Rng>(&self, shots: u64, rng: &mut R, into: &mut SampleBatch) {
        let mut remaining = shots;
        let mut mass = 1.0;
        for (i, &(outcome, p)) in self.entries.iter().enumerate() {
            if remaining == 0 {
                break;
            }
            let n = if i + 1 == self.entries.len() || p >= mass {
                remaining
            } else if p <= 0.0 {
                0
            } else {
                let q = (p / mass).clamp(0.0, 1.0);
                Binomial::new(remaining, q)
                    .expect("probability clamped to [0, 1]")
                    .sample(rng)
            };
            into.record(outcome, n);
            remaining -= n;
            mass -= p;
        }
    }
}

/// `p(a, b) = <(I + a s_alpha)/2 (x) (I + b s_beta)/2>`.
pub fn spin_probability_table(plan: &MeasurementPlan) -> Result<ProbabilityTable> {
    plan.validate()?;
    let Measurement::Spin { d } = plan.measurement else {
        return Err(Error::InvalidParameter(
            "spin table needs a spin measurement".into(),
        ));
    };
    let fam = SpinFamily::new(d, plan.space)?;
    let state = plan.state()?;
    let id = plan.space.identity();
    let sa = fam.build(SpinAxis::Theta(plan.alpha));
    let sb = fam.build(SpinAxis::Theta(plan.beta));
    let ea = schmidt_expectation(&state, &sa, &id)?.re;
    let eb = schmidt_expectation(&state, &id, &sb)?.re;
    let eab = schmidt_expectation(&state, &sa, &sb)?.re;
    let mut entries = Vec::with_capacity(4);
    for a in [1i64, -1] {
        for b in [1i64, -1] {
            let (af, bf) = (a as f64, b as f64);
            entries.push(((a, b), (1.0 + af * ea + bf * eb + af * bf * eab) / 4.0));
        }
    }
    ProbabilityTable::checked(entries)
}

/// Qubit amplitudes `<q|outcome bit>` of the `s_theta` eigenvectors:
/// row 0 is the `+1` eigenvector (bit 0), row 1 the `-1` eigenvector.
fn qubit_basis(theta: f64) -> [[f64; 2]; 2] {
    let (s, c) = (theta / 2.0).sin_cos();
    [[c, s], [-s, c]]
}

/// Applies `basis[outcome][q]` to qubit `k` of the row (or column) index of
/// a `dim x dim` row-major matrix.
fn transform_qubit(mat: &mut [f64], dim: usize, k: usize, basis: &[[f64; 2]; 2], rows: bool) {
    let stride = 1usize << k;
    for i in 0..dim {
        if i & stride != 0 {
            continue;
        }
        let j = i | stride;
        for other in 0..dim {
            let (p, q) = if rows {
                (i * dim + other, j * dim + other)
            } else {
                (other * dim + i, other * dim + j)
            };
            let (x0, x1) = (mat[p], mat[q]);
            mat[p] = basis[0][0] * x0 + basis[0][1] * x1;
            mat[q] = basis[1][0] * x0 + basis[1][1] * x1;
        }
    }
}

/// Exact joint distribution of `(N_A, N_B)` for a number measurement.
///
/// The measured bits only touch the low `bits` binary digits, so the state
/// splits into blocks `h` of `2^bits` levels; within a block the joint
/// amplitude of `(N, N')` is the two-sided qubit-basis transform of
/// `diag(c)`.
pub fn number_probability_table(plan: &MeasurementPlan) -> Result<ProbabilityTable> {
    plan.validate()?;
    let Measurement::Number { bits } = plan.measurement else {
        return Err(Error::InvalidParameter(
            "number table needs a number measurement".into(),
        ));
    };
    let dim = 1usize << bits;
    if dim * dim > MAX_TABLE_ENTRIES * 4 {
        return Err(Error::InvalidParameter(format!(
            "joint table for {bits} bits is too large"
        )));
    }
    let state = plan.state()?;
    let (ua, ub) = (qubit_basis(plan.alpha), qubit_basis(plan.beta));
    let c = state.coefficients();
    let mut probs = vec![0.0; dim * dim];
    let mut mat = vec![0.0; dim * dim];
    for block in c.chunks(dim) {
        if block.iter().all(|&x| x == 0.0) {
            continue;
        }
        mat.iter_mut().for_each(|x| *x = 0.0);
        for (l, &cl) in block.iter().enumerate() {
            mat[l * dim + l] = cl;
        }
        for k in 0..bits as usize {
            transform_qubit(&mut mat, dim, k, &ua, true);
            transform_qubit(&mut mat, dim, k, &ub, false);
        }
        for (p, a) in probs.iter_mut().zip(&mat) {
            *p += a * a;
        }
    }
    let entries = probs
        .into_iter()
        .enumerate()
        .map(|(i, p)| (((i / dim) as i64, (i % dim) as i64), p))
        .collect();
    ProbabilityTable::checked(entries)
}

/// Bipartite state restricted to the measured low bits: one `2^bits`-square
/// amplitude matrix per high-bit block.
#[derive(Debug, Clone)]
struct BlockState {
    dim: usize,
    blocks: Vec<Vec<f64>>,
}

impl BlockState {
    fn from_schmidt(state: &SchmidtState, bits: u32) -> Self {
        let dim = 1usize << bits;
        let blocks = state
            .coefficients()
            .chunks(dim)
            .filter(|b| b.iter().any(|&x| x != 0.0))
            .map(|b| {
                let mut m = vec![0.0; dim * dim];
                for (l, &cl) in b.iter().enumerate() {
                    m[l * dim + l] = cl;
                }
                m
            })
            .collect();
        Self { dim, blocks }
    }

    /// Projects qubit `k` of side A onto outcome `a` and of side B onto `b`.
    fn project(
        &self,
        k: usize,
        a: usize,
        b: usize,
        ua: &[[f64; 2]; 2],
        ub: &[[f64; 2]; 2],
    ) -> Self {
        let dim = self.dim;
        let stride = 1usize << k;
        let blocks = self
            .blocks
            .iter()
            .map(|m| {
                let mut out = vec![0.0; dim * dim];
                for i in 0..dim {
                    let qi = (i & stride != 0) as usize;
                    let i0 = i & !stride;
                    for j in 0..dim {
                        let qj = (j & stride != 0) as usize;
                        let j0 = j & !stride;
                        // <u_a|row qubit> <v_b|col qubit> folded back along u_a (x) v_b
                        let mut amp = 0.0;
                        for (x, ux) in ua[a].iter().enumerate() {
                            for (y, uy) in ub[b].iter().enumerate() {
                                let src = (i0 | (x * stride)) * dim + (j0 | (y * stride));
                                amp += ux * uy * m[src];
                            }
                        }
                        out[i * dim + j] = ua[a][qi] * ub[b][qj] * amp;
                    }
                }
                out
            })
            .collect();
        Self { dim, blocks }
    }

    fn norm_sqr(&self) -> f64 {
        self.blocks.iter().flatten().map(|x| x * x).sum()
    }
}

/// Outcome distribution induced by collapsing bit 0, then bit 1, and so on,
/// enumerated exactly over every branch. Intended for small `bits`.
pub fn sequential_collapse_distribution(plan: &MeasurementPlan) -> Result<ProbabilityTable> {
    plan.validate()?;
    let Measurement::Number { bits } = plan.measurement else {
        return Err(Error::InvalidParameter("needs a number measurement".into()));
    };
    let state = BlockState::from_schmidt(&plan.state()?, bits);
    let (ua, ub) = (qubit_basis(plan.alpha), qubit_basis(plan.beta));
    let mut frontier = vec![(0i64, 0i64, state)];
    for k in 0..bits as usize {
        let mut next = Vec::with_capacity(frontier.len() * 4);
        for (na, nb, st) in &frontier {
            for a in 0..2 {
                for b in 0..2 {
                    let p = st.project(k, a, b, &ua, &ub);
                    if p.norm_sqr() > 0.0 {
                        next.push((na | ((a as i64) << k), nb | ((b as i64) << k), p));
                    }
                }
            }
        }
        frontier = next;
    }
    let entries = frontier
        .into_iter()
        .map(|(na, nb, st)| ((na, nb), st.norm_sqr()))
        .collect();
    ProbabilityTable::checked(entries)
}

fn sequential_shot<R: Rng>(
    initial: &BlockState,
    bits: u32,
    ua: &[[f64; 2]; 2],
    ub: &[[f64; 2]; 2],
    rng: &mut R,
) -> (i64, i64) {
    let mut st = initial.clone();
    let mut norm = st.norm_sqr();
    let (mut na, mut nb) = (0i64, 0i64);
    for k in 0..bits as usize {
        let branches: Vec<_> = (0..4)
            .map(|o| st.project(k, o / 2, o % 2, ua, ub))
            .collect();
        let weights: Vec<f64> = branches.iter().map(BlockState::norm_sqr).collect();
        let mut u = rng.random::<f64>() * norm;
        let mut pick = 3;
        for (o, w) in weights.iter().enumerate() {
            if u < *w {
                pick = o;
                break;
            }
            u -= w;
        }
        na |= ((pick / 2) as i64) << k;
        nb |= ((pick % 2) as i64) << k;
        norm = weights[pick];
        st = branches.into_iter().nth(pick).expect("four branches");
    }
    (na, nb)
}

fn batched<F>(plan: &MeasurementPlan, f: F) -> SampleBatch
where
    F: Fn(u64, &mut ChaCha8Rng, &mut SampleBatch) + Sync,
{
    let n_batches = plan.shots.div_ceil(BATCH_SHOTS);
    (0..n_batches)
        .into_par_iter()
        .map(|i| {
            let shots = BATCH_SHOTS.min(plan.shots - i * BATCH_SHOTS);
            let mut rng = stream(plan.seed, i);
            let mut batch = SampleBatch::empty(plan.measurement, plan.seed);
            f(shots, &mut rng, &mut batch);
            batch
        })
        .reduce(
            || SampleBatch::empty(plan.measurement, plan.seed),
            SampleBatch::merge,
        )
}

/// Samples joint `+-1` outcomes of `s_(alpha,d) (x) s'_(beta,d)`.
pub fn sample_joint_spin(plan: &MeasurementPlan) -> Result<SampleBatch> {
    let table = spin_probability_table(plan)?;
    Ok(batched(plan, |shots, rng, batch| {
        table.draw(shots, rng, batch)
    }))
}

/// Samples joint truncated numbers `(N, N')` in the planar bases `alpha`
/// and `beta`.
pub fn sample_joint_number(plan: &MeasurementPlan) -> Result<SampleBatch> {
    plan.validate()?;
    let Measurement::Number { bits } = plan.measurement else {
        return Err(Error::InvalidParameter("needs a number measurement".into()));
    };
    let entries = 1usize << (2 * bits);
    if entries <= MAX_TABLE_ENTRIES {
        let table = number_probability_table(plan)?;
        Ok(batched(plan, |shots, rng, batch| {
            table.draw(shots, rng, batch)
        }))
    } else {
        sample_joint_number_sequential(plan)
    }
}

/// Per-shot sequential collapse, regardless of table size.
pub fn sample_joint_number_sequential(plan: &MeasurementPlan) -> Result<SampleBatch> {
    plan.validate()?;
    let Measurement::Number { bits } = plan.measurement else {
        return Err(Error::InvalidParameter("needs a number measurement".into()));
    };
    let initial = BlockState::from_schmidt(&plan.state()?, bits);
    let (ua, ub) = (qubit_basis(plan.alpha), qubit_basis(plan.beta));
    Ok(batched(plan, |shots, rng, batch| {
        for _ in 0..shots {
            let o = sequential_shot(&initial, bits, &ua, &ub, rng);
            batch.record(o, 1);
        }
    }))
}

/// Monte Carlo estimate of a Bell functional at the NOPA settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BellEstimate {
    pub gamma: f64,
    pub r: f64,
    pub shots: u64,
    pub seed: u64,
    /// Closed-form value at the same settings.
    pub analytic_lhs: f64,
    pub report: BellReport,
    /// Per setting pair `(mean, standard error)` in functional order.
    pub terms: Vec<(f64, f64)>,
}

impl BellEstimate {
    pub fn z_score(&self) -> f64 {
        let se = self.report.standard_error.unwrap_or(f64::NAN);
        (self.report.lhs_value - self.analytic_lhs) / se
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateRequest {
    pub gamma: f64,
    pub r: f64,
    pub space: TruncatedFockSpace,
    pub shots: u64,
    pub seed: u64,
    /// Warn when the achieved standard error exceeds this.
    pub target_standard_error: Option<f64>,
}

/// Runs the four setting pairs `(0|pi/2) x (gamma|-gamma)` on independent
/// streams and combines them into the tight functional.
pub fn estimate_bell(kind: &BellKind, req: &EstimateRequest) -> Result<BellEstimate> {
    kind.validate()?;
    let analytic_lhs = nopa_bell(kind, req.gamma, req.r)?.report.lhs_value;
    let settings = AngleSet::nopa(req.gamma);
    let weights = kind.bit_weights();
    let measurement = match kind {
        BellKind::Chsh { d } => Measurement::Spin { d: *d },
        BellKind::BitXor { k } => Measurement::Spin { d: 1usize << k },
        _ => Measurement::Number {
            bits: weights.as_ref().map(|w| w.len() as u32).unwrap_or(1),
        },
    };

    let mut terms = Vec::with_capacity(4);
    for (i, (alpha, beta)) in settings.pairs().into_iter().enumerate() {
        let plan = MeasurementPlan {
            alpha,
            beta,
            measurement,
            r: req.r,
            space: req.space,
            shots: req.shots,
            seed: mix_seed(req.seed, i as u64 + 0x5E77),
        };
        let term = match (kind, measurement) {
            (BellKind::Chsh { .. }, _) => sample_joint_spin(&plan)?.spin_correlation(),
            (BellKind::BitXor { .. }, _) => {
                sample_joint_spin(&plan)?.mean_and_stderr(|a, b| (1 - a * b) as f64 / 2.0)
            }
            (_, Measurement::Number { .. }) => {
                let w = weights.as_ref().expect("xor kinds carry weights");
                sample_joint_number(&plan)?.mean_and_stderr(|a, b| {
                    let x = (a ^ b) as u64;
                    w.iter()
                        .enumerate()
                        .map(|(k, wk)| if (x >> k) & 1 == 1 { *wk } else { 0.0 })
                        .sum()
                })
            }
            _ => unreachable!(),
        };
        terms.push(term);
    }

    let means = [terms[0].0, terms[1].0, terms[2].0, terms[3].0];
    let mut report = match kind {
        BellKind::Chsh { .. } => {
            let mut r = chsh_functional(means[0], means[1], means[2], means[3])?;
            r.kind = kind.clone();
            r
        }
        _ => xor_functional(kind, means, XorForm::Tight)?,
    };
    let se = terms.iter().map(|(_, s)| s * s).sum::<f64>().sqrt();
    report.standard_error = Some(se);
    if req.shots < 100 {
        report.warnings.push(format!(
            "only {} shots per setting; error estimate unreliable",
            req.shots
        ));
    }
    if let Some(target) = req.target_standard_error {
        if se > target {
            report.warnings.push(format!(
                "standard error {se:.3e} exceeds requested {target:.3e}; increase shots"
            ));
        }
    }
    Ok(BellEstimate {
        gamma: req.gamma,
        r: req.r,
        shots: req.shots,
        seed: req.seed,
        analytic_lhs,
        report,
        terms,
    })
}

/// Deterministic sign-of-cosine responses to a shared uniform angle.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LhvModel;

impl LhvModel {
    /// `sign(cos(theta - lambda))`, with `sign(0) = +1`.
    pub fn response(&self, theta: f64, lambda: f64) -> i64 {
        if (theta - lambda).cos() >= 0.0 {
            1
        } else {
            -1
        }
    }

    /// Exact correlation `1 - 2 dist(a, b) / pi`, `dist` the angular
    /// distance in `[0, pi]`.
    pub fn correlation(&self, a: f64, b: f64) -> f64 {
        let diff = (a - b).rem_euclid(2.0 * PI);
        let dist = diff.min(2.0 * PI - diff);
        1.0 - 2.0 * dist / PI
    }

    pub fn sample(&self, alpha: f64, beta: f64, shots: u64, seed: u64) -> SampleBatch {
        let plan = MeasurementPlan {
            alpha,
            beta,
            measurement: Measurement::Spin { d: 1 },
            r: 0.0,
            space: TruncatedFockSpace::new(1).expect("depth 1"),
            shots,
            seed,
        };
        batched(&plan, |n, rng, batch| {
            let mut plus = [[0u64; 2]; 2];
            for _ in 0..n {
                let lambda = rng.random::<f64>() * 2.0 * PI;
                let a = self.response(alpha, lambda);
                let b = self.response(beta, lambda);
                plus[(a < 0) as usize][(b < 0) as usize] += 1;
            }
            for (ia, a) in [1i64, -1].into_iter().enumerate() {
                for (ib, b) in [1i64, -1].into_iter().enumerate() {
                    batch.record((a, b), plus[ia][ib]);
                }
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LhvEstimate {
    pub angles: AngleSet,
    pub exact_lhs: f64,
    pub report: BellReport,
}

/// Empirical CHSH value of the sawtooth hidden-variable model.
pub fn lhv_estimate(angles: &AngleSet, shots: u64, seed: u64) -> Result<LhvEstimate> {
    angles.validate()?;
    if shots == 0 {
        return Err(Error::InvalidParameter("shots must be >= 1".into()));
    }
    let model = LhvModel;
    let mut means = [0.0; 4];
    let mut var = 0.0;
    let mut exact = [0.0; 4];
    for (i, (a, b)) in angles.pairs().into_iter().enumerate() {
        let batch = model.sample(a, b, shots, mix_seed(seed, i as u64 + 0x1A7));
        let (m, s) = batch.spin_correlation();
        means[i] = m;
        var += s * s;
        exact[i] = model.correlation(a, b);
    }
    let mut report = chsh_functional(means[0], means[1], means[2], means[3])?;
    report.standard_error = Some(var.sqrt());
    let exact_lhs = (exact[0] + exact[1]).abs() + (exact[2] - exact[3]).abs();
    Ok(LhvEstimate {
        angles: *angles,
        exact_lhs,
        report,
    })
}

/// Least-squares slope of `log10 rms_error` against `log10 shots` for the
/// empirical spin correlation, averaged over `replicates` seeds per size.
pub fn convergence_slope(
    r: f64,
    alpha: f64,
    beta: f64,
    shot_counts: &[u64],
    replicates: u64,
    seed: u64,
) -> Result<(f64, Vec<(u64, f64)>)> {
    let space = TruncatedFockSpace::auto_for_squeezing(r)?;
    let exact = crate::correlations::analytic_correlation(
        &crate::correlations::CorrelationQuery::new(alpha, beta, 1, r)?,
    );
    let mut points = Vec::with_capacity(shot_counts.len());
    for (si, &shots) in shot_counts.iter().enumerate() {
        let mut sq = 0.0;
        for rep in 0..replicates {
            let plan = MeasurementPlan {
                alpha,
                beta,
                measurement: Measurement::Spin { d: 1 },
                r,
                space,
                shots,
                seed: mix_seed(mix_seed(seed, si as u64), rep),
            };
            let (m, _) = sample_joint_spin(&plan)?.spin_correlation();
            sq += (m - exact).powi(2);
        }
        points.push((shots, (sq / replicates as f64).sqrt()));
    }
    let xs: Vec<f64> = points.iter().map(|(n, _)| (*n as f64).log10()).collect();
    let ys: Vec<f64> = points.iter().map(|(_, e)| e.log10()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    Ok((sxy / sxx, points))
}

/// Angles `(0, pi/2, pi/4, -pi/4)` where the sawtooth model saturates CHSH.
pub fn lhv_saturating_angles() -> AngleSet {
    AngleSet {
        alpha: 0.0,
        beta: FRAC_PI_2,
        gamma: FRAC_PI_2 / 2.0,
        delta: -FRAC_PI_2 / 2.0,
    }
}
