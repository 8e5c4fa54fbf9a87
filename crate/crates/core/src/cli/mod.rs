//! Command-line front end for the `nopa-bell` binary.

mod output;
pub mod parse;

pub use output::{Cell, Format, Table};

use crate::bell::{enumerate_local_strategies, in_units_of_pi, nopa_bell, AngleSet, BellKind};
use crate::bits::{product_decomposition_check, xbasis_eigenvector, ybasis_eigenvector};
use crate::correlations::{numeric_correlation, CorrelationQuery};
use crate::error::{Error, Result};
use crate::fock::{apply, TruncatedFockSpace, Truncation};
use crate::pseudospin::{build_spin, verify_hierarchy, verify_spin_algebra, SpinAxis};
use crate::sampler::{
    estimate_bell, lhv_estimate, lhv_saturating_angles, mix_seed, EstimateRequest,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use parse::{parse_angle, parse_grid, parse_usize_list};
use rand::{Rng, SeedableRng};
use serde::Serialize;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

/// Environment variable capping the worker thread count (0 = automatic).
pub const THREADS_ENV: &str = "NOPA_BELL_THREADS";

#[derive(Debug, Parser, Serialize)]
#[command(
    name = "nopa-bell",
    version,
    about = "Pseudospin and number-bit Bell tests on the two-mode squeezed vacuum"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Check the operator identities; exits 0 iff every residual passes
    Verify(VerifyArgs),
    /// Analytic against truncated numeric pseudospin correlations
    Correlate(CorrelateArgs),
    /// CHSH with level-d pseudospins
    Chsh(ChshArgs),
    /// XOR inequality for bit k
    BitBell(BitArgs),
    /// XOR inequality for the d-bit number
    NumberBell(DigitsArgs),
    /// XOR inequality for the Hamming distance of d bits
    HammingBell(DigitsArgs),
    /// XOR inequality with arbitrary bit weights
    WeightedBell(WeightedArgs),
    /// Monte Carlo estimate of a Bell functional
    Sample(SampleArgs),
    /// Runs of the sawtooth hidden-variable model
    Lhv(LhvArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write to this file instead of stdout
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct VerifyArgs {
    /// log2 of the truncation dimension (0 = 4)
    #[arg(long = "D", default_value_t = 4)]
    pub depth: u32,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct CorrelateArgs {
    /// Squeezing grid: `a,b,c` or `lo:hi:n`
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    pub r: String,
    /// Comma list of groupings
    #[arg(long, default_value = "1")]
    pub d: String,
    #[arg(long, default_value = "pi/2", allow_hyphen_values = true)]
    pub alpha: String,
    #[arg(long, default_value = "pi/2", allow_hyphen_values = true)]
    pub beta: String,
    /// log2 truncation (0 = chosen from r)
    #[arg(long = "D", default_value_t = 0)]
    pub depth: u32,
    /// Keep the truncated state unnormalized
    #[arg(long)]
    pub raw: bool,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct ScanArgs {
    /// Squeezing grid: `a,b,c` or `lo:hi:n`
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    pub r: String,
    /// Setting grid for gamma; defaults to the optimum
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<String>,
    /// Evaluate at the optimal gamma
    #[arg(long, conflicts_with = "gamma")]
    pub optimal: bool,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct ChshArgs {
    #[arg(long, default_value_t = 1)]
    pub d: usize,
    #[command(flatten)]
    pub scan: ScanArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct BitArgs {
    #[arg(long, default_value_t = 0)]
    pub k: u32,
    #[command(flatten)]
    pub scan: ScanArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct DigitsArgs {
    #[arg(long, default_value_t = 2)]
    pub d: u32,
    #[command(flatten)]
    pub scan: ScanArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct WeightedArgs {
    /// Comma list of non-negative bit weights, least significant first
    #[arg(long)]
    pub weights: String,
    #[command(flatten)]
    pub scan: ScanArgs,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SampleKind {
    Chsh,
    BitBell,
    NumberBell,
    HammingBell,
    WeightedBell,
}

#[derive(Debug, Args, Serialize)]
pub struct SampleArgs {
    #[arg(long, value_enum, default_value_t = SampleKind::Chsh)]
    pub kind: SampleKind,
    /// Grouping (chsh) or bit count (number/hamming)
    #[arg(long)]
    pub d: Option<u32>,
    #[arg(long, default_value_t = 0)]
    pub k: u32,
    #[arg(long)]
    pub weights: Option<String>,
    #[arg(long, default_value_t = 100_000)]
    pub shots: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// log2 truncation (0 = chosen from r)
    #[arg(long = "D", default_value_t = 0)]
    pub depth: u32,
    /// Warn when the standard error exceeds this
    #[arg(long)]
    pub target_se: Option<f64>,
    #[command(flatten)]
    pub scan: ScanArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct LhvArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub delta: Option<String>,
    /// Draw this many uniformly random angle sets instead
    #[arg(long, conflicts_with_all = ["alpha", "beta", "gamma", "delta"])]
    pub random: Option<usize>,
    #[arg(long, default_value_t = 100_000)]
    pub shots: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[command(flatten)]
    pub out: OutputArgs,
}

/// Result of one subcommand: a table plus whether every check passed.
struct Report {
    table: Table,
    seed: Option<u64>,
    ok: bool,
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit status. Errors go to stderr as one JSON line.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return 0;
        }
        Err(e) => {
            let msg = e.kind().to_string();
            let detail = e.to_string();
            let first = detail
                .lines()
                .next()
                .unwrap_or(&msg)
                .trim_start_matches("error: ");
            report_error("usage", first);
            return 2;
        }
    };
    if let Err(e) = configure_threads() {
        report_error(e.code(), &e.to_string());
        return 2;
    }
    match run(&cli) {
        Ok(true) => 0,
        Ok(false) => {
            report_error("verification-failed", "one or more checks failed");
            1
        }
        Err(e) => {
            report_error(e.code(), &e.to_string());
            1
        }
    }
}

fn report_error(code: &str, message: &str) {
    let line = serde_json::json!({ "error": code, "message": message });
    eprintln!("{line}");
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().map_err(|_| {
        Error::InvalidParameter(format!("{THREADS_ENV} must be a non-negative integer"))
    })?;
    if n > 0 {
        // a pool may already exist when embedded; the cap is best effort then
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    Ok(())
}

/// Runs a parsed command and writes its output. Returns whether all checks
/// passed (always true except for `verify`).
pub fn run(cli: &Cli) -> Result<bool> {
    let (report, out) = match &cli.command {
        Command::Verify(a) => (verify(a)?, &a.out),
        Command::Correlate(a) => (correlate(a)?, &a.out),
        Command::Chsh(a) => (bell_scan(&BellKind::Chsh { d: a.d }, &a.scan)?, &a.scan.out),
        Command::BitBell(a) => (
            bell_scan(&BellKind::BitXor { k: a.k }, &a.scan)?,
            &a.scan.out,
        ),
        Command::NumberBell(a) => (
            bell_scan(&BellKind::NumberXor { d: a.d }, &a.scan)?,
            &a.scan.out,
        ),
        Command::HammingBell(a) => (
            bell_scan(&BellKind::Hamming { d: a.d }, &a.scan)?,
            &a.scan.out,
        ),
        Command::WeightedBell(a) => {
            let kind = BellKind::Weighted {
                weights: parse_weights(&a.weights)?,
            };
            (bell_scan(&kind, &a.scan)?, &a.scan.out)
        }
        Command::Sample(a) => (sample(a)?, &a.scan.out),
        Command::Lhv(a) => (lhv(a)?, &a.out),
    };
    let config =
        serde_json::to_value(&cli.command).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    emit(&report, out, config)?;
    Ok(report.ok)
}

fn emit(report: &Report, out: &OutputArgs, config: serde_json::Value) -> Result<()> {
    let io_err = |e: std::io::Error| Error::InvalidParameter(format!("cannot write output: {e}"));
    let mut sink: Box<dyn Write> = match &out.output {
        Some(path) => Box::new(std::io::BufWriter::new(
            std::fs::File::create(path).map_err(io_err)?,
        )),
        None => Box::new(std::io::stdout().lock()),
    };
    match out.format {
        Format::Csv => report
            .table
            .write_csv(&mut sink)
            .map_err(|e| Error::InvalidParameter(format!("cannot write output: {e}")))?,
        Format::Json => {
            let doc = report.table.to_json(report.seed, config);
            serde_json::to_writer_pretty(&mut sink, &doc)
                .map_err(|e| Error::InvalidParameter(format!("cannot write output: {e}")))?;
            writeln!(sink).map_err(io_err)?;
        }
    }
    sink.flush().map_err(io_err)
}

fn resolve_space(depth: u32, r: f64) -> Result<TruncatedFockSpace> {
    if depth == 0 {
        TruncatedFockSpace::auto_for_squeezing(r)
    } else {
        TruncatedFockSpace::new(depth)
    }
}

fn parse_weights(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|w| {
            w.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidParameter(format!("cannot parse weight '{w}'")))
        })
        .collect()
}

fn verify(a: &VerifyArgs) -> Result<Report> {
    let depth = if a.depth == 0 { 4 } else { a.depth };
    let space = TruncatedFockSpace::new(depth)?;
    let dim = space.dim();
    let mut table = Table::new(&["check", "residual", "passed"]);
    let mut ok = true;
    let mut row = |name: String, residual: f64, passed: bool| {
        ok &= passed;
        table.push(vec![name.into(), residual.into(), passed.into()]);
    };

    for d in (1..=dim / 2).filter(|d| dim % (2 * d) == 0) {
        let rep = verify_spin_algebra(d, space)?;
        row(
            format!("spin-algebra d={d}"),
            rep.max_residual(),
            rep.passed(),
        );
    }
    if depth >= 2 {
        let rep = verify_hierarchy(depth - 1, space)?;
        row(
            format!("hierarchy k<={} ({} pairs)", depth - 1, rep.pairs_checked),
            rep.max_residual(),
            rep.max_residual() == 0.0,
        );
        let dec = product_decomposition_check(space)?;
        row("product-decomposition".into(), dec.residual, dec.passed());
    }
    for (name, axis) in [("x", SpinAxis::X), ("y", SpinAxis::Y)] {
        let mut worst: f64 = 0.0;
        for k in 0..depth {
            let op = build_spin(axis, 1 << k, space)?;
            for m in 0..dim as u64 {
                let v = match axis {
                    SpinAxis::X => xbasis_eigenvector(m, space)?,
                    _ => ybasis_eigenvector(m, space)?,
                }
                .as_state();
                let sign = if (m >> k) & 1 == 0 { 1.0 } else { -1.0 };
                let image = apply(&op, &v)?;
                for (x, y) in image.amplitudes().iter().zip(v.amplitudes()) {
                    worst = worst.max((x - y * sign).norm());
                }
            }
        }
        row(format!("eigenvectors {name}"), worst, worst == 0.0);
    }
    let lb = enumerate_local_strategies();
    row(
        "local-bound bit".into(),
        lb.max_bit_lhs - 1.0,
        lb.max_bit_lhs <= 1.0 && lb.bit_tight,
    );
    row(
        "local-bound chsh".into(),
        lb.max_chsh_lhs - 2.0,
        lb.max_chsh_lhs <= 2.0 && lb.chsh_tight,
    );
    Ok(Report {
        table,
        seed: None,
        ok,
    })
}

fn correlate(a: &CorrelateArgs) -> Result<Report> {
    let rs = parse_grid(&a.r)?;
    let ds = parse_usize_list(&a.d)?;
    let alphas = parse_grid(&a.alpha)?;
    let betas = parse_grid(&a.beta)?;
    let mode = if a.raw {
        Truncation::Raw
    } else {
        Truncation::Renormalized
    };
    let mut table = Table::new(&[
        "r",
        "d",
        "alpha",
        "beta",
        "analytic",
        "numeric",
        "abs_err",
        "tail_weight",
    ]);
    for &r in &rs {
        let space = resolve_space(a.depth, r)?;
        for &d in &ds {
            for &alpha in &alphas {
                for &beta in &betas {
                    let q = CorrelationQuery::new(alpha, beta, d, r)?;
                    let n = numeric_correlation(&q, space, mode)?;
                    table.push(vec![
                        r.into(),
                        (d as i64).into(),
                        alpha.into(),
                        beta.into(),
                        n.analytic.into(),
                        n.numeric.into(),
                        n.abs_err.into(),
                        n.tail_weight.into(),
                    ]);
                }
            }
        }
    }
    Ok(Report {
        table,
        seed: None,
        ok: true,
    })
}

const BELL_COLUMNS: [&str; 9] = [
    "r",
    "kind",
    "gamma",
    "lhs",
    "bound",
    "violation",
    "gamma_opt",
    "gamma_opt_over_pi",
    "max_lhs",
];

fn round6(v: f64) -> f64 {
    (v * 1e6).round() / 1e6
}

/// `(r, gamma)` pairs of a scan; gamma falls back to the optimum.
fn scan_points(kind: &BellKind, scan: &ScanArgs) -> Result<Vec<(f64, f64)>> {
    let rs = parse_grid(&scan.r)?;
    let gammas = match (&scan.gamma, scan.optimal) {
        (Some(g), false) => Some(parse_grid(g)?),
        _ => None,
    };
    let mut points = Vec::new();
    for r in rs {
        match &gammas {
            Some(gs) => points.extend(gs.iter().map(|&g| (r, g))),
            None => points.push((r, nopa_bell(kind, 0.0, r)?.optimum.gamma)),
        }
    }
    Ok(points)
}

fn bell_cells(kind: &BellKind, r: f64, gamma: f64) -> Result<Vec<Cell>> {
    let ev = nopa_bell(kind, gamma, r)?;
    Ok(vec![
        r.into(),
        kind.label().into(),
        gamma.into(),
        ev.report.lhs_value.into(),
        ev.report.classical_bound.into(),
        ev.report.violation.into(),
        ev.optimum.gamma.into(),
        round6(in_units_of_pi(ev.optimum.gamma)).into(),
        ev.optimum.max_lhs.into(),
    ])
}

fn bell_scan(kind: &BellKind, scan: &ScanArgs) -> Result<Report> {
    kind.validate()?;
    let mut table = Table::new(&BELL_COLUMNS);
    for (r, gamma) in scan_points(kind, scan)? {
        table.push(bell_cells(kind, r, gamma)?);
    }
    Ok(Report {
        table,
        seed: None,
        ok: true,
    })
}

fn sample(a: &SampleArgs) -> Result<Report> {
    let kind = match a.kind {
        SampleKind::Chsh => BellKind::Chsh {
            d: a.d.unwrap_or(1) as usize,
        },
        SampleKind::BitBell => BellKind::BitXor { k: a.k },
        SampleKind::NumberBell => BellKind::NumberXor {
            d: a.d.unwrap_or(2),
        },
        SampleKind::HammingBell => BellKind::Hamming {
            d: a.d.unwrap_or(2),
        },
        SampleKind::WeightedBell => BellKind::Weighted {
            weights: parse_weights(a.weights.as_deref().ok_or_else(|| {
                Error::InvalidParameter("weighted-bell sampling needs --weights".into())
            })?)?,
        },
    };
    kind.validate()?;
    let mut columns = BELL_COLUMNS.to_vec();
    columns.extend(["empirical_lhs", "std_err", "z_score", "shots"]);
    let mut table = Table::new(&columns);
    for (i, (r, gamma)) in scan_points(&kind, &a.scan)?.into_iter().enumerate() {
        let req = EstimateRequest {
            gamma,
            r,
            space: resolve_space(a.depth, r)?,
            shots: a.shots,
            seed: mix_seed(a.seed, i as u64),
            target_standard_error: a.target_se,
        };
        let est = estimate_bell(&kind, &req)?;
        for w in &est.report.warnings {
            eprintln!(
                "{}",
                serde_json::json!({ "warning": w, "r": r, "gamma": gamma })
            );
        }
        let mut row = bell_cells(&kind, r, gamma)?;
        row.extend([
            est.report.lhs_value.into(),
            est.report.standard_error.unwrap_or(f64::NAN).into(),
            est.z_score().into(),
            (a.shots as i64).into(),
        ]);
        table.push(row);
    }
    Ok(Report {
        table,
        seed: Some(a.seed),
        ok: true,
    })
}

fn lhv(a: &LhvArgs) -> Result<Report> {
    let sets: Vec<AngleSet> = match a.random {
        Some(n) => {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(mix_seed(a.seed, u64::MAX));
            let pi = std::f64::consts::PI;
            (0..n)
                .map(|_| AngleSet {
                    alpha: rng.random_range(-pi..pi),
                    beta: rng.random_range(-pi..pi),
                    gamma: rng.random_range(-pi..pi),
                    delta: rng.random_range(-pi..pi),
                })
                .collect()
        }
        None => {
            let base = lhv_saturating_angles();
            let pick =
                |s: &Option<String>, default: f64| s.as_deref().map_or(Ok(default), parse_angle);
            vec![AngleSet {
                alpha: pick(&a.alpha, base.alpha)?,
                beta: pick(&a.beta, base.beta)?,
                gamma: pick(&a.gamma, base.gamma)?,
                delta: pick(&a.delta, base.delta)?,
            }]
        }
    };
    let mut table = Table::new(&[
        "alpha",
        "beta",
        "gamma",
        "delta",
        "exact_lhs",
        "empirical_lhs",
        "bound",
        "std_err",
        "shots",
    ]);
    for (i, s) in sets.iter().enumerate() {
        let est = lhv_estimate(s, a.shots, mix_seed(a.seed, i as u64))?;
        table.push(vec![
            s.alpha.into(),
            s.beta.into(),
            s.gamma.into(),
            s.delta.into(),
            est.exact_lhs.into(),
            est.report.lhs_value.into(),
            est.report.classical_bound.into(),
            est.report.standard_error.unwrap_or(f64::NAN).into(),
            (a.shots as i64).into(),
        ]);
    }
    Ok(Report {
        table,
        seed: Some(a.seed),
        ok: true,
    })
}
