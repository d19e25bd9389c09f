//! `facecert` command-line front end.
//!
//! Every command produces a list of flat rows. CSV and JSON carry the same
//! field names; JSON is an array of objects. Exit codes: 0 success, 1 input
//! error, 2 a checked inequality failed.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::bounds::{bound_thm1, bound_thm2, bound_thm3, thm1_assembly, thm2_assembly, thm3_assembly};
use crate::cutgeom::{cut_matrix, lower_triangle_embed, CutVector, SymmetricMatrix};
use crate::error::Error;
use crate::lpcert::{certify_simplicial, check_general_position};
use crate::maxcut::{
    best_cut_value, bm_elliptope_solve, brute_force_maxcut, check_approx_sandwich, laplacian, BmOptions, Graph,
};
use crate::moments::{exact_second_moment_y, exact_second_moment_z, is_identity, rational_from_f64};
use crate::randmodel::{estimate_face_probability, EstimateConfig, DEFAULT_SEED};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "facecert", version, about = "Simplicial faces of the elliptope from random cut matrices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output file; standard output when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Certify the family of cut vectors in a file (one ±1 row per vector).
    Certify {
        #[arg(long)]
        cuts: PathBuf,
    },
    /// Monte Carlo estimate of the certification probability, next to the
    /// three closed-form lower bounds.
    Estimate {
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        #[arg(long, default_value_t = 3)]
        r: usize,
        #[arg(long, default_value_t = 200)]
        n: usize,
        #[arg(long, default_value_t = 2000)]
        trials: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 0.95)]
        confidence: f64,
        /// Worker threads; all cores when omitted. Results do not depend on it.
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Sweep the closed-form bounds over a grid (comma-separated lists).
    Bounds {
        #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9])]
        p: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_values_t = [2u64, 3, 4, 6, 8, 10])]
        r: Vec<u64>,
        #[arg(long, value_delimiter = ',', default_values_t = [10u64, 100, 1_000, 10_000, 100_000, 1_000_000])]
        n: Vec<u64>,
    },
    /// Exact second-moment oracle at one (p, r).
    Oracle {
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        #[arg(long, default_value_t = 3)]
        r: usize,
    },
    /// MaxCut of an edge-list graph against the elliptope relaxation.
    Maxcut {
        #[arg(long)]
        edges: PathBuf,
        /// Number of hyperplane rounding samples.
        #[arg(long, default_value_t = 100)]
        trials: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Point data for the 3 × 3 elliptope: cut vertices and boundary cloud.
    FigElliptope {
        /// Grid points per axis for the boundary cloud.
        #[arg(long, default_value_t = 41)]
        grid: usize,
    },
}

/// Failure of a CLI run, mapped onto the process exit code.
#[derive(Debug)]
pub enum CliError {
    Input(String),
    Check(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Check(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Check(m) => write!(f, "check failed: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Invariant(m) => CliError::Check(m),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

#[derive(Debug, Serialize)]
pub struct CertifyRow {
    pub r: usize,
    pub n: usize,
    pub w_full_rank: bool,
    pub z_full_rank: bool,
    pub y_full_rank: bool,
    pub general_position: Option<bool>,
    pub verdict: String,
    pub face_dimension: Option<usize>,
}

#[derive(Debug, Serialize)]
pub struct EstimateRow {
    pub p: f64,
    pub r: usize,
    pub n: usize,
    pub trials: u64,
    pub seed: u64,
    pub confidence: f64,
    pub certified: u64,
    pub point_estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub thm1: Option<f64>,
    pub thm2: Option<f64>,
    pub thm3: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct BoundsRow {
    pub p: f64,
    pub r: u64,
    pub n: u64,
    pub thm1: Option<f64>,
    pub thm2: f64,
    pub thm3: f64,
    pub thm1_assembly_holds: bool,
    pub thm2_assembly_holds: bool,
    pub thm3_assembly_holds: bool,
}

#[derive(Debug, Serialize)]
pub struct OracleRow {
    pub p: f64,
    pub r: usize,
    pub alpha: f64,
    pub lambda_min_mr: f64,
    pub lambda_min_sigma: f64,
    pub lambda_min_sigma_check: f64,
    pub claimed_floor: f64,
    pub floor_gap: f64,
    pub restriction_exact: bool,
    pub z_moment_identity: bool,
}

#[derive(Debug, Serialize)]
pub struct MaxcutRow {
    pub n: usize,
    pub m: usize,
    pub maxcut: u64,
    pub maxcut_cut: String,
    pub bm_value: f64,
    pub bm_rank: usize,
    pub rounded_best: u64,
    pub rounded_cut: String,
    pub guarantee: f64,
    pub ratio: Option<f64>,
    pub sandwich_holds: bool,
}

#[derive(Debug, Serialize)]
pub struct FigRow {
    pub kind: &'static str,
    pub x21: f64,
    pub x31: f64,
    pub x32: f64,
}

fn open(path: &Path) -> Result<BufReader<File>, CliError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// One cut vector per line; entries `+1`/`1`/`+` or `-1`/`-`, separated by
/// whitespace or commas. Blank lines and `#` comments are skipped.
pub fn read_cuts(reader: impl BufRead) -> Result<Vec<CutVector>, CliError> {
    let mut cuts = Vec::new();
    for (k, line) in reader.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let entries = t
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|tok| match tok {
                "+1" | "1" | "+" => Ok(1),
                "-1" | "-" => Ok(-1),
                other => Err(CliError::Input(format!("line {}: {other:?} is not a sign", k + 1))),
            })
            .collect::<Result<Vec<i8>, _>>()?;
        cuts.push(CutVector::new(entries)?);
    }
    Ok(cuts)
}

fn write_rows<T: Serialize>(rows: &[T], format: OutputFormat, out: &mut dyn Write) -> Result<(), CliError> {
    match format {
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for row in rows {
                w.serialize(row).map_err(|e| CliError::Input(e.to_string()))?;
            }
            w.flush()?;
        }
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut *out, rows).map_err(|e| CliError::Input(e.to_string()))?;
            writeln!(out)?;
        }
    }
    Ok(())
}

fn emit<T: Serialize>(cli: &Cli, rows: &[T]) -> Result<(), CliError> {
    match &cli.out {
        Some(path) => {
            let mut f = File::create(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            write_rows(rows, cli.format, &mut f)
        }
        None => write_rows(rows, cli.format, &mut io::stdout().lock()),
    }
}

fn optional(v: crate::Result<f64>) -> Option<f64> {
    v.ok()
}

pub fn certify_rows(cuts: &[CutVector]) -> Result<Vec<CertifyRow>, CliError> {
    let cert = certify_simplicial(cuts)?;
    let general_position = if cuts.len() <= 30 { Some(check_general_position(cuts)?) } else { None };
    Ok(vec![CertifyRow {
        r: cuts.len(),
        n: cuts[0].len(),
        w_full_rank: cert.w_full_rank,
        z_full_rank: cert.z_full_rank,
        y_full_rank: cert.y_full_rank,
        general_position,
        verdict: cert.verdict.to_string(),
        face_dimension: cert.face_dimension,
    }])
}

pub fn estimate_rows(cfg: &EstimateConfig, workers: Option<usize>) -> Result<Vec<EstimateRow>, CliError> {
    let est = estimate_face_probability(cfg, workers)?;
    let (r, n) = (cfg.r as u64, cfg.n as u64);
    Ok(vec![EstimateRow {
        p: cfg.p,
        r: cfg.r,
        n: cfg.n,
        trials: est.trials,
        seed: cfg.seed,
        confidence: est.confidence,
        certified: est.certified,
        point_estimate: est.point_estimate,
        ci_low: est.ci_low,
        ci_high: est.ci_high,
        thm1: if cfg.p == 0.5 { optional(bound_thm1(r, n)) } else { None },
        thm2: optional(bound_thm2(cfg.p, r, n)),
        thm3: optional(bound_thm3(cfg.p, r, n)),
    }])
}

/// Relative slack used for the assembly inequalities in log form.
pub const ASSEMBLY_TOL: f64 = 1e-12;

pub fn bounds_rows(ps: &[f64], rs: &[u64], ns: &[u64]) -> Result<Vec<BoundsRow>, CliError> {
    let mut ps = ps.to_vec();
    ps.sort_by(f64::total_cmp);
    let (mut rs, mut ns) = (rs.to_vec(), ns.to_vec());
    rs.sort_unstable();
    ns.sort_unstable();
    let mut rows = Vec::new();
    for &p in &ps {
        for &r in &rs {
            for &n in &ns {
                let balanced = p == 0.5 && n >= 1;
                rows.push(BoundsRow {
                    p,
                    r,
                    n,
                    thm1: if balanced { Some(bound_thm1(r, n)?) } else { None },
                    thm2: bound_thm2(p, r, n)?,
                    thm3: bound_thm3(p, r, n)?,
                    thm1_assembly_holds: n == 0 || thm1_assembly(r, n)?.holds(ASSEMBLY_TOL),
                    thm2_assembly_holds: n == 0 || thm2_assembly(p, r, n)?.holds(ASSEMBLY_TOL),
                    thm3_assembly_holds: thm3_assembly(p, r, n)?.holds(ASSEMBLY_TOL),
                });
            }
        }
    }
    Ok(rows)
}

pub fn oracle_rows(p: f64, r: usize) -> Result<Vec<OracleRow>, CliError> {
    let pr = rational_from_f64(p)?;
    let rep = exact_second_moment_y(&pr, r)?;
    let z = exact_second_moment_z(&pr, r)?;
    Ok(vec![OracleRow {
        p,
        r,
        alpha: num_traits::ToPrimitive::to_f64(&rep.alpha).unwrap_or(f64::NAN),
        lambda_min_mr: rep.lambda_min_mr,
        lambda_min_sigma: rep.lambda_min_sigma,
        lambda_min_sigma_check: rep.lambda_min_sigma_check,
        claimed_floor: rep.claimed_floor(),
        floor_gap: rep.floor_gap(),
        restriction_exact: rep.sigma_check.restriction() == rep.sigma,
        z_moment_identity: is_identity(&z),
    }])
}

pub fn maxcut_rows(g: &Graph, samples: u64, seed: u64) -> Result<(Vec<MaxcutRow>, bool), CliError> {
    let (mc, mc_cut) = brute_force_maxcut(g)?;
    let opts = BmOptions::for_dimension(g.n(), seed);
    let (factor, bm_value) = bm_elliptope_solve(&laplacian(g), &opts, None)?;
    let (rounded, rounded_cut) = best_cut_value(g, &factor, samples, seed)?;
    let report = check_approx_sandwich(bm_value, mc as f64)?;
    Ok((
        vec![MaxcutRow {
            n: g.n(),
            m: g.edge_count(),
            maxcut: mc,
            maxcut_cut: mc_cut.to_string(),
            bm_value,
            bm_rank: opts.rank,
            rounded_best: rounded,
            rounded_cut: rounded_cut.to_string(),
            guarantee: report.guarantee,
            ratio: report.ratio,
            sandwich_holds: report.holds,
        }],
        report.holds,
    ))
}

/// The four distinct 3 × 3 cut matrices, then boundary points of the
/// embedded elliptope: for `(a, b)` on a grid over `[-1, 1]²`, both roots
/// `c = ab ± √((1-a²)(1-b²))` of `det [[1,a,b],[a,1,c],[b,c,1]] = 0`.
pub fn fig_rows(grid: usize) -> Result<Vec<FigRow>, CliError> {
    if grid < 2 {
        return Err(CliError::Input("grid needs at least 2 points per axis".into()));
    }
    let mut rows = Vec::new();
    let vertices: BTreeSet<(i8, i8, i8)> = (0..8u64)
        .map(|m| {
            let c = CutVector::from_bits(m, 3).expect("n = 3");
            let x = cut_matrix(&c);
            (x.get(1, 0), x.get(2, 0), x.get(2, 1))
        })
        .collect();
    let mut vertices: Vec<_> = vertices.into_iter().collect();
    vertices.sort_by(|a, b| b.cmp(a));
    for (a, b, c) in vertices {
        let x = SymmetricMatrix::from_rows(&[
            vec![1.0, f64::from(a), f64::from(b)],
            vec![f64::from(a), 1.0, f64::from(c)],
            vec![f64::from(b), f64::from(c), 1.0],
        ])?;
        let [x21, x31, x32] = lower_triangle_embed(&x)?;
        rows.push(FigRow { kind: "vertex", x21, x31, x32 });
    }
    let step = 2.0 / (grid - 1) as f64;
    for i in 0..grid {
        let a = -1.0 + step * i as f64;
        for j in 0..grid {
            let b = -1.0 + step * j as f64;
            let disc = ((1.0 - a * a) * (1.0 - b * b)).max(0.0).sqrt();
            rows.push(FigRow { kind: "boundary", x21: a, x31: b, x32: a * b - disc });
            rows.push(FigRow { kind: "boundary", x21: a, x31: b, x32: a * b + disc });
        }
    }
    Ok(rows)
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Certify { cuts } => {
            let cuts = read_cuts(open(cuts)?)?;
            if cuts.len() < 2 {
                return Err(CliError::Input(format!("need at least 2 cut vectors, found {}", cuts.len())));
            }
            emit(cli, &certify_rows(&cuts)?)
        }
        Command::Estimate { p, r, n, trials, seed, confidence, workers } => {
            let cfg = EstimateConfig { p: *p, r: *r, n: *n, trials: *trials, seed: *seed, confidence: *confidence };
            emit(cli, &estimate_rows(&cfg, *workers)?)
        }
        Command::Bounds { p, r, n } => emit(cli, &bounds_rows(p, r, n)?),
        Command::Oracle { p, r } => emit(cli, &oracle_rows(*p, *r)?),
        Command::Maxcut { edges, trials, seed } => {
            let g = Graph::read_edge_list(open(edges)?)?;
            let (rows, holds) = maxcut_rows(&g, *trials, *seed)?;
            emit(cli, &rows)?;
            if holds {
                Ok(())
            } else {
                Err(CliError::Check(format!(
                    "maxcut {} below (2/pi) * {}",
                    rows[0].maxcut, rows[0].bm_value
                )))
            }
        }
        Command::FigElliptope { grid } => emit(cli, &fig_rows(*grid)?),
    }
}

/// Parses arguments, runs, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("facecert: {e}");
            e.exit_code()
        }
    }
}
