//! The `pencil-lab` command-line tool.
//!
//! Every subcommand reads one input file (see [`crate::io`]) and prints a JSON
//! document on stdout. Files named with `--out`, `--regions` or `--svg` are
//! written atomically. Exit codes: 0 success, 2 parse error, 3 precondition,
//! 4 ambiguous rank decision, 5 internal error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::dh::{check_dh_equivalence_with, realize_dh_with, DhVariant, AXIS_TOLERANCE};
use crate::error::{Error, Result};
use crate::io::{self, Input};
use crate::kcf::{kronecker_structure, RankPolicy};
use crate::localization::{cubic_lhp_certificate, lhp_certificate_with, LhpOptions};
use crate::matpoly::{
    cubic_stability, linearize, linearize_cubic, polynomial_eigenvalues, polynomial_index, sample_polynomial_numrange,
    MatrixPolynomial,
};
use crate::matrix::{spectral_norm, C64};
use crate::numrange::{beta_thresholds_scaled, sample_numerical_range, Evidence, DEFAULT_BISECT_TOL};
use crate::pencil::{generalized_eigenvalues, regularity_probe, Eigenvalue, PoshPencil};

/// Environment variable read when `--seed` is absent.
pub const SEED_ENV: &str = "PENCIL_LAB_SEED";

#[derive(Debug, Parser)]
#[command(name = "pencil-lab", version, about = "Structure and stability analysis of posH matrix pencils and polynomials")]
struct Cli {
    /// Seed for every randomized step. Overrides PENCIL_LAB_SEED.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Variant {
    General,
    Identity,
}

impl From<Variant> for DhVariant {
    fn from(v: Variant) -> Self {
        match v {
            Variant::General => DhVariant::GeneralQ,
            Variant::Identity => DhVariant::QIdentity,
        }
    }
}

#[derive(Debug, clap::Args)]
struct RankArgs {
    /// Absolute rank tolerance on the normalized pencil.
    #[arg(long)]
    rank_tol: Option<f64>,
    /// Safety factor of the default rank tolerance.
    #[arg(long)]
    safety: Option<f64>,
    /// Smallest accepted ratio across a rank boundary.
    #[arg(long)]
    gap: Option<f64>,
}

impl RankArgs {
    fn policy(&self) -> RankPolicy {
        let mut p = RankPolicy::default();
        if let Some(t) = self.rank_tol {
            p.explicit_tolerance = Some(t);
        }
        if let Some(s) = self.safety {
            p.safety = s;
        }
        if let Some(g) = self.gap {
            p.gap_threshold = g;
        }
        p
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check that a pencil is posH, or that a polynomial has PSD Hermitian coefficients.
    Validate {
        file: PathBuf,
        /// PSD tolerance on the Hermitian parts.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Kronecker structure of a pencil.
    Kcf {
        file: PathBuf,
        #[command(flatten)]
        rank: RankArgs,
    },
    /// Decide equivalence to a dissipative Hamiltonian pencil.
    DhCheck {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "general")]
        variant: Variant,
        #[command(flatten)]
        rank: RankArgs,
    },
    /// Build a dissipative Hamiltonian pencil with the input's Kronecker structure.
    DhRealize {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "general")]
        variant: Variant,
        #[command(flatten)]
        rank: RankArgs,
        /// Write the realization here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample the numerical range and emit the point cloud and excluded regions.
    Numrange {
        file: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        /// Point cloud CSV.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Excluded regions JSON (posH pencils only).
        #[arg(long)]
        regions: Option<PathBuf>,
        /// Static scatter plot with the regions shaded.
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Scale t of the thresholds for tR1 + R2 ± β(iJ1).
        #[arg(long, default_value_t = 1.0)]
        t: f64,
    },
    /// Definiteness thresholds β± and their lower bounds.
    Beta {
        file: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
    },
    /// Left half-plane certificate.
    Certify {
        file: PathBuf,
        /// Falsifier budget.
        #[arg(long, default_value_t = 10_000)]
        budget: usize,
        /// Sample budget of the sampled checks.
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
    },
    /// Eigenvalues of a pencil or a matrix polynomial.
    Eig { file: PathBuf },
    /// Stability conditions for a cubic matrix polynomial.
    Polystab {
        file: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        budget: usize,
    },
    /// Emit the posH linearization of a matrix polynomial.
    Lin {
        file: PathBuf,
        /// Use the cubic-specific layout.
        #[arg(long)]
        cubic: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Every applicable analysis in one deterministic report.
    Report {
        file: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Runs the tool on `args` (including the program name) and returns the exit
/// status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    match execute(cli) {
        Ok(text) => {
            let _ = out.write_all(text.as_bytes());
            0
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn resolve_seed(flag: Option<u64>) -> Result<u64> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("{SEED_ENV}={v:?} is not an unsigned integer"))),
        Err(_) => Ok(0),
    }
}

fn emit(out: Option<&Path>, text: String) -> Result<String> {
    match out {
        Some(path) => {
            io::write_atomic(path, text.as_bytes())?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

fn execute(cli: Cli) -> Result<String> {
    let seed = resolve_seed(cli.seed)?;
    match cli.command {
        Command::Validate { file, tol } => {
            let (input, _) = io::read_input(&file)?;
            io::to_json_string(&validate(&input, tol)?)
        }
        Command::Kcf { file, rank } => {
            let (input, _) = io::read_input(&file)?;
            io::to_json_string(&kronecker_structure(&input.pencil()?, &rank.policy())?)
        }
        Command::DhCheck { file, variant, rank } => {
            let (input, _) = io::read_input(&file)?;
            let ks = kronecker_structure(&input.pencil()?, &rank.policy())?;
            io::to_json_string(&check_dh_equivalence_with(&ks, variant.into(), AXIS_TOLERANCE))
        }
        Command::DhRealize { file, variant, rank, out } => {
            let (input, _) = io::read_input(&file)?;
            let ks = kronecker_structure(&input.pencil()?, &rank.policy())?;
            let d = realize_dh_with(&ks, variant.into(), AXIS_TOLERANCE)?;
            emit(out.as_deref(), io::to_json_string(&io::dh_json(&d))?)
        }
        Command::Numrange { file, samples, out, regions, svg, t } => {
            let (input, _) = io::read_input(&file)?;
            numrange(&input, samples, seed, t, out.as_deref(), regions.as_deref(), svg.as_deref())
        }
        Command::Beta { file, t } => {
            let (input, _) = io::read_input(&file)?;
            io::to_json_string(&beta_thresholds_scaled(&input.posh(None)?, t)?)
        }
        Command::Certify { file, budget, samples } => {
            let (input, _) = io::read_input(&file)?;
            let opts = LhpOptions {
                falsify_budget: budget,
                sample_budget: samples,
                seed,
            };
            let cert = match &input {
                Input::Polynomial(p) => cubic_lhp_certificate(p, &opts)?,
                other => lhp_certificate_with(&other.posh(None)?, &opts),
            };
            io::to_json_string(&json!({
                "certificate": cert,
                "certifies_eigenvalues_in_lhp": cert.certifies_eigenvalues_in_lhp(),
                "seed": seed,
            }))
        }
        Command::Eig { file } => {
            let (input, _) = io::read_input(&file)?;
            io::to_json_string(&eigen_summary(&input)?)
        }
        Command::Polystab { file, budget } => {
            let (input, _) = io::read_input(&file)?;
            io::to_json_string(&polystab(input.polynomial()?, budget, seed)?)
        }
        Command::Lin { file, cubic, out } => {
            let (input, _) = io::read_input(&file)?;
            let p = input.polynomial()?;
            let lin = if cubic { linearize_cubic(p)? } else { linearize(p)? };
            emit(out.as_deref(), io::to_json_string(&io::posh_json(&lin))?)
        }
        Command::Report { file, samples, out } => {
            let (input, bytes) = io::read_input(&file)?;
            let report = analysis_report(&input, &bytes, samples, seed);
            emit(out.as_deref(), io::to_json_string(&report)?)
        }
    }
}

fn validate(input: &Input, tol: Option<f64>) -> Result<Value> {
    match input {
        Input::Polynomial(p) => {
            p.psd_validate(tol)?;
            Ok(json!({ "kind": "polynomial", "psd_coefficients": true, "degree": p.degree(), "n": p.n() }))
        }
        other => {
            let pp = other.posh(tol)?;
            Ok(json!({
                "kind": other.kind(),
                "posh": true,
                "n": pp.n(),
                "psd_tolerance": pp.psd_tolerance,
                "real": pp.is_real(),
                "regular": regularity_probe(&pp.to_pencil()).regular,
            }))
        }
    }
}

#[derive(Debug, Serialize)]
struct EigenSummary {
    eigenvalues: Vec<Eigenvalue>,
    finite: usize,
    infinite: usize,
    positive_real_part: usize,
    max_real_part: Option<f64>,
}

fn summarize(eigenvalues: Vec<Eigenvalue>) -> EigenSummary {
    let finite: Vec<C64> = eigenvalues.iter().filter_map(|e| e.finite()).collect();
    EigenSummary {
        finite: finite.len(),
        infinite: eigenvalues.len() - finite.len(),
        positive_real_part: finite.iter().filter(|z| z.re > 0.0).count(),
        max_real_part: finite.iter().map(|z| z.re).reduce(f64::max),
        eigenvalues,
    }
}

fn eigen_summary(input: &Input) -> Result<EigenSummary> {
    let ev = match input {
        Input::Polynomial(p) => polynomial_eigenvalues(p)?,
        other => generalized_eigenvalues(&other.pencil()?)?,
    };
    Ok(summarize(ev))
}

fn polystab(p: &MatrixPolynomial, budget: usize, seed: u64) -> Result<Value> {
    let report = cubic_stability(p)?;
    let opts = LhpOptions {
        falsify_budget: budget,
        sample_budget: budget,
        seed,
    };
    let cert = cubic_lhp_certificate(p, &opts)?;
    let eig = summarize(polynomial_eigenvalues(p)?);
    Ok(json!({
        "conclusion": report.conclusion,
        "report": report,
        "certificate": cert,
        "qz_check": { "max_real_part": eig.max_real_part, "positive_real_part": eig.positive_real_part },
    }))
}

fn numrange(
    input: &Input,
    samples: usize,
    seed: u64,
    t: f64,
    out: Option<&Path>,
    regions_path: Option<&Path>,
    svg: Option<&Path>,
) -> Result<String> {
    let mut warnings = Vec::new();
    let (points, discarded, regions, summary) = match input {
        Input::Polynomial(p) => {
            if regions_path.is_some() {
                return Err(Error::Precondition("excluded regions are defined for posH pencils only".into()));
            }
            let pts = sample_polynomial_numrange(p, samples, seed);
            let d = p.degree().max(1) as f64;
            let min_arg = pts.iter().filter(|z| z.norm() > 1e-8).map(|z| z.arg().abs()).reduce(f64::min);
            let summary = json!({ "sector_angle": std::f64::consts::PI / d, "min_abs_arg": min_arg });
            (pts, 0, Vec::new(), summary)
        }
        other => {
            let pencil = other.pencil()?;
            if pencil.rows() == 2 {
                warnings.push("n = 2: the joint numerical range need not be convex".to_string());
            }
            let sample = sample_numerical_range(&pencil, samples, seed)?;
            let (regions, summary) = match other.posh(None) {
                Ok(pp) => {
                    let b = beta_thresholds_scaled(&pp, t)?;
                    (b.regions(), serde_json::to_value(&b).map_err(|e| Error::Internal(e.to_string()))?)
                }
                Err(e) if regions_path.is_some() => return Err(e),
                Err(e) => {
                    warnings.push(format!("no regions: {e}"));
                    (Vec::new(), Value::Null)
                }
            };
            (sample.points, sample.discarded, regions, summary)
        }
    };
    if let Some(path) = out {
        io::write_atomic(path, io::points_csv(&points).as_bytes())?;
    }
    if let Some(path) = regions_path {
        io::write_atomic(path, io::to_json_string(&io::regions_json(&regions))?.as_bytes())?;
    }
    if let Some(path) = svg {
        io::write_atomic(path, io::scatter_svg(&points, &regions, 20_000).as_bytes())?;
    }
    io::to_json_string(&json!({
        "evidence": Evidence::Sampled,
        "seed": seed,
        "samples": samples,
        "points": points.len(),
        "discarded": discarded,
        "thresholds": summary,
        "regions": io::regions_json(&regions)["regions"],
        "warnings": warnings,
    }))
}

#[derive(Debug, Serialize)]
struct Fingerprint {
    kind: &'static str,
    rows: usize,
    cols: usize,
    /// Spectral norms of the coefficients as stored in the file.
    norms: Vec<f64>,
    sha256: String,
}

#[derive(Debug, Serialize)]
struct Tolerances {
    rank_policy: RankPolicy,
    dh_axis: f64,
    bisect: f64,
}

#[derive(Debug, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
enum Outcome {
    Ok { result: Value },
    Error { error: String, exit_code: i32 },
}

#[derive(Debug, Serialize)]
struct Analysis {
    name: &'static str,
    evidence: Evidence,
    #[serde(flatten)]
    outcome: Outcome,
}

/// Input fingerprint, tolerances, seed, version and the result of every
/// analysis that applies to the input. Byte-identical for identical input,
/// flags and seed.
#[derive(Debug, Serialize)]
struct AnalysisReport {
    tool: &'static str,
    version: &'static str,
    seed: u64,
    input: Fingerprint,
    requested: Vec<&'static str>,
    tolerances: Tolerances,
    analyses: Vec<Analysis>,
}

fn analysis<T: Serialize>(name: &'static str, evidence: Evidence, r: Result<T>) -> Analysis {
    let outcome = match r.and_then(|v| serde_json::to_value(v).map_err(|e| Error::Internal(e.to_string()))) {
        Ok(result) => Outcome::Ok { result },
        Err(e) => Outcome::Error {
            error: e.to_string(),
            exit_code: e.exit_code(),
        },
    };
    Analysis { name, evidence, outcome }
}

fn fingerprint(input: &Input, bytes: &[u8]) -> Fingerprint {
    let digest = Sha256::digest(bytes);
    let sha256 = digest.iter().map(|b| format!("{b:02x}")).collect();
    let (rows, cols, norms) = match input {
        Input::Pencil(p) => (
            p.rows(),
            p.cols(),
            vec![p.lead().norm2(), p.constant().norm2()],
        ),
        Input::Parts { j1, r1, j2, r2 } => (
            j1.nrows(),
            j1.ncols(),
            [j1, r1, j2, r2].iter().map(|m| spectral_norm(m)).collect(),
        ),
        Input::Polynomial(p) => (p.n(), p.n(), p.coefficients().iter().map(spectral_norm).collect()),
    };
    Fingerprint {
        kind: input.kind(),
        rows,
        cols,
        norms,
        sha256,
    }
}

fn analysis_report(input: &Input, bytes: &[u8], samples: usize, seed: u64) -> AnalysisReport {
    let policy = RankPolicy::default();
    let mut analyses = Vec::new();
    match input {
        Input::Polynomial(p) => {
            analyses.push(analysis("validate", Evidence::Exact, validate(input, None)));
            analyses.push(analysis("eig", Evidence::Exact, polynomial_eigenvalues(p).map(summarize)));
            analyses.push(analysis("index", Evidence::Exact, polynomial_index(p, &policy)));
            if p.degree() == 3 {
                analyses.push(analysis("polystab", Evidence::Exact, polystab(p, samples, seed)));
            }
            let pts = sample_polynomial_numrange(p, samples, seed);
            let d = p.degree().max(1) as f64;
            let min_arg = pts.iter().filter(|z| z.norm() > 1e-8).map(|z| z.arg().abs()).reduce(f64::min);
            analyses.push(analysis(
                "numrange",
                Evidence::Sampled,
                Ok(json!({ "points": pts.len(), "sector_angle": std::f64::consts::PI / d, "min_abs_arg": min_arg })),
            ));
        }
        other => {
            let pencil = other.pencil();
            let pp: Result<PoshPencil> = other.posh(None);
            analyses.push(analysis("validate", Evidence::Exact, validate(other, None)));
            analyses.push(analysis(
                "eig",
                Evidence::Exact,
                pencil.clone().and_then(|p| generalized_eigenvalues(&p)).map(summarize),
            ));
            let ks = pencil.clone().and_then(|p| kronecker_structure(&p, &policy));
            analyses.push(analysis("kcf", Evidence::Exact, ks.clone()));
            for (name, variant) in [("dh_check_general", DhVariant::GeneralQ), ("dh_check_identity", DhVariant::QIdentity)] {
                let verdict = ks.clone().map(|ks| check_dh_equivalence_with(&ks, variant, AXIS_TOLERANCE));
                analyses.push(analysis(name, Evidence::Exact, verdict));
            }
            analyses.push(analysis(
                "beta",
                Evidence::Exact,
                pp.clone().map(|pp| crate::numrange::beta_thresholds(&pp, DEFAULT_BISECT_TOL)),
            ));
            let opts = LhpOptions {
                falsify_budget: samples,
                sample_budget: samples,
                seed,
            };
            let cert = pp.clone().map(|pp| lhp_certificate_with(&pp, &opts));
            let evidence = cert.as_ref().map(|c| c.evidence).unwrap_or(Evidence::Exact);
            analyses.push(analysis("certify", evidence, cert));
            let sample = pencil.and_then(|p| sample_numerical_range(&p, samples, seed));
            analyses.push(analysis(
                "numrange",
                Evidence::Sampled,
                sample.map(|s| {
                    let max_re = s.points.iter().map(|z| z.re).reduce(f64::max);
                    json!({ "points": s.points.len(), "discarded": s.discarded, "max_real_part": max_re })
                }),
            ));
        }
    }
    AnalysisReport {
        tool: "pencil-lab",
        version: env!("CARGO_PKG_VERSION"),
        seed,
        input: fingerprint(input, bytes),
        requested: analyses.iter().map(|a| a.name).collect(),
        tolerances: Tolerances {
            rank_policy: policy,
            dh_axis: AXIS_TOLERANCE,
            bisect: DEFAULT_BISECT_TOL,
        },
        analyses,
    }
}
