//! `ergogap` command-line front end.
//!
//! Every subcommand writes one JSON report to stdout. Failures write an error
//! document to stderr and exit with: 2 input error, 3 cap exceeded, 4 no
//! contraction, 5 verification failure, 1 anything else.

mod report;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

pub use report::{all_finite, exit_code, InputDigest, Report, SCHEMA_VERSION};

use crate::dobrushin::{CoefficientForm, ErgodicityCoefficient, DEFAULT_PAIR_CAP};
use crate::error::Error;
use crate::oracle::{self, DEFAULT_ORACLE_CAP};
use crate::spectral_bound::{
    certificate_sequence_with, closed_subsets, exactness_check_with, mixture_bound_with,
    SpectralCertificate, DEFAULT_K_MAX,
};
use crate::stationary::{
    fixed_point_residual, stationary_distribution_with, StationaryOptions, DEFAULT_MAX_ITERS,
    DEFAULT_MAX_M, DEFAULT_TOL,
};
use crate::stochastic_core::{
    build_google, ingest_edge_list, parse_dense_matrix, read_vector, write_vector, DanglingPolicy,
    DenseMatrix, GoogleMatrix, SimplexVector, StochasticMatrix, Teleport, TransitionMatrix,
    DEFAULT_DENSE_CAP, DEFAULT_ROW_SUM_TOL,
};

/// Tolerance for `oracle --check`: a bound is sound when it is at least
/// `|lambda_2| - CHECK_TOL`.
pub const CHECK_TOL: f64 = 1e-9;

#[derive(Debug, Parser)]
#[command(
    name = "ergogap",
    version,
    about = "Dobrushin coefficients and second-eigenvalue certificates"
)]
pub struct Cli {
    /// Print a human-readable summary to stderr.
    #[arg(long, global = true)]
    pub verbose: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dobrushin coefficient q(B) with both-form cross-check.
    Coeff(CoeffArgs),
    /// Upper bounds (or the exact value) of |lambda_2|.
    Bound(BoundArgs),
    /// Certified stationary distribution by power iteration.
    Stationary(StationaryArgs),
    /// Irreducible closed subsets (terminal strongly connected components).
    Scc(SccArgs),
    /// Dense ground truth: spectrum, fixed space, certificate checks.
    Oracle(OracleArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SourceArgs {
    /// Edge list: `src dst [weight]` per line.
    #[arg(long, conflicts_with = "dense", required_unless_present = "dense")]
    pub edges: Option<PathBuf>,

    /// Dense matrix: one whitespace-separated row per line.
    #[arg(long)]
    pub dense: Option<PathBuf>,

    /// Handling of edge-list nodes without out-edges: uniform, self_loop, reject.
    #[arg(long, default_value_t = DanglingPolicy::Uniform)]
    pub dangling: DanglingPolicy,

    /// Accepted deviation of dense row sums from 1.
    #[arg(long, default_value_t = DEFAULT_ROW_SUM_TOL)]
    pub row_sum_tol: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GoogleArgs {
    /// Damping factor c: analyse A = c P + (1 - c) e z^t.
    #[arg(long, value_name = "C")]
    pub google: Option<f64>,

    /// Teleport vector z: `uniform` or a vector file.
    #[arg(long, default_value = "uniform", requires = "google")]
    pub teleport: String,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CapArgs {
    /// Maximum n for pairwise coefficient evaluation.
    #[arg(long, env = "ERGOGAP_PAIR_CAP", default_value_t = DEFAULT_PAIR_CAP)]
    pub pair_cap: usize,

    /// Maximum n for dense matrix powers.
    #[arg(long, default_value_t = DEFAULT_DENSE_CAP)]
    pub dense_cap: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct CoeffArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub google: GoogleArgs,
    #[command(flatten)]
    pub caps: CapArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct BoundArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub google: GoogleArgs,
    #[command(flatten)]
    pub caps: CapArgs,
    /// Largest power k in the q(A^k)^(1/k) sequence.
    #[arg(long, default_value_t = DEFAULT_K_MAX)]
    pub k_max: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct StationaryArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub google: GoogleArgs,
    #[command(flatten)]
    pub caps: CapArgs,
    /// Stop once the a-posteriori error bound falls to this value
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    /// Give up (exit 1) after this many iterations
    #[arg(long, default_value_t = DEFAULT_MAX_ITERS)]
    pub max_iters: usize,
    /// Largest power m tried when searching for q(A^m) < 1.
    #[arg(long, default_value_t = DEFAULT_MAX_M)]
    pub max_m: usize,
    /// Starting vector: `uniform` or a vector file.
    #[arg(long, default_value = "uniform")]
    pub x0: String,
    /// Write x_star here as a vector file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct SccArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Entries at or below this value are treated as absent edges.
    #[arg(long, default_value_t = 0.0)]
    pub zero_threshold: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct OracleArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub google: GoogleArgs,
    /// Certificate or `bound` report to verify against the spectrum.
    #[arg(long)]
    pub check: Option<PathBuf>,
    /// Vector file whose fixed-point residual ||A^t v - v||_1 is reported.
    #[arg(long)]
    pub vector: Option<PathBuf>,
}

/// Failure of a subcommand, carrying the exit code and optional partial
/// result.
#[derive(Debug)]
pub struct CliError {
    pub kind: String,
    pub message: String,
    pub code: i32,
    pub partial: Option<Value>,
}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        let partial = match &err {
            Error::MaxItersExceeded(cert) => serde_json::to_value(cert.as_ref()).ok(),
            _ => None,
        };
        CliError {
            kind: err.kind().to_string(),
            message: err.to_string(),
            code: exit_code(&err),
            partial,
        }
    }
}

fn io_error(path: &Path, err: std::io::Error) -> CliError {
    CliError {
        kind: "IoError".into(),
        message: format!("{}: {err}", path.display()),
        code: 2,
        partial: None,
    }
}

type CliResult<T> = Result<T, CliError>;

/// The matrix an invocation works on.
struct Loaded {
    p: StochasticMatrix,
    google: Option<GoogleMatrix>,
    input: Value,
}

impl Loaded {
    fn operator(&self) -> Operator<'_> {
        match &self.google {
            Some(g) => Operator::Google(g),
            None => Operator::Plain(&self.p),
        }
    }
}

enum Operator<'a> {
    Plain(&'a StochasticMatrix),
    Google(&'a GoogleMatrix),
}

struct Context {
    digest: InputDigest,
}

impl Context {
    fn read(&mut self, label: &str, path: &Path) -> CliResult<String> {
        let bytes = fs::read(path).map_err(|e| io_error(path, e))?;
        self.digest.add(label, &bytes);
        String::from_utf8(bytes).map_err(|e| CliError {
            kind: "ParseError".into(),
            message: format!("{}: not UTF-8: {e}", path.display()),
            code: 2,
            partial: None,
        })
    }

    fn load_matrix(&mut self, src: &SourceArgs) -> CliResult<(StochasticMatrix, Value)> {
        if let Some(path) = &src.edges {
            let text = self.read("edges", path)?;
            let g = ingest_edge_list(text.as_bytes(), src.dangling)?;
            let input = json!({
                "format": "edges",
                "n": g.matrix.n(),
                "nnz": g.matrix.nnz(),
                "dangling": g.dangling,
                "node_ids": g.node_ids,
            });
            Ok((g.matrix, input))
        } else {
            let path = src.dense.as_ref().expect("clap requires a source");
            let text = self.read("dense", path)?;
            let d = parse_dense_matrix(&text)?;
            let m = StochasticMatrix::from_dense(&d, src.row_sum_tol)?;
            let input = json!({ "format": "dense", "n": m.n(), "nnz": m.nnz() });
            Ok((m, input))
        }
    }

    fn load_simplex(&mut self, label: &str, source: &str, n: usize) -> CliResult<SimplexVector> {
        if source == "uniform" {
            return Ok(SimplexVector::uniform(n)?);
        }
        let text = self.read(label, Path::new(source))?;
        Ok(SimplexVector::new(
            read_vector(&text, n)?,
            DEFAULT_ROW_SUM_TOL,
        )?)
    }

    fn load(&mut self, src: &SourceArgs, google: Option<&GoogleArgs>) -> CliResult<Loaded> {
        let (p, mut input) = self.load_matrix(src)?;
        let google = match google.and_then(|g| g.google.map(|c| (c, g))) {
            Some((c, g)) => {
                let z = self.load_simplex("teleport", &g.teleport, p.n())?;
                input["google"] = json!({ "c": c, "teleport": g.teleport });
                Some(build_google(p.clone(), c, z)?)
            }
            None => None,
        };
        Ok(Loaded { p, google, input })
    }
}

/// Parse `args`, run the subcommand, and write its report. Returns the exit
/// status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = write!(stdout, "{rendered}");
            } else {
                let _ = write!(stderr, "{rendered}");
            }
            return code;
        }
    };
    execute(cli, stdout, stderr)
}

pub fn execute(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let start = Instant::now();
    let mut ctx = Context {
        digest: InputDigest::default(),
    };
    let (name, parameters, outcome) = match &cli.command {
        Command::Coeff(a) => ("coeff", to_value(a), cmd_coeff(&mut ctx, a)),
        Command::Bound(a) => ("bound", to_value(a), cmd_bound(&mut ctx, a)),
        Command::Stationary(a) => ("stationary", to_value(a), cmd_stationary(&mut ctx, a)),
        Command::Scc(a) => ("scc", to_value(a), cmd_scc(&mut ctx, a)),
        Command::Oracle(a) => ("oracle", to_value(a), cmd_oracle(&mut ctx, a)),
    };

    match outcome {
        Ok(out) => {
            let report = Report {
                schema_version: SCHEMA_VERSION,
                command: name,
                input_digest: ctx.digest.finish(),
                parameters,
                input: out.input,
                result: out.result,
                timing_ms: start.elapsed().as_secs_f64() * 1e3,
            };
            let _ = writeln!(
                stdout,
                "{}",
                serde_json::to_string(&report).expect("serializable")
            );
            if cli.verbose {
                let _ = writeln!(stderr, "{name}: {}", out.summary);
            }
            if let Some(failure) = out.failure {
                let doc = report::error_json(name, "VerificationFailed", &failure, 5, None);
                let _ = writeln!(stderr, "{doc}");
                return 5;
            }
            0
        }
        Err(e) => {
            let doc = report::error_json(name, &e.kind, &e.message, e.code, e.partial);
            let _ = writeln!(stderr, "{doc}");
            e.code
        }
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("arguments serialize")
}

struct Outcome {
    input: Value,
    result: Value,
    summary: String,
    /// Set when a verification step failed (exit 5).
    failure: Option<String>,
}

fn cmd_coeff(ctx: &mut Context, args: &CoeffArgs) -> CliResult<Outcome> {
    let loaded = ctx.load(&args.source, Some(&args.google))?;
    let cap = args.caps.pair_cap;
    let run = |form: Option<CoefficientForm>| match loaded.operator() {
        Operator::Plain(p) => p.coefficient(form, cap),
        Operator::Google(g) => g.coefficient(form, cap),
    };
    let main = run(None)?;
    let half = run(Some(CoefficientForm::HalfL1))?;
    let overlap = run(Some(CoefficientForm::OneMinusOverlap))?;
    let result = json!({
        "n": loaded.p.n(),
        "q": main.q,
        "argmax_pair": [main.argmax_pair.0, main.argmax_pair.1],
        "form_used": main.form_used,
        "cross_check": {
            "half_l1": half.q,
            "one_minus_overlap": overlap.q,
            "delta": (half.q - overlap.q).abs(),
        },
    });
    Ok(Outcome {
        summary: format!("q = {} at rows {:?}", main.q, main.argmax_pair),
        input: loaded.input,
        result,
        failure: None,
    })
}

fn cmd_bound(ctx: &mut Context, args: &BoundArgs) -> CliResult<Outcome> {
    let loaded = ctx.load(&args.source, Some(&args.google))?;
    let n = loaded.p.n();
    let sequence = match loaded.operator() {
        Operator::Plain(p) => certificate_sequence_with(p, args.k_max, args.caps.dense_cap),
        Operator::Google(g) => certificate_sequence_with(g, args.k_max, args.caps.dense_cap),
    };
    // Without damping the sequence is the only bound, so a cap violation is
    // fatal; with damping the mixture bounds still apply.
    let (sequence, skipped) = match sequence {
        Ok(cert) => (Some(cert), None),
        Err(e @ Error::DimensionCapExceeded { .. }) if loaded.google.is_some() => {
            (None, Some(e.to_string()))
        }
        Err(e) => return Err(e.into()),
    };

    let mut candidates: Vec<&SpectralCertificate> = sequence.iter().collect();
    let google = match (&loaded.google, args.google.google) {
        (Some(g), Some(c)) => {
            let Teleport::Rank1(z) = g.teleport() else {
                unreachable!("CLI teleport is rank 1")
            };
            let mixture = mixture_bound_with(&loaded.p, g.teleport(), c, args.caps.pair_cap)?;
            let exactness = exactness_check_with(&loaded.p, z, c, args.caps.pair_cap)?;
            Some((c, mixture, exactness))
        }
        _ => None,
    };
    if let Some((_, mixture, exactness)) = &google {
        candidates.push(mixture);
        candidates.push(exactness);
    }

    let best = candidates
        .iter()
        .copied()
        .find(|c| c.exact)
        .or_else(|| {
            candidates
                .iter()
                .copied()
                .min_by(|a, b| a.best_bound.total_cmp(&b.best_bound))
        })
        .expect("at least one certificate");

    let result = json!({
        "n": n,
        "best_bound": best.best_bound,
        "exact": best.exact,
        "source": best.source,
        "sequence": sequence,
        "sequence_skipped": skipped,
        "google": google.as_ref().map(|(c, mixture, exactness)| json!({
            "c": c,
            "headline_bound": c,
            "mixture": mixture,
            "exactness": exactness,
        })),
    });
    let summary = if best.exact {
        format!("|lambda_2| = {} exactly", best.best_bound)
    } else {
        format!("|lambda_2| <= {}", best.best_bound)
    };
    Ok(Outcome {
        input: loaded.input,
        result,
        summary,
        failure: None,
    })
}

fn cmd_stationary(ctx: &mut Context, args: &StationaryArgs) -> CliResult<Outcome> {
    let loaded = ctx.load(&args.source, Some(&args.google))?;
    let x0 = ctx.load_simplex("x0", &args.x0, loaded.p.n())?;
    let opts = StationaryOptions {
        tol: args.tol,
        max_m: args.max_m,
        max_iters: args.max_iters,
        dense_cap: args.caps.dense_cap,
        pair_cap: args.caps.pair_cap,
    };
    let cert = match loaded.operator() {
        Operator::Plain(p) => stationary_distribution_with(p, &x0, &opts),
        Operator::Google(g) => stationary_distribution_with(g, &x0, &opts),
    }?;
    if let Some(out) = &args.out {
        fs::write(out, write_vector(cert.x_star.as_slice())).map_err(|e| io_error(out, e))?;
    }
    Ok(Outcome {
        summary: format!(
            "kappa = {} (m = {}), {} iterations, error <= {}",
            cert.kappa, cert.m, cert.iterations, cert.a_posteriori_bound
        ),
        input: loaded.input,
        result: to_value(&cert),
        failure: None,
    })
}

fn cmd_scc(ctx: &mut Context, args: &SccArgs) -> CliResult<Outcome> {
    let loaded = ctx.load(&args.source, None)?;
    let report = closed_subsets(&loaded.p, args.zero_threshold);
    Ok(Outcome {
        summary: format!("{} irreducible closed subset(s)", report.count),
        input: loaded.input,
        result: to_value(&report),
        failure: None,
    })
}

fn dense_of(loaded: &Loaded, cap: usize) -> crate::Result<DenseMatrix> {
    match loaded.operator() {
        Operator::Plain(p) => p.densify(cap),
        Operator::Google(g) => g.densify(cap),
    }
}

fn cmd_oracle(ctx: &mut Context, args: &OracleArgs) -> CliResult<Outcome> {
    let loaded = ctx.load(&args.source, Some(&args.google))?;
    let dense = dense_of(&loaded, DEFAULT_ORACLE_CAP)?;
    let spectrum = oracle::eigenvalues_dense(&dense)?;
    let second = spectrum.second_modulus();
    let mut result = json!({
        "n": dense.n(),
        "eigenvalues": spectrum
            .eigenvalues
            .iter()
            .map(|z| json!({ "re": z.re, "im": z.im }))
            .collect::<Vec<_>>(),
        "second_modulus": second,
        "fixed_space_dimension": oracle::fixed_space_dimension_dense(&dense)?,
        "transpose_spectrum_match": oracle::transpose_spectrum_check(&dense)?,
    });

    if let Some(path) = &args.vector {
        let text = ctx.read("vector", path)?;
        let v = read_vector(&text, dense.n())?;
        let residual = match loaded.operator() {
            Operator::Plain(p) => fixed_point_residual(p, &v),
            Operator::Google(g) => fixed_point_residual(g, &v),
        }?;
        result["vector_residual"] = json!(residual);
    }

    let mut failure = None;
    if let Some(path) = &args.check {
        let text = ctx.read("check", path)?;
        let doc: Value = serde_json::from_str(&text).map_err(|e| CliError {
            kind: "ParseError".into(),
            message: format!("{}: {e}", path.display()),
            code: 2,
            partial: None,
        })?;
        let claim = CertificateClaim::from_json(&doc).ok_or_else(|| CliError {
            kind: "ParseError".into(),
            message: format!("{}: no numeric `best_bound` found", path.display()),
            code: 2,
            partial: None,
        })?;
        let verdict = claim.verify(second);
        if !verdict.pass {
            failure = Some(format!(
                "certificate bound {} does not hold for |lambda_2| = {second}",
                claim.best_bound
            ));
        }
        result["check"] = to_value(&verdict);
    }

    Ok(Outcome {
        summary: format!("|lambda_2| = {second}"),
        input: loaded.input,
        result,
        failure,
    })
}

/// The claim carried by a certificate document: a bare certificate, a
/// `bound` result, or a full `bound` report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertificateClaim {
    pub best_bound: f64,
    pub exact: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CheckVerdict {
    pub best_bound: f64,
    pub second_modulus: f64,
    pub sound: bool,
    /// `None` when the certificate does not claim exactness.
    pub exact_claim_holds: Option<bool>,
    pub pass: bool,
}

impl CertificateClaim {
    pub fn from_json(doc: &Value) -> Option<Self> {
        let body = if doc.get("best_bound").is_some() {
            doc
        } else {
            doc.get("result")?
        };
        let best_bound = body.get("best_bound")?.as_f64()?;
        let exact = body.get("exact").and_then(Value::as_bool).unwrap_or(false);
        Some(CertificateClaim { best_bound, exact })
    }

    pub fn verify(&self, second_modulus: f64) -> CheckVerdict {
        let sound = self.best_bound >= second_modulus - CHECK_TOL;
        let exact_claim_holds = self
            .exact
            .then(|| (self.best_bound - second_modulus).abs() <= CHECK_TOL);
        CheckVerdict {
            best_bound: self.best_bound,
            second_modulus,
            sound,
            exact_claim_holds,
            pass: sound && exact_claim_holds.unwrap_or(true),
        }
    }
}
