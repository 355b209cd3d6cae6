//! Command-line front end. The only module that touches files or streams.
//!
//! Exit codes: 0 success, 1 validation or input failure, 2 inconclusive or
//! bounds-only result, 3 usage error, 4 resource ceiling exceeded.

pub mod builtins;
pub mod file;
pub mod pipeline;

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::galg::{power_dim, tensor_power, validate_algebra, Algebra, AlgebraError, DEFAULT_DIM_CEILING};
use crate::invariants::{cup_length, verify_witness, zcl_bounds, zcl_exact, InvariantError, Witness, ZclResult};
use crate::series::{
    analyze_sequence, format_poly, IntSequence, RationalityReport, SeriesError, Verdict, DEFAULT_MIN_RUN,
};
use builtins::{builtin_catalog, BuiltinError, CATALOG};
use file::{AlgebraFile, FileError};
use pipeline::{series_pipeline, PipelineError, SeriesOutcome};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_USAGE: i32 = 3;
pub const EXIT_RESOURCE: i32 = 4;

/// Environment variable overriding the `dim(A)^r` ceiling.
pub const CEILING_ENV: &str = "ZCL_DIM_CEILING";

const CHAR2_WARNING: &str =
    "field has characteristic 2: only the literal sign rule is checked, odd-degree squares may be nonzero";

#[derive(Debug, Parser)]
#[command(
    name = "zcl",
    version,
    about = "Cup-length, zero-divisors-cup-length and generating-series rationality"
)]
struct Cli {
    /// Emit a JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Cap on dim(A)^r (default 4096, or $ZCL_DIM_CEILING).
    #[arg(long, global = true)]
    ceiling: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Validate an algebra.
    Check { alg: String },
    /// Cup-length with a realizing chain.
    Cl { alg: String },
    /// r-th zero-divisors-cup-length.
    Zcl {
        alg: String,
        #[arg(long = "r")]
        r: usize,
        #[arg(long, value_enum, default_value_t = MethodArg::Exact)]
        method: MethodArg,
    },
    /// zcl_{r+1} for r = 1..=rmax and the numerator of its generating function.
    Series {
        alg: String,
        #[arg(long)]
        rmax: usize,
        #[arg(long = "min-run", default_value_t = DEFAULT_MIN_RUN)]
        min_run: usize,
    },
    /// A verified zero-divisor witness for the given r.
    Witness {
        alg: String,
        #[arg(long = "r")]
        r: usize,
    },
    /// Rationality analysis of an integer sequence.
    Analyze {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        seq: Vec<i64>,
        #[arg(long, default_value_t = 0)]
        offset: usize,
        #[arg(long = "min-run", default_value_t = DEFAULT_MIN_RUN)]
        min_run: usize,
    },
    /// Write the r-th tensor power as an algebra file.
    Tensor {
        alg: String,
        #[arg(long = "r")]
        r: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// List the builtin catalog.
    Builtins,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Exact,
    Bounds,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Builtin(#[from] BuiltinError),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{path}: {source}")]
    File { path: String, source: FileError },
    #[error("{alg}: {source}")]
    Algebra { alg: String, source: AlgebraError },
    #[error(transparent)]
    Invariant(#[from] InvariantError),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::RmaxTooSmall(_) => CliError::Usage(e.to_string()),
            PipelineError::Invariant(e) => CliError::Invariant(e),
            PipelineError::Series(e) => CliError::Series(e),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        let ceiling = |e: &AlgebraError| matches!(e, AlgebraError::ResourceCeiling { .. });
        match self {
            CliError::Usage(_) | CliError::Builtin(_) => EXIT_USAGE,
            CliError::Algebra { source, .. } if ceiling(source) => EXIT_RESOURCE,
            CliError::Algebra {
                source: AlgebraError::InvalidExponent(_),
                ..
            } => EXIT_USAGE,
            CliError::Invariant(InvariantError::Algebra(e)) if ceiling(e) => EXIT_RESOURCE,
            CliError::Invariant(InvariantError::InvalidR(_)) => EXIT_USAGE,
            _ => EXIT_INVALID,
        }
    }
}

/// Machine-readable report; field order is the serialization order.
#[derive(Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub input_digest: Option<String>,
    pub result: Value,
    pub warnings: Vec<String>,
    pub exit_status: i32,
}

struct Outcome {
    result: Value,
    text: String,
    exit: i32,
    digest: Option<String>,
    warnings: Vec<String>,
}

struct Loaded {
    algebra: Algebra,
    digest: String,
    warnings: Vec<String>,
}

/// Entry point used by the binary.
pub fn run(argv: &[String]) -> i32 {
    let env = std::env::var(CEILING_ENV).ok();
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, env.as_deref(), &mut stdout.lock(), &mut stderr.lock())
}

/// Like [`run`], with the environment ceiling and both streams supplied.
pub fn run_with(argv: &[String], env_ceiling: Option<&str>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{e}");
                    EXIT_USAGE
                }
            };
        }
    };
    let command = argv.iter().skip(1).cloned().collect::<Vec<_>>().join(" ");
    let ceiling = match resolve_ceiling(cli.ceiling, env_ceiling) {
        Ok(c) => c,
        Err(e) => return fail(&cli, &command, e, out, err),
    };
    match dispatch(&cli.command, ceiling) {
        Ok(o) => {
            for w in &o.warnings {
                let _ = writeln!(err, "warning: {w}");
            }
            if cli.json {
                let report = Report {
                    command,
                    input_digest: o.digest,
                    result: o.result,
                    warnings: o.warnings,
                    exit_status: o.exit,
                };
                let _ = writeln!(
                    out,
                    "{}",
                    serde_json::to_string_pretty(&report).expect("report serializes")
                );
            } else {
                let _ = write!(out, "{}", o.text);
            }
            o.exit
        }
        Err(e) => fail(&cli, &command, e, out, err),
    }
}

fn fail(cli: &Cli, command: &str, e: CliError, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let code = e.exit_code();
    let _ = writeln!(err, "error: {e}");
    if cli.json {
        let report = Report {
            command: command.to_string(),
            input_digest: None,
            result: json!({"kind": "error", "message": e.to_string()}),
            warnings: Vec::new(),
            exit_status: code,
        };
        let _ = writeln!(
            out,
            "{}",
            serde_json::to_string_pretty(&report).expect("report serializes")
        );
    }
    code
}

fn resolve_ceiling(flag: Option<usize>, env: Option<&str>) -> Result<usize, CliError> {
    if let Some(c) = flag {
        return Ok(c);
    }
    match env {
        Some(text) => text
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{CEILING_ENV} must be a positive integer, got {text:?}"))),
        None => Ok(DEFAULT_DIM_CEILING),
    }
}

fn load(alg: &str) -> Result<Loaded, CliError> {
    let file = match alg.strip_prefix("builtin:") {
        Some(name) => AlgebraFile::from_presentation(&builtin_catalog(name)?),
        None => {
            let text = std::fs::read_to_string(alg).map_err(|e| CliError::Io {
                path: alg.to_string(),
                message: e.to_string(),
            })?;
            AlgebraFile::parse(&text).map_err(|source| CliError::File {
                path: alg.to_string(),
                source,
            })?
        }
    };
    let digest = file.digest();
    let presentation = file.to_presentation().map_err(|source| CliError::File {
        path: alg.to_string(),
        source,
    })?;
    let algebra = validate_algebra(&presentation).map_err(|source| CliError::Algebra {
        alg: alg.to_string(),
        source,
    })?;
    let mut warnings = Vec::new();
    if algebra.field().characteristic() == 2 {
        warnings.push(CHAR2_WARNING.to_string());
    }
    Ok(Loaded {
        algebra,
        digest,
        warnings,
    })
}

fn dispatch(command: &Command, ceiling: usize) -> Result<Outcome, CliError> {
    match command {
        Command::Check { alg } => check(alg),
        Command::Cl { alg } => cl(alg),
        Command::Zcl { alg, r, method } => zcl(alg, *r, *method, ceiling),
        Command::Series { alg, rmax, min_run } => series(alg, *rmax, *min_run, ceiling),
        Command::Witness { alg, r } => witness(alg, *r, ceiling),
        Command::Analyze { seq, offset, min_run } => analyze(seq, *offset, *min_run),
        Command::Tensor { alg, r, out } => tensor(alg, *r, out, ceiling),
        Command::Builtins => Ok(list_builtins()),
    }
}

fn labels(a: &Algebra, chain: &[usize]) -> Vec<String> {
    chain.iter().map(|&i| a.label(i)).collect()
}

fn check(alg: &str) -> Result<Outcome, CliError> {
    let l = load(alg)?;
    let a = &l.algebra;
    let basis: Vec<Value> = (0..a.dim())
        .map(|i| json!({"label": a.label(i), "degree": a.degree(i)}))
        .collect();
    let text = format!(
        "{}: valid connected graded-commutative algebra over {}, dim {}, top degree {}\n",
        a.name(),
        a.field(),
        a.dim(),
        a.top_degree()
    );
    Ok(Outcome {
        result: json!({
            "kind": "check",
            "name": a.name(),
            "field": a.field().to_string(),
            "dim": a.dim(),
            "top_degree": a.top_degree(),
            "basis": basis,
            "valid": true,
        }),
        text,
        exit: EXIT_OK,
        digest: Some(l.digest),
        warnings: l.warnings,
    })
}

fn cl(alg: &str) -> Result<Outcome, CliError> {
    let l = load(alg)?;
    let a = &l.algebra;
    let res = cup_length(a);
    let chain = labels(a, res.chain.as_deref().unwrap_or(&[]));
    let text = format!(
        "{}\nchain: {}\n",
        res.value,
        if chain.is_empty() {
            "(empty)".to_string()
        } else {
            chain.join(" · ")
        }
    );
    Ok(Outcome {
        result: json!({"kind": "cl", "name": a.name(), "value": res.value, "chain": chain}),
        text,
        exit: EXIT_OK,
        digest: Some(l.digest),
        warnings: l.warnings,
    })
}

fn witness_json(a: &Algebra, w: &Witness) -> Value {
    let power = tensor_power(a, w.r, usize::MAX).expect("witness layout was built before");
    let check = verify_witness(a, w);
    json!({
        "r": w.r,
        "length": w.len(),
        "factors": w.factors.iter().map(|f| power.format_element(f)).collect::<Vec<_>>(),
        "product": power.format_element(&w.product),
        "verified": check.valid,
        "diagnostics": check.diagnostics,
    })
}

fn zcl_json(a: &Algebra, z: &ZclResult) -> Value {
    json!({
        "r": z.r,
        "method": z.method.as_str(),
        "value": z.value,
        "lower": z.lower,
        "upper": z.upper,
        "power_dims": z.power_dims,
        "witness": z.witness.as_ref().map(|w| witness_json(a, w)),
    })
}

fn zcl_text(a: &Algebra, z: &ZclResult) -> String {
    let mut text = match z.value {
        Some(v) => format!("zcl_{} = {} ({})\n", z.r, v, z.method.as_str()),
        None => format!("zcl_{}: {} ≤ zcl ≤ {} ({})\n", z.r, z.lower, z.upper, z.method.as_str()),
    };
    if let Some(w) = &z.witness {
        let power = tensor_power(a, w.r, usize::MAX).expect("witness layout was built before");
        text.push_str(&format!("witness of length {}:\n", w.len()));
        for f in &w.factors {
            text.push_str(&format!("  {}\n", power.format_element(f)));
        }
        text.push_str(&format!("product: {}\n", power.format_element(&w.product)));
    }
    text
}

fn zcl(alg: &str, r: usize, method: MethodArg, ceiling: usize) -> Result<Outcome, CliError> {
    let l = load(alg)?;
    let a = &l.algebra;
    let z = match method {
        MethodArg::Exact => zcl_exact(a, r, ceiling)?,
        MethodArg::Bounds => zcl_bounds(a, r, ceiling)?,
    };
    let mut result = zcl_json(a, &z);
    result["kind"] = json!("zcl");
    result["name"] = json!(a.name());
    Ok(Outcome {
        text: zcl_text(a, &z),
        exit: if z.value.is_some() { EXIT_OK } else { EXIT_INCONCLUSIVE },
        result,
        digest: Some(l.digest),
        warnings: l.warnings,
    })
}

fn witness(alg: &str, r: usize, ceiling: usize) -> Result<Outcome, CliError> {
    let l = load(alg)?;
    let a = &l.algebra;
    let z = if power_dim(a, r) <= ceiling as u128 {
        zcl_exact(a, r, ceiling)?
    } else {
        zcl_bounds(a, r, ceiling)?
    };
    let (result, text, exit) = match &z.witness {
        Some(w) => {
            let json_w = witness_json(a, w);
            let valid = json_w["verified"] == json!(true);
            let mut text = zcl_text(a, &z);
            text.push_str(if valid { "verified: yes\n" } else { "verified: NO\n" });
            (json_w, text, if valid { EXIT_OK } else { EXIT_INVALID })
        }
        None => (
            json!({"r": r, "length": 0, "factors": [], "product": null, "verified": true, "diagnostics": []}),
            format!("no zero divisors in A^{r}: zcl_{r} = 0\n"),
            EXIT_OK,
        ),
    };
    let mut result = result;
    result["kind"] = json!("witness");
    result["name"] = json!(a.name());
    result["method"] = json!(z.method.as_str());
    Ok(Outcome {
        result,
        text,
        exit,
        digest: Some(l.digest),
        warnings: l.warnings,
    })
}

fn report_json(rep: &RationalityReport) -> Value {
    json!({
        "verdict": rep.verdict.as_str(),
        "a": rep.a,
        "d": rep.d,
        "stabilization_index": rep.stabilization_index,
        "p_coeffs": rep.p_coeffs,
        "p_text": format_poly(&rep.p_coeffs),
        "p_at_one": rep.p_at_one(),
        "window_used": rep.window_used,
        "summary": rep.summary(),
    })
}

fn series(alg: &str, rmax: usize, min_run: usize, ceiling: usize) -> Result<Outcome, CliError> {
    let l = load(alg)?;
    let a = &l.algebra;
    let outcome: SeriesOutcome = series_pipeline(a, rmax, ceiling, min_run)?;
    let entries: Vec<Value> = outcome
        .entries
        .iter()
        .map(|z| json!({"r": z.r, "method": z.method.as_str(), "value": z.value, "lower": z.lower, "upper": z.upper}))
        .collect();
    let mut text = format!("cl = {}\n", outcome.cl.value);
    for z in &outcome.entries {
        match z.value {
            Some(v) => text.push_str(&format!("zcl_{} = {} [{}]\n", z.r, v, z.method.as_str())),
            None => text.push_str(&format!(
                "zcl_{}: {}..{} [{}]\n",
                z.r,
                z.lower,
                z.upper,
                z.method.as_str()
            )),
        }
    }
    let comparison = outcome.report.as_ref().map(|rep| {
        json!({
            "p_at_one": rep.p_at_one(),
            "cl": outcome.cl.value,
            "equal": rep.verdict == Verdict::RationalFormDetected && rep.p_at_one() == outcome.cl.value as i64,
        })
    });
    match &outcome.report {
        Some(rep) => {
            text.push_str(&rep.summary());
            text.push('\n');
            if rep.verdict == Verdict::RationalFormDetected {
                text.push_str(&format!("P(1) = {}, cl(A) = {}\n", rep.p_at_one(), outcome.cl.value));
            }
        }
        None => text.push_str("some entries are bounds only; no sequence to analyze\n"),
    }
    let exit = if outcome.is_conclusive() {
        EXIT_OK
    } else {
        EXIT_INCONCLUSIVE
    };
    Ok(Outcome {
        result: json!({
            "kind": "series",
            "name": a.name(),
            "rmax": rmax,
            "cl": outcome.cl.value,
            "entries": entries,
            "sequence": outcome.sequence.as_ref().map(|s| json!({"offset": s.offset, "values": s.values})),
            "report": outcome.report.as_ref().map(report_json),
            "comparison": comparison,
        }),
        text,
        exit,
        digest: Some(l.digest),
        warnings: l.warnings,
    })
}

fn analyze(seq: &[i64], offset: usize, min_run: usize) -> Result<Outcome, CliError> {
    if min_run < 2 {
        return Err(CliError::Usage(format!("--min-run must be at least 2, got {min_run}")));
    }
    let t = IntSequence::new(offset, seq.to_vec());
    let rep = analyze_sequence(&t, min_run)?;
    let canonical = format!(
        "{}@{}",
        seq.iter().map(i64::to_string).collect::<Vec<_>>().join(","),
        offset
    );
    let digest = format!("sha256:{}", hex::encode(Sha256::digest(canonical.as_bytes())));
    let mut text = format!("{}\n", rep.summary());
    if rep.verdict == Verdict::RationalFormDetected {
        text.push_str(&format!(
            "a = {}, d = {}\nP(x) = {}\nP(1) = {}\n",
            rep.a,
            rep.d,
            format_poly(&rep.p_coeffs),
            rep.p_at_one()
        ));
    }
    let mut result = report_json(&rep);
    result["kind"] = json!("analyze");
    result["offset"] = json!(offset);
    result["values"] = json!(seq);
    Ok(Outcome {
        result,
        text,
        exit: if rep.verdict == Verdict::RationalFormDetected {
            EXIT_OK
        } else {
            EXIT_INCONCLUSIVE
        },
        digest: Some(digest),
        warnings: Vec::new(),
    })
}

fn tensor(alg: &str, r: usize, out: &PathBuf, ceiling: usize) -> Result<Outcome, CliError> {
    let l = load(alg)?;
    let a = &l.algebra;
    let power = tensor_power(a, r, ceiling).map_err(|source| CliError::Algebra {
        alg: alg.to_string(),
        source,
    })?;
    let file = AlgebraFile::from_presentation(&power.to_presentation());
    std::fs::write(out, file.to_json() + "\n").map_err(|e| CliError::Io {
        path: out.display().to_string(),
        message: e.to_string(),
    })?;
    Ok(Outcome {
        result: json!({
            "kind": "tensor",
            "name": power.name(),
            "r": r,
            "dim": power.dim(),
            "out": out.display().to_string(),
            "output_digest": file.digest(),
        }),
        text: format!("wrote {} (dim {}) to {}\n", power.name(), power.dim(), out.display()),
        exit: EXIT_OK,
        digest: Some(l.digest),
        warnings: l.warnings,
    })
}

fn list_builtins() -> Outcome {
    let entries: Vec<Value> = CATALOG
        .iter()
        .map(|(name, description)| json!({"name": name, "description": description}))
        .collect();
    let text = CATALOG
        .iter()
        .map(|(name, description)| format!("builtin:{name:<16} {description}\n"))
        .collect();
    Outcome {
        result: json!({"kind": "builtins", "entries": entries}),
        text,
        exit: EXIT_OK,
        digest: None,
        warnings: Vec::new(),
    }
}
