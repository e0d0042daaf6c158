//! Command-line front end.
//!
//! Exit codes: 0 certified or clean, 1 hypotheses unsatisfied or no
//! applicable theorem, 2 soundness violation (or equality not attained),
//! 3 input error. Codes 0 to 2 always leave a report at `--output`.

pub mod format;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{Map, Value};

use crate::bounds::{Theorem, DEFAULT_TOL};
use crate::certify::{self, BoundCertificate, Instance, Status};
use crate::error::{Error, Result};
use crate::generators::{self, FuzzConfig, Generated};
use crate::linalg::{random_frame, OrthonormalFrame};

pub const EXIT_OK: i32 = 0;
pub const EXIT_UNSATISFIED: i32 = 1;
pub const EXIT_VIOLATION: i32 = 2;
pub const EXIT_INPUT: i32 = 3;

/// Tolerance on `|ratio - bound|` for the equality command.
const EQUALITY_TOL: f64 = 1e-9;

#[derive(Debug, Parser)]
#[command(name = "revtri", version, about = "Certify and stress-test reverse triangle inequality bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Additive tolerance on hypothesis margins and the bound comparison.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Report file.
    #[arg(long)]
    output: PathBuf,
    /// Multiply every bound by this factor before comparing (fault injection).
    #[arg(long, hide = true, default_value_t = 1.0)]
    inject_defect: f64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Certify one instance file.
    Certify {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Rank every applicable theorem of a grid on one instance's family.
    Scan {
        #[arg(long)]
        input: PathBuf,
        /// JSON list of {"theorem": ..., "params": {...}} entries.
        #[arg(long)]
        grid: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Build a family attaining a theorem's equality case.
    Equality {
        #[arg(long)]
        theorem: Theorem,
        /// Parameter as key=value or key=v1,v2,...; `m=<k>` sets the frame size of cor8.
        #[arg(long = "param", value_name = "KEY=VALUE")]
        params: Vec<String>,
        /// Comma-separated norms of the vectors to build.
        #[arg(long, value_delimiter = ',', required = true)]
        norms: Vec<f64>,
        /// Ambient dimension; defaults to the frame size plus one.
        #[arg(long)]
        dim: Option<usize>,
        /// Draw a random frame from this seed instead of the standard basis.
        #[arg(long)]
        seed: Option<u64>,
        /// Instance file; the report goes to `<output>.report`.
        #[command(flatten)]
        common: Common,
    },
    /// Randomized search for soundness violations.
    Fuzz {
        #[arg(long)]
        theorem: Theorem,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        /// Largest ambient dimension drawn.
        #[arg(long, default_value_t = 8)]
        dim: usize,
        /// Largest family size drawn.
        #[arg(long, default_value_t = 6)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        common: Common,
    },
}

/// Parses `args` (program name first), runs the command and returns its exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INPUT
        }
    }
}

fn dispatch(command: Command) -> Result<i32> {
    match command {
        Command::Certify { input, common } => cmd_certify(&input, &common),
        Command::Scan { input, grid, common } => cmd_scan(&input, &grid, &common),
        Command::Equality { theorem, params, norms, dim, seed, common } => {
            cmd_equality(theorem, &params, &norms, dim, seed, &common)
        }
        Command::Fuzz { theorem, trials, dim, n, seed, common } => cmd_fuzz(theorem, trials, dim, n, seed, &common),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::invalid(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::invalid(format!("cannot write {}: {e}", path.display())))
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn check_tol(tol: f64) -> Result<()> {
    if tol.is_finite() && tol >= 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("--tol must be finite and nonnegative, got {tol}")))
    }
}

fn status_code(status: Status) -> i32 {
    match status {
        Status::Certified => EXIT_OK,
        Status::HypothesesUnsatisfied => EXIT_UNSATISFIED,
        Status::SoundnessViolation => EXIT_VIOLATION,
    }
}

fn evaluate(instance: &Instance, common: &Common) -> Result<BoundCertificate> {
    certify::evaluate_with_bound_scale(
        &instance.family,
        &instance.frame,
        &instance.params,
        instance.theorem,
        common.tol,
        common.inject_defect,
    )
}

fn cmd_certify(input: &Path, common: &Common) -> Result<i32> {
    check_tol(common.tol)?;
    let instance = format::parse_instance(&read(input)?)?;
    let cert = evaluate(&instance, common)?;
    write(&common.output, &format::certificates_report(std::slice::from_ref(&cert), common.tol))?;
    println!("{}", format::summary_line(&cert));
    for m in cert.hypothesis.violations() {
        let frame = m.frame_index.map_or_else(String::new, |t| format!(" frame {t}"));
        println!("  vector {}{frame} {}: margin {:e}", m.vector_index, m.condition.id(), m.margin);
    }
    Ok(status_code(cert.status()))
}

fn cmd_scan(input: &Path, grid: &Path, common: &Common) -> Result<i32> {
    check_tol(common.tol)?;
    let instance = format::parse_instance(&read(input)?)?;
    let grid = format::parse_grid(&read(grid)?)?;
    let certs = certify::tightness_scan_with_bound_scale(
        &instance.family,
        &instance.frame,
        &grid,
        common.tol,
        common.inject_defect,
    );
    write(&common.output, &format::certificates_report(&certs, common.tol))?;
    for (rank, cert) in certs.iter().enumerate() {
        println!("{}. {}", rank + 1, format::summary_line(cert));
    }
    if certs.is_empty() {
        println!("no applicable theorem");
        return Ok(EXIT_UNSATISFIED);
    }
    Ok(certs.iter().map(|c| status_code(c.status())).max().unwrap_or(EXIT_OK))
}

fn parse_param_flags(flags: &[String]) -> Result<Map<String, Value>> {
    let mut map = Map::new();
    for flag in flags {
        let (key, value) =
            flag.split_once('=').ok_or_else(|| Error::invalid(format!("--param expects key=value, got {flag:?}")))?;
        let values = value
            .split(',')
            .map(|v| {
                v.trim().parse::<f64>().map_err(|_| Error::invalid(format!("--param {key}: {v:?} is not a number")))
            })
            .collect::<Result<Vec<f64>>>()?;
        let json = |x: f64| {
            serde_json::Number::from_f64(x)
                .map(Value::Number)
                .ok_or_else(|| Error::invalid(format!("--param {key}: non-finite value")))
        };
        let v = if values.len() == 1 {
            json(values[0])?
        } else {
            Value::Array(values.into_iter().map(json).collect::<Result<_>>()?)
        };
        if map.insert(key.to_string(), v).is_some() {
            return Err(Error::invalid(format!("--param {key} given twice")));
        }
    }
    Ok(map)
}

fn cmd_equality(
    theorem: Theorem,
    param_flags: &[String],
    norms: &[f64],
    dim: Option<usize>,
    seed: Option<u64>,
    common: &Common,
) -> Result<i32> {
    check_tol(common.tol)?;
    let mut map = parse_param_flags(param_flags)?;
    let frame_size = match map.remove("m") {
        Some(v) if theorem == Theorem::Cor8 => v
            .as_f64()
            .filter(|m| *m >= 1.0 && m.fract() == 0.0)
            .ok_or_else(|| Error::invalid(format!("--param m must be a positive integer, got {v}")))?
            as usize,
        Some(_) => return Err(Error::invalid(format!("--param m is only used by cor8, not {theorem}"))),
        None => 1,
    };
    let params = format::parse_params(theorem, &map)?;
    let m = params.frame_len().unwrap_or(frame_size);
    let dim = dim.unwrap_or(m + 1);
    let frame = match seed {
        Some(seed) => random_frame(dim, m, &mut ChaCha8Rng::seed_from_u64(seed))?,
        None => OrthonormalFrame::standard(dim, m)?,
    };
    let family = match generators::equality_family(theorem, &params, &frame, norms)? {
        Generated::Family(f) => f,
        Generated::Infeasible(report) => return Err(Error::invalid(report.reason)),
    };
    let instance = Instance { theorem, params, frame, family };
    let cert = evaluate(&instance, common)?;
    write(&common.output, &format::instance_json(&instance))?;
    write(
        &with_suffix(&common.output, ".report"),
        &format::certificates_report(std::slice::from_ref(&cert), common.tol),
    )?;
    println!("{}", format::summary_line(&cert));
    let attained = cert.ratio.is_some_and(|r| (r - cert.bound).abs() <= EQUALITY_TOL);
    Ok(match cert.status() {
        Status::Certified if cert.equality_case && attained => EXIT_OK,
        Status::Certified => {
            println!("equality not attained");
            EXIT_VIOLATION
        }
        other => status_code(other),
    })
}

fn cmd_fuzz(theorem: Theorem, trials: usize, d_max: usize, n_max: usize, seed: u64, common: &Common) -> Result<i32> {
    check_tol(common.tol)?;
    let cfg = FuzzConfig {
        tol: common.tol,
        bound_scale: common.inject_defect,
        ..FuzzConfig::new(theorem, trials, d_max, n_max, seed)
    };
    let summary = generators::fuzz_falsify(&cfg)?;
    write(&common.output, &format::fuzz_report(&summary, seed, d_max, n_max, common.tol))?;
    println!(
        "{theorem}: {} trials, {} hypothesis hits, {} violations",
        summary.trials_run, summary.hypothesis_hits, summary.violation_count
    );
    if let Some(first) = summary.violations.first() {
        let replay = with_suffix(&common.output, ".replay.json");
        write(&replay, &format::instance_json(&first.instance))?;
        println!("replay: {}", replay.display());
        return Ok(EXIT_VIOLATION);
    }
    Ok(EXIT_OK)
}
