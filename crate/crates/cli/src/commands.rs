use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use plopen::degree::{degree, homotopy_degree_constant, uniform_samples};
use plopen::generators::{generate, GenKind, GenSpec};
use plopen::linalg::parse_rational;
use plopen::openness::{branch_set, check_conditions, openness_oracle, revalidate_failure, OracleConfig};
use plopen::whyburn::{certify_ball_map, BallMapInstance, Certification};
use plopen::{Error, PLMap, Vector};
use rayon::prelude::*;
use serde_json::json;

use crate::exit;
use crate::format::{FormatError, InstanceFile, Metadata};
use crate::report::{self, digest, Report};

#[derive(Debug, Parser)]
#[command(name = "plopen", version, about = "Exact analysis of piecewise-affine maps")]
pub struct Cli {
    /// Add an inexact decimal rendering of the results.
    #[arg(long, global = true)]
    pub approx: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct OracleArgs {
    /// Random interior sample points, on top of all face barycenters.
    #[arg(long, default_value_t = 20)]
    pub oracle_points: usize,
    /// Directions probed per sample; 0 skips the oracle.
    #[arg(long, default_value_t = 64)]
    pub oracle_dirs: usize,
    #[arg(long, env = "PLOPEN_SEED", default_value_t = 0)]
    pub seed: u64,
}

impl OracleArgs {
    fn config(&self) -> OracleConfig {
        OracleConfig {
            num_points: self.oracle_points,
            num_directions: self.oracle_dirs,
            seed: self.seed,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and validate an instance file.
    Validate { path: PathBuf },
    /// Decide openness with every exact condition and the sampling oracle.
    CheckOpen {
        #[arg(required_unless_present = "all", conflicts_with = "all")]
        path: Option<PathBuf>,
        /// Check every `*.json` file in a directory.
        #[arg(long, value_name = "DIR")]
        all: Option<PathBuf>,
        #[command(flatten)]
        oracle: OracleArgs,
    },
    /// Brouwer degree with a certificate.
    Degree {
        path: PathBuf,
        /// Query point, comma separated rationals.
        #[arg(long, allow_hyphen_values = true)]
        at: String,
    },
    /// Exact preimage of a point.
    Fibers {
        path: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        at: String,
    },
    BranchSet { path: PathBuf },
    /// Component graph of the nonsingular cells.
    Graph { path: PathBuf },
    /// Certify a ball map as a homeomorphism or reject it with a witness.
    Whyburn { path: PathBuf },
    /// Degree along the straight-line homotopy from f to g.
    Homotopy {
        f: PathBuf,
        g: PathBuf,
        /// Start of the target path.
        #[arg(long, allow_hyphen_values = true)]
        gamma: String,
        /// End of the target path; defaults to the start.
        #[arg(long, allow_hyphen_values = true)]
        gamma_end: Option<String>,
        #[arg(long, default_value_t = 33)]
        samples: usize,
    },
    /// Generate an instance file.
    Gen {
        #[arg(long)]
        kind: GenKind,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long)]
        resolution: Option<usize>,
        #[arg(long, env = "PLOPEN_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 64)]
        denominator: u64,
        #[arg(long, value_name = "LABEL")]
        label: Vec<String>,
        /// Write the instance here and print a report instead.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Sampling openness oracle with re-validated failure witnesses.
    OracleOpen {
        path: PathBuf,
        #[command(flatten)]
        oracle: OracleArgs,
    },
}

/// What a command prints on stdout.
#[derive(Debug, Clone, PartialEq)]
pub enum Output {
    Report(Report),
    Instance(String),
}

impl Output {
    pub fn exit_code(&self) -> i32 {
        match self {
            Output::Report(r) => r.exit_code,
            Output::Instance(_) => exit::OK,
        }
    }

    pub fn render(&self) -> String {
        match self {
            Output::Report(r) => r.to_json(),
            Output::Instance(s) => s.clone(),
        }
    }
}

fn error_code(e: &Error) -> i32 {
    match e {
        Error::OnBoundaryImage { .. } | Error::HomotopyHypothesis { .. } => exit::DEGREE_UNDEFINED,
        Error::PointDimension { .. } | Error::InvalidSpec(_) => exit::MALFORMED,
        Error::NotABall(_) | Error::DomainMismatch => exit::INVALID,
        _ => exit::FAILURE,
    }
}

fn error_report(command: &str, digest: String, message: String, code: i32) -> Report {
    Report::new(command, digest, json!({ "error": message }), code)
}

pub fn parse_point(s: &str) -> Result<Vector, String> {
    s.split(',')
        .map(|p| parse_rational(p.trim()).map_err(|e| e.to_string()))
        .collect()
}

fn load(path: &Path) -> Result<(PLMap, String), FormatError> {
    let (file, bytes) = InstanceFile::read(path)?;
    Ok((file.to_map()?, digest(&bytes)))
}

/// Digest of the raw bytes, or of the path when the file is unreadable.
fn raw_digest(path: &Path) -> String {
    fs::read(path).map(|b| digest(&b)).unwrap_or_default()
}

/// Loads one instance and applies `body`, turning every failure into a
/// report with the matching exit code.
fn with_map(command: &str, path: &Path, body: impl FnOnce(&PLMap, String) -> Report) -> Report {
    match load(path) {
        Ok((f, d)) => body(&f, d),
        Err(e) => {
            let code = e.exit_code();
            let mut r = error_report(command, raw_digest(path), e.to_string(), code);
            if let FormatError::Invalid(vs) = &e {
                r.results = json!({ "valid": false, "violations": vs });
            }
            r
        }
    }
}

fn check_open(f: &PLMap, d: String, oracle: &OracleArgs) -> Report {
    let cfg = oracle.config();
    let v = check_conditions(f, (cfg.num_directions > 0).then_some(&cfg));
    let code = if !v.all_agree {
        exit::DISAGREEMENT
    } else if v.is_open() {
        exit::OK
    } else {
        exit::NEGATIVE
    };
    Report::new("check-open", d, report::verdict(&v), code)
}

fn check_open_all(dir: &Path, oracle: &OracleArgs) -> Report {
    let mut files: Vec<PathBuf> = match fs::read_dir(dir) {
        Ok(entries) => entries
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect(),
        Err(e) => {
            let msg = format!("cannot read {}: {e}", dir.display());
            return error_report("check-open", String::new(), msg, exit::MALFORMED);
        }
    };
    files.sort();
    let reports: Vec<Report> = files
        .par_iter()
        .map(|p| with_map("check-open", p, |f, d| check_open(f, d, oracle)))
        .collect();
    let mut combined = String::new();
    let mut entries = Vec::with_capacity(files.len());
    for (p, r) in files.iter().zip(&reports) {
        combined.push_str(&r.instance_digest);
        entries.push(json!({
            "file": p.file_name().map(|n| n.to_string_lossy().into_owned()),
            "instance_digest": r.instance_digest,
            "exit_code": r.exit_code,
            "results": r.results,
        }));
    }
    let count = |c: i32| reports.iter().filter(|r| r.exit_code == c).count();
    let code = reports.iter().map(|r| r.exit_code).max().unwrap_or(exit::OK);
    let results = json!({
        "summary": {
            "instances": reports.len(),
            "open": count(exit::OK),
            "not_open": count(exit::NEGATIVE),
            "invalid": count(exit::INVALID) + count(exit::MALFORMED),
            "disagreements": count(exit::DISAGREEMENT),
        },
        "instances": entries,
    });
    Report::new("check-open", digest(combined.as_bytes()), results, code)
}

fn at_point(command: &str, d: String, at: &str) -> Result<Vector, Report> {
    parse_point(at).map_err(|m| error_report(command, d, m, exit::MALFORMED))
}

fn run_degree(f: &PLMap, d: String, at: &str) -> Report {
    let y = match at_point("degree", d.clone(), at) {
        Ok(y) => y,
        Err(r) => return r,
    };
    match degree(f, &y) {
        Ok(c) => Report::new("degree", d, report::certificate(&c), exit::OK),
        Err(e) => error_report("degree", d, e.to_string(), error_code(&e)),
    }
}

fn run_fibers(f: &PLMap, d: String, at: &str) -> Report {
    let y = match at_point("fibers", d.clone(), at) {
        Ok(y) => y,
        Err(r) => return r,
    };
    match f.fiber(&y) {
        Ok(fib) => Report::new("fibers", d, report::fiber(&fib), exit::OK),
        Err(e) => error_report("fibers", d, e.to_string(), error_code(&e)),
    }
}

fn run_whyburn(f: &PLMap, d: String) -> Report {
    let outcome = BallMapInstance::new(f.clone()).and_then(|inst| certify_ball_map(&inst));
    match outcome {
        Ok(c) => {
            let code = match c {
                Certification::Certified { .. } => exit::OK,
                Certification::Rejected(_) => exit::NEGATIVE,
            };
            Report::new("whyburn", d, report::certification(&c), code)
        }
        Err(e) => error_report("whyburn", d, e.to_string(), error_code(&e)),
    }
}

fn run_homotopy(f: &Path, g: &Path, gamma: &str, gamma_end: Option<&str>, samples: usize) -> Report {
    let (f, df) = match load(f) {
        Ok(x) => x,
        Err(e) => return error_report("homotopy", raw_digest(f), e.to_string(), e.exit_code()),
    };
    let (g, dg) = match load(g) {
        Ok(x) => x,
        Err(e) => return error_report("homotopy", raw_digest(g), e.to_string(), e.exit_code()),
    };
    let d = digest(format!("{df}{dg}").as_bytes());
    let start = match at_point("homotopy", d.clone(), gamma) {
        Ok(y) => y,
        Err(r) => return r,
    };
    let end = match gamma_end.map(|s| at_point("homotopy", d.clone(), s)).transpose() {
        Ok(y) => y.unwrap_or_else(|| start.clone()),
        Err(r) => return r,
    };
    match homotopy_degree_constant(&f, &g, (&start, &end), &uniform_samples(samples)) {
        Ok(h) => {
            let code = if h.constant { exit::OK } else { exit::NEGATIVE };
            Report::new("homotopy", d, report::homotopy(&h, (&start, &end)), code)
        }
        Err(e) => {
            let mut r = error_report("homotopy", d, e.to_string(), error_code(&e));
            if let Error::HomotopyHypothesis { t, face } = &e {
                r.results["violation"] = json!({ "t": report::q(t), "face": report::simplex(face) });
            }
            r
        }
    }
}

fn run_oracle(f: &PLMap, d: String, oracle: &OracleArgs) -> Report {
    let r = openness_oracle(f, &oracle.config());
    let revalidated: Vec<bool> = r.failures.iter().map(|w| revalidate_failure(f, w)).collect();
    let code = if r.open_at_all_samples() {
        exit::OK
    } else {
        exit::NEGATIVE
    };
    Report::new("oracle-open", d, report::oracle(&r, &revalidated), code)
}

#[allow(clippy::too_many_arguments)]
fn run_gen(
    kind: GenKind,
    dim: Option<usize>,
    resolution: Option<usize>,
    seed: u64,
    denominator: u64,
    labels: &[String],
    out: Option<&Path>,
) -> Output {
    let dim = dim.or(kind.fixed_dim()).unwrap_or(2);
    let spec = GenSpec {
        kind,
        dim,
        resolution,
        seed,
        denominator,
    };
    let f = match generate(&spec) {
        Ok(f) => f,
        Err(e) => return Output::Report(error_report("gen", String::new(), e.to_string(), error_code(&e))),
    };
    let metadata = Metadata {
        gen_spec: Some(spec),
        labels: labels.to_vec(),
    };
    let text = InstanceFile::from_map(&f, Some(metadata)).to_json();
    let Some(out) = out else {
        return Output::Instance(text);
    };
    let d = digest(text.as_bytes());
    match fs::write(out, &text) {
        Ok(()) => Output::Report(Report::new(
            "gen",
            d,
            json!({ "written": out.display().to_string(), "cells": f.domain().num_cells() }),
            exit::OK,
        )),
        Err(e) => Output::Report(error_report("gen", d, e.to_string(), exit::FAILURE)),
    }
}

pub fn run(cli: &Cli) -> Output {
    let report = match &cli.command {
        Command::Validate { path } => with_map("validate", path, |f, d| {
            let k = f.domain();
            let results = json!({
                "valid": true,
                "dim": k.dim(),
                "vertices": k.vertices().len(),
                "cells": k.num_cells(),
                "sign_profile": report::sign_profile(&f.sign_profile()),
            });
            Report::new("validate", d, results, exit::OK)
        }),
        Command::CheckOpen { path, all, oracle } => match (path, all) {
            (_, Some(dir)) => check_open_all(dir, oracle),
            (Some(p), None) => with_map("check-open", p, |f, d| check_open(f, d, oracle)),
            (None, None) => unreachable!("clap requires a path or --all"),
        },
        Command::Degree { path, at } => with_map("degree", path, |f, d| run_degree(f, d, at)),
        Command::Fibers { path, at } => with_map("fibers", path, |f, d| run_fibers(f, d, at)),
        Command::BranchSet { path } => with_map("branch-set", path, |f, d| {
            Report::new("branch-set", d, report::branch(&branch_set(f)), exit::OK)
        }),
        Command::Graph { path } => with_map("graph", path, |f, d| {
            Report::new("graph", d, report::graph(&f.component_graph()), exit::OK)
        }),
        Command::Whyburn { path } => with_map("whyburn", path, run_whyburn),
        Command::Homotopy {
            f,
            g,
            gamma,
            gamma_end,
            samples,
        } => run_homotopy(f, g, gamma, gamma_end.as_deref(), *samples),
        Command::Gen {
            kind,
            dim,
            resolution,
            seed,
            denominator,
            label,
            out,
        } => match run_gen(*kind, *dim, *resolution, *seed, *denominator, label, out.as_deref()) {
            Output::Report(r) => r,
            instance => return instance,
        },
        Command::OracleOpen { path, oracle } => {
            with_map("oracle-open", path, |f, d| run_oracle(f, d, oracle))
        }
    };
    Output::Report(if cli.approx { report.with_approx() } else { report })
}
