//! Command-line driver for the `ncsym` library.
//!
//! Four verbs over the built-in instances:
//!
//! * `classify`: print the coefficient tower summary and the order of the
//!   composite twist.
//! * `hilbert`: write the per-degree dimension table as CSV, flagging any
//!   departure from the closed forms.
//! * `verify`: run the named invariant suites and write a JSON report.
//! * `probe`: run the ideal-saturation or center probe and write its
//!   certificate as JSON.
//!
//! Options come from an optional `key = value` config file overridden by
//! flags. All sampling is seeded: the same seed and config produce byte
//! identical CSV and JSON. Timings go to stderr so they never perturb the
//! outputs. Exit codes: 0 success, 1 verification failure, 2 usage or
//! config error.

use clap::{Args, Parser, Subcommand};
use ncsym::field::{AlgebraicClass, SigmaOrder};
use ncsym::instances::{instance, INSTANCE_KEYS};
use ncsym::loc::{center_probe, ideal_saturation_probe, SaturationOutcome, SaturationProbe};
use ncsym::sample::{derive_seed, Sampler};
use ncsym::sym::g_chain;
use ncsym::verify::{
    default_nmax, expected_hilbert, hilbert_table, run_suite, SuiteParams, SuiteReport,
    SUITE_NAMES,
};
use ncsym::FieldTower;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "ncsym", version, about = "Exact computations in an index-graded algebra family")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the instance summary: subfields, involutions, twist order
    Classify(CommonArgs),
    /// Write the per-degree dimension table as CSV
    Hilbert(CommonArgs),
    /// Run the invariant suites and write a JSON report
    Verify(CommonArgs),
    /// Run a structural probe and write its certificate as JSON
    Probe(ProbeArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Config file with `key = value` lines; flags override it
    #[arg(long)]
    config: Option<PathBuf>,
    /// Instance key (biquadratic, d4-quartic, rational-function)
    #[arg(long)]
    instance: Option<String>,
    /// Largest certified degree (at least 4)
    #[arg(long)]
    nmax: Option<i64>,
    /// Base seed for all sampling
    #[arg(long)]
    seed: Option<u64>,
    /// Output path; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    /// Restrict `verify` to one suite
    #[arg(long)]
    suite: Option<String>,
}

#[derive(Args)]
struct ProbeArgs {
    /// Probe kind: saturation or center
    kind: String,
    #[command(flatten)]
    common: CommonArgs,
    /// Conjugation depth of the saturation probe
    #[arg(long)]
    depth: Option<u32>,
    /// Level bound of the saturation probe window
    #[arg(long)]
    level: Option<u32>,
    /// Filtration level for the center probe
    #[arg(long)]
    center_level: Option<u32>,
}

/// The config file mirror of the flags.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    instance: Option<String>,
    nmax: Option<i64>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    suite: Option<String>,
    depth: Option<u32>,
    level: Option<u32>,
    center_level: Option<u32>,
}

/// Flags merged over the file, with defaults applied last.
struct Config {
    tower: FieldTower,
    key: String,
    nmax: i64,
    seed: u64,
    out: Option<PathBuf>,
    suite: Option<String>,
    depth: u32,
    level: u32,
    center_level: u32,
}

/// A usage or config problem; reported on stderr with exit code 2.
struct UsageError(String);

impl From<std::io::Error> for UsageError {
    fn from(e: std::io::Error) -> Self {
        UsageError(format!("io error: {e}"))
    }
}

fn load_file_config(path: &Option<PathBuf>) -> Result<FileConfig, UsageError> {
    let Some(path) = path else {
        return Ok(FileConfig::default());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| UsageError(format!("cannot read config {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| UsageError(format!("bad config {}: {e}", path.display())))
}

fn resolve(common: &CommonArgs, probe: Option<&ProbeArgs>) -> Result<Config, UsageError> {
    let file = load_file_config(&common.config)?;
    let key = common
        .instance
        .clone()
        .or(file.instance)
        .unwrap_or_else(|| "biquadratic".to_owned());
    let tower = instance(&key).map_err(|e| {
        UsageError(format!("{e}; known keys: {}", INSTANCE_KEYS.join(", ")))
    })?;
    let nmax = common.nmax.or(file.nmax).unwrap_or_else(|| default_nmax(&tower));
    if nmax < 4 {
        return Err(UsageError(format!(
            "nmax must be at least 4 to certify anything useful, got {nmax}"
        )));
    }
    Ok(Config {
        tower,
        key,
        nmax,
        seed: common.seed.or(file.seed).unwrap_or(0),
        out: common.out.clone().or(file.out),
        suite: common.suite.clone().or(file.suite),
        depth: probe.and_then(|p| p.depth).or(file.depth).unwrap_or(4),
        level: probe.and_then(|p| p.level).or(file.level).unwrap_or(6),
        center_level: probe
            .and_then(|p| p.center_level)
            .or(file.center_level)
            .unwrap_or(0),
    })
}

fn write_out(out: &Option<PathBuf>, content: &str) -> Result<(), UsageError> {
    match out {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| UsageError(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Classify(args) => resolve(args, None).and_then(cmd_classify),
        Command::Hilbert(args) => resolve(args, None).and_then(cmd_hilbert),
        Command::Verify(args) => resolve(args, None).and_then(cmd_verify),
        Command::Probe(args) => resolve(&args.common, Some(args)).and_then(|cfg| cmd_probe(cfg, &args.kind)),
    };
    match result {
        Ok(code) => code,
        Err(UsageError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn cmd_classify(cfg: Config) -> Result<ExitCode, UsageError> {
    let tower = &cfg.tower;
    let mut text = String::new();
    let _ = writeln!(text, "instance: {}", cfg.key);
    match tower.dim_over_q() {
        Some(d) => {
            let _ = writeln!(text, "coefficients: number field of degree {d} over the rationals");
        }
        None => {
            let _ = writeln!(text, "coefficients: rational function field over the rationals");
        }
    }
    for i in [0i64, 1] {
        let _ = writeln!(
            text,
            "subfield K{i}: fixed field of tau{i}, anti-invariant w{i} = {}",
            tower.w(i)
        );
    }
    for gen in tower.generators() {
        let _ = writeln!(
            text,
            "generator {gen}: tau0 -> {}, tau1 -> {}, sigma -> {}",
            tower.tau(0, &gen),
            tower.tau(1, &gen),
            tower.sigma(&gen)
        );
    }
    match tower.sigma_order(16) {
        SigmaOrder::Finite(k) => {
            let _ = writeln!(text, "twist order: |sigma| = {k}");
        }
        SigmaOrder::CertifiedInfinite { certificate } => {
            let _ = writeln!(text, "twist order: infinite ({certificate})");
        }
        SigmaOrder::ExceedsBound { bound } => {
            let _ = writeln!(text, "twist order: exceeds the search bound {bound}");
        }
    }
    match tower.classify(16) {
        AlgebraicClass::Algebraic { sigma_order } => {
            let _ = writeln!(text, "label: Algebraic (sigma order {sigma_order})");
        }
        AlgebraicClass::NonAlgebraic { certificate } => {
            let _ = writeln!(text, "label: NonAlgebraic ({certificate})");
        }
        AlgebraicClass::Undetermined { bound } => {
            let _ = writeln!(text, "label: Undetermined up to order {bound}");
        }
    }
    write_out(&cfg.out, &text)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_hilbert(cfg: Config) -> Result<ExitCode, UsageError> {
    let started = Instant::now();
    let rows = match hilbert_table(&cfg.tower, cfg.nmax) {
        Ok(rows) => rows,
        Err(e) => {
            eprintln!("certification failed: {e}");
            return Ok(ExitCode::from(1));
        }
    };
    let mut csv = String::from("n,dim_tensor,dim_relations,dim_quotient,dim_b,dim_gr_loc\n");
    let mut mismatches = 0u32;
    for row in &rows {
        let gr = row.dim_gr_loc.map(|d| d.to_string()).unwrap_or_default();
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{gr}",
            row.n, row.dim_tensor, row.dim_relations, row.dim_quotient, row.dim_b
        );
        let (t, r, a, b) = expected_hilbert(row.n);
        let gr_expected = if row.n == 0 { 1 } else { 2 };
        let gr_ok = row.dim_gr_loc.map(|d| d == gr_expected).unwrap_or(true);
        if (row.dim_tensor, row.dim_relations, row.dim_quotient, row.dim_b) != (t, r, a, b) || !gr_ok
        {
            mismatches += 1;
            eprintln!(
                "dimension mismatch at n = {}: got ({}, {}, {}, {}), expected ({t}, {r}, {a}, {b})",
                row.n, row.dim_tensor, row.dim_relations, row.dim_quotient, row.dim_b
            );
        }
    }
    eprintln!(
        "hilbert table for {} to degree {} in {:.3}s",
        cfg.key,
        cfg.nmax,
        started.elapsed().as_secs_f64()
    );
    write_out(&cfg.out, &csv)?;
    Ok(if mismatches == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

#[derive(Serialize)]
struct VerifyReport {
    instance: String,
    nmax: i64,
    seed: u64,
    all_passed: bool,
    suites: Vec<SuiteReport>,
}

fn cmd_verify(cfg: Config) -> Result<ExitCode, UsageError> {
    let names: Vec<&str> = match &cfg.suite {
        Some(name) => {
            if !SUITE_NAMES.contains(&name.as_str()) {
                return Err(UsageError(format!(
                    "unknown suite `{name}`; known suites: {}",
                    SUITE_NAMES.join(", ")
                )));
            }
            vec![name.as_str()]
        }
        None => SUITE_NAMES.to_vec(),
    };
    let params = SuiteParams {
        nmax: cfg.nmax,
        seed: cfg.seed,
    };
    let mut suites = Vec::with_capacity(names.len());
    for name in names {
        let started = Instant::now();
        let report = run_suite(name, &cfg.tower, &params).expect("name checked against the list");
        eprintln!(
            "suite {name} on {}: {} passed, {} failed in {:.3}s",
            cfg.key,
            report.checks_passed,
            report.checks_failed,
            started.elapsed().as_secs_f64()
        );
        suites.push(report);
    }
    let all_passed = suites.iter().all(SuiteReport::passed);
    let report = VerifyReport {
        instance: cfg.key.clone(),
        nmax: cfg.nmax,
        seed: cfg.seed,
        all_passed,
        suites,
    };
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    write_out(&cfg.out, &format!("{json}\n"))?;
    Ok(if all_passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

#[derive(Serialize)]
struct ProbeReport<P: Serialize, C: Serialize> {
    instance: String,
    probe: String,
    parameters: P,
    verdict: String,
    certificate: C,
}

#[derive(Serialize)]
struct SaturationParams {
    depth: u32,
    level_bound: u32,
    seed: u64,
    samples: u32,
}

#[derive(Serialize)]
struct SaturationRun {
    element: String,
    #[serde(flatten)]
    probe: SaturationProbe,
}

const SATURATION_SAMPLES: u32 = 3;

fn cmd_probe(cfg: Config, kind: &str) -> Result<ExitCode, UsageError> {
    match kind {
        "saturation" => {
            let tower = &cfg.tower;
            let mut sampler = Sampler::new(
                tower,
                derive_seed(cfg.seed, &["probe", "saturation", tower.key()]),
            );
            let mut elements = vec![g_chain(tower, 0, 1)];
            for _ in 0..SATURATION_SAMPLES {
                elements.push(sampler.nonzero_sym(0, 2));
            }
            let started = Instant::now();
            let mut runs = Vec::with_capacity(elements.len());
            let mut all_reached = true;
            for x in &elements {
                let probe = ideal_saturation_probe(x, cfg.depth, cfg.level)
                    .map_err(|e| UsageError(format!("saturation probe rejected an input: {e}")))?;
                all_reached &= matches!(probe.outcome, SaturationOutcome::ReachedGPower(_));
                runs.push(SaturationRun {
                    element: x.to_string(),
                    probe,
                });
            }
            eprintln!(
                "saturation probe on {}: {} elements in {:.3}s",
                cfg.key,
                runs.len(),
                started.elapsed().as_secs_f64()
            );
            let verdict = if all_reached {
                "every sampled ideal reaches a g power".to_owned()
            } else {
                "inconclusive for at least one sampled element".to_owned()
            };
            let report = ProbeReport {
                instance: cfg.key.clone(),
                probe: "saturation".to_owned(),
                parameters: SaturationParams {
                    depth: cfg.depth,
                    level_bound: cfg.level,
                    seed: cfg.seed,
                    samples: SATURATION_SAMPLES,
                },
                verdict,
                certificate: runs,
            };
            let json = serde_json::to_string_pretty(&report).expect("report serializes");
            write_out(&cfg.out, &format!("{json}\n"))?;
            Ok(ExitCode::SUCCESS)
        }
        "center" => {
            let started = Instant::now();
            let center = center_probe(&cfg.tower, cfg.center_level)
                .map_err(|e| UsageError(format!("center probe not applicable: {e}")))?;
            eprintln!(
                "center probe on {} at level {}: {:.3}s",
                cfg.key,
                cfg.center_level,
                started.elapsed().as_secs_f64()
            );
            let report = ProbeReport {
                instance: cfg.key.clone(),
                probe: "center".to_owned(),
                parameters: serde_json::json!({ "level": cfg.center_level }),
                verdict: format!(
                    "commuting space of dimension {} over the rationals",
                    center.dim_over_q
                ),
                certificate: center,
            };
            let json = serde_json::to_string_pretty(&report).expect("report serializes");
            write_out(&cfg.out, &format!("{json}\n"))?;
            Ok(ExitCode::SUCCESS)
        }
        other => Err(UsageError(format!(
            "unknown probe `{other}`; known probes: saturation, center"
        ))),
    }
}
