use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use exotic_core::audits::AuditContext;
use exotic_core::runner::{self, AUDITS};
use exotic_core::suite::{self, SuiteOptions, CRITERIA};
use exotic_core::{Error, RunConfig};

const SEED_ENV: &str = "EXOTIC_METRICS_SEED";

/// Exact distances and seeded property audits for hedgehog, cobweb and
/// related metric spaces.
#[derive(Debug, Parser)]
#[command(name = "exotic-metrics", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct SpaceArgs {
    /// Space kind: unit, cantor, discrete, hedgehog, cobweb, zcon, extremal, tower.
    #[arg(long)]
    space: Option<String>,

    /// Flat `key = value` config file.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Extra config entries, `key=value`; may be repeated.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the exact distance between two points.
    Dist {
        #[command(flatten)]
        space: SpaceArgs,

        /// Also print a route realising the distance.
        #[arg(long)]
        witness: bool,

        p: String,
        q: String,
    },
    /// Run one audit and write its JSON report.
    Audit {
        /// Audit name; see --list.
        #[arg(required_unless_present = "list")]
        name: Option<String>,

        #[command(flatten)]
        space: SpaceArgs,

        #[arg(long)]
        seed: Option<u64>,

        /// Number of samples (triples, pairs, trials or depth, by audit).
        #[arg(long)]
        samples: Option<u64>,

        #[arg(long, default_value_t = 1)]
        workers: usize,

        /// Report path; the report goes to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,

        /// List audit names and exit.
        #[arg(long)]
        list: bool,
    },
    /// Run the acceptance battery.
    Suite {
        #[arg(long)]
        seed: Option<u64>,

        #[arg(long, default_value_t = 1)]
        workers: usize,

        /// Write the full summary with every report as JSON.
        #[arg(long)]
        out: Option<PathBuf>,

        /// Print criterion identifiers without running anything.
        #[arg(long)]
        list: bool,

        /// Run only these criteria, e.g. `--only C1,C4`.
        #[arg(long, value_delimiter = ',')]
        only: Vec<String>,

        /// Add a corrupted distance table to the metric-axiom criterion.
        #[arg(long)]
        inject_corruption: bool,
    },
}

/// Failure with the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_) | Error::Config(_) | Error::NotApplicable(_) => 2,
            Error::Io(_) => 4,
            Error::KindMismatch { .. } | Error::OutOfRange { .. } | Error::InvalidPoint(_) | Error::NotAMetric(_) => 3,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

fn load_config(args: &SpaceArgs, seed: Option<u64>, samples: Option<u64>) -> Result<RunConfig, Failure> {
    let mut config = match &args.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::new(),
    };
    if let Some(kind) = &args.space {
        match config.get("kind") {
            Some(k) if k != kind => {
                return Err(usage(format!("--space {kind} conflicts with kind = {k} in the config")))
            }
            _ => config.set("kind", kind.clone())?,
        }
    }
    config.kind()?;
    for entry in &args.set {
        let (k, v) = entry
            .split_once('=')
            .ok_or_else(|| usage(format!("--set expects key=value, got {entry:?}")))?;
        config.set(k.trim(), v.trim())?;
    }
    if let Some(seed) = seed {
        config.set("seed", seed.to_string())?;
    }
    if let Some(n) = samples {
        config.set("samples", n.to_string())?;
    }
    Ok(config)
}

/// `--seed`, then the config, then the environment, then zero.
fn resolve_seed(flag: Option<u64>, config: Option<&RunConfig>) -> Result<u64, Failure> {
    if let Some(s) = flag {
        return Ok(s);
    }
    if let Some(s) = config.map(RunConfig::seed).transpose()?.flatten() {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| usage(format!("{SEED_ENV} must be a 64-bit unsigned integer, got {v:?}"))),
        Err(_) => Ok(0),
    }
}

/// Writes through a temporary file in the target directory, then renames.
fn write_atomic(path: &Path, contents: &str) -> Result<(), Failure> {
    let io = |e: std::io::Error| Failure {
        code: 4,
        message: format!("cannot write {}: {e}", path.display()),
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents.as_bytes()).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let mut stdout = std::io::stdout().lock();
    let mut emit = |text: &str| {
        stdout.write_all(text.as_bytes()).map_err(|e| Failure {
            code: 4,
            message: format!("cannot write to stdout: {e}"),
        })
    };
    match cli.command {
        Command::Dist { space, witness, p, q } => {
            let config = load_config(&space, None, None)?;
            let spec = config.build()?;
            let answer = runner::run_dist(&spec, &p, &q, witness)?;
            emit(&format!("{}\n", answer.distance))?;
            if let Some(route) = answer.witness {
                emit(&format!("{}\n", route.join(" -> ")))?;
            }
            Ok(0)
        }
        Command::Audit {
            name,
            space,
            seed,
            samples,
            workers,
            out,
            list,
        } => {
            if list {
                emit(&format!("{}\n", AUDITS.join("\n")))?;
                return Ok(0);
            }
            let name = name.expect("required unless --list");
            let mut config = load_config(&space, None, samples)?;
            let seed = resolve_seed(seed, Some(&config))?;
            config.set("seed", seed.to_string())?;
            let ctx = AuditContext::new(seed).with_workers(workers);
            let report = runner::run_audit(&name, &config, &ctx)?;
            let json = report.to_json();
            match &out {
                Some(path) => write_atomic(path, &json)?,
                None => emit(&json)?,
            }
            eprintln!(
                "{} on {}: {}/{} checks passed, {} violations recorded",
                report.audit,
                report.space,
                report.passed,
                report.attempted,
                report.violations.len()
            );
            Ok(if report.is_clean() { 0 } else { 1 })
        }
        Command::Suite {
            seed,
            workers,
            out,
            list,
            only,
            inject_corruption,
        } => {
            if list {
                for c in &CRITERIA {
                    emit(&format!("{}\t{}\n", c.id, c.title))?;
                }
                return Ok(0);
            }
            if let Some(bad) = only.iter().find(|id| suite::criterion(id).is_none()) {
                return Err(usage(format!("unknown criterion {bad:?}; see --list")));
            }
            let opts = SuiteOptions {
                seed: resolve_seed(seed, None)?,
                workers: workers.max(1),
                inject_corruption,
            };
            let only: Vec<&str> = only.iter().map(String::as_str).collect();
            let summary = suite::run_suite(&opts, &only);
            for outcome in &summary.criteria {
                emit(&format!("{}\n", outcome.line()))?;
            }
            let failed = summary.criteria.iter().filter(|o| !o.passed).count();
            emit(&format!(
                "{} of {} criteria passed\n",
                summary.criteria.len() - failed,
                summary.criteria.len()
            ))?;
            if let Some(path) = &out {
                write_atomic(path, &summary.to_json())?;
            }
            Ok(if summary.passed { 0 } else { 1 })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
