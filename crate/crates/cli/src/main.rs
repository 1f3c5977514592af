//! `docgen`: headless access to every clip-bank operation.
//!
//! Machine-readable results go to stdout, diagnostics to stderr. Exit codes:
//! 0 ok, 1 validation or usage error, 2 no documentary (bad selection or
//! infeasible), 3 I/O.

use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use docgen_core::{
    ClipBank, ExportFormat, FilterSelection, GenerateError, GenerationConstraints, LoadError,
    SimulationPolicy, bank_stats, generate, load_bank, render, simulate, validate_bank,
};
use docgen_server::ServiceConfig;

#[derive(Parser)]
#[command(
    name = "docgen",
    version,
    about = "Generate short documentaries from a tagged clip bank"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load a manifest and print its warnings as JSON.
    Validate { manifest: PathBuf },
    /// Print clip, speaker and topic aggregates as JSON.
    Stats { manifest: PathBuf },
    /// Assemble one documentary and print it as a playlist.
    Generate {
        manifest: PathBuf,
        /// Comma-separated topics; quote multi-word names.
        #[arg(long, value_delimiter = ',', required = true)]
        topics: Vec<String>,
        /// Seed for replay; random (and reported on stderr) when omitted.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "json")]
        format: ExportFormat,
        #[command(flatten)]
        constraints: ConstraintArgs,
    },
    /// Run a simulated viewer session and print its coverage report.
    Simulate {
        manifest: PathBuf,
        #[arg(long, default_value_t = 10)]
        generations: usize,
        /// Inclusive range of topics per selection, e.g. `1..3` or `2`.
        #[arg(long, default_value = "1..3", value_parser = parse_range)]
        topics_per: (usize, usize),
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write the simulated session log (NDJSON) here.
        #[arg(long)]
        log: Option<PathBuf>,
        #[command(flatten)]
        constraints: ConstraintArgs,
    },
    /// Serve the HTTP API. `DOCGEN_BANK_PATH` overrides the manifest path.
    Serve {
        manifest: Option<PathBuf>,
        #[arg(long, default_value = "127.0.0.1:8080")]
        listen: String,
        #[arg(long)]
        media_root: Option<PathBuf>,
        #[arg(long, default_value = "sessions")]
        session_dir: PathBuf,
        #[command(flatten)]
        constraints: ConstraintArgs,
    },
}

#[derive(clap::Args)]
struct ConstraintArgs {
    #[arg(long, default_value_t = 120)]
    min_total: u32,
    #[arg(long, default_value_t = 240)]
    max_total: u32,
    #[arg(long, default_value_t = 2)]
    max_per_speaker: u32,
    /// Drop the requirement that every selected topic appears.
    #[arg(long)]
    no_coverage: bool,
    #[arg(long, default_value_t = 64)]
    max_restarts: u32,
}

impl ConstraintArgs {
    fn to_constraints(&self) -> GenerationConstraints {
        GenerationConstraints {
            min_total_s: self.min_total,
            max_total_s: self.max_total,
            max_clips_per_speaker: self.max_per_speaker,
            require_topic_coverage: !self.no_coverage,
            max_restarts: self.max_restarts,
        }
    }
}

fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("{t:?}: {e}"));
    match s.split_once("..") {
        Some((lo, hi)) => Ok((parse(lo)?, parse(hi.trim_start_matches('='))?)),
        None => parse(s).map(|n| (n, n)),
    }
}

enum Failure {
    Validation(String),
    NoDocumentary(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Validation(_) => 1,
            Failure::NoDocumentary(_) => 2,
            Failure::Io(_) => 3,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Validation(m) | Failure::NoDocumentary(m) | Failure::Io(m) => f.write_str(m),
        }
    }
}

impl From<LoadError> for Failure {
    fn from(err: LoadError) -> Self {
        match err {
            LoadError::Io { .. } => Failure::Io(err.to_string()),
            other => Failure::Validation(other.to_string()),
        }
    }
}

impl From<GenerateError> for Failure {
    fn from(err: GenerateError) -> Self {
        match err {
            GenerateError::InvalidConstraints(_) => Failure::Validation(err.to_string()),
            other => Failure::NoDocumentary(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(err: std::io::Error) -> Self {
        Failure::Io(err.to_string())
    }
}

fn emit(text: &str) -> Result<(), Failure> {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())?;
    out.flush()?;
    Ok(())
}

fn pretty<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn bank(path: &PathBuf) -> Result<ClipBank, Failure> {
    Ok(load_bank(path)?)
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Validate { manifest } => {
            let report = validate_bank(&bank(&manifest)?);
            for f in &report.findings {
                eprintln!("warning: {:?} {}", f.code, f.subject);
            }
            emit(&pretty(&report))
        }
        Command::Stats { manifest } => emit(&pretty(&bank_stats(&bank(&manifest)?))),
        Command::Generate {
            manifest,
            topics,
            seed,
            format,
            constraints,
        } => {
            let bank = bank(&manifest)?;
            let topics: Vec<String> = topics
                .into_iter()
                .filter(|t| !t.trim().is_empty())
                .collect();
            let selection = FilterSelection::parse(&topics)?;
            let seed = seed.unwrap_or_else(|| {
                let s = rand::random();
                eprintln!("seed: {s}");
                s
            });
            let doc = generate(&bank, &selection, &constraints.to_constraints(), seed)?;
            emit(&render(&doc, &bank, format))
        }
        Command::Simulate {
            manifest,
            generations,
            topics_per: (min_topics, max_topics),
            seed,
            log,
            constraints,
        } => {
            let bank = bank(&manifest)?;
            let policy = SimulationPolicy {
                min_topics,
                max_topics,
                generations,
                constraints: constraints.to_constraints(),
            };
            let sim =
                simulate(&bank, &policy, seed).map_err(|e| Failure::Validation(e.to_string()))?;
            if let Some(path) = log {
                std::fs::write(&path, sim.log.to_ndjson())?;
            }
            emit(&pretty(&sim.report))
        }
        Command::Serve {
            manifest,
            listen,
            media_root,
            session_dir,
            constraints,
        } => {
            let mut config = ServiceConfig::new(manifest.unwrap_or_default()).with_env_overrides();
            if config.bank_path.as_os_str().is_empty() {
                return Err(Failure::Validation(
                    "no manifest given and DOCGEN_BANK_PATH is unset".into(),
                ));
            }
            config.listen_address = listen;
            config.media_root = media_root;
            config.session_dir = session_dir;
            config.constraints = constraints.to_constraints();
            let runtime = tokio::runtime::Runtime::new()?;
            runtime
                .block_on(docgen_server::serve(config))
                .map_err(|e| match e {
                    docgen_server::ConfigError::Bank(load) => Failure::from(load),
                    docgen_server::ConfigError::Io(io) => Failure::Io(io.to_string()),
                    other => Failure::Validation(other.to_string()),
                })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {failure}");
            ExitCode::from(failure.code())
        }
    }
}
