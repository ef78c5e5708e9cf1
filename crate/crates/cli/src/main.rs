//! Batch front-end: reads one JSON scenario document, runs it and writes
//! `results.json` plus an optional CSV series into the output directory.

mod config;
mod output;
mod scenarios;

use std::fmt;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use config::{ConfigDocument, ConfigError, ScenarioConfig};

const AFTER_HELP: &str = "\
Config document: {\"scenario\": <name>, \"parameters\": {...}}; omitted parameters take defaults.

CSV columns (<out>/<scenario>.csv):
  ppt-sweep       r,min_eig_closed,min_eig_numeric,threshold,inseparable,negativity
  rabi            t,theta,photon_population,atom_population[,photon_population_oracle]
  ladder          tf,pop_01,pop_10,pop_up,pop_down,norm_defect
  oracle-compare  row,col,oracle_re,oracle_im,closed_re,closed_im,abs_diff,outside_tolerance
  covariance      t,kappa,covariance
  herald          (JSON only)

All numbers carry 12 significant digits.";

#[derive(Debug, Parser)]
#[command(name = "atomlight", version, about = "Atom-light entanglement scenarios", after_help = AFTER_HELP)]
struct Args {
    /// JSON scenario document.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory, created if missing.
    #[arg(long)]
    out: PathBuf,
    /// Scenario name; overrides the one in the config.
    #[arg(long)]
    scenario: Option<String>,
    /// Worker threads for sweep points.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Debug)]
enum CliError {
    Config(ConfigError),
    Core(atomlight::Error),
    Io(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(e) => write!(f, "{e}"),
            CliError::Core(e) => write!(f, "{e} (module: {})", e.module()),
            CliError::Io(msg) => write!(f, "[cli] io: {msg}"),
        }
    }
}

fn load(args: &Args) -> Result<ScenarioConfig, CliError> {
    let doc = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            serde_json::from_str::<ConfigDocument>(&text)
                .map_err(|e| CliError::Config(ConfigError(format!("{}: {e}", path.display()))))?
        }
        None => ConfigDocument::default(),
    };
    ScenarioConfig::resolve(doc, args.scenario.as_deref()).map_err(CliError::Config)
}

fn run(args: &Args) -> Result<Vec<PathBuf>, CliError> {
    let cfg = load(args)?;
    let output = match args.threads {
        Some(0) => return Err(CliError::Config(ConfigError("--threads must be >= 1".into()))),
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| CliError::Io(e.to_string()))?
            .install(|| scenarios::run(&cfg)),
        None => scenarios::run(&cfg),
    }
    .map_err(CliError::Core)?;
    let cfg_value = serde_json::to_value(&cfg).map_err(|e| CliError::Io(e.to_string()))?;
    output::write_outputs(&args.out, cfg.scenario().name(), &cfg_value, &output).map_err(|e| CliError::Io(e.to_string()))
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                CliError::Config(_) => 2,
                CliError::Core(_) => 3,
                CliError::Io(_) => 1,
            })
        }
    }
}
