//! `msac`: lifetimes of metastable states on avoided crossings.
//!
//! Exit status is 0 on success, 1 when some rows failed or the run aborted,
//! and 2 for configuration errors.

mod config;
mod run;
mod store;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::error;

use config::{ConfigError, FileConfig, Overrides, RunConfig};
use run::Task;

#[derive(Debug, Parser)]
#[command(name = "msac", version, about = "Lifetimes of metastable states on avoided crossings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: GlobalArgs,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// TOML configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; also holds the resonance cache.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Comma-separated scaled couplings.
    #[arg(long = "v", global = true, value_delimiter = ',', allow_hyphen_values = true)]
    v: Option<Vec<f64>>,
    /// Spatial step of refined solutions.
    #[arg(long, global = true)]
    dx: Option<f64>,
    /// Grid edge: a number, "linear" or "action:<target>".
    #[arg(long = "xmax", global = true)]
    x_max: Option<String>,
    /// Comma-separated methods (nad_FC, ad_FC, nad_BW, ad_BW, nad_TDSE, ad_TDSE, FGR, LZ, tidse, all).
    #[arg(long, global = true, value_delimiter = ',')]
    methods: Option<Vec<String>>,
    /// Physical inputs M,ALPHA,VP,HBAR in any consistent units.
    #[arg(long, global = true)]
    physical: Option<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Locate resonances in both representations.
    Scan,
    /// Flux and Breit-Wigner lifetimes.
    Lifetimes,
    /// Time-propagation lifetimes with norm traces.
    Tdse,
    /// Golden-rule lifetimes with transition densities.
    Fgr,
    /// Landau-Zener estimates.
    Lz,
    /// Every method.
    Sweep,
    /// Potential curves and resonance waves for plotting.
    Export,
    /// Add physical columns to an existing lifetime table.
    ConvertUnits {
        /// Directory holding lifetimes.csv; defaults to the output directory.
        #[arg(long = "in")]
        input: Option<PathBuf>,
    },
}

impl Command {
    fn task(&self) -> Option<Task> {
        Some(match self {
            Command::Scan => Task::Scan,
            Command::Lifetimes => Task::Lifetimes,
            Command::Tdse => Task::Tdse,
            Command::Fgr => Task::Fgr,
            Command::Lz => Task::Lz,
            Command::Sweep => Task::Sweep,
            Command::Export => Task::Export,
            Command::ConvertUnits { .. } => return None,
        })
    }
}

fn load_config(cli: &Cli, task: Option<Task>) -> Result<RunConfig, ConfigError> {
    let g = &cli.global;
    let mut file = match &g.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    file.apply(&Overrides {
        v: g.v.clone(),
        methods: g.methods.clone(),
        jobs: g.jobs,
        out: g.out.clone(),
        dx: g.dx,
        x_max: g.x_max.clone(),
        physical: g.physical.clone(),
    })?;
    if task.is_none() && file.physical.is_none() {
        return Err(ConfigError("convert-units needs --physical or a [physical] table".into()));
    }
    if task.is_none() && file.run.v.is_none() && file.run.v_range.is_none() {
        // the coupling list is irrelevant when converting an existing table
        file.run.v = Some(vec![1.0]);
    }
    let defaults = task.map(Task::default_methods).unwrap_or_default();
    let mut cfg = RunConfig::resolve(file, &defaults)?;
    if let Some(t @ (Task::Scan | Task::Export)) = task {
        if !cfg.methods.is_empty() && cli.global.methods.is_some() {
            log::warn!("{} ignores --methods", t.name());
        }
        cfg.methods.clear();
        cfg.analysis.methods.clear();
    } else if task.is_some() && cfg.methods.is_empty() {
        return Err(ConfigError("no lifetime method selected".into()));
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let task = cli.command.task();
    let cfg = match load_config(&cli, task) {
        Ok(c) => c,
        Err(e) => {
            error!("{e}");
            return ExitCode::from(2);
        }
    };
    let result = match (&cli.command, task) {
        (Command::ConvertUnits { input }, _) => {
            let input = input.clone().unwrap_or_else(|| cfg.out.clone());
            run::convert_units(&input, &cfg).map(|m| (m, 0))
        }
        (_, Some(task)) => run::run(task, &cfg, task.name()).map(|o| (o.manifest, o.cached)),
        (_, None) => unreachable!("every other command maps to a task"),
    };
    match result {
        Ok((manifest, cached)) => {
            eprintln!(
                "wrote {} files to {} ({} cached resonance tables, {} failed rows)",
                manifest.files.len() + 1,
                cfg.out.display(),
                cached,
                manifest.failures
            );
            if manifest.failures > 0 {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            error!("{e:#}");
            ExitCode::from(1)
        }
    }
}
