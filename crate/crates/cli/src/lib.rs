//! Command-line front end for `dyncut-core`: extended-XYZ input, key-value
//! run files and CSV output.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod xyz;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::commands::Context;
use crate::config::RunConfig;
use crate::error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(
    name = "dyncut",
    version,
    about = "Smooth dynamic neighbor cutoffs for atomistic graphs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Run file of `key = value` lines.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Worker threads (0 picks the number of cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[arg(long, global = true)]
    pub seed: Option<u64>,

    #[arg(long, global = true)]
    pub output_dir: Option<PathBuf>,

    /// Override a run-file key, e.g. `--set mu=12`. Repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Neighbor-degree histogram of the hard-cutoff graph.
    Graph(InputArgs),
    /// Per-atom cutoff radius and pruned degree.
    Cutoff(InputArgs),
    /// Energy and force along a line for fixed, naive and dynamic cutoffs.
    Scan(InputArgs),
    /// Molecular dynamics trajectory.
    Md(InputArgs),
    /// Edge counts and wall-clock timing, fixed vs dynamic.
    Bench(InputArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Extended XYZ file; falls back to `input` in the run file.
    pub input: Option<PathBuf>,

    /// Hard cutoff in Å.
    #[arg(long)]
    pub h: Option<f64>,
}

impl Cli {
    /// Run-file values, then `--set` overrides, then dedicated flags.
    fn resolve(&self) -> CliResult<Context> {
        let mut config = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        for o in &self.overrides {
            config.apply_override(o)?;
        }
        let args = match &self.command {
            Command::Graph(a)
            | Command::Cutoff(a)
            | Command::Scan(a)
            | Command::Md(a)
            | Command::Bench(a) => a,
        };
        if let Some(h) = args.h {
            config.set("h", &h.to_string())?;
        }
        if let Some(seed) = self.seed {
            config.set("seed", &seed.to_string())?;
        }
        if let Some(t) = self.threads {
            config.set("threads", &t.to_string())?;
        }
        let input = match &args.input {
            Some(p) => p.clone(),
            None => PathBuf::from(
                config
                    .raw("input")
                    .ok_or_else(|| CliError::Config("no input file given".into()))?,
            ),
        };
        let output_dir = match &self.output_dir {
            Some(p) => p.clone(),
            None => PathBuf::from(config.raw("output_dir").unwrap_or(".")),
        };
        Ok(Context {
            config,
            input,
            output_dir,
        })
    }
}

pub fn run(cli: &Cli) -> CliResult<()> {
    let ctx = cli.resolve()?;
    let threads: usize = ctx.config.get_or("threads", 0)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Io(format!("cannot start thread pool: {e}")))?;
    pool.install(|| match cli.command {
        Command::Graph(_) => commands::graph(&ctx),
        Command::Cutoff(_) => commands::cutoff(&ctx),
        Command::Scan(_) => commands::scan(&ctx),
        Command::Md(_) => commands::md(&ctx),
        Command::Bench(_) => commands::bench(&ctx),
    })
}
