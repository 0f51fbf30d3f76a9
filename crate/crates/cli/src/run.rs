//! Argument definitions and dispatch, shared by the binary and its tests.

use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use wdm_revenue::exact::{BaselineMode, Scope, MAX_ENUMERATION_COUNT, MAX_ENUMERATION_STATIONS};
use wdm_revenue::simulate::DEFAULT_WARMUP;
use wdm_revenue::Finalization;

use crate::commands::{self, ValidateArgs};
use crate::error::{CliError, Result};
use crate::instance_file::{load_str, LoadedInstance, SCHEMA};
use crate::output::{Format, OutputRecord, Render, Rendered};
use crate::reproduce::{self, ReproduceOptions};

#[derive(Debug, Parser)]
#[command(name = "wdmrev", version, about = "Wavelength assignment and visit planning for an optical router node")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Table, global = true)]
    pub format: Format,

    /// Worker threads for enumeration, baselines and replications (0 = all cores).
    #[arg(long, default_value_t = 0, global = true)]
    pub threads: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FinalizationArg {
    Two,
    Alpha,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Capped,
    Uncapped,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ScopeArg {
    Full,
    Partial,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the assignment heuristic and print the plan.
    Solve {
        file: String,
        #[arg(long, value_enum, default_value_t = FinalizationArg::Two)]
        finalization: FinalizationArg,
    },
    /// Rank every assignment of a small instance.
    Enumerate {
        file: String,
        /// `full` serves every station on all wavelengths; `partial` also
        /// allows unserved stations and idle wavelengths.
        #[arg(long, value_enum, default_value_t = ScopeArg::Full)]
        scope: ScopeArg,
    },
    /// Compare the heuristic with random assignments.
    Baseline {
        file: String,
        #[arg(long, value_enum, default_value_t = ModeArg::Capped)]
        mode: ModeArg,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Heuristic revenue for several wavelength counts.
    Sweep {
        file: String,
        /// Comma-separated wavelength counts, e.g. 1,2,4,8.
        #[arg(long, value_delimiter = ',', required = true)]
        k_list: Vec<usize>,
    },
    /// Simulate one station and compare with the revenue formula.
    Validate {
        file: String,
        #[arg(long)]
        station: usize,
        /// Visit period to simulate.
        #[arg(long)]
        visit: f64,
        #[arg(long, default_value_t = 100_000)]
        cycles: usize,
        #[arg(long, default_value_t = DEFAULT_WARMUP)]
        warmup: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Rerun published tables on the bundled instances (I-IX or all).
    Reproduce {
        #[arg(required = true)]
        tables: Vec<String>,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        /// Seed of the random assignments.
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Redraw the random instance of table VII with this seed.
        #[arg(long)]
        instance_seed: Option<u64>,
    },
    /// Print the JSON schema of instance files.
    Schema,
    /// Print a bundled instance file (e.g. table_III).
    Bundled { name: String },
}

/// Reads and parses an instance file; `-` reads standard input.
pub fn load_file(path: &str) -> Result<LoadedInstance> {
    let text = if path == "-" {
        std::io::read_to_string(std::io::stdin())
    } else {
        std::fs::read_to_string(path)
    }
    .map_err(|source| CliError::Io {
        path: path.to_string(),
        source,
    })?;
    Ok(load_str(&text)?)
}

fn record<P: Render>(command: &str, digest: Option<&str>, payload: &P, started: Instant, format: Format) -> Rendered {
    OutputRecord {
        command,
        instance_digest: digest,
        payload,
        wall_time_seconds: started.elapsed().as_secs_f64(),
    }
    .render(format)
}

fn check_enumeration_size(loaded: &LoadedInstance, scope: Scope) -> Result<()> {
    let n = loaded.instance.len();
    let count = commands::enumeration_size(&loaded.instance, scope);
    if n > MAX_ENUMERATION_STATIONS || count > MAX_ENUMERATION_COUNT {
        return Err(CliError::Solver(wdm_revenue::Error::TooLarge {
            count,
            limit: MAX_ENUMERATION_COUNT,
        }));
    }
    Ok(())
}

/// Runs a parsed command. A failed reproduction still returns its output,
/// paired with the mismatch error.
pub fn execute(cli: &Cli, echo: &str) -> std::result::Result<Rendered, (Option<Rendered>, CliError)> {
    let started = Instant::now();
    let format = cli.format;
    let fail = |e: CliError| (None, e);
    match &cli.command {
        Command::Solve { file, finalization } => {
            let loaded = load_file(file).map_err(fail)?;
            let finalization = match finalization {
                FinalizationArg::Two => Finalization::Two,
                FinalizationArg::Alpha => Finalization::Alpha,
            };
            let payload = commands::solve(&loaded.instance, finalization).map_err(fail)?;
            Ok(record(echo, Some(&loaded.digest), &payload, started, format))
        }
        Command::Enumerate { file, scope } => {
            let loaded = load_file(file).map_err(fail)?;
            let scope = match scope {
                ScopeArg::Full => Scope::Full,
                ScopeArg::Partial => Scope::Partial,
            };
            check_enumeration_size(&loaded, scope).map_err(fail)?;
            let payload = commands::enumerate(&loaded.instance, scope).map_err(fail)?;
            Ok(record(echo, Some(&loaded.digest), &payload, started, format))
        }
        Command::Baseline {
            file,
            mode,
            trials,
            seed,
        } => {
            let loaded = load_file(file).map_err(fail)?;
            let mode = match mode {
                ModeArg::Capped => BaselineMode::Capped,
                ModeArg::Uncapped => BaselineMode::Uncapped,
            };
            let payload = commands::baseline(&loaded.instance, mode, *trials, *seed).map_err(fail)?;
            Ok(record(echo, Some(&loaded.digest), &payload, started, format))
        }
        Command::Sweep { file, k_list } => {
            let loaded = load_file(file).map_err(fail)?;
            let payload = commands::sweep(&loaded.instance, k_list).map_err(fail)?;
            Ok(record(echo, Some(&loaded.digest), &payload, started, format))
        }
        Command::Validate {
            file,
            station,
            visit,
            cycles,
            warmup,
            seed,
        } => {
            let loaded = load_file(file).map_err(fail)?;
            let args = ValidateArgs {
                station_id: *station,
                visit: *visit,
                cycles: *cycles,
                warmup_cycles: *warmup,
                seed: *seed,
            };
            let payload = commands::validate(&loaded.instance, &args).map_err(fail)?;
            Ok(record(echo, Some(&loaded.digest), &payload, started, format))
        }
        Command::Reproduce {
            tables,
            trials,
            seed,
            instance_seed,
        } => {
            let options = ReproduceOptions {
                trials: *trials,
                seed: *seed,
                instance_seed: *instance_seed,
            };
            let payload = reproduce::reproduce(tables, &options).map_err(fail)?;
            let rendered = record(echo, None, &payload, started, format);
            if payload.all_passed() {
                Ok(rendered)
            } else {
                Err((Some(rendered), CliError::Mismatch(payload.failed)))
            }
        }
        Command::Schema => Ok(Rendered {
            stdout: SCHEMA.to_string(),
            stderr: String::new(),
        }),
        Command::Bundled { name } => match reproduce::bundled_text(name) {
            Some(text) => Ok(Rendered {
                stdout: text.to_string(),
                stderr: String::new(),
            }),
            None => {
                let names: Vec<&str> = reproduce::BUNDLED.iter().map(|(n, _)| *n).collect();
                Err(fail(CliError::Usage(format!(
                    "no bundled instance {name}; available: {}",
                    names.join(", ")
                ))))
            }
        },
    }
}
