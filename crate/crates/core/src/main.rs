use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use paging_sim::harness::{emit_results, run_experiment, sweep_b_sigma, sweep_to_csv, ExperimentConfig, DATA_DIR_ENV};
use paging_sim::instances::{
    export_trace, ingest_csv, load_trace, lower_bound_instance, write_intern_map, IngestionSpec, LowerBoundSpec,
    DEFAULT_INGEST_LIMIT, TRACE_HEADER,
};
use paging_sim::{Error, Result};

#[derive(Parser)]
#[command(
    name = "paging-sim",
    version,
    about = "Paging simulator for oracle-assisted eviction policies"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment grid described by a JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Generate a lower-bound instance.
    LbGen {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        phases: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Competitive ratio of AdaptiveQuery-b over a (b, sigma) grid.
    Sweep {
        #[arg(long, num_args = 1.., required = true)]
        b: Vec<usize>,
        #[arg(long, num_args = 1.., required = true)]
        sigma: Vec<f64>,
        /// Trace files in the export format.
        #[arg(long, num_args = 1.., required = true)]
        traces: Vec<PathBuf>,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 10)]
        reps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Defaults to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Convert one CSV column into a trace.
    Ingest {
        #[arg(long)]
        csv: PathBuf,
        #[arg(long)]
        column: String,
        #[arg(long, default_value_t = DEFAULT_INGEST_LIMIT)]
        limit: usize,
        /// Trace output; the intern map is written next to it as `<out>.map.json`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn write_text(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::io(path, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { config } => {
            let mut cfg = ExperimentConfig::from_json_file(&config)?;
            let data_dir = std::env::var_os(DATA_DIR_ENV).map(PathBuf::from);
            cfg.resolve_paths(data_dir.as_deref());
            let table = run_experiment(&cfg)?;
            for name in &table.metadata.skipped_instances {
                eprintln!("skipped trivial instance {name}");
            }
            match &cfg.output {
                Some(out) => emit_results(&table, out.format, &out.path),
                None => write_text(None, &table.to_csv()),
            }
        }
        Command::LbGen { k, phases, seed, out } => {
            let trace = lower_bound_instance(&LowerBoundSpec { k, phases, seed })?;
            export_trace(&trace, &out)
        }
        Command::Sweep {
            b,
            sigma,
            traces,
            k,
            reps,
            seed,
            out,
        } => {
            let traces = traces.iter().map(|p| load_trace(p)).collect::<Result<Vec<_>>>()?;
            let cells = sweep_b_sigma(&b, &sigma, &traces, k, reps, seed)?;
            write_text(out.as_deref(), &sweep_to_csv(&cells))
        }
        Command::Ingest {
            csv,
            column,
            limit,
            out,
        } => {
            let spec = IngestionSpec {
                limit,
                ..IngestionSpec::new(csv, column)
            };
            let ingested = ingest_csv(&spec)?;
            eprintln!(
                "{} requests, {} distinct pages, {} rows skipped",
                ingested.trace.len(),
                ingested.distinct(),
                ingested.skipped_rows
            );
            match out {
                Some(path) => {
                    export_trace(&ingested.trace, &path)?;
                    let mut map_path = path.into_os_string();
                    map_path.push(".map.json");
                    write_intern_map(&ingested.intern_map(), Path::new(&map_path))
                }
                None => {
                    let mut text = format!("{TRACE_HEADER}\n");
                    for p in ingested.trace.requests() {
                        text.push_str(&format!("{p}\n"));
                    }
                    write_text(None, &text)
                }
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
