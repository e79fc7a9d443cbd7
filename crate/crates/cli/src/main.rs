//! `slam-ec`: generate datasets, run pruning experiments, and render reports.
//!
//! Exit codes: 0 on success, 1 for invalid input, 2 for failures while running.
//! Log verbosity is controlled by `RUST_LOG`.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use slam_ec::experiment::{self, ExperimentSpec, OrderingChoice};
use slam_ec::Policy;

#[derive(Parser, Debug)]
#[command(
    name = "slam-ec",
    version,
    about = "Elimination complexity experiments for landmark SLAM"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write an observation log, its factor graph and a manifest.
    Gen(GenArgs),
    /// Run the policy grid over every frame prefix and write report.csv.
    Experiment(ExperimentArgs),
    /// Render SVG curves and a summary table from a report CSV.
    Report(ReportArgs),
}

#[derive(Args, Debug)]
struct GenArgs {
    /// Experiment spec (JSON); defaults to the desk-scale simulation.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Seed for the simulated world; defaults to the spec's first seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    frames: Option<usize>,
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    /// Experiment spec (JSON); defaults to the desk-scale simulation.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Policies to run (full, rand, tgreedy, kf, dec); repeat or comma-separate.
    #[arg(long, value_delimiter = ',')]
    policy: Vec<Policy>,
    #[arg(long, value_delimiter = ',')]
    rate: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    seed: Vec<u64>,
    /// min_degree, landmark_first or natural.
    #[arg(long)]
    ordering: Option<OrderingChoice>,
    /// Only the first N frames of the scenario.
    #[arg(long)]
    frames: Option<usize>,
    /// Count multiplications with the numeric Cholesky oracle.
    #[arg(long, overrides_with = "no_oracle")]
    oracle: bool,
    #[arg(long, overrides_with = "oracle")]
    no_oracle: bool,
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct ReportArgs {
    /// Report CSV written by `experiment`.
    csv: PathBuf,
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
}

fn load_spec(path: Option<&Path>) -> slam_ec::Result<ExperimentSpec> {
    match path {
        Some(p) => ExperimentSpec::from_json(&fs::read_to_string(p)?),
        None => Ok(ExperimentSpec::desk_scale()),
    }
}

fn run_gen(args: GenArgs) -> slam_ec::Result<()> {
    let spec = load_spec(args.spec.as_deref())?;
    let seed = args.seed.unwrap_or(spec.seeds[0]);
    let frames = args.frames.or(spec.frames);
    let files = experiment::generate_dataset(&spec.scenario, seed, frames, &args.out)?;
    println!("wrote {}", files.log.display());
    println!("wrote {}", files.graph.display());
    println!("wrote {}", files.manifest.display());
    Ok(())
}

fn run_experiment(args: ExperimentArgs) -> slam_ec::Result<()> {
    let mut spec = load_spec(args.spec.as_deref())?;
    if !args.policy.is_empty() {
        spec.policies = args.policy;
    }
    if !args.rate.is_empty() {
        spec.rates = args.rate;
    }
    if !args.seed.is_empty() {
        spec.seeds = args.seed;
    }
    if let Some(o) = args.ordering {
        spec.ordering = o;
    }
    if args.frames.is_some() {
        spec.frames = args.frames;
    }
    if args.oracle {
        spec.oracle = true;
    }
    if args.no_oracle {
        spec.oracle = false;
    }
    spec.validate()?;

    fs::create_dir_all(&args.out)?;
    let rows = experiment::run_experiment(&spec)?;
    let csv_path = args.out.join("report.csv");
    experiment::write_csv(&rows, fs::File::create(&csv_path)?)?;
    let spec_path = args.out.join("spec.json");
    fs::write(&spec_path, spec.to_json()? + "\n")?;
    log::info!("{} rows", rows.len());
    println!("wrote {}", csv_path.display());
    println!("wrote {}", spec_path.display());
    Ok(())
}

fn run_report(args: ReportArgs) -> slam_ec::Result<()> {
    let rows = experiment::read_csv(fs::File::open(&args.csv)?)?;
    let out = experiment::write_report(&rows, &args.out)?;
    for plot in &out.plots {
        println!(
            "wrote {} ({} curves, {} overlays)",
            plot.path.display(),
            plot.curves,
            plot.overlays
        );
    }
    println!("wrote {}", out.summary_path.display());
    print!("{}", experiment::summary_table(&out.summary));
    Ok(())
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Gen(a) => run_gen(a),
        Command::Experiment(a) => run_experiment(a),
        Command::Report(a) => run_report(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_validation() { 1 } else { 2 })
        }
    }
}
