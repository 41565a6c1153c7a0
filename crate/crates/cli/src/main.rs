use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use oddm_cli::harness::{run_evaluate, run_simulate, run_sweep};
use oddm_cli::spec::{EvalSpec, RunSpec, SweepSpec};
use oddm_cli::HarnessError;

/// Object-based scanpath simulation and evaluation.
///
/// Exit codes: 0 success, 2 configuration error, 3 i/o error.
#[derive(Parser)]
#[command(name = "objectddm", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Spec file (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory, overriding the spec's out_dir.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; defaults to all cores.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Number of seeds per video, overriding the spec's n_seeds.
    #[arg(long)]
    seeds: Option<u32>,
    /// Override a scalar spec field, e.g. --set sim.theta=0.05. Repeatable.
    #[arg(long = "set")]
    sets: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured model over the spec's scenes and seeds.
    Simulate(RunArgs),
    /// Shortcut for `simulate` with the model forced to the random baseline.
    Baseline(RunArgs),
    /// Compute metric reports and cross-corpus distances.
    Evaluate(CommonArgs),
    /// Vary one parameter, simulating and evaluating per value.
    Sweep(RunArgs),
}

fn load_run_spec(args: &RunArgs, force_baseline: bool) -> Result<RunSpec, HarnessError> {
    let mut sets = args.sets.clone();
    if force_baseline {
        sets.push("model=baseline".to_string());
    }
    if let Some(seeds) = args.seeds {
        sets.push(format!("n_seeds={seeds}"));
    }
    let mut spec: RunSpec = oddm_cli::spec::load_spec(&args.common.config, &sets)?;
    if let Some(out) = &args.common.out {
        spec.out_dir = Some(out.clone());
    }
    Ok(spec)
}

fn load_sweep_spec(args: &RunArgs) -> Result<SweepSpec, HarnessError> {
    let mut sets = args.sets.clone();
    if let Some(seeds) = args.seeds {
        sets.push(format!("run.n_seeds={seeds}"));
    }
    let mut spec: SweepSpec = oddm_cli::spec::load_spec(&args.common.config, &sets)?;
    if let Some(out) = &args.common.out {
        spec.run.out_dir = Some(out.clone());
    }
    Ok(spec)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(args) => load_run_spec(&args, false).and_then(|spec| {
            let output = run_simulate(&spec, args.common.jobs)?;
            for warning in &output.warnings {
                eprintln!("warning: {warning}");
            }
            let n: usize = output.videos.iter().map(|v| v.files.len()).sum();
            println!("wrote {n} scanpath files to {}", spec.out_dir().display());
            Ok(())
        }),
        Command::Baseline(args) => load_run_spec(&args, true).and_then(|spec| {
            let output = run_simulate(&spec, args.common.jobs)?;
            for warning in &output.warnings {
                eprintln!("warning: {warning}");
            }
            let n: usize = output.videos.iter().map(|v| v.files.len()).sum();
            println!("wrote {n} scanpath files to {}", spec.out_dir().display());
            Ok(())
        }),
        Command::Evaluate(common) => {
            let mut sets: Vec<String> = Vec::new();
            if let Some(out) = &common.out {
                sets.push(format!("out_dir={}", out.display()));
            }
            let spec: Result<EvalSpec, _> = oddm_cli::spec::load_spec(&common.config, &sets);
            spec.and_then(|spec| {
                let output = run_evaluate(&spec, common.jobs)?;
                for path in &output.report_paths {
                    println!("wrote {}", path.display());
                }
                println!("wrote {}", output.distances_path.display());
                Ok(())
            })
        }
        Command::Sweep(args) => load_sweep_spec(&args).and_then(|spec| {
            let output = run_sweep(&spec, args.common.jobs)?;
            for point in &output.points {
                println!("swept {} -> {}", point.label, point.out_dir.display());
            }
            println!("wrote {}", output.summary_path.display());
            Ok(())
        }),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
