//! Benchmark CLI: run the experiment pipeline or the verification suite.
//!
//! Exit codes: 0 on success, 1 if any verification check fails, 2 on I/O,
//! parse, or configuration errors.

use std::fs;
use std::process::ExitCode;

use clap::Parser;

use zocoon::harness::{run_experiment, verify_suite, ExperimentSpec};

#[derive(Parser, Debug)]
#[command(
    name = "zocoon-bench",
    about = "Zeroth-order clipped optimization benchmark pipeline",
    after_help = "All flags mirror `key = value` entries of the config file; \
                  flags override the file."
)]
struct Cli {
    /// Run the statistical verification suite instead of an experiment.
    #[arg(long)]
    verify: bool,

    /// Config file with `key = value` lines (`#` comments).
    #[arg(long)]
    config: Option<String>,

    /// LIBSVM dataset path.
    #[arg(long)]
    dataset: Option<String>,

    /// Subset size drawn without replacement before running.
    #[arg(long)]
    subset: Option<String>,

    /// Comma-separated list of methods: zocoon, zoo2n, gfm.
    #[arg(long)]
    method: Option<String>,

    /// Total zeroth-order oracle calls per run (even).
    #[arg(long)]
    budget: Option<String>,

    /// Comma-separated seeds.
    #[arg(long)]
    seeds: Option<String>,

    /// Comma-separated step sizes to tune over.
    #[arg(long = "stepsize-grid")]
    stepsize_grid: Option<String>,

    /// Comma-separated domain radii D to tune over.
    #[arg(long = "d-grid")]
    d_grid: Option<String>,

    /// Clipping threshold for the clipped solver.
    #[arg(long)]
    tau: Option<String>,

    /// Estimator smoothing radius.
    #[arg(long = "delta-prime")]
    delta_prime: Option<String>,

    /// Parameter selection: manual, theorem1, or theorem2.
    #[arg(long)]
    planner: Option<String>,

    /// Planner target radius delta.
    #[arg(long)]
    delta: Option<String>,

    /// Planner bound on f(x0) - f*.
    #[arg(long = "delta-bound")]
    delta_bound: Option<String>,

    /// Planner Lipschitz constant L (default: derived from the objective).
    #[arg(long)]
    lipschitz: Option<String>,

    /// Planner moment order p (default: derived from the objective).
    #[arg(long = "moment-order")]
    moment_order: Option<String>,

    /// Planner failure probability q (theorem2).
    #[arg(long)]
    confidence: Option<String>,

    /// Checkpoint cadence in iterations (0 = auto).
    #[arg(long = "checkpoint-every")]
    checkpoint_every: Option<String>,

    /// Output directory.
    #[arg(long)]
    out: Option<String>,
}

fn build_spec(cli: &Cli) -> zocoon::Result<ExperimentSpec> {
    let mut spec = ExperimentSpec::default();
    if let Some(path) = &cli.config {
        let text = fs::read_to_string(path)?;
        spec.apply_config_str(&text)?;
    }
    let overrides: [(&str, &Option<String>); 16] = [
        ("dataset", &cli.dataset),
        ("subset_size", &cli.subset),
        ("method", &cli.method),
        ("budget", &cli.budget),
        ("seeds", &cli.seeds),
        ("stepsize_grid", &cli.stepsize_grid),
        ("d_grid", &cli.d_grid),
        ("tau", &cli.tau),
        ("delta_prime", &cli.delta_prime),
        ("planner", &cli.planner),
        ("delta", &cli.delta),
        ("delta_bound", &cli.delta_bound),
        ("lipschitz", &cli.lipschitz),
        ("moment_order", &cli.moment_order),
        ("confidence", &cli.confidence),
        ("checkpoint_every", &cli.checkpoint_every),
    ];
    for (key, value) in overrides {
        if let Some(v) = value {
            spec.apply(key, v)?;
        }
    }
    if let Some(out) = &cli.out {
        spec.apply("out", out)?;
    }
    Ok(spec)
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    if cli.verify {
        let report = verify_suite();
        print!("{}", report.render());
        return if report.all_passed() {
            ExitCode::SUCCESS
        } else {
            ExitCode::from(1)
        };
    }

    let spec = match build_spec(&cli) {
        Ok(spec) => spec,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match run_experiment(&spec) {
        Ok(outcome) => {
            for s in &outcome.selected {
                println!(
                    "{}: best grid point {} | final mean loss {:.6} (std {:.6}, best-so-far {:.6})",
                    s.method, s.grid_id, s.final_mean_loss, s.final_loss_std, s.best_so_far_loss
                );
            }
            if outcome.failures > 0 {
                println!(
                    "{} run(s) failed; see {}",
                    outcome.failures,
                    outcome.output_dir.join("failures.csv").display()
                );
            }
            println!("results in {}", outcome.output_dir.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
