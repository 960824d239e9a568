//! Experiment execution: fan a spec out over (method, grid point, seed),
//! run everything in parallel, and merge results in a canonical order so
//! the output files are byte-reproducible.

use std::fs;
use std::path::PathBuf;

use rayon::prelude::*;

use crate::baselines::{gfm_run, zoo2n_run, GfmConfig};
use crate::data::load_libsvm;
use crate::error::Result;
use crate::harness::config::{ExperimentSpec, Method, PlannerMode};
use crate::harness::plot::{render_loss_curves, Series};
use crate::objectives::{CappedL1SvmProblem, NoiseModel};
use crate::oracle::StochasticOracle;
use crate::rng::{RngStream, StreamRole};
use crate::solver::{plan_expectation, plan_highprob, zocoon_run, RunRecord, SolverConfig};
use crate::vector::DenseVector;

/// Experiment hyperparameters fixed by the benchmark problem definition.
const PARETO_SHAPE: f64 = 1.5;
const PARETO_SCALE: f64 = 1.0;
const CAP_ALPHA: f64 = 2.0;
/// Subsetting uses its own fixed stream so every method sees the same rows.
const SUBSET_SEED: u64 = 0;

#[derive(Clone, Debug)]
enum JobConfig {
    Clipped(SolverConfig),
    Unclipped(SolverConfig),
    Sgd(GfmConfig),
}

#[derive(Clone, Debug)]
struct Job {
    method: Method,
    grid_id: String,
    seed: u64,
    config: JobConfig,
}

/// Aggregated statistics of one grid point.
#[derive(Clone, Debug)]
pub struct GridSummary {
    pub method: Method,
    pub grid_id: String,
    /// Mean over seeds of the last checkpoint loss.
    pub final_mean_loss: f64,
    /// Sample standard deviation over seeds of the last checkpoint loss.
    pub final_loss_std: f64,
    /// Minimum of the seed-averaged loss curve.
    pub best_so_far_loss: f64,
    /// Seed-averaged loss curve `(oracle_calls, mean loss)`.
    pub mean_curve: Vec<(f64, f64)>,
    /// Per-seed final losses, in seed order.
    pub final_losses: Vec<f64>,
}

/// Everything produced by one [`run_experiment`] invocation.
#[derive(Clone, Debug)]
pub struct ExperimentOutcome {
    pub output_dir: PathBuf,
    pub summaries: Vec<GridSummary>,
    /// Best grid point per method (by final mean loss), in method order.
    pub selected: Vec<GridSummary>,
    pub failures: usize,
}

impl ExperimentOutcome {
    pub fn selected_for(&self, method: Method) -> Option<&GridSummary> {
        self.selected.iter().find(|s| s.method == method)
    }
}

fn build_jobs(spec: &ExperimentSpec, problem: &CappedL1SvmProblem) -> Result<Vec<Job>> {
    let iterations = spec.iterations();
    let mut jobs = Vec::new();
    for &method in &spec.methods {
        let configs: Vec<(String, JobConfig)> = match (method, spec.planner_mode) {
            (Method::Gfm, _) => spec
                .stepsize_grid
                .iter()
                .map(|&eta| {
                    Ok((
                        format!("eta{eta:e}"),
                        JobConfig::Sgd(GfmConfig::new(eta, spec.delta_prime, iterations)?),
                    ))
                })
                .collect::<Result<_>>()?,
            (_, PlannerMode::Manual) => {
                let mut out = Vec::new();
                for &eta in &spec.stepsize_grid {
                    for &radius in &spec.d_grid {
                        let id = format!("eta{eta:e}_D{radius:e}");
                        let cfg = match method {
                            Method::Zocoon => JobConfig::Clipped(SolverConfig::manual(
                                iterations,
                                radius,
                                spec.tau,
                                eta,
                                spec.delta_prime,
                            )?),
                            Method::Zoo2n => JobConfig::Unclipped(SolverConfig::manual(
                                iterations,
                                radius,
                                f64::INFINITY,
                                eta,
                                spec.delta_prime,
                            )?),
                            Method::Gfm => unreachable!(),
                        };
                        out.push((id, cfg));
                    }
                }
                out
            }
            (_, mode) => {
                let args = &spec.planner;
                let lipschitz = if args.lipschitz > 0.0 {
                    args.lipschitz
                } else {
                    problem.lipschitz_bound()
                };
                let p = if args.moment_order > 0.0 {
                    args.moment_order
                } else {
                    problem.moment_order()
                };
                let (id, cfg) = match mode {
                    PlannerMode::Theorem1 => (
                        "theorem1".to_string(),
                        plan_expectation(
                            iterations,
                            args.delta,
                            args.delta_bound,
                            lipschitz,
                            p,
                            problem.dimension(),
                        )?,
                    ),
                    PlannerMode::Theorem2 => (
                        "theorem2".to_string(),
                        plan_highprob(
                            iterations,
                            args.delta,
                            args.delta_bound,
                            lipschitz,
                            p,
                            problem.dimension(),
                            args.confidence,
                        )?,
                    ),
                    PlannerMode::Manual => unreachable!(),
                };
                let cfg = match method {
                    Method::Zocoon => JobConfig::Clipped(cfg),
                    Method::Zoo2n => JobConfig::Unclipped(cfg),
                    Method::Gfm => unreachable!(),
                };
                vec![(id, cfg)]
            }
        };
        for (grid_id, config) in configs {
            for &seed in &spec.seeds {
                jobs.push(Job {
                    method,
                    grid_id: grid_id.clone(),
                    seed,
                    config: config.clone(),
                });
            }
        }
    }
    Ok(jobs)
}

fn execute(job: &Job, problem: &CappedL1SvmProblem, cadence: u64) -> Result<RunRecord> {
    let x0 = DenseVector::zeros(problem.dimension());
    let rng = RngStream::new(job.seed);
    match &job.config {
        JobConfig::Clipped(cfg) => zocoon_run(problem, cfg, &x0, &rng, cadence),
        JobConfig::Unclipped(cfg) => zoo2n_run(problem, cfg, &x0, &rng, cadence),
        JobConfig::Sgd(cfg) => gfm_run(problem, cfg, &x0, &rng, cadence),
    }
}

fn summarize(
    method: Method,
    grid_id: &str,
    records: &[&RunRecord],
) -> GridSummary {
    let mut mean_curve = Vec::new();
    if let Some(first) = records.first() {
        let len = first.checkpoints.len();
        for i in 0..len {
            let mut acc = 0.0;
            for r in records {
                acc += r.checkpoints[i].clean_loss;
            }
            mean_curve.push((
                first.checkpoints[i].oracle_calls as f64,
                acc / records.len() as f64,
            ));
        }
    }
    let final_losses: Vec<f64> = records
        .iter()
        .filter_map(|r| r.final_loss())
        .collect();
    let (final_mean, final_std) = mean_std(&final_losses);
    let best = mean_curve
        .iter()
        .map(|&(_, l)| l)
        .fold(f64::INFINITY, f64::min);
    GridSummary {
        method,
        grid_id: grid_id.to_string(),
        final_mean_loss: if final_losses.is_empty() {
            f64::INFINITY
        } else {
            final_mean
        },
        final_loss_std: final_std,
        best_so_far_loss: best,
        mean_curve,
        final_losses,
    }
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, 0.0);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Run the full pipeline described by `spec`.
///
/// Emits into `spec.output_dir`:
///
/// * `runs.csv` — `method,grid,seed,oracle_calls,clean_loss`, one row per
///   checkpoint per run;
/// * `summary.csv` — per grid point: final mean loss, final loss std across
///   seeds, best-so-far mean loss;
/// * `failures.csv` — runs that errored (the rest proceed);
/// * `curves.svg` — seed-averaged loss vs. oracle calls (log x) for the
///   best grid point of each method.
///
/// Identical specs produce byte-identical CSV files: jobs are merged in a
/// canonical (method, grid, seed) order regardless of worker scheduling.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentOutcome> {
    spec.validate()?;
    let dataset = load_libsvm(&spec.dataset_path, None)?;
    let dataset = match spec.subset_size {
        Some(n) => {
            let mut rng = RngStream::new(SUBSET_SEED).substream(StreamRole::Data, 0);
            dataset.subset(n, &mut rng)?
        }
        None => dataset,
    };
    let lambda = 1e-5 / dataset.len() as f64;
    let problem = CappedL1SvmProblem::new(
        dataset.examples(),
        dataset.dimension(),
        lambda,
        CAP_ALPHA,
        NoiseModel::ParetoLinear {
            shape: PARETO_SHAPE,
            scale: PARETO_SCALE,
        },
    )?;

    let jobs = build_jobs(spec, &problem)?;
    let cadence = spec.checkpoint_cadence();
    let results: Vec<Result<RunRecord>> = jobs
        .par_iter()
        .map(|job| execute(job, &problem, cadence))
        .collect();

    fs::create_dir_all(&spec.output_dir)?;

    // runs.csv + failures.csv in canonical job order.
    let mut runs_csv = String::from("method,grid,seed,oracle_calls,clean_loss\n");
    let mut failures_csv = String::from("method,grid,seed,error\n");
    let mut failures = 0usize;
    for (job, result) in jobs.iter().zip(&results) {
        match result {
            Ok(record) => {
                for c in &record.checkpoints {
                    runs_csv.push_str(&format!(
                        "{},{},{},{},{}\n",
                        job.method, job.grid_id, job.seed, c.oracle_calls, c.clean_loss
                    ));
                }
            }
            Err(e) => {
                failures += 1;
                failures_csv.push_str(&format!(
                    "{},{},{},{}\n",
                    job.method,
                    job.grid_id,
                    job.seed,
                    format!("{e}").replace(',', ";")
                ));
            }
        }
    }
    fs::write(spec.output_dir.join("runs.csv"), &runs_csv)?;
    fs::write(spec.output_dir.join("failures.csv"), &failures_csv)?;

    // Aggregate per (method, grid) preserving job order.
    let mut summaries: Vec<GridSummary> = Vec::new();
    let mut seen: Vec<(Method, String)> = Vec::new();
    for job in &jobs {
        let key = (job.method, job.grid_id.clone());
        if seen.contains(&key) {
            continue;
        }
        seen.push(key);
        let records: Vec<&RunRecord> = jobs
            .iter()
            .zip(&results)
            .filter(|(j, _)| j.method == job.method && j.grid_id == job.grid_id)
            .filter_map(|(_, r)| r.as_ref().ok())
            .collect();
        summaries.push(summarize(job.method, &job.grid_id, &records));
    }

    let mut summary_csv =
        String::from("method,grid,final_mean_loss,final_loss_std,best_so_far_loss\n");
    for s in &summaries {
        summary_csv.push_str(&format!(
            "{},{},{},{},{}\n",
            s.method, s.grid_id, s.final_mean_loss, s.final_loss_std, s.best_so_far_loss
        ));
    }
    fs::write(spec.output_dir.join("summary.csv"), &summary_csv)?;

    // Best grid point per method, by final mean loss.
    let mut selected = Vec::new();
    for &method in &spec.methods {
        let best = summaries
            .iter()
            .filter(|s| s.method == method)
            .min_by(|a, b| a.final_mean_loss.total_cmp(&b.final_mean_loss));
        if let Some(best) = best {
            selected.push(best.clone());
        }
    }

    let series: Vec<Series> = selected
        .iter()
        .map(|s| Series {
            label: format!("{} ({})", s.method, s.grid_id),
            points: s.mean_curve.clone(),
        })
        .collect();
    let svg = render_loss_curves(
        &format!("{} (n={})", dataset.name(), dataset.len()),
        &series,
    );
    fs::write(spec.output_dir.join("curves.svg"), svg)?;

    Ok(ExperimentOutcome {
        output_dir: spec.output_dir.clone(),
        summaries,
        selected,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::synthetic_classification;
    use crate::error::Error;
    use std::fs;

    fn write_tiny_dataset(dir: &std::path::Path) -> PathBuf {
        let mut rng = RngStream::new(33);
        let data = synthetic_classification(40, 12, 3, 0.1, &mut rng).unwrap();
        let path = dir.join("tiny.libsvm");
        fs::write(&path, data.serialize_to_string()).unwrap();
        path
    }

    fn tiny_spec(dir: &std::path::Path) -> ExperimentSpec {
        ExperimentSpec {
            dataset_path: write_tiny_dataset(dir),
            methods: vec![Method::Zocoon, Method::Gfm],
            budget_oracle_calls: 400,
            seeds: vec![7, 8],
            stepsize_grid: vec![0.1, 0.01],
            d_grid: vec![1e-2],
            checkpoint_every: 50,
            output_dir: dir.join("out"),
            ..ExperimentSpec::default()
        }
    }

    #[test]
    fn pipeline_emits_all_files_and_is_deterministic() {
        let tmp = tempfile::tempdir().unwrap();
        let spec = tiny_spec(tmp.path());
        let out1 = run_experiment(&spec).unwrap();
        let runs1 = fs::read(spec.output_dir.join("runs.csv")).unwrap();
        assert!(spec.output_dir.join("summary.csv").exists());
        assert!(spec.output_dir.join("curves.svg").exists());
        assert!(spec.output_dir.join("failures.csv").exists());
        assert_eq!(out1.failures, 0);
        assert_eq!(out1.selected.len(), 2);

        let summary1 = fs::read(spec.output_dir.join("summary.csv")).unwrap();
        let out2 = run_experiment(&spec).unwrap();
        let runs2 = fs::read(spec.output_dir.join("runs.csv")).unwrap();
        let summary2 = fs::read(spec.output_dir.join("summary.csv")).unwrap();
        assert_eq!(runs1, runs2);
        assert_eq!(summary1, summary2);
        assert_eq!(
            out1.selected[0].final_mean_loss.to_bits(),
            out2.selected[0].final_mean_loss.to_bits()
        );
    }

    #[test]
    fn checkpoint_accounting_matches_budget() {
        // budget=4 calls -> 2 iterations; cadence 1 -> 2 rows per run.
        let tmp = tempfile::tempdir().unwrap();
        let mut spec = tiny_spec(tmp.path());
        spec.methods = vec![Method::Gfm];
        spec.budget_oracle_calls = 4;
        spec.seeds = vec![7];
        spec.stepsize_grid = vec![0.01];
        spec.checkpoint_every = 1;
        run_experiment(&spec).unwrap();
        let runs = fs::read_to_string(spec.output_dir.join("runs.csv")).unwrap();
        let rows: Vec<&str> = runs.lines().skip(1).collect();
        assert_eq!(rows.len(), 2);
        assert!(!rows[0].ends_with(','));
        let calls: Vec<u64> = rows
            .iter()
            .map(|r| r.split(',').nth(3).unwrap().parse().unwrap())
            .collect();
        assert_eq!(calls, vec![2, 4]);
    }

    #[test]
    fn subset_flows_through_pipeline() {
        let tmp = tempfile::tempdir().unwrap();
        let mut spec = tiny_spec(tmp.path());
        spec.subset_size = Some(10);
        spec.methods = vec![Method::Zoo2n];
        spec.stepsize_grid = vec![0.01];
        let out = run_experiment(&spec).unwrap();
        assert_eq!(out.failures, 0);
    }

    #[test]
    fn unreadable_dataset_is_io_error() {
        let tmp = tempfile::tempdir().unwrap();
        let mut spec = tiny_spec(tmp.path());
        spec.dataset_path = tmp.path().join("missing.libsvm");
        assert!(matches!(run_experiment(&spec), Err(Error::Io(_))));
    }
}
