//! Clipped vs. unclipped vs. plain SGD on one noisy nonsmooth objective.
//!
//! A linear noise term with symmetrized Pareto coordinates (infinite
//! variance) is added to `f(x) = ||x||`; the clipped solver keeps its
//! trajectory under control while the unclipped variants absorb the
//! occasional enormous estimate.
//!
//! ```text
//! cargo run --release --example compare_methods
//! ```

use zocoon::baselines::{gfm_run, zoo2n_run, GfmConfig};
use zocoon::objectives::{CappedL1SvmProblem, NoiseModel};
use zocoon::data::synthetic_classification;
use zocoon::rng::RngStream;
use zocoon::solver::{zocoon_run, SolverConfig};
use zocoon::vector::DenseVector;

fn main() -> zocoon::Result<()> {
    // Small heavy-tailed classification problem.
    let mut rng = RngStream::new(11);
    let data = synthetic_classification(500, 40, 6, 0.05, &mut rng)?;
    let problem = CappedL1SvmProblem::new(
        data.examples(),
        data.dimension(),
        1e-5 / 500.0,
        2.0,
        NoiseModel::ParetoLinear { shape: 1.5, scale: 1.0 },
    )?;
    let x0 = DenseVector::zeros(data.dimension());
    let iterations = 30_000;
    let seeds: Vec<u64> = (0..5).collect();

    let clipped_cfg = SolverConfig::manual(iterations, 1e-3, 1e-2, 3e-2, 1e-3)?;
    let unclipped_cfg = SolverConfig::manual(iterations, 1e-2, f64::INFINITY, 1e-1, 1e-3)?;
    let sgd_cfg = GfmConfig::new(1e-6, 1e-3, iterations)?;

    let report = |name: &str, finals: Vec<f64>| {
        let n = finals.len() as f64;
        let mean = finals.iter().sum::<f64>() / n;
        let var = finals.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
        println!("{name:22} mean final loss {:.4}, inter-seed std {:.4}", mean, var.sqrt());
    };

    report(
        "clipped (zocoon)",
        seeds
            .iter()
            .map(|&s| {
                zocoon_run(&problem, &clipped_cfg, &x0, &RngStream::new(s), 10_000)
                    .map(|r| r.final_loss().unwrap())
            })
            .collect::<zocoon::Result<_>>()?,
    );
    report(
        "unclipped (zoo2n)",
        seeds
            .iter()
            .map(|&s| {
                zoo2n_run(&problem, &unclipped_cfg, &x0, &RngStream::new(s), 10_000)
                    .map(|r| r.final_loss().unwrap())
            })
            .collect::<zocoon::Result<_>>()?,
    );
    report(
        "sgd (gfm)",
        seeds
            .iter()
            .map(|&s| {
                gfm_run(&problem, &sgd_cfg, &x0, &RngStream::new(s), 10_000)
                    .map(|r| r.final_loss().unwrap())
            })
            .collect::<zocoon::Result<_>>()?,
    );
    Ok(())
}
