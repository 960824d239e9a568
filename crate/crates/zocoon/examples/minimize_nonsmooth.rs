//! End-to-end run on the nonsmooth objective `f(x) = ||x||`: plan a
//! schedule, run the clipped solver, and certify the decrease with the
//! smoothed-gradient stationarity proxy.
//!
//! ```text
//! cargo run --release --example minimize_nonsmooth
//! ```

use zocoon::objectives::SyntheticNorm;
use zocoon::rng::RngStream;
use zocoon::solver::{plan_expectation, zocoon_run};
use zocoon::stationarity::estimate_smoothed_grad_norm;
use zocoon::vector::DenseVector;
use zocoon::StochasticOracle;

fn main() -> zocoon::Result<()> {
    let d = 10;
    let oracle = SyntheticNorm::new(d, 1.0);
    let x0 = DenseVector::basis(d, 0); // ||x0|| = 1

    let delta = 0.05;
    let budget = 200_000; // iterations; two oracle calls each
    let config = plan_expectation(budget, delta, 1.0, 1.0, 2.0, d)?;
    println!(
        "schedule: T = {}, K = {}, D = {:.3e}, tau = {:.2}, delta' = {}",
        config.rounds(),
        config.restarts(),
        config.domain_radius(),
        config.clip_threshold(),
        config.smoothing_radius()
    );

    let mut meter_rng = RngStream::new(999);
    let before =
        estimate_smoothed_grad_norm(&oracle, &x0, delta / 2.0, 30_000, &mut meter_rng)?;
    println!(
        "smoothed grad norm at x0:    {:.4} +- {:.4}",
        before.estimated_grad_norm, before.standard_error
    );

    for seed in 0..3 {
        let record = zocoon_run(&oracle, &config, &x0, &RngStream::new(seed), 50_000)?;
        let after = estimate_smoothed_grad_norm(
            &oracle,
            &record.output,
            delta / 2.0,
            30_000,
            &mut meter_rng,
        )?;
        println!(
            "seed {seed}: f(w_out) = {:.4}, smoothed grad norm {:.4} +- {:.4}",
            oracle.clean_value(&record.output),
            after.estimated_grad_norm,
            after.standard_error
        );
    }
    Ok(())
}
