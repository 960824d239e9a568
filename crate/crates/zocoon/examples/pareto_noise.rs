//! The heavy-tailed noise model: sign-symmetrized Pareto coordinates.
//!
//! For tail index (shape) in (1, 2) the coordinates have zero mean, finite
//! fractional moments below the shape, and infinite variance; the demo
//! shows the analytic fractional moments next to empirical averages, and
//! the empirical second moment growing without bound.
//!
//! ```text
//! cargo run --release --example pareto_noise
//! ```

use zocoon::objectives::sample_pareto_vector;
use zocoon::rng::RngStream;

fn main() -> zocoon::Result<()> {
    let shape = 1.5;
    let mut rng = RngStream::new(3);

    println!("fractional moments E|xi|^p at shape {shape} (scale 1):");
    for p in [1.1, 1.2, 1.4] {
        let analytic = shape / (shape - p);
        let n = 400_000;
        let mut acc = 0.0;
        for _ in 0..n {
            let v = sample_pareto_vector(1, shape, 1.0, &mut rng)?;
            acc += v.as_slice()[0].abs().powf(p);
        }
        println!(
            "  p = {p}: empirical {:.3}, analytic {:.3}  (convergence slows as p -> shape)",
            acc / n as f64,
            analytic
        );
    }

    println!("empirical second moment under sample-size doubling (diverges):");
    let mut n = 20_000usize;
    for _ in 0..5 {
        let mut acc = 0.0;
        for _ in 0..n {
            let v = sample_pareto_vector(1, shape, 1.0, &mut rng)?;
            acc += v.as_slice()[0].powi(2);
        }
        println!("  N = {n:>8}: E|xi|^2 ~ {:.1}", acc / n as f64);
        n *= 4;
    }

    let v = sample_pareto_vector(8, shape, 1.0, &mut rng)?;
    println!("one 8-dimensional draw: {:?}", v.as_slice());
    Ok(())
}
