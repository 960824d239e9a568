//! Desk-scale benchmark on the nonconvex penalized SVM with heavy-tailed
//! noise: compares the clipped solver against the unclipped loop and
//! gradient-free SGD across a small tuning grid, writing CSV traces and an
//! SVG convergence plot.
//!
//! Usage:
//!
//! ```text
//! cargo run --release --example svm_benchmark [path/to/dataset.libsvm]
//! ```
//!
//! Without an argument a synthetic sparse binary dataset of the same shape
//! as the common adult benchmark (d = 123, ~14 nonzeros per row) is
//! generated under the output directory first.

use std::path::PathBuf;

use zocoon::data::synthetic_classification;
use zocoon::harness::{run_experiment, ExperimentSpec, Method};
use zocoon::rng::RngStream;

fn main() -> zocoon::Result<()> {
    let out_dir = PathBuf::from("svm-benchmark-out");
    std::fs::create_dir_all(&out_dir)?;

    let dataset_path = match std::env::args().nth(1) {
        Some(path) => PathBuf::from(path),
        None => {
            let mut rng = RngStream::new(2024);
            let data = synthetic_classification(2000, 123, 14, 0.05, &mut rng)?;
            let path = out_dir.join("synthetic-a9a-like.libsvm");
            std::fs::write(&path, data.serialize_to_string())?;
            println!("generated {} ({} examples, d = {})", path.display(), data.len(), data.dimension());
            path
        }
    };

    let spec = ExperimentSpec {
        dataset_path,
        methods: vec![Method::Zocoon, Method::Zoo2n, Method::Gfm],
        budget_oracle_calls: 200_000,
        seeds: (0..10).collect(),
        // A sparse slice of the full {1,3}x10^-k grids keeps this example quick.
        stepsize_grid: vec![3e-2, 3e-3, 1e-6],
        d_grid: vec![1e-3, 3e-4],
        tau: 1e-2,
        delta_prime: 1e-3,
        output_dir: out_dir,
        ..ExperimentSpec::default()
    };

    let start = std::time::Instant::now();
    let outcome = run_experiment(&spec)?;
    println!("ran in {:.1?} ({} failures)", start.elapsed(), outcome.failures);
    for s in &outcome.selected {
        println!(
            "{:6} best {} -> final mean loss {:.4} (std {:.4})",
            s.method.to_string(),
            s.grid_id,
            s.final_mean_loss,
            s.final_loss_std
        );
    }
    println!("see {}/curves.svg", outcome.output_dir.display());
    Ok(())
}
