//! Comparison solvers: plain zeroth-order SGD on the smoothed surrogate
//! (GFM) and the unclipped online-to-nonconvex loop (ZOO2N).

use crate::error::{Error, Result};
use crate::estimator::{two_point_estimate, EstimatorParams};
use crate::oracle::{CallCountingOracle, StochasticOracle};
use crate::rng::{RngStream, StreamRole};
use crate::solver::{zocoon_run, Checkpoint, RunRecord, SolverConfig};
use crate::vector::DenseVector;

/// Parameters for the gradient-free SGD baseline.
#[derive(Clone, Copy, Debug)]
pub struct GfmConfig {
    step_size: f64,
    smoothing_radius: f64,
    total_iterations: u64,
}

impl GfmConfig {
    pub fn new(step_size: f64, smoothing_radius: f64, total_iterations: u64) -> Result<Self> {
        if !(step_size > 0.0) || !step_size.is_finite() {
            return Err(Error::parameter("step_size", "must be positive and finite"));
        }
        if !(smoothing_radius > 0.0) || !smoothing_radius.is_finite() {
            return Err(Error::parameter(
                "smoothing_radius",
                "must be positive and finite",
            ));
        }
        if total_iterations == 0 {
            return Err(Error::parameter("total_iterations", "must be positive"));
        }
        Ok(GfmConfig {
            step_size,
            smoothing_radius,
            total_iterations,
        })
    }

    pub fn step_size(&self) -> f64 {
        self.step_size
    }
    pub fn smoothing_radius(&self) -> f64 {
        self.smoothing_radius
    }
    pub fn total_iterations(&self) -> u64 {
        self.total_iterations
    }
}

/// Zeroth-order SGD on the smoothed surrogate:
/// `x_{t+1} = x_t - eta * g(x_t)`, returning a uniformly random iterate.
///
/// Two oracle calls per iteration, like the main solver. The output index is
/// drawn up front from a dedicated sub-stream, so only one extra iterate is
/// ever stored.
pub fn gfm_run<O: StochasticOracle + ?Sized>(
    oracle: &O,
    config: &GfmConfig,
    x0: &DenseVector,
    rng: &RngStream,
    checkpoint_every: u64,
) -> Result<RunRecord> {
    if checkpoint_every == 0 {
        return Err(Error::parameter("checkpoint_every", "must be positive"));
    }
    let d = oracle.dimension();
    if x0.dim() != d {
        return Err(Error::Dimension {
            expected: d,
            got: x0.dim(),
        });
    }
    let counting = CallCountingOracle::new(oracle);
    let params = EstimatorParams::new(config.smoothing_radius(), d)?;
    let total = config.total_iterations();
    let eta = config.step_size();

    let mut est_rng = rng.substream(StreamRole::Estimator, 0);
    let mut out_rng = rng.substream(StreamRole::Output, 0);
    let output_at = 1 + out_rng.below(total as usize) as u64;

    let mut x = x0.clone();
    let mut output = None;
    let mut checkpoints = Vec::new();
    for t in 1..=total {
        let g = two_point_estimate(&counting, &x, &params, &mut est_rng).map_err(|e| match e {
            Error::NonFinite { context, .. } => Error::NonFinite {
                context,
                iteration: t,
            },
            other => other,
        })?;
        x.add_scaled_assign(-eta, &g);
        if !x.is_finite() {
            return Err(Error::NonFinite {
                context: "iterate",
                iteration: t,
            });
        }
        if t == output_at {
            output = Some(x.clone());
        }
        if t % checkpoint_every == 0 || t == total {
            checkpoints.push(Checkpoint {
                oracle_calls: counting.calls(),
                clean_loss: oracle.clean_value(&x),
                iterate_norm: x.norm2(),
            });
        }
    }

    Ok(RunRecord {
        seed: rng.seed(),
        checkpoints,
        restart_averages: Vec::new(),
        output: output.expect("output index within range"),
    })
}

/// Unclipped online-to-nonconvex baseline: structurally the main loop with
/// the clipping threshold forced to infinity and the step size taken from
/// the config as-is.
pub fn zoo2n_run<O: StochasticOracle + ?Sized>(
    oracle: &O,
    config: &SolverConfig,
    x0: &DenseVector,
    rng: &RngStream,
    checkpoint_every: u64,
) -> Result<RunRecord> {
    zocoon_run(
        oracle,
        &config.without_clipping(),
        x0,
        rng,
        checkpoint_every,
    )
}
