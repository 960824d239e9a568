//! Measurable stationarity proxies for nonsmooth objectives.
//!
//! The reported quantity is the norm of the gradient of the ball-smoothed
//! surrogate, estimated by averaging two-point estimates. Since that
//! gradient is a member of the Goldstein subdifferential at the smoothing
//! radius, a small estimate certifies approximate Goldstein stationarity;
//! every comparison should use the attached standard error.

use crate::error::{Error, Result};
use crate::estimator::{two_point_estimate, EstimatorParams};
use crate::oracle::{NoiselessView, StochasticOracle};
use crate::rng::RngStream;
use crate::vector::DenseVector;

/// A smoothed-gradient-norm measurement at one point.
#[derive(Clone, Debug)]
pub struct StationarityReport {
    pub point: DenseVector,
    pub smoothing_radius: f64,
    /// Norm of the Monte Carlo mean gradient estimate.
    pub estimated_grad_norm: f64,
    pub num_samples: usize,
    /// Standard error of the mean estimate, from the per-coordinate sample
    /// covariance trace.
    pub standard_error: f64,
}

impl StationarityReport {
    /// Three-standard-error interval around the estimate (clamped at zero).
    pub fn interval(&self) -> (f64, f64) {
        let w = 3.0 * self.standard_error;
        ((self.estimated_grad_norm - w).max(0.0), self.estimated_grad_norm + w)
    }
}

/// Estimate the smoothed-gradient norm of the noiseless objective at `x`.
///
/// Measurement bypasses oracle noise entirely: stationarity of `f` itself
/// is the criterion, so both paired evaluations go through `clean_value`.
pub fn estimate_smoothed_grad_norm<O: StochasticOracle + ?Sized>(
    oracle: &O,
    x: &DenseVector,
    delta: f64,
    num_samples: usize,
    rng: &mut RngStream,
) -> Result<StationarityReport> {
    if num_samples < 2 {
        return Err(Error::parameter("num_samples", "need at least 2 samples"));
    }
    let d = oracle.dimension();
    let params = EstimatorParams::new(delta, d)?;
    let clean = NoiselessView(oracle);

    let mut sum = DenseVector::zeros(d);
    let mut sum_sq = 0.0;
    for _ in 0..num_samples {
        let g = two_point_estimate(&clean, x, &params, rng)?;
        sum.add_assign(&g);
        let n = g.norm2();
        sum_sq += n * n;
    }
    let n = num_samples as f64;
    let mut mean = sum.clone();
    mean.scale_assign(1.0 / n);
    let mean_norm = mean.norm2();
    // trace of the sample covariance: (sum ||g||^2 - n ||mean||^2) / (n - 1)
    let trace = ((sum_sq - n * mean_norm * mean_norm) / (n - 1.0)).max(0.0);
    Ok(StationarityReport {
        point: x.clone(),
        smoothing_radius: delta,
        estimated_grad_norm: mean_norm,
        num_samples,
        standard_error: (trace / n).sqrt(),
    })
}

/// Translate a Goldstein certificate for the smoothed surrogate into one
/// for the original function: a `(gamma, epsilon)` certificate of `f_delta`
/// certifies `(delta + gamma, epsilon)` for `f`.
pub fn goldstein_from_smoothed(gamma: f64, delta: f64, epsilon: f64) -> (f64, f64) {
    (delta + gamma, epsilon)
}

/// Gradient-norm bound implied by Goldstein stationarity of an `H`-smooth
/// function: `||grad f(x)|| <= epsilon + H * delta`.
pub fn smooth_gradient_bound(epsilon: f64, delta: f64, smoothness: f64) -> f64 {
    epsilon + smoothness * delta
}
