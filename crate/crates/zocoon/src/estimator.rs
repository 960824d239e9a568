//! Two-point zeroth-order gradient estimation and gradient clipping.
//!
//! The estimator queries a stochastic oracle at `x + d'w` and `x - d'w`
//! (one shared noise draw, `w` uniform on the unit sphere) and returns
//!
//! ```text
//! g = d / (2 d') * (F(x + d'w; xi) - F(x - d'w; xi)) * w,
//! ```
//!
//! an unbiased estimate of the gradient of the ball-smoothed surrogate at
//! smoothing radius `d'`. Clipping rescales any estimate to norm at most
//! `tau`, preserving direction; this is what keeps heavy-tailed noise from
//! destabilizing the outer solver.

use crate::error::{Error, Result};
use crate::oracle::StochasticOracle;
use crate::rng::RngStream;
use crate::vector::DenseVector;

/// Parameters of the two-point estimator.
#[derive(Clone, Copy, Debug)]
pub struct EstimatorParams {
    smoothing_radius: f64,
    dimension: usize,
}

impl EstimatorParams {
    pub fn new(smoothing_radius: f64, dimension: usize) -> Result<Self> {
        if !(smoothing_radius > 0.0) || !smoothing_radius.is_finite() {
            return Err(Error::parameter(
                "smoothing_radius",
                format!("must be positive and finite, got {smoothing_radius}"),
            ));
        }
        if dimension == 0 {
            return Err(Error::parameter("dimension", "must be at least 1"));
        }
        Ok(EstimatorParams {
            smoothing_radius,
            dimension,
        })
    }

    pub fn smoothing_radius(&self) -> f64 {
        self.smoothing_radius
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }
}

/// Draw a uniform point on the unit sphere `S^{d-1}`.
///
/// A standard Gaussian vector is normalized; rotation invariance is exact
/// and no rejection is needed.
pub fn sample_unit_sphere(d: usize, rng: &mut RngStream) -> Result<DenseVector> {
    if d == 0 {
        return Err(Error::parameter("d", "sphere dimension must be at least 1"));
    }
    loop {
        let mut w = DenseVector::new((0..d).map(|_| rng.standard_normal()).collect());
        let n = w.norm2();
        // A zero Gaussian vector has probability zero; redraw just in case.
        if n > 0.0 && n.is_finite() {
            w.scale_assign(1.0 / n);
            return Ok(w);
        }
    }
}

/// One two-point gradient estimate at `x`, costing exactly two
/// zeroth-order oracle calls with a shared noise draw.
pub fn two_point_estimate<O: StochasticOracle + ?Sized>(
    oracle: &O,
    x: &DenseVector,
    params: &EstimatorParams,
    rng: &mut RngStream,
) -> Result<DenseVector> {
    let d = params.dimension();
    if x.dim() != d {
        return Err(Error::Dimension {
            expected: d,
            got: x.dim(),
        });
    }
    let dp = params.smoothing_radius();
    let w = sample_unit_sphere(d, rng)?;
    let plus = x.add_scaled(dp, &w);
    let minus = x.add_scaled(-dp, &w);
    let (fp, fm) = oracle.noisy_pair(&plus, &minus, rng);
    if !fp.is_finite() || !fm.is_finite() {
        return Err(Error::NonFinite {
            context: "oracle value",
            iteration: 0,
        });
    }
    let scale = d as f64 / (2.0 * dp) * (fp - fm);
    Ok(w.scale(scale))
}

/// Rescale `g` to norm at most `tau`, preserving direction.
///
/// Returns `g` unchanged (bit-identical) when `||g|| <= tau` or `g = 0`.
pub fn clip(g: &DenseVector, tau: f64) -> Result<DenseVector> {
    if !(tau > 0.0) {
        return Err(Error::parameter(
            "tau",
            format!("clipping threshold must be positive, got {tau}"),
        ));
    }
    let n = g.norm2();
    if n == 0.0 || n <= tau {
        Ok(g.clone())
    } else {
        Ok(g.scale(tau / n))
    }
}

/// Result of a Monte Carlo check of the estimator's p-th dispersion moment.
#[derive(Clone, Debug)]
pub struct MomentBoundReport {
    /// `(1/N) sum ||g_i - ref||^p` against a high-accuracy smoothed-gradient
    /// reference.
    pub empirical_pth_moment: f64,
    /// The claimed envelope `(sqrt(d) L / 2^{1/4})^p`.
    pub bound: f64,
    /// Statistical slack applied: `3 / sqrt(N)`.
    pub slack: f64,
    /// Whether `empirical <= bound * (1 + slack)`.
    pub holds: bool,
    /// Norm of the reference gradient used.
    pub reference_norm: f64,
}

/// Monte Carlo verification of the dispersion moment of the two-point
/// estimator.
///
/// The reference gradient is the mean of `10 * num_samples` independent
/// estimates, an order of magnitude more accurate than the dispersion under
/// test. `L` and `p` come from the oracle.
pub fn verify_moment_bound<O: StochasticOracle + ?Sized>(
    oracle: &O,
    x: &DenseVector,
    params: &EstimatorParams,
    num_samples: usize,
    rng: &mut RngStream,
) -> Result<MomentBoundReport> {
    if num_samples == 0 {
        return Err(Error::parameter("num_samples", "must be positive"));
    }
    let d = params.dimension();
    let p = oracle.moment_order();
    let lip = oracle.lipschitz_bound();

    let mut reference = DenseVector::zeros(d);
    let ref_samples = 10 * num_samples;
    for _ in 0..ref_samples {
        let g = two_point_estimate(oracle, x, params, rng)?;
        reference.add_assign(&g);
    }
    reference.scale_assign(1.0 / ref_samples as f64);

    let mut acc = 0.0;
    let mut diff = DenseVector::zeros(d);
    for _ in 0..num_samples {
        let g = two_point_estimate(oracle, x, params, rng)?;
        diff.copy_from(&g);
        diff.add_scaled_assign(-1.0, &reference);
        acc += diff.norm2().powf(p);
    }
    let empirical = acc / num_samples as f64;
    let bound = ((d as f64).sqrt() * lip / 2f64.powf(0.25)).powf(p);
    let slack = 3.0 / (num_samples as f64).sqrt();
    Ok(MomentBoundReport {
        empirical_pth_moment: empirical,
        bound,
        slack,
        holds: empirical <= bound * (1.0 + slack),
        reference_norm: reference.norm2(),
    })
}

/// Result of a Monte Carlo check of the clipped-gradient bias and second
/// moment bounds.
#[derive(Clone, Debug)]
pub struct ClipBoundReport {
    /// `|| E[clip(g)] - E[g] ||`, both means over the same draws (paired
    /// Monte Carlo, so an inactive clip measures exactly zero).
    pub bias: f64,
    /// `2^{p-1} (sigma^p + L^p) / tau^{p-1}`.
    pub bias_bound: f64,
    /// `E ||clip(g)||^2` (Monte Carlo).
    pub second_moment: f64,
    /// `2^{p-1} tau^{2-p} (sigma^p + L^p)`.
    pub second_moment_bound: f64,
    pub slack: f64,
    pub holds: bool,
}

/// Monte Carlo verification of the clipping operator's bias and second
/// moment against their closed-form bounds.
///
/// `sample` draws gradient vectors with `||E[g]|| <= l_bound` and p-th
/// central moment at most `sigma^p`; `dimension` is the vector length.
#[allow(clippy::too_many_arguments)]
pub fn verify_clip_bounds(
    mut sample: impl FnMut(&mut RngStream) -> DenseVector,
    dimension: usize,
    l_bound: f64,
    sigma: f64,
    p: f64,
    tau: f64,
    num_samples: usize,
    rng: &mut RngStream,
) -> Result<ClipBoundReport> {
    if !(tau > 0.0) {
        return Err(Error::parameter("tau", "must be positive"));
    }
    if num_samples == 0 {
        return Err(Error::parameter("num_samples", "must be positive"));
    }
    let mut sum_clipped = DenseVector::zeros(dimension);
    let mut sum_raw = DenseVector::zeros(dimension);
    let mut sum_sq = 0.0;
    for _ in 0..num_samples {
        let g = sample(rng);
        let clipped = clip(&g, tau)?;
        sum_clipped.add_assign(&clipped);
        sum_raw.add_assign(&g);
        let n = clipped.norm2();
        sum_sq += n * n;
    }
    sum_clipped.add_scaled_assign(-1.0, &sum_raw);
    sum_clipped.scale_assign(1.0 / num_samples as f64);
    let bias = sum_clipped.norm2();
    let second_moment = sum_sq / num_samples as f64;

    let moment_sum = sigma.powf(p) + l_bound.powf(p);
    let bias_bound = 2f64.powf(p - 1.0) * moment_sum / tau.powf(p - 1.0);
    let second_moment_bound = 2f64.powf(p - 1.0) * tau.powf(2.0 - p) * moment_sum;
    let slack = 3.0 / (num_samples as f64).sqrt();
    let holds = bias <= bias_bound * (1.0 + slack)
        && second_moment <= second_moment_bound * (1.0 + slack);
    Ok(ClipBoundReport {
        bias,
        bias_bound,
        second_moment,
        second_moment_bound,
        slack,
        holds,
    })
}
