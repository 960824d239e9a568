//! The clipped online-to-nonconvex solver loop, its ball projection, and
//! the parameter planners with their complexity-bound evaluators.
//!
//! One run performs `K * T` iterations. Iteration `n` holds a displacement
//! `delta_n` inside the ball of radius `D`, queries the two-point gradient
//! estimator at a random point of the segment `[x_{n-1}, x_{n-1} + delta_n]`,
//! clips the estimate to norm `tau`, and takes a projected online gradient
//! step with step size `eta = D / tau`. The output point is drawn uniformly
//! from the `K` per-restart averages of the query points.

use crate::error::{Error, Result};
use crate::estimator::{clip, two_point_estimate, EstimatorParams};
use crate::oracle::{CallCountingOracle, StochasticOracle};
use crate::rng::{RngStream, StreamRole};
use crate::vector::DenseVector;

/// Full parameter schedule for one solver run.
///
/// Invariants: `K * T <= M`, all real parameters positive, and
/// `eta = D / tau` unless the step size was explicitly overridden
/// (free-step mode, used when tuning the step size experimentally).
#[derive(Clone, Debug)]
pub struct SolverConfig {
    budget: u64,
    rounds: u64,
    restarts: u64,
    domain_radius: f64,
    clip_threshold: f64,
    step_size: f64,
    smoothing_radius: f64,
    free_step: bool,
}

impl SolverConfig {
    /// Schedule-mode config: `eta` is derived as `D / tau`.
    pub fn from_schedule(
        budget: u64,
        rounds: u64,
        restarts: u64,
        domain_radius: f64,
        clip_threshold: f64,
        smoothing_radius: f64,
    ) -> Result<Self> {
        if !clip_threshold.is_finite() {
            return Err(Error::parameter(
                "clip_threshold",
                "schedule mode needs a finite tau (eta = D / tau); use manual() to disable clipping",
            ));
        }
        let cfg = SolverConfig {
            budget,
            rounds,
            restarts,
            domain_radius,
            clip_threshold,
            step_size: domain_radius / clip_threshold,
            smoothing_radius,
            free_step: false,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Experiment-mode config: a single restart block of `iterations`
    /// rounds, explicit step size, and `tau = +inf` allowed to disable
    /// clipping entirely.
    pub fn manual(
        iterations: u64,
        domain_radius: f64,
        clip_threshold: f64,
        step_size: f64,
        smoothing_radius: f64,
    ) -> Result<Self> {
        let cfg = SolverConfig {
            budget: iterations,
            rounds: iterations,
            restarts: 1,
            domain_radius,
            clip_threshold,
            step_size,
            smoothing_radius,
            free_step: true,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Replace the step size, severing the `eta = D / tau` link.
    pub fn with_step_override(mut self, step_size: f64) -> Result<Self> {
        self.step_size = step_size;
        self.free_step = true;
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        if self.rounds == 0 || self.restarts == 0 {
            return Err(Error::parameter("rounds", "K and T must be at least 1"));
        }
        let effective = self
            .restarts
            .checked_mul(self.rounds)
            .ok_or_else(|| Error::parameter("rounds", "K * T overflows"))?;
        if effective > self.budget || self.rounds > self.budget {
            return Err(Error::parameter(
                "budget",
                format!(
                    "K * T = {} exceeds the budget M = {}",
                    effective, self.budget
                ),
            ));
        }
        for (name, v) in [
            ("domain_radius", self.domain_radius),
            ("step_size", self.step_size),
            ("smoothing_radius", self.smoothing_radius),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::parameter(
                    name,
                    format!("must be positive and finite, got {v}"),
                ));
            }
        }
        if !(self.clip_threshold > 0.0) {
            return Err(Error::parameter(
                "clip_threshold",
                format!("must be positive, got {}", self.clip_threshold),
            ));
        }
        Ok(())
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }
    pub fn rounds(&self) -> u64 {
        self.rounds
    }
    pub fn restarts(&self) -> u64 {
        self.restarts
    }
    /// Effective iteration count `K * T` (each costs two oracle calls).
    pub fn iterations(&self) -> u64 {
        self.restarts * self.rounds
    }
    pub fn domain_radius(&self) -> f64 {
        self.domain_radius
    }
    pub fn clip_threshold(&self) -> f64 {
        self.clip_threshold
    }
    pub fn step_size(&self) -> f64 {
        self.step_size
    }
    pub fn smoothing_radius(&self) -> f64 {
        self.smoothing_radius
    }
    pub fn is_step_overridden(&self) -> bool {
        self.free_step
    }

    /// Copy of this config with clipping disabled (`tau = +inf`), keeping
    /// the configured step size.
    pub fn without_clipping(&self) -> Self {
        let mut cfg = self.clone();
        cfg.clip_threshold = f64::INFINITY;
        cfg.free_step = true;
        cfg
    }
}

/// Euclidean projection onto the ball of the given radius around the origin.
pub fn project_ball(v: &DenseVector, radius: f64) -> DenseVector {
    let mut out = v.clone();
    project_ball_assign(&mut out, radius);
    out
}

fn project_ball_assign(v: &mut DenseVector, radius: f64) {
    let n = v.norm2();
    if n > radius {
        v.scale_assign(radius / n);
    }
}

/// One recorded trace row.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Checkpoint {
    /// Cumulative zeroth-order oracle calls so far.
    pub oracle_calls: u64,
    /// Noiseless objective value at the current query point.
    pub clean_loss: f64,
    /// Norm of the current query point.
    pub iterate_norm: f64,
}

/// Trace and output of one solver run.
#[derive(Clone, Debug)]
pub struct RunRecord {
    pub seed: u64,
    pub checkpoints: Vec<Checkpoint>,
    /// Per-restart averages `w_bar^1 .. w_bar^K` (empty for methods without
    /// restart structure).
    pub restart_averages: Vec<DenseVector>,
    /// The returned point.
    pub output: DenseVector,
}

impl RunRecord {
    pub fn final_loss(&self) -> Option<f64> {
        self.checkpoints.last().map(|c| c.clean_loss)
    }
}

/// Per-iteration view handed to an observer; everything borrowed from the
/// loop state of the current iteration `n`.
pub struct IterationObservation<'a> {
    /// 1-based iteration index `n`.
    pub iteration: u64,
    /// 1-based restart index `k`.
    pub restart: u64,
    /// Query point `w_n`.
    pub query_point: &'a DenseVector,
    /// Displacement `delta_n` in effect at this iteration.
    pub displacement: &'a DenseVector,
    /// Clipped gradient estimate `g_hat_n`.
    pub clipped_estimate: &'a DenseVector,
}

/// Run the clipped online-to-nonconvex loop.
///
/// Randomness is split over dedicated sub-streams of `rng`: estimator draws
/// (sphere directions and oracle noise), segment positions `s_n`, and the
/// final output selection, so each is reproducible in isolation.
pub fn zocoon_run<O: StochasticOracle + ?Sized>(
    oracle: &O,
    config: &SolverConfig,
    x0: &DenseVector,
    rng: &RngStream,
    checkpoint_every: u64,
) -> Result<RunRecord> {
    zocoon_run_observed(oracle, config, x0, rng, checkpoint_every, |_| {})
}

/// [`zocoon_run`] with a per-iteration observer, used by invariant checks.
pub fn zocoon_run_observed<O, F>(
    oracle: &O,
    config: &SolverConfig,
    x0: &DenseVector,
    rng: &RngStream,
    checkpoint_every: u64,
    mut observe: F,
) -> Result<RunRecord>
where
    O: StochasticOracle + ?Sized,
    F: FnMut(&IterationObservation),
{
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
    let total = config.iterations();
    let rounds = config.rounds();
    let eta = config.step_size();
    let tau = config.clip_threshold();
    let radius = config.domain_radius();

    let mut est_rng = rng.substream(StreamRole::Estimator, 0);
    let mut seg_rng = rng.substream(StreamRole::Segment, 0);
    let mut out_rng = rng.substream(StreamRole::Output, 0);

    let mut x_prev = x0.clone(); // x_{n-1}
    let mut displacement = DenseVector::zeros(d); // delta_n, starts at 0
    let mut query = DenseVector::zeros(d);
    let mut block_sum = DenseVector::zeros(d);
    let mut averages = Vec::with_capacity(config.restarts() as usize);
    let mut checkpoints = Vec::new();

    for n in 1..=total {
        // w_n = x_{n-1} + s_n * delta_n, then x_n = x_{n-1} + delta_n.
        let s = seg_rng.uniform();
        query.copy_from(&x_prev);
        query.add_scaled_assign(s, &displacement);
        x_prev.add_assign(&displacement);

        let estimate = two_point_estimate(&counting, &query, &params, &mut est_rng)
            .map_err(|e| match e {
                Error::NonFinite { context, .. } => Error::NonFinite {
                    context,
                    iteration: n,
                },
                other => other,
            })?;
        let clipped = clip(&estimate, tau)?;

        observe(&IterationObservation {
            iteration: n,
            restart: (n - 1) / rounds + 1,
            query_point: &query,
            displacement: &displacement,
            clipped_estimate: &clipped,
        });

        displacement.add_scaled_assign(-eta, &clipped);
        project_ball_assign(&mut displacement, radius);
        if !x_prev.is_finite() || !displacement.is_finite() {
            return Err(Error::NonFinite {
                context: "iterate",
                iteration: n,
            });
        }

        block_sum.add_assign(&query);
        if n % rounds == 0 {
            let mut avg = block_sum.clone();
            avg.scale_assign(1.0 / rounds as f64);
            averages.push(avg);
            block_sum.fill(0.0);
        }
        if n % checkpoint_every == 0 || n == total {
            checkpoints.push(Checkpoint {
                oracle_calls: counting.calls(),
                clean_loss: oracle.clean_value(&query),
                iterate_norm: query.norm2(),
            });
        }
    }

    let output = averages[out_rng.below(averages.len())].clone();
    Ok(RunRecord {
        seed: rng.seed(),
        checkpoints,
        restart_averages: averages,
        output,
    })
}

fn validate_plan_inputs(
    budget: u64,
    delta: f64,
    delta_bound: f64,
    lipschitz: f64,
    p: f64,
    d: usize,
) -> Result<()> {
    if budget < 2 {
        return Err(Error::parameter("budget", "need at least 2 iterations"));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::parameter("delta", format!("must be in (0,1), got {delta}")));
    }
    if !(delta_bound >= 0.0) || !delta_bound.is_finite() {
        return Err(Error::parameter("delta_bound", "must be nonnegative and finite"));
    }
    if !(lipschitz > 0.0) || !lipschitz.is_finite() {
        return Err(Error::parameter("lipschitz", "must be positive and finite"));
    }
    if !(p > 1.0 && p <= 2.0) {
        return Err(Error::parameter("p", format!("must be in (1,2], got {p}")));
    }
    if d == 0 {
        return Err(Error::parameter("d", "dimension must be at least 1"));
    }
    Ok(())
}

/// `(d^{p/2} + 1)^{1/p}`, the dimension factor shared by the schedules.
fn dimension_factor(d: usize, p: f64) -> f64 {
    ((d as f64).powf(p / 2.0) + 1.0).powf(1.0 / p)
}

fn clamp_rounds(t_raw: f64, budget: u64) -> u64 {
    let half = (budget / 2).max(1);
    if !t_raw.is_finite() || t_raw.ceil() >= half as f64 {
        half
    } else {
        (t_raw.ceil() as u64).max(1)
    }
}

/// In-expectation schedule: given a budget `M`, target radius `delta`, an
/// upper bound `delta_bound >= f(x0) - f*`, and the oracle's `(L, p, d)`,
/// produce the full parameter schedule.
pub fn plan_expectation(
    budget: u64,
    delta: f64,
    delta_bound: f64,
    lipschitz: f64,
    p: f64,
    d: usize,
) -> Result<SolverConfig> {
    validate_plan_inputs(budget, delta, delta_bound, lipschitz, p, d)?;
    let m = budget as f64;
    let dim = dimension_factor(d, p);
    let t_raw = (delta * m * lipschitz * dim / (2.0 * delta * lipschitz + 2.0 * delta_bound))
        .powf(p / (2.0 * p - 1.0));
    let rounds = clamp_rounds(t_raw, budget);
    let restarts = budget / rounds;
    let domain_radius = delta / (2.0 * rounds as f64);
    let tau = (rounds as f64).powf(1.0 / p) * lipschitz * dim;
    SolverConfig::from_schedule(budget, rounds, restarts, domain_radius, tau, delta / 2.0)
}

/// `A` factor of the high-probability schedule at a given `log(2K/q)`.
pub(crate) fn highprob_amplitude(lipschitz: f64, p: f64, d: usize, log_term: f64) -> f64 {
    lipschitz * dimension_factor(d, p) * log_term.powf(-1.0 / p) * (8.0 + 14.5 * log_term)
}

pub(crate) fn highprob_deviation(q: f64) -> f64 {
    (8.0 * (6.0 / q).ln()).sqrt()
}

const PLANNER_MAX_ITERS: usize = 100;

/// Resolve the coupled high-probability schedule `(T, K)`.
///
/// `T` needs `A`, `A` needs `K = floor(M/T)`; the system is iterated from
/// `K = 2` until `T` stabilizes. A two-cycle resolves to the larger `T`.
fn highprob_fixed_point(
    budget: u64,
    delta: f64,
    delta_bound: f64,
    lipschitz: f64,
    p: f64,
    d: usize,
    q: f64,
) -> Result<(u64, u64)> {
    let m = budget as f64;
    let mut k: u64 = 2;
    let mut history: Vec<u64> = Vec::new();
    for _ in 0..PLANNER_MAX_ITERS {
        let log_term = (2.0 * k as f64 / q).ln();
        let a = highprob_amplitude(lipschitz, p, d, log_term);
        let t_raw = (a * m * delta / (2.0 * delta * lipschitz + 2.0 * delta_bound))
            .powf(p / (2.0 * p - 1.0));
        let t = clamp_rounds(t_raw, budget);
        if history.last() == Some(&t) {
            return Ok((t, budget / t));
        }
        if history.len() >= 2 && history[history.len() - 2] == t {
            // Oscillating between two values: take the larger.
            let other = *history.last().unwrap();
            let resolved = t.max(other);
            return Ok((resolved, budget / resolved));
        }
        history.push(t);
        k = budget / t;
    }
    Err(Error::PlannerConvergence {
        iterations: PLANNER_MAX_ITERS,
    })
}

/// High-probability schedule (confidence `1 - q`).
pub fn plan_highprob(
    budget: u64,
    delta: f64,
    delta_bound: f64,
    lipschitz: f64,
    p: f64,
    d: usize,
    q: f64,
) -> Result<SolverConfig> {
    validate_plan_inputs(budget, delta, delta_bound, lipschitz, p, d)?;
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::parameter("q", format!("must be in (0,1), got {q}")));
    }
    let (rounds, restarts) = highprob_fixed_point(budget, delta, delta_bound, lipschitz, p, d, q)?;
    let log_term = (2.0 * restarts as f64 / q).ln();
    let domain_radius = delta / (2.0 * rounds as f64);
    let tau =
        (rounds as f64).powf(1.0 / p) * lipschitz * dimension_factor(d, p) * log_term.powf(-1.0 / p);
    SolverConfig::from_schedule(budget, rounds, restarts, domain_radius, tau, delta / 2.0)
}

/// In-expectation stationarity bound attained by the expectation schedule
/// at budget `M`.
pub fn expected_bound(
    budget: u64,
    delta: f64,
    delta_bound: f64,
    lipschitz: f64,
    p: f64,
    d: usize,
) -> f64 {
    let m = budget as f64;
    let l = lipschitz;
    let dp2 = (d as f64).powf(p / 2.0);
    let head = 18.0
        * (delta_bound + delta * l).powf((p - 1.0) / (2.0 * p - 1.0))
        * (dp2 * l.powf(p) + l.powf(p)).powf(1.0 / (2.0 * p - 1.0))
        / (delta * m).powf((p - 1.0) / (2.0 * p - 1.0));
    let tail = 16.0 * l * dimension_factor(d, p) / m.powf((p - 1.0) / p);
    head.max(tail) + (2.0 * delta_bound + 2.0 * delta * l) / (delta * m)
}

/// High-probability stationarity bound at budget `M`, evaluated at the
/// planner's converged `(T, K)`.
pub fn highprob_bound(
    budget: u64,
    delta: f64,
    delta_bound: f64,
    lipschitz: f64,
    p: f64,
    d: usize,
    q: f64,
) -> Result<f64> {
    validate_plan_inputs(budget, delta, delta_bound, lipschitz, p, d)?;
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::parameter("q", format!("must be in (0,1), got {q}")));
    }
    let (_, restarts) = highprob_fixed_point(budget, delta, delta_bound, lipschitz, p, d, q)?;
    let log_term = (2.0 * restarts as f64 / q).ln();
    let a = highprob_amplitude(lipschitz, p, d, log_term);
    let b = highprob_deviation(q);
    let m = budget as f64;
    let head = 8.0 * a.powf(p / (2.0 * p - 1.0))
        * (delta_bound + delta * lipschitz).powf((p - 1.0) / (2.0 * p - 1.0))
        / (delta * m).powf((p - 1.0) / (2.0 * p - 1.0));
    let tail = 4.0 * a / m.powf((p - 1.0) / p);
    Ok((4.0 * delta * lipschitz + 4.0 * delta_bound) / (delta * m)
        + 2.0 * b / m.sqrt()
        + head.max(tail))
}

/// Smallest budget on a doubling grid whose in-expectation bound is at most
/// `epsilon`.
pub fn oracle_complexity_estimate(
    delta: f64,
    epsilon: f64,
    delta_bound: f64,
    lipschitz: f64,
    p: f64,
    d: usize,
) -> Result<u64> {
    validate_plan_inputs(2, delta, delta_bound, lipschitz, p, d)?;
    if !(epsilon > 0.0) {
        return Err(Error::parameter("epsilon", "must be positive"));
    }
    let mut m: u64 = 2;
    while expected_bound(m, delta, delta_bound, lipschitz, p, d) > epsilon {
        m = m.checked_mul(2).ok_or_else(|| {
            Error::parameter(
                "epsilon",
                "required budget exceeds the representable range at this (p, epsilon)",
            )
        })?;
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::{SyntheticConstant, SyntheticNorm};

    #[test]
    fn projection_examples() {
        let inside = DenseVector::from(vec![0.1, 0.0]);
        assert_eq!(project_ball(&inside, 1.0), inside);

        let outside = DenseVector::from(vec![3.0, 4.0]);
        let proj = project_ball(&outside, 1.0);
        assert!((proj.as_slice()[0] - 0.6).abs() < 1e-15);
        assert!((proj.as_slice()[1] - 0.8).abs() < 1e-15);

        let zero = DenseVector::zeros(3);
        assert_eq!(project_ball(&zero, 0.5), zero);
    }

    #[test]
    fn plan_expectation_frozen_values() {
        // Recomputed independently from the schedule formulas.
        let cfg = plan_expectation(1_000_000, 0.1, 1.0, 1.0, 2.0, 10).unwrap();
        assert_eq!(cfg.rounds(), 2833);
        assert_eq!(cfg.restarts(), 352);
        let rel = |a: f64, b: f64| (a - b).abs() / b.abs();
        assert!(rel(cfg.domain_radius(), 1.7649135192375574e-5) < 1e-12);
        assert!(rel(cfg.clip_threshold(), 176.5304506310455) < 1e-12);
        assert_eq!(cfg.smoothing_radius(), 0.05);
        assert_eq!(cfg.step_size(), cfg.domain_radius() / cfg.clip_threshold());
    }

    #[test]
    fn plan_expectation_clamps_to_half_budget() {
        let cfg = plan_expectation(8, 0.999999, 1e-12, 1.0, 2.0, 1).unwrap();
        assert_eq!(cfg.rounds(), 4);
        assert_eq!(cfg.restarts(), 2);
    }

    #[test]
    fn plan_expectation_identities() {
        for (m, delta, db, l, p, d) in [
            (1000u64, 0.3, 2.0, 0.5, 1.5, 7usize),
            (77, 0.05, 10.0, 3.0, 2.0, 100),
            (1_000_000, 0.9, 0.01, 10.0, 1.2, 1),
        ] {
            let cfg = plan_expectation(m, delta, db, l, p, d).unwrap();
            let ulps = crate::harness::ulp_distance(
                cfg.step_size() * cfg.clip_threshold(),
                cfg.domain_radius(),
            );
            assert!(ulps <= 1, "eta*tau off by {ulps} ulps");
            let two_td = 2.0 * cfg.rounds() as f64 * cfg.domain_radius();
            assert!(crate::harness::ulp_distance(two_td, delta) <= 1);
            assert_eq!(cfg.smoothing_radius(), delta / 2.0);
            assert_eq!(cfg.restarts(), m / cfg.rounds());
            assert!(cfg.rounds() <= m / 2);
        }
    }

    #[test]
    fn plan_rejects_tiny_budget() {
        assert!(plan_expectation(1, 0.1, 1.0, 1.0, 2.0, 10).is_err());
    }

    #[test]
    fn expected_bound_frozen_value() {
        let v = expected_bound(1_000_000, 0.1, 1.0, 1.0, 2.0, 10);
        assert!((v - 0.8903177397847661).abs() < 1e-12 * v);
    }

    #[test]
    fn expected_bound_decreasing_and_vanishing() {
        let args = (0.1, 1.0, 1.0, 2.0, 10);
        let mut m = 100u64;
        let mut prev = expected_bound(m, args.0, args.1, args.2, args.3, args.4);
        for _ in 0..20 {
            m *= 2;
            let next = expected_bound(m, args.0, args.1, args.2, args.3, args.4);
            assert!(next < prev);
            prev = next;
        }
        assert!(expected_bound(u64::MAX / 2, 0.1, 1.0, 1.0, 2.0, 10) < 1e-3);
    }

    #[test]
    fn plan_highprob_frozen_values() {
        let cfg = plan_highprob(1_000_000, 0.1, 1.0, 1.0, 2.0, 10, 0.1).unwrap();
        assert_eq!(cfg.rounds(), 33040);
        assert_eq!(cfg.restarts(), 30);
        let rel = |a: f64, b: f64| (a - b).abs() / b.abs();
        assert!(rel(cfg.clip_threshold(), 238.3584619626648) < 1e-12);
        assert_eq!(cfg.smoothing_radius(), 0.05);
        // Self-consistency at the converged (T, K).
        let log_term = (2.0 * cfg.restarts() as f64 / 0.1).ln();
        let a = highprob_amplitude(1.0, 2.0, 10, log_term);
        let t_raw = (a * 1e6 * 0.1 / (2.0 * 0.1 + 2.0)).powf(2.0 / 3.0);
        assert_eq!(t_raw.ceil() as u64, cfg.rounds());
    }

    #[test]
    fn highprob_amplitude_at_unit_log() {
        // log(2K/q) = 1 collapses A to L (d^{p/2}+1)^{1/p} * (8 + 29/2).
        let a = highprob_amplitude(2.0, 2.0, 10, 1.0);
        let expect = 2.0 * (10f64 + 1.0).sqrt() * 22.5;
        assert!((a - expect).abs() < 1e-12 * expect);
    }

    #[test]
    fn highprob_deviation_closed_form() {
        // q = 6 e^{-8} makes log(6/q) = 8, so B = sqrt(64) = 8.
        let q = 6.0 * (-8.0f64).exp();
        assert!((highprob_deviation(q) - 8.0).abs() < 1e-12);
    }

    #[test]
    fn plan_highprob_respects_clamps() {
        for (m, q) in [(100u64, 0.5), (1_000_000, 0.01), (50, 0.9)] {
            let cfg = plan_highprob(m, 0.2, 1.0, 1.0, 1.7, 20, q).unwrap();
            assert!(cfg.rounds() <= m / 2);
            assert!(cfg.restarts() * cfg.rounds() <= m);
            assert_eq!(cfg.restarts(), m / cfg.rounds());
        }
    }

    #[test]
    fn highprob_bound_frozen_value() {
        let v = highprob_bound(1_000_000, 0.1, 1.0, 1.0, 2.0, 10, 0.1).unwrap();
        assert!((v - 4.626865811716579).abs() < 1e-12 * v);
    }

    #[test]
    fn complexity_doubling_contract() {
        let m1 = oracle_complexity_estimate(0.1, 0.5, 1.0, 1.0, 2.0, 10).unwrap();
        let m2 = oracle_complexity_estimate(0.1, 0.25, 1.0, 1.0, 2.0, 10).unwrap();
        assert_eq!(m1, 8_388_608);
        assert_eq!(m2, 67_108_864);
        assert_eq!(m2 / m1, 8); // eps^{-3} scaling at p = 2
        assert!(expected_bound(m1, 0.1, 1.0, 1.0, 2.0, 10) <= 0.5);
        assert!(expected_bound(m1 / 2, 0.1, 1.0, 1.0, 2.0, 10) > 0.5);
    }

    #[test]
    fn complexity_blows_up_near_p_one() {
        // Exponents explode as p -> 1+; the doubling grid leaves u64.
        let res = oracle_complexity_estimate(0.1, 1e-3, 1.0, 1.0, 1.05, 100);
        assert!(res.is_err());
    }

    #[test]
    fn constant_oracle_never_moves() {
        let oracle = SyntheticConstant::new(4, 2.5);
        let cfg = SolverConfig::from_schedule(100, 10, 10, 0.5, 1.0, 0.01).unwrap();
        let x0 = DenseVector::from(vec![1.0, -1.0, 0.5, 0.0]);
        let rng = RngStream::new(17);
        let rec = zocoon_run(&oracle, &cfg, &x0, &rng, 25).unwrap();
        assert_eq!(rec.output, x0);
        for avg in &rec.restart_averages {
            assert_eq!(*avg, x0);
        }
        for c in &rec.checkpoints {
            assert_eq!(c.clean_loss, 2.5);
        }
    }

    #[test]
    fn single_iteration_returns_start() {
        // K = T = 1: delta_1 = 0 so w_1 = x0 and the only average is x0.
        let oracle = SyntheticNorm::new(3, 1.0);
        let cfg = SolverConfig::manual(1, 0.1, 1.0, 0.01, 0.05).unwrap();
        let x0 = DenseVector::from(vec![0.2, -0.4, 1.0]);
        let rng = RngStream::new(3);
        let rec = zocoon_run(&oracle, &cfg, &x0, &rng, 1).unwrap();
        assert_eq!(rec.output, x0);
        assert_eq!(rec.checkpoints.len(), 1);
        assert_eq!(rec.checkpoints[0].oracle_calls, 2);
    }

    #[test]
    fn run_is_reproducible_bit_for_bit() {
        let oracle = SyntheticNorm::new(5, 1.0);
        let cfg = plan_expectation(400, 0.2, 1.0, 1.0, 2.0, 5).unwrap();
        let x0 = DenseVector::from(vec![1.0, 0.0, 0.0, 0.0, 0.0]);
        let r1 = zocoon_run(&oracle, &cfg, &x0, &RngStream::new(99), 7).unwrap();
        let r2 = zocoon_run(&oracle, &cfg, &x0, &RngStream::new(99), 7).unwrap();
        assert_eq!(r1.output, r2.output);
        assert_eq!(r1.checkpoints.len(), r2.checkpoints.len());
        for (a, b) in r1.checkpoints.iter().zip(&r2.checkpoints) {
            assert_eq!(a.clean_loss.to_bits(), b.clean_loss.to_bits());
            assert_eq!(a.oracle_calls, b.oracle_calls);
        }
    }

    #[test]
    fn oracle_calls_accounting() {
        let oracle = SyntheticNorm::new(2, 1.0);
        let cfg = SolverConfig::manual(10, 0.1, 1.0, 0.01, 0.05).unwrap();
        let x0 = DenseVector::from(vec![1.0, 0.0]);
        let rec = zocoon_run(&oracle, &cfg, &x0, &RngStream::new(1), 1).unwrap();
        assert_eq!(rec.checkpoints.len(), 10);
        for (i, c) in rec.checkpoints.iter().enumerate() {
            assert_eq!(c.oracle_calls, 2 * (i as u64 + 1));
        }
    }

    #[test]
    fn displacement_and_clip_invariants_hold() {
        let oracle = SyntheticNorm::new(4, 1.0);
        let cfg = plan_expectation(500, 0.3, 1.0, 1.0, 2.0, 4).unwrap();
        let x0 = DenseVector::from(vec![1.0, 0.0, 0.0, 0.0]);
        let d_radius = cfg.domain_radius();
        let tau = cfg.clip_threshold();
        let mut violations = 0;
        zocoon_run_observed(&oracle, &cfg, &x0, &RngStream::new(5), 100, |obs| {
            if obs.displacement.norm2() > d_radius * (1.0 + 1e-12) {
                violations += 1;
            }
            if obs.clipped_estimate.norm2() > tau * (1.0 + 1e-12) {
                violations += 1;
            }
        })
        .unwrap();
        assert_eq!(violations, 0);
    }

    #[test]
    fn non_finite_oracle_reports_iteration_index() {
        struct BlowsUpAt(u64, std::sync::atomic::AtomicU64);
        impl crate::oracle::StochasticOracle for BlowsUpAt {
            fn dimension(&self) -> usize {
                2
            }
            fn clean_value(&self, _x: &DenseVector) -> f64 {
                0.0
            }
            fn noisy_pair(
                &self,
                _a: &DenseVector,
                _b: &DenseVector,
                _rng: &mut RngStream,
            ) -> (f64, f64) {
                let n = self.1.fetch_add(1, std::sync::atomic::Ordering::Relaxed) + 1;
                if n >= self.0 {
                    (f64::NAN, 0.0)
                } else {
                    (0.5, 0.25)
                }
            }
            fn lipschitz_bound(&self) -> f64 {
                1.0
            }
            fn moment_order(&self) -> f64 {
                2.0
            }
        }
        let oracle = BlowsUpAt(4, std::sync::atomic::AtomicU64::new(0));
        let cfg = SolverConfig::manual(10, 0.1, 1.0, 0.01, 0.05).unwrap();
        let err = zocoon_run(&oracle, &cfg, &DenseVector::zeros(2), &RngStream::new(0), 1);
        match err {
            Err(Error::NonFinite { iteration, .. }) => assert_eq!(iteration, 4),
            other => panic!("expected a located numeric error, got {other:?}"),
        }
    }

    #[test]
    fn free_step_mode_flagged() {
        let cfg = plan_expectation(100, 0.1, 1.0, 1.0, 2.0, 3).unwrap();
        assert!(!cfg.is_step_overridden());
        let over = cfg.with_step_override(1e-3).unwrap();
        assert!(over.is_step_overridden());
        assert_eq!(over.step_size(), 1e-3);
    }
}
