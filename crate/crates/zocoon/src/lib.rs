// `!(x > 0.0)` rejects NaN together with nonpositive values; the rewrite
// clippy suggests loses that.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! Clipped zeroth-order optimization for nonsmooth nonconvex objectives
//! under heavy-tailed value noise.
//!
//! The main solver runs an online-to-nonconvex loop on top of a two-point
//! gradient estimator whose estimates are clipped to a norm ceiling before
//! each projected step; restart-block averages of the query points form the
//! candidate outputs. Planners turn `(budget, target radius, L, p, d)` into
//! full parameter schedules, both in expectation and with high probability,
//! together with evaluators for the attained stationarity bounds.
//!
//! Around the solver the crate provides:
//!
//! * [`estimator`] — unit-sphere sampling, the two-point estimator, the
//!   clipping operator, and Monte Carlo verifiers for their moment bounds;
//! * [`baselines`] — gradient-free SGD (GFM) and the unclipped loop (ZOO2N);
//! * [`objectives`] — a capped-l1 penalized SVM with symmetrized-Pareto
//!   linear value noise, plus noiseless synthetic fixtures;
//! * [`stationarity`] — smoothed-gradient-norm measurement as a Goldstein
//!   stationarity proxy;
//! * [`data`] — LIBSVM-format parsing, label normalization, subsetting;
//! * [`harness`] — the experiment pipeline (seed/grid fan-out, CSV and SVG
//!   emission) and a statistical verification suite.
//!
//! Every stochastic draw flows through a seeded [`rng::RngStream`]; equal
//! seeds reproduce runs bit-for-bit.
//!
//! See the `examples/` directory for one runnable example per capability,
//! and the `zocoon-bench` binary for the command-line pipeline.

pub mod baselines;
pub mod data;
pub mod error;
pub mod estimator;
pub mod harness;
pub mod objectives;
pub mod oracle;
pub mod rng;
pub mod solver;
pub mod stationarity;
pub mod vector;

pub use error::{Error, Result};
pub use oracle::StochasticOracle;
pub use rng::RngStream;
pub use solver::{RunRecord, SolverConfig};
pub use vector::{DenseVector, SparseExample};
