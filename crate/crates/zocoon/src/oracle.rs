//! The stochastic zeroth-order oracle contract.

use std::sync::atomic::{AtomicU64, Ordering};

use crate::rng::RngStream;
use crate::vector::DenseVector;

/// Access to noisy function values `F(x; xi)` of an objective
/// `f(x) = E[F(x; xi)]`, plus the noiseless `f` for reporting.
///
/// A single noise realization `xi` must be usable at two distinct points:
/// the two-point gradient estimator evaluates `F(x + d'w; xi)` and
/// `F(x - d'w; xi)` with a shared draw, which is exactly what
/// [`noisy_pair`](StochasticOracle::noisy_pair) provides.
pub trait StochasticOracle: Sync {
    fn dimension(&self) -> usize;

    /// Noiseless objective value, deterministic in `x`.
    fn clean_value(&self, x: &DenseVector) -> f64;

    /// Evaluate `F` at two points with one shared noise draw.
    fn noisy_pair(&self, a: &DenseVector, b: &DenseVector, rng: &mut RngStream) -> (f64, f64);

    /// One draw of `F(x; xi)`.
    fn noisy_value(&self, x: &DenseVector, rng: &mut RngStream) -> f64 {
        self.noisy_pair(x, x, rng).0
    }

    /// A constant `L` with `E[L(xi)^p] <= L^p`.
    fn lipschitz_bound(&self) -> f64;

    /// The certified moment order `p` in `(1, 2]`.
    fn moment_order(&self) -> f64;
}

impl<O: StochasticOracle + ?Sized> StochasticOracle for &O {
    fn dimension(&self) -> usize {
        (**self).dimension()
    }
    fn clean_value(&self, x: &DenseVector) -> f64 {
        (**self).clean_value(x)
    }
    fn noisy_pair(&self, a: &DenseVector, b: &DenseVector, rng: &mut RngStream) -> (f64, f64) {
        (**self).noisy_pair(a, b, rng)
    }
    fn noisy_value(&self, x: &DenseVector, rng: &mut RngStream) -> f64 {
        (**self).noisy_value(x, rng)
    }
    fn lipschitz_bound(&self) -> f64 {
        (**self).lipschitz_bound()
    }
    fn moment_order(&self) -> f64 {
        (**self).moment_order()
    }
}

/// Wrapper counting noisy function evaluations.
///
/// `noisy_pair` counts as two zeroth-order calls, `noisy_value` as one;
/// `clean_value` is reporting-only and never counted.
pub struct CallCountingOracle<'a, O: StochasticOracle + ?Sized> {
    inner: &'a O,
    calls: AtomicU64,
}

impl<'a, O: StochasticOracle + ?Sized> CallCountingOracle<'a, O> {
    pub fn new(inner: &'a O) -> Self {
        CallCountingOracle {
            inner,
            calls: AtomicU64::new(0),
        }
    }

    pub fn calls(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }
}

impl<O: StochasticOracle + ?Sized> StochasticOracle for CallCountingOracle<'_, O> {
    fn dimension(&self) -> usize {
        self.inner.dimension()
    }

    fn clean_value(&self, x: &DenseVector) -> f64 {
        self.inner.clean_value(x)
    }

    fn noisy_pair(&self, a: &DenseVector, b: &DenseVector, rng: &mut RngStream) -> (f64, f64) {
        self.calls.fetch_add(2, Ordering::Relaxed);
        self.inner.noisy_pair(a, b, rng)
    }

    fn noisy_value(&self, x: &DenseVector, rng: &mut RngStream) -> f64 {
        self.calls.fetch_add(1, Ordering::Relaxed);
        self.inner.noisy_value(x, rng)
    }

    fn lipschitz_bound(&self) -> f64 {
        self.inner.lipschitz_bound()
    }

    fn moment_order(&self) -> f64 {
        self.inner.moment_order()
    }
}

/// View of an oracle with the noise stripped: both paired evaluations go
/// through `clean_value`. Used when measuring stationarity of `f` itself.
pub struct NoiselessView<'a, O: StochasticOracle + ?Sized>(pub &'a O);

impl<O: StochasticOracle + ?Sized> StochasticOracle for NoiselessView<'_, O> {
    fn dimension(&self) -> usize {
        self.0.dimension()
    }

    fn clean_value(&self, x: &DenseVector) -> f64 {
        self.0.clean_value(x)
    }

    fn noisy_pair(&self, a: &DenseVector, b: &DenseVector, _rng: &mut RngStream) -> (f64, f64) {
        (self.0.clean_value(a), self.0.clean_value(b))
    }

    fn lipschitz_bound(&self) -> f64 {
        self.0.lipschitz_bound()
    }

    fn moment_order(&self) -> f64 {
        self.0.moment_order()
    }
}
