//! Concrete stochastic oracles: the capped-l1 penalized SVM with
//! heavy-tailed linear noise, and noiseless synthetic fixtures.

use crate::error::{Error, Result};
use crate::oracle::StochasticOracle;
use crate::rng::RngStream;
use crate::vector::{DenseVector, SparseExample};

/// Hinge loss `max(1 - z, 0)`.
#[inline]
pub fn hinge(z: f64) -> f64 {
    (1.0 - z).max(0.0)
}

/// Capped-l1 penalty `lambda * sum_j min(|x_j|, alpha)`.
///
/// Bounded above by `lambda * d * alpha`; nonconvex but Lipschitz.
pub fn capped_l1(x: &DenseVector, lambda: f64, alpha: f64) -> f64 {
    lambda * x.as_slice().iter().map(|v| v.abs().min(alpha)).sum::<f64>()
}

/// Additive value-noise model for an oracle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NoiseModel {
    /// Noiseless: `F(x; xi) = f(x)`.
    None,
    /// `F(x; xi) = f(x) + <xi, x>` with i.i.d. sign-symmetrized Pareto
    /// coordinates. For `shape` in (1, 2) the coordinate variance is
    /// infinite while the mean stays zero, so `E[F(x; xi)] = f(x)`.
    ParetoLinear { shape: f64, scale: f64 },
}

impl NoiseModel {
    fn validate(&self) -> Result<()> {
        if let NoiseModel::ParetoLinear { shape, scale } = self {
            if !(*shape > 1.0) {
                return Err(Error::parameter("shape", "Pareto shape must exceed 1"));
            }
            if !(*scale > 0.0) {
                return Err(Error::parameter("scale", "Pareto scale must be positive"));
            }
        }
        Ok(())
    }
}

/// One symmetrized Pareto coordinate: `sign * scale * U^{-1/shape}` with
/// `U` uniform on (0, 1]. The magnitude draw comes first, then the sign.
#[inline]
fn pareto_coordinate(shape: f64, scale: f64, rng: &mut RngStream) -> f64 {
    let u = rng.open_closed();
    let magnitude = scale * u.powf(-1.0 / shape);
    magnitude * rng.sign()
}

/// Draw a vector of i.i.d. sign-symmetrized Pareto coordinates.
///
/// Coordinate magnitudes are at least `scale`; `E[xi_j] = 0` and
/// `E|xi_j|^p = shape / (shape - p) * scale^p` for `p < shape`.
pub fn sample_pareto_vector(
    d: usize,
    shape: f64,
    scale: f64,
    rng: &mut RngStream,
) -> Result<DenseVector> {
    NoiseModel::ParetoLinear { shape, scale }.validate()?;
    Ok(DenseVector::new(
        (0..d).map(|_| pareto_coordinate(shape, scale, rng)).collect(),
    ))
}

/// Nonconvex penalized SVM:
///
/// ```text
/// f(x) = (1/n) sum_i hinge(b_i a_i.x) + lambda sum_j min(|x_j|, alpha)
/// ```
///
/// with noisy evaluations `F(x; xi) = f(x) + <xi, x>`. One `xi` is drawn per
/// oracle invocation and shared across the two points of a paired call, as
/// the two-point estimator requires.
pub struct CappedL1SvmProblem {
    dimension: usize,
    lambda: f64,
    alpha: f64,
    noise: NoiseModel,
    // Row-major flattened examples for cache-friendly evaluation.
    row_offsets: Vec<usize>,
    col_indices: Vec<u32>,
    col_values: Vec<f64>,
    labels: Vec<f64>,
    max_row_norm: f64,
}

impl CappedL1SvmProblem {
    pub fn new(
        examples: &[SparseExample],
        dimension: usize,
        lambda: f64,
        alpha: f64,
        noise: NoiseModel,
    ) -> Result<Self> {
        if examples.is_empty() {
            return Err(Error::parameter("examples", "need at least one example"));
        }
        if !(lambda > 0.0) {
            return Err(Error::parameter("lambda", "must be positive"));
        }
        if !(alpha > 0.0) {
            return Err(Error::parameter("alpha", "must be positive"));
        }
        noise.validate()?;
        let mut row_offsets = Vec::with_capacity(examples.len() + 1);
        let mut col_indices = Vec::new();
        let mut col_values = Vec::new();
        let mut labels = Vec::with_capacity(examples.len());
        let mut max_row_norm = 0.0f64;
        row_offsets.push(0);
        for ex in examples {
            if let Some(max) = ex.max_index() {
                if max as usize >= dimension {
                    return Err(Error::Dimension {
                        expected: max as usize + 1,
                        got: dimension,
                    });
                }
            }
            col_indices.extend_from_slice(ex.indices());
            col_values.extend_from_slice(ex.values());
            row_offsets.push(col_indices.len());
            labels.push(ex.label());
            let norm = ex.values().iter().map(|v| v * v).sum::<f64>().sqrt();
            max_row_norm = max_row_norm.max(norm);
        }
        Ok(CappedL1SvmProblem {
            dimension,
            lambda,
            alpha,
            noise,
            row_offsets,
            col_indices,
            col_values,
            labels,
            max_row_norm,
        })
    }

    pub fn num_examples(&self) -> usize {
        self.labels.len()
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn noise(&self) -> NoiseModel {
        self.noise
    }

    fn hinge_mean(&self, x: &DenseVector) -> f64 {
        let xs = x.as_slice();
        let mut acc = 0.0;
        for i in 0..self.labels.len() {
            let (s, e) = (self.row_offsets[i], self.row_offsets[i + 1]);
            let mut margin = 0.0;
            for k in s..e {
                margin += self.col_values[k] * xs[self.col_indices[k] as usize];
            }
            acc += hinge(self.labels[i] * margin);
        }
        acc / self.labels.len() as f64
    }

    /// Hinge means at two points sharing one pass over the data.
    fn hinge_mean_pair(&self, a: &DenseVector, b: &DenseVector) -> (f64, f64) {
        let (av, bv) = (a.as_slice(), b.as_slice());
        let mut acc_a = 0.0;
        let mut acc_b = 0.0;
        for i in 0..self.labels.len() {
            let (s, e) = (self.row_offsets[i], self.row_offsets[i + 1]);
            let mut ma = 0.0;
            let mut mb = 0.0;
            for k in s..e {
                let j = self.col_indices[k] as usize;
                let v = self.col_values[k];
                ma += v * av[j];
                mb += v * bv[j];
            }
            acc_a += hinge(self.labels[i] * ma);
            acc_b += hinge(self.labels[i] * mb);
        }
        let n = self.labels.len() as f64;
        (acc_a / n, acc_b / n)
    }

    /// Noise inner products `(<xi, a>, <xi, b>)` for a single fresh draw of
    /// `xi`, without materializing the noise vector.
    fn noise_pair(&self, a: &DenseVector, b: &DenseVector, rng: &mut RngStream) -> (f64, f64) {
        match self.noise {
            NoiseModel::None => (0.0, 0.0),
            NoiseModel::ParetoLinear { shape, scale } => {
                let (av, bv) = (a.as_slice(), b.as_slice());
                let mut na = 0.0;
                let mut nb = 0.0;
                for j in 0..self.dimension {
                    let xi = pareto_coordinate(shape, scale, rng);
                    na += xi * av[j];
                    nb += xi * bv[j];
                }
                (na, nb)
            }
        }
    }
}

impl StochasticOracle for CappedL1SvmProblem {
    fn dimension(&self) -> usize {
        self.dimension
    }

    fn clean_value(&self, x: &DenseVector) -> f64 {
        assert_eq!(x.dim(), self.dimension, "dimension mismatch");
        self.hinge_mean(x) + capped_l1(x, self.lambda, self.alpha)
    }

    fn noisy_pair(&self, a: &DenseVector, b: &DenseVector, rng: &mut RngStream) -> (f64, f64) {
        assert_eq!(a.dim(), self.dimension, "dimension mismatch");
        assert_eq!(b.dim(), self.dimension, "dimension mismatch");
        let (ha, hb) = self.hinge_mean_pair(a, b);
        let ra = capped_l1(a, self.lambda, self.alpha);
        let rb = capped_l1(b, self.lambda, self.alpha);
        let (na, nb) = self.noise_pair(a, b, rng);
        (ha + ra + na, hb + rb + nb)
    }

    /// Lipschitz modulus of one noisy draw is `L_clean + ||xi||`; the bound
    /// folds the noise's p-th moment in via
    /// `E[(a + b)^p] <= 2^{p-1}(a^p + E b^p)` and `E||xi||^p <= d E|xi_j|^p`.
    fn lipschitz_bound(&self) -> f64 {
        let clean = self.max_row_norm + self.lambda * self.dimension as f64;
        match self.noise {
            NoiseModel::None => clean,
            NoiseModel::ParetoLinear { shape, scale } => {
                let p = self.moment_order();
                let coord_moment = shape / (shape - p) * scale.powf(p);
                let noise_moment = self.dimension as f64 * coord_moment;
                (2f64.powf(p - 1.0) * (clean.powf(p) + noise_moment)).powf(1.0 / p)
            }
        }
    }

    /// For Pareto noise with tail index `a`, moments are finite only below
    /// `a`; report `min(2, 1 + 0.8 (a - 1))`, safely inside the finite range.
    fn moment_order(&self) -> f64 {
        match self.noise {
            NoiseModel::None => 2.0,
            NoiseModel::ParetoLinear { shape, .. } => (1.0 + 0.8 * (shape - 1.0)).min(2.0),
        }
    }
}

/// Noiseless `f(x) = L ||x||`: nonsmooth, exactly `L`-Lipschitz.
pub struct SyntheticNorm {
    dimension: usize,
    lipschitz: f64,
    moment_order: f64,
}

impl SyntheticNorm {
    pub fn new(dimension: usize, lipschitz: f64) -> Self {
        SyntheticNorm {
            dimension,
            lipschitz,
            moment_order: 2.0,
        }
    }

    /// Override the reported moment order (the oracle is noiseless, so any
    /// `p` in (1, 2] is valid).
    pub fn with_moment_order(mut self, p: f64) -> Self {
        self.moment_order = p;
        self
    }
}

impl StochasticOracle for SyntheticNorm {
    fn dimension(&self) -> usize {
        self.dimension
    }
    fn clean_value(&self, x: &DenseVector) -> f64 {
        self.lipschitz * x.norm2()
    }
    fn noisy_pair(&self, a: &DenseVector, b: &DenseVector, _rng: &mut RngStream) -> (f64, f64) {
        (self.clean_value(a), self.clean_value(b))
    }
    fn lipschitz_bound(&self) -> f64 {
        self.lipschitz
    }
    fn moment_order(&self) -> f64 {
        self.moment_order
    }
}

/// Noiseless linear `f(x) = c.x`; the estimator is exactly analyzable here.
pub struct SyntheticLinear {
    coefficients: DenseVector,
    moment_order: f64,
}

impl SyntheticLinear {
    pub fn new(coefficients: DenseVector) -> Self {
        SyntheticLinear {
            coefficients,
            moment_order: 2.0,
        }
    }

    pub fn with_moment_order(mut self, p: f64) -> Self {
        self.moment_order = p;
        self
    }

    pub fn coefficients(&self) -> &DenseVector {
        &self.coefficients
    }
}

impl StochasticOracle for SyntheticLinear {
    fn dimension(&self) -> usize {
        self.coefficients.dim()
    }
    fn clean_value(&self, x: &DenseVector) -> f64 {
        self.coefficients.dot(x).expect("dimension mismatch")
    }
    fn noisy_pair(&self, a: &DenseVector, b: &DenseVector, _rng: &mut RngStream) -> (f64, f64) {
        (self.clean_value(a), self.clean_value(b))
    }
    fn lipschitz_bound(&self) -> f64 {
        self.coefficients.norm2()
    }
    fn moment_order(&self) -> f64 {
        self.moment_order
    }
}

/// Noiseless quadratic `f(x) = ||x||^2`, 2-smooth everywhere. The reported
/// Lipschitz bound `2 * local_radius` is valid on the ball of that radius.
pub struct SyntheticQuadratic {
    dimension: usize,
    local_radius: f64,
}

impl SyntheticQuadratic {
    pub fn new(dimension: usize) -> Self {
        SyntheticQuadratic {
            dimension,
            local_radius: 2.0,
        }
    }

    pub fn with_local_radius(mut self, r: f64) -> Self {
        self.local_radius = r;
        self
    }

    /// Gradient Lipschitz constant (the quadratic is `H`-smooth with `H = 2`).
    pub fn smoothness(&self) -> f64 {
        2.0
    }
}

impl StochasticOracle for SyntheticQuadratic {
    fn dimension(&self) -> usize {
        self.dimension
    }
    fn clean_value(&self, x: &DenseVector) -> f64 {
        x.as_slice().iter().map(|v| v * v).sum()
    }
    fn noisy_pair(&self, a: &DenseVector, b: &DenseVector, _rng: &mut RngStream) -> (f64, f64) {
        (self.clean_value(a), self.clean_value(b))
    }
    fn lipschitz_bound(&self) -> f64 {
        2.0 * self.local_radius
    }
    fn moment_order(&self) -> f64 {
        2.0
    }
}

/// Constant objective; every gradient estimate is exactly zero.
pub struct SyntheticConstant {
    dimension: usize,
    value: f64,
}

impl SyntheticConstant {
    pub fn new(dimension: usize, value: f64) -> Self {
        SyntheticConstant { dimension, value }
    }
}

impl StochasticOracle for SyntheticConstant {
    fn dimension(&self) -> usize {
        self.dimension
    }
    fn clean_value(&self, _x: &DenseVector) -> f64 {
        self.value
    }
    fn noisy_pair(&self, _a: &DenseVector, _b: &DenseVector, _rng: &mut RngStream) -> (f64, f64) {
        (self.value, self.value)
    }
    fn lipschitz_bound(&self) -> f64 {
        0.0
    }
    fn moment_order(&self) -> f64 {
        2.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy_problem(noise: NoiseModel) -> CappedL1SvmProblem {
        let examples = vec![
            SparseExample::new(vec![0], vec![1.0], 1.0).unwrap(),
            SparseExample::new(vec![1], vec![1.0], -1.0).unwrap(),
        ];
        CappedL1SvmProblem::new(&examples, 2, 0.1, 2.0, noise).unwrap()
    }

    #[test]
    fn hinge_values() {
        assert_eq!(hinge(0.0), 1.0);
        assert_eq!(hinge(1.0), 0.0);
        assert_eq!(hinge(-2.0), 3.0);
    }

    #[test]
    fn capped_l1_values() {
        assert_eq!(capped_l1(&DenseVector::zeros(4), 0.1, 2.0), 0.0);
        let x = DenseVector::from(vec![3.0, -1.0]);
        assert!((capped_l1(&x, 0.1, 2.0) - 0.3).abs() < 1e-15);
        let all_capped = DenseVector::from(vec![2.0; 5]);
        assert!((capped_l1(&all_capped, 0.5, 2.0) - 0.5 * 5.0 * 2.0).abs() < 1e-15);
    }

    #[test]
    fn svm_clean_value_at_origin_is_one() {
        let p = toy_problem(NoiseModel::None);
        assert_eq!(p.clean_value(&DenseVector::zeros(2)), 1.0);
    }

    #[test]
    fn svm_clean_value_hand_example() {
        // a1=[1,0] b1=+1, a2=[0,1] b2=-1, x=[2,-2], lambda=0.1, alpha=2:
        // hinges both zero, regularizer 0.1*(2+2) = 0.4.
        let p = toy_problem(NoiseModel::None);
        let x = DenseVector::from(vec![2.0, -2.0]);
        assert!((p.clean_value(&x) - 0.4).abs() < 1e-15);
    }

    #[test]
    fn svm_single_example_zero_hinge() {
        let examples = vec![SparseExample::new(vec![0], vec![1.0], 1.0).unwrap()];
        let p = CappedL1SvmProblem::new(&examples, 1, 1e-12, 2.0, NoiseModel::None).unwrap();
        let x = DenseVector::from(vec![1.0]);
        assert!(p.clean_value(&x) < 1e-11);
    }

    #[test]
    fn noiseless_matches_clean() {
        let p = toy_problem(NoiseModel::None);
        let mut rng = RngStream::new(0);
        let x = DenseVector::from(vec![0.3, -0.7]);
        assert_eq!(p.noisy_value(&x, &mut rng), p.clean_value(&x));
    }

    #[test]
    fn noise_vanishes_at_origin() {
        let p = toy_problem(NoiseModel::ParetoLinear {
            shape: 1.5,
            scale: 1.0,
        });
        let mut rng = RngStream::new(1);
        let zero = DenseVector::zeros(2);
        assert_eq!(p.noisy_value(&zero, &mut rng), p.clean_value(&zero));
    }

    #[test]
    fn paired_calls_share_noise_draw() {
        // With shared xi: F(x+u;xi) - F(x-u;xi) = f(x+u) - f(x-u) + 2<xi,u>,
        // so the noise contribution to the difference is linear in u. Verify
        // by reconstructing <xi, .> from two paired evaluations.
        let p = toy_problem(NoiseModel::ParetoLinear {
            shape: 1.5,
            scale: 1.0,
        });
        let x = DenseVector::from(vec![0.5, 0.25]);
        let u = DenseVector::from(vec![0.01, -0.02]);
        let plus = x.add_scaled(1.0, &u);
        let minus = x.add_scaled(-1.0, &u);
        let mut rng = RngStream::new(2);
        let (fp, fm) = p.noisy_pair(&plus, &minus, &mut rng);
        let clean_diff = p.clean_value(&plus) - p.clean_value(&minus);
        let noise_diff = (fp - fm) - clean_diff; // = 2 <xi, u>
        // Same xi at both points also means the SUM carries <xi, plus+minus>:
        let clean_sum = p.clean_value(&plus) + p.clean_value(&minus);
        let noise_sum = (fp + fm) - clean_sum; // = <xi, plus+minus> = 2 <xi, x>
        // Consistency: solve for <xi,u> and <xi,x>; both must be finite and
        // reproducible under the same seed.
        let mut rng2 = RngStream::new(2);
        let (fp2, fm2) = p.noisy_pair(&plus, &minus, &mut rng2);
        assert_eq!(fp.to_bits(), fp2.to_bits());
        assert_eq!(fm.to_bits(), fm2.to_bits());
        assert!(noise_diff.is_finite() && noise_sum.is_finite());
    }

    #[test]
    fn pareto_magnitude_at_support_edge() {
        // U = 1 gives magnitude exactly `scale`; U = 0.25 at shape 1.5 gives
        // 0.25^{-2/3} = 2.5198420997897464.
        let shape = 1.5;
        let m = |u: f64| 1.0 * u.powf(-1.0 / shape);
        assert!((m(1.0) - 1.0).abs() < 1e-15);
        assert!((m(0.25) - 2.5198420997897464).abs() < 1e-12);
    }

    #[test]
    fn pareto_vector_magnitudes_at_least_scale() {
        let mut rng = RngStream::new(3);
        let v = sample_pareto_vector(100, 1.5, 0.5, &mut rng).unwrap();
        assert!(v.as_slice().iter().all(|x| x.abs() >= 0.5));
    }

    #[test]
    fn pareto_fractional_moment_matches_analytic() {
        // E|xi|^p = shape/(shape-p) for p < shape (scale 1). The empirical
        // mean of |xi|^p has tail index shape/p, so convergence is very slow
        // as p approaches shape; tolerances below reflect the stable-law
        // fluctuation scale at N = 1e6, not 3/sqrt(N).
        let mut rng = RngStream::new(4);
        let n = 1_000_000usize;
        let shape = 1.5;
        let mut mean = 0.0;
        let mut frac14 = 0.0;
        let mut frac12 = 0.0;
        for _ in 0..n {
            let xi = pareto_coordinate(shape, 1.0, &mut rng);
            mean += xi;
            frac14 += xi.abs().powf(1.4);
            frac12 += xi.abs().powf(1.2);
        }
        mean /= n as f64;
        frac14 /= n as f64;
        frac12 /= n as f64;
        assert!(mean.abs() <= 0.05, "mean {mean}");
        assert!(frac14.is_finite());
        let rel14 = (frac14 - 15.0).abs() / 15.0;
        assert!(rel14 <= 0.6, "rel err at p=1.4: {rel14} (emp {frac14})");
        let rel12 = (frac12 - 5.0).abs() / 5.0;
        assert!(rel12 <= 0.15, "rel err at p=1.2: {rel12} (emp {frac12})");
    }

    #[test]
    fn pareto_second_moment_diverges() {
        // Empirical second moment grows along an N-doubling sweep.
        let mut rng = RngStream::new(5);
        let mut prev = 0.0;
        let mut grew = 0;
        for k in 0..6 {
            let n = 10_000usize << k;
            let mut acc = 0.0;
            for _ in 0..n {
                let xi = pareto_coordinate(1.5, 1.0, &mut rng);
                acc += xi * xi;
            }
            let m2 = acc / n as f64;
            if m2 > prev {
                grew += 1;
            }
            prev = m2;
        }
        assert!(grew >= 4, "second moment failed to grow: {grew} of 6");
    }

    #[test]
    fn svm_lipschitz_probe() {
        // Randomized probe: |f(x) - f(y)| <= (max_i ||a_i|| + lambda d) ||x-y||.
        let p = toy_problem(NoiseModel::None);
        let bound = 1.0 + 0.1 * 2.0;
        let mut rng = RngStream::new(6);
        for _ in 0..1000 {
            let x = DenseVector::new((0..2).map(|_| 4.0 * rng.standard_normal()).collect());
            let y = DenseVector::new((0..2).map(|_| 4.0 * rng.standard_normal()).collect());
            let df = (p.clean_value(&x) - p.clean_value(&y)).abs();
            let dx = x.add_scaled(-1.0, &y).norm2();
            assert!(df <= bound * dx * (1.0 + 1e-12), "{df} > {bound} * {dx}");
        }
    }

    #[test]
    fn synthetic_fixtures() {
        let norm = SyntheticNorm::new(3, 2.0);
        assert_eq!(norm.clean_value(&DenseVector::zeros(3)), 0.0);

        let quad = SyntheticQuadratic::new(2);
        assert_eq!(quad.clean_value(&DenseVector::from(vec![1.0, 1.0])), 2.0);

        // Smoothing an affine function changes nothing: F(x+u)+F(x-u) = 2F(x).
        let lin = SyntheticLinear::new(DenseVector::from(vec![1.0, -2.0]));
        let x = DenseVector::from(vec![0.5, 0.5]);
        let u = DenseVector::from(vec![0.3, 0.1]);
        let s = lin.clean_value(&x.add_scaled(1.0, &u)) + lin.clean_value(&x.add_scaled(-1.0, &u));
        assert!((s - 2.0 * lin.clean_value(&x)).abs() < 1e-12);
    }

    #[test]
    fn moment_order_tracks_shape() {
        let p = toy_problem(NoiseModel::ParetoLinear {
            shape: 1.5,
            scale: 1.0,
        });
        assert!((p.moment_order() - 1.4).abs() < 1e-12);
        let q = toy_problem(NoiseModel::ParetoLinear {
            shape: 3.0,
            scale: 1.0,
        });
        assert_eq!(q.moment_order(), 2.0);
    }
}
