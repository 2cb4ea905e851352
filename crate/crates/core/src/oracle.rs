//! Concrete stochastic gradient oracles.

use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};

use crate::domain::{GradientSample, Rng, StochasticGradientOracle};
use crate::error::{check_dim, Error, Result};

pub type GradientFn = Box<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// Gradient of `(1/m) Σ_i f_i` estimated by the gradient of one uniformly
/// drawn component.
pub struct FiniteSumOracle {
    components: Vec<GradientFn>,
    dim: usize,
    rng: Rng,
    round: usize,
    queries: u64,
}

pub fn make_finite_sum_oracle(
    components: Vec<GradientFn>,
    dim: usize,
    rng: Rng,
) -> Result<FiniteSumOracle> {
    if components.is_empty() {
        return Err(Error::invalid("finite-sum oracle needs at least one component"));
    }
    Ok(FiniteSumOracle {
        components,
        dim,
        rng,
        round: 0,
        queries: 0,
    })
}

impl FiniteSumOracle {
    pub fn set_round(&mut self, round: usize) {
        self.round = round;
    }
}

impl StochasticGradientOracle for FiniteSumOracle {
    fn dim(&self) -> usize {
        self.dim
    }

    fn query(&mut self, x: &[f64], inner_step: usize) -> Result<GradientSample> {
        check_dim(self.dim, x.len())?;
        let i = self.rng.random_range(0..self.components.len());
        let vector = (self.components[i])(x);
        check_dim(self.dim, vector.len())?;
        self.queries += 1;
        Ok(GradientSample {
            vector,
            round: self.round,
            inner_step,
        })
    }

    fn queries(&self) -> u64 {
        self.queries
    }
}

/// Exact gradient plus isotropic Gaussian noise with `E‖ξ‖² = σ²`.
pub struct GaussianNoiseOracle<F> {
    gradient: F,
    dim: usize,
    sigma: f64,
    rng: Rng,
    round: usize,
    queries: u64,
}

impl<F: Fn(&[f64]) -> Vec<f64>> GaussianNoiseOracle<F> {
    pub fn new(gradient: F, dim: usize, sigma: f64, rng: Rng) -> Result<Self> {
        if !(sigma >= 0.0) || !sigma.is_finite() {
            return Err(Error::invalid("noise level must be finite and nonnegative"));
        }
        Ok(GaussianNoiseOracle {
            gradient,
            dim,
            sigma,
            rng,
            round: 0,
            queries: 0,
        })
    }

    pub fn set_round(&mut self, round: usize) {
        self.round = round;
    }
}

/// Adds `N(0, σ²/n)` to every coordinate of `g`.
pub(crate) fn add_gaussian_noise(g: &mut [f64], sigma: f64, rng: &mut Rng) {
    if sigma == 0.0 || g.is_empty() {
        return;
    }
    let per_coord = sigma / (g.len() as f64).sqrt();
    for gi in g.iter_mut() {
        let z: f64 = StandardNormal.sample(rng);
        *gi += per_coord * z;
    }
}

impl<F: Fn(&[f64]) -> Vec<f64>> StochasticGradientOracle for GaussianNoiseOracle<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn noise_level(&self) -> Option<f64> {
        Some(self.sigma)
    }

    fn query(&mut self, x: &[f64], inner_step: usize) -> Result<GradientSample> {
        check_dim(self.dim, x.len())?;
        let mut vector = (self.gradient)(x);
        check_dim(self.dim, vector.len())?;
        add_gaussian_noise(&mut vector, self.sigma, &mut self.rng);
        self.queries += 1;
        Ok(GradientSample {
            vector,
            round: self.round,
            inner_step,
        })
    }

    fn queries(&self) -> u64 {
        self.queries
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::stream_rng;

    #[test]
    fn single_component_is_exact() {
        let g: GradientFn = Box::new(|x: &[f64]| x.iter().map(|v| 2.0 * v).collect());
        let mut o = make_finite_sum_oracle(vec![g], 2, stream_rng(1, 0)).unwrap();
        for _ in 0..10 {
            let s = o.query(&[1.0, -3.0], 0).unwrap();
            assert_eq!(s.vector, vec![2.0, -6.0]);
        }
        assert_eq!(o.queries(), 10);
    }

    #[test]
    fn empty_components_rejected() {
        assert!(matches!(
            make_finite_sum_oracle(Vec::new(), 2, stream_rng(1, 0)),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn two_components_are_unbiased() {
        let a: GradientFn = Box::new(|_| vec![1.0, 0.0]);
        let b: GradientFn = Box::new(|_| vec![0.0, 1.0]);
        let mut o = make_finite_sum_oracle(vec![a, b], 2, stream_rng(42, 0)).unwrap();
        let n = 10_000;
        let mut sum = [0.0; 2];
        for _ in 0..n {
            let s = o.query(&[0.3, 0.3], 0).unwrap();
            sum[0] += s.vector[0];
            sum[1] += s.vector[1];
        }
        // Bernoulli(1/2) per coordinate: standard error 0.5 / √n.
        let se = 0.5 / (n as f64).sqrt();
        for s in sum {
            assert!((s / n as f64 - 0.5).abs() < 3.0 * se);
        }
    }

    #[test]
    fn gaussian_noise_has_declared_variance() {
        let mut o =
            GaussianNoiseOracle::new(|_: &[f64]| vec![0.0; 4], 4, 2.0, stream_rng(3, 1)).unwrap();
        let n = 20_000;
        let mut total = 0.0;
        for _ in 0..n {
            let s = o.query(&[0.0; 4], 0).unwrap();
            total += s.vector.iter().map(|v| v * v).sum::<f64>();
        }
        assert!((total / n as f64 - 4.0).abs() < 0.15);
    }
}
