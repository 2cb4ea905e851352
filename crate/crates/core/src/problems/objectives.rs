use std::sync::Arc;

use rand::Rng as _;

use crate::domain::{norm_sq, Rng};
use crate::error::{Error, Result};
use crate::submodular::{grad_one_sample_vector, Extension, SetFunction};

use super::RoundObjective;

/// `f(x) = ‖x − c‖² + offset`.
#[derive(Clone, Debug)]
pub struct Quadratic {
    pub center: Vec<f64>,
    pub offset: f64,
}

impl RoundObjective for Quadratic {
    fn dim(&self) -> usize {
        self.center.len()
    }

    fn value(&self, x: &[f64]) -> f64 {
        x.iter()
            .zip(&self.center)
            .map(|(a, c)| (a - c) * (a - c))
            .sum::<f64>()
            + self.offset
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.center).map(|(a, c)| 2.0 * (a - c)).collect()
    }

    fn curvature(&self, _x: &[f64], d: &[f64]) -> Option<f64> {
        Some(norm_sq(d))
    }
}

/// `f(x) = Σ_e w_e x_e²`.
#[derive(Clone, Debug)]
pub struct WeightedSquares {
    pub weights: Vec<f64>,
}

impl RoundObjective for WeightedSquares {
    fn dim(&self) -> usize {
        self.weights.len()
    }

    fn value(&self, x: &[f64]) -> f64 {
        x.iter().zip(&self.weights).map(|(a, w)| w * a * a).sum()
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.weights).map(|(a, w)| 2.0 * w * a).collect()
    }

    fn curvature(&self, _x: &[f64], d: &[f64]) -> Option<f64> {
        Some(d.iter().zip(&self.weights).map(|(a, w)| w * a * a).sum())
    }
}

/// Squared error on a batch of observed entries of a row-major matrix:
/// `f(X) = Σ_{(i,j)∈OB} (X_ij − M_ij)²`.
#[derive(Clone, Debug)]
pub struct MatrixRound {
    rows: usize,
    cols: usize,
    /// Flattened index and target value per observation.
    observed: Vec<(usize, f64)>,
}

impl MatrixRound {
    pub fn new(rows: usize, cols: usize, observed: Vec<(usize, usize, f64)>) -> Result<Self> {
        if observed.is_empty() {
            return Err(Error::invalid("observation batch is empty"));
        }
        let observed = observed
            .into_iter()
            .map(|(i, j, m)| {
                if i >= rows || j >= cols {
                    Err(Error::invalid(format!(
                        "observed index ({i}, {j}) outside a {rows}x{cols} matrix"
                    )))
                } else {
                    Ok((i * cols + j, m))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(MatrixRound {
            rows,
            cols,
            observed,
        })
    }

    pub fn batch_size(&self) -> usize {
        self.observed.len()
    }

    pub fn observed(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.observed
            .iter()
            .map(|&(k, m)| (k / self.cols, k % self.cols, m))
    }
}

impl RoundObjective for MatrixRound {
    fn dim(&self) -> usize {
        self.rows * self.cols
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.observed.iter().map(|&(k, m)| (x[k] - m) * (x[k] - m)).sum()
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; self.dim()];
        for &(k, m) in &self.observed {
            g[k] += 2.0 * (x[k] - m);
        }
        g
    }

    /// One observation drawn uniformly, scaled by the batch size.
    fn sample_gradient(&self, x: &[f64], rng: &mut Rng) -> Result<Vec<f64>> {
        let mut g = vec![0.0; self.dim()];
        let (k, m) = self.observed[rng.random_range(0..self.observed.len())];
        g[k] = 2.0 * self.observed.len() as f64 * (x[k] - m);
        Ok(g)
    }

    fn curvature(&self, _x: &[f64], d: &[f64]) -> Option<f64> {
        Some(self.observed.iter().map(|&(k, _)| d[k] * d[k]).sum())
    }
}

/// A monotone submodular round: closed-form multilinear extension for
/// values and exact gradients, the one-sample estimator for stochastic ones.
#[derive(Clone)]
pub struct SubmodularRound {
    extension: Arc<dyn Extension>,
    set_function: SetFunction,
}

impl SubmodularRound {
    pub fn new(extension: Arc<dyn Extension>, set_function: SetFunction) -> Result<Self> {
        if extension.dim() != set_function.ground_size() {
            return Err(Error::dim_mismatch(extension.dim(), set_function.ground_size()));
        }
        Ok(SubmodularRound {
            extension,
            set_function,
        })
    }

    pub fn extension(&self) -> &Arc<dyn Extension> {
        &self.extension
    }
}

impl RoundObjective for SubmodularRound {
    fn dim(&self) -> usize {
        self.extension.dim()
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.extension.value(x)
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        self.extension.gradient(x)
    }

    fn sample_gradient(&self, x: &[f64], rng: &mut Rng) -> Result<Vec<f64>> {
        grad_one_sample_vector(&self.set_function, x, rng)
    }

    fn set_function(&self) -> Option<SetFunction> {
        Some(self.set_function.clone())
    }
}

/// `scale · Σ_t f_t`.
#[derive(Clone)]
pub struct SumObjective {
    parts: Vec<Arc<dyn RoundObjective>>,
    scale: f64,
}

impl SumObjective {
    pub fn new(parts: Vec<Arc<dyn RoundObjective>>) -> Self {
        SumObjective { parts, scale: 1.0 }
    }

    pub fn mean(parts: Vec<Arc<dyn RoundObjective>>) -> Self {
        let scale = 1.0 / parts.len().max(1) as f64;
        SumObjective { parts, scale }
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }
}

impl RoundObjective for SumObjective {
    fn dim(&self) -> usize {
        self.parts.first().map_or(0, |p| p.dim())
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.scale * self.parts.iter().map(|p| p.value(x)).sum::<f64>()
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; x.len()];
        for p in &self.parts {
            for (gi, pi) in g.iter_mut().zip(p.gradient(x)) {
                *gi += pi;
            }
        }
        g.iter_mut().for_each(|gi| *gi *= self.scale);
        g
    }

    fn curvature(&self, x: &[f64], d: &[f64]) -> Option<f64> {
        let mut q = 0.0;
        for p in &self.parts {
            q += p.curvature(x, d)?;
        }
        Some(self.scale * q)
    }

    fn set_function(&self) -> Option<SetFunction> {
        let fs = self
            .parts
            .iter()
            .map(|p| p.set_function())
            .collect::<Option<Vec<_>>>()?;
        let n = fs.first()?.ground_size();
        let scale = self.scale;
        Some(SetFunction::new(n, move |m| {
            scale * fs.iter().map(|f| f.eval(m)).sum::<f64>()
        }))
    }
}
