use std::sync::Arc;

use crate::domain::{dot, norm_sq, ConstraintSet, Direction, ObjectiveSense, Point, StochasticGradientOracle};
use crate::error::{Error, Result};

use super::{ensure_feasible, initial_point, OnlineAlgorithm, RoundOutcome};

#[derive(Clone, Debug)]
pub struct RegularizedOfwConfig {
    pub horizon: usize,
    /// Weight `λ` of `‖v − x₁‖²`; defaults to `√T`.
    pub lambda: Option<f64>,
    pub inner_steps: usize,
    pub initial_point: Option<Point>,
}

impl RegularizedOfwConfig {
    pub fn for_horizon(horizon: usize) -> Self {
        RegularizedOfwConfig {
            horizon,
            lambda: None,
            inner_steps: 50,
            initial_point: None,
        }
    }
}

/// Online conditional gradient: each round a few Frank-Wolfe steps on
/// `⟨G_t, v⟩ + λ‖v − x₁‖²` (sign of the linear part flipped for maximization),
/// then `x_{t+1} = (1 − γ_t) x_t + γ_t v_t` with `γ_t = t^{−3/4}`.
pub struct RegularizedOfw {
    sense: ObjectiveSense,
    constraint: Arc<dyn ConstraintSet>,
    x1: Point,
    x: Point,
    surrogate_point: Vec<f64>,
    cumulative: Vec<f64>,
    lambda: f64,
    inner_steps: usize,
    round: usize,
    lmo_calls: u64,
}

/// Frank-Wolfe with exact line search on `s(v) = ⟨c, v⟩ + λ‖v − center‖²`,
/// started at `start`. Returns the final iterate and the LMO calls spent.
pub fn solve_regularized_surrogate(
    constraint: &dyn ConstraintSet,
    c: &[f64],
    lambda: f64,
    center: &[f64],
    start: &[f64],
    steps: usize,
) -> Result<(Vec<f64>, u64)> {
    let mut v = start.to_vec();
    let mut calls = 0;
    for _ in 0..steps {
        let grad: Vec<f64> = c
            .iter()
            .zip(&v)
            .zip(center)
            .map(|((ci, vi), xi)| ci + 2.0 * lambda * (vi - xi))
            .collect();
        let u = constraint.linear_opt(&grad, Direction::Minimize)?;
        calls += 1;
        let dir: Vec<f64> = u.iter().zip(&v).map(|(a, b)| a - b).collect();
        let slope = dot(&grad, &dir);
        if slope >= -1e-15 {
            break;
        }
        let curvature = 2.0 * lambda * norm_sq(&dir);
        let gamma = if curvature > 0.0 {
            (-slope / curvature).min(1.0)
        } else {
            1.0
        };
        v.iter_mut().zip(&dir).for_each(|(vi, di)| *vi += gamma * di);
    }
    Ok((v, calls))
}

pub fn surrogate_value(c: &[f64], lambda: f64, center: &[f64], v: &[f64]) -> f64 {
    dot(c, v)
        + lambda
            * v.iter()
                .zip(center)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
}

impl RegularizedOfw {
    pub fn new(
        constraint: Arc<dyn ConstraintSet>,
        sense: ObjectiveSense,
        config: RegularizedOfwConfig,
    ) -> Result<Self> {
        let lambda = config.lambda.unwrap_or((config.horizon.max(1) as f64).sqrt());
        if !(lambda >= 0.0) {
            return Err(Error::invalid("regularization weight must be nonnegative"));
        }
        let x1 = initial_point(constraint.as_ref(), sense, config.initial_point)?;
        let n = constraint.dim();
        Ok(RegularizedOfw {
            sense,
            constraint,
            surrogate_point: x1.to_vec(),
            x: x1.clone(),
            x1,
            cumulative: vec![0.0; n],
            lambda,
            inner_steps: config.inner_steps,
            round: 0,
            lmo_calls: 0,
        })
    }

    pub fn surrogate_point(&self) -> &[f64] {
        &self.surrogate_point
    }
}

impl OnlineAlgorithm for RegularizedOfw {
    fn name(&self) -> &'static str {
        "rofw"
    }

    fn play(&mut self) -> Result<Point> {
        Ok(self.x.clone())
    }

    fn feedback(&mut self, oracle: &mut dyn StochasticGradientOracle) -> Result<RoundOutcome> {
        self.round += 1;
        let played = self.x.clone();
        let sample = oracle.query(&played, 0)?;
        self.cumulative
            .iter_mut()
            .zip(&sample.vector)
            .for_each(|(c, g)| *c += g);
        let linear: Vec<f64> = match self.sense {
            ObjectiveSense::MinimizeConvex => self.cumulative.clone(),
            ObjectiveSense::MaximizeDRSubmodular => self.cumulative.iter().map(|c| -c).collect(),
        };
        let (v, calls) = solve_regularized_surrogate(
            self.constraint.as_ref(),
            &linear,
            self.lambda,
            &self.x1,
            &self.surrogate_point,
            self.inner_steps,
        )?;
        self.lmo_calls += calls;
        let gamma = (self.round as f64).powf(-0.75);
        let next: Vec<f64> = played
            .iter()
            .zip(&v)
            .map(|(x, v)| (1.0 - gamma) * x + gamma * v)
            .collect();
        ensure_feasible(self.constraint.as_ref(), &next, "rofw")?;
        let vertex = Point::from_vec(v.clone());
        self.surrogate_point = v;
        self.x = Point::from_vec(next);
        Ok(RoundOutcome {
            value: oracle.value(&played),
            played,
            gradient_queries: 1,
            vertices: vec![vertex],
        })
    }

    fn lmo_calls(&self) -> u64 {
        self.lmo_calls
    }
}
