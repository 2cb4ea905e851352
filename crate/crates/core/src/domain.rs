//! Shared domain types: points, constraint sets, objective sense and the
//! stochastic gradient oracle contract.

use std::fmt;
use std::ops::Deref;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Generator used for every random draw in the crate.
pub type Rng = ChaCha8Rng;

/// Independent sub-stream `stream` of the run seeded by `seed`.
///
/// Every random consumer of a run (data generation, oracle perturbations,
/// gradient noise, rounding) takes its own stream so that adding draws to one
/// consumer never shifts another.
pub fn stream_rng(seed: u64, stream: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// A dense decision vector with finite entries.
#[derive(Clone, Debug, PartialEq)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if let Some(i) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::invalid(format!("non-finite coordinate at index {i}")));
        }
        Ok(Point(coords))
    }

    pub fn zeros(n: usize) -> Self {
        Point(vec![0.0; n])
    }

    /// Wraps coordinates produced by arithmetic on finite inputs.
    pub(crate) fn from_vec(coords: Vec<f64>) -> Self {
        debug_assert!(coords.iter().all(|c| c.is_finite()));
        Point(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for Point {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl From<Point> for Vec<f64> {
    fn from(p: Point) -> Vec<f64> {
        p.0
    }
}

/// Which problem class an online run solves. Selects the update rule, the
/// oracle direction and the starting point policy.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ObjectiveSense {
    MinimizeConvex,
    MaximizeDRSubmodular,
}

impl ObjectiveSense {
    pub fn direction(self) -> Direction {
        match self {
            ObjectiveSense::MinimizeConvex => Direction::Minimize,
            ObjectiveSense::MaximizeDRSubmodular => Direction::Maximize,
        }
    }
}

/// Direction of a linear optimization call.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Maximize,
    Minimize,
}

/// A convex compact feasible region with an exact linear optimization oracle.
pub trait ConstraintSet: Send + Sync + fmt::Debug {
    fn dim(&self) -> usize;

    /// Upper bound on `sup ‖x − y‖` over feasible pairs.
    fn diameter(&self) -> f64;

    /// Upper bound on `sup ‖x‖` over feasible points.
    fn radius(&self) -> f64;

    fn contains(&self, x: &[f64], tol: f64) -> bool;

    /// Exact optimizer of `⟨d, v⟩` over the set.
    fn linear_opt(&self, d: &[f64], direction: Direction) -> Result<Point>;

    fn supports_projection(&self) -> bool {
        false
    }

    /// Euclidean projection onto the set.
    fn project(&self, _y: &[f64]) -> Result<Point> {
        Err(Error::Unsupported(format!(
            "{} does not implement Euclidean projection",
            self.name()
        )))
    }

    fn name(&self) -> &'static str;
}

/// One stochastic gradient estimate together with where it was taken.
#[derive(Clone, Debug, PartialEq)]
pub struct GradientSample {
    pub vector: Vec<f64>,
    pub round: usize,
    /// Inner Frank-Wolfe step, 0 when the caller has no inner loop.
    pub inner_step: usize,
}

/// Unbiased stochastic first-order access to the current round's objective.
pub trait StochasticGradientOracle {
    fn dim(&self) -> usize;

    /// Declared bound on `E‖g̃ − ∇f‖²`, if known.
    fn noise_level(&self) -> Option<f64> {
        None
    }

    fn query(&mut self, x: &[f64], inner_step: usize) -> Result<GradientSample>;

    /// Function value at `x`, when the oracle exposes it.
    fn value(&self, _x: &[f64]) -> Option<f64> {
        None
    }

    /// Number of gradient queries answered so far.
    fn queries(&self) -> u64;
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm_sq(a: &[f64]) -> f64 {
    dot(a, a)
}

pub(crate) fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}
