//! Experiment streams: per-round objectives over a declared constraint set,
//! with synthetic generators and CSV loaders for the datasets.

mod data;
mod objectives;
mod streams;

pub use data::{
    load_ratings_csv, load_topics_csv, parse_ratings_csv, parse_topics_csv, synthetic_ratings,
    synthetic_topics, zachary_network, RatingsMatrix, RATING_MAX,
};
pub use objectives::{
    MatrixRound, Quadratic, SubmodularRound, SumObjective, WeightedSquares,
};
pub use streams::{
    coverage_stream, facility_stream, flow_stream, matrix_completion_stream, quadratic_stream,
    matrix_stream_from_batches, random_low_rank, CoverageParams, FacilityParams, MatrixParams, QuadraticParams,
    QuadraticPattern,
};

use std::sync::Arc;

use crate::domain::{
    stream_rng, ConstraintSet, GradientSample, ObjectiveSense, Point, Rng,
    StochasticGradientOracle,
};
use crate::error::{check_dim, Result};
use crate::oracle::add_gaussian_noise;
use crate::submodular::SetFunction;

/// Sub-stream ids; each round's oracle uses `ORACLE_STREAM + t`.
pub const DATA_STREAM: u64 = 0;
pub const ALGORITHM_STREAM: u64 = 1;
pub const ROUNDING_STREAM: u64 = 2;
pub const ORACLE_STREAM: u64 = 1 << 20;

/// One round's objective `f_t` with exact and sampled gradients.
pub trait RoundObjective: Send + Sync {
    fn dim(&self) -> usize;
    fn value(&self, x: &[f64]) -> f64;
    fn gradient(&self, x: &[f64]) -> Vec<f64>;

    /// Unbiased gradient estimate. Exact unless overridden.
    fn sample_gradient(&self, x: &[f64], _rng: &mut Rng) -> Result<Vec<f64>> {
        Ok(self.gradient(x))
    }

    /// `q` such that `f(x + γd) = f(x) + γ⟨∇f(x), d⟩ + γ²q`, for quadratics.
    fn curvature(&self, _x: &[f64], _d: &[f64]) -> Option<f64> {
        None
    }

    /// Underlying set function for discrete objectives.
    fn set_function(&self) -> Option<SetFunction> {
        None
    }
}

/// Stochastic gradient access to one round's objective, with optional
/// additive Gaussian noise of total variance `σ²`.
pub struct RoundOracle {
    objective: Arc<dyn RoundObjective>,
    sigma: f64,
    rng: Rng,
    round: usize,
    queries: u64,
}

impl RoundOracle {
    pub fn new(objective: Arc<dyn RoundObjective>, sigma: f64, rng: Rng, round: usize) -> Self {
        RoundOracle {
            objective,
            sigma,
            rng,
            round,
            queries: 0,
        }
    }
}

impl StochasticGradientOracle for RoundOracle {
    fn dim(&self) -> usize {
        self.objective.dim()
    }

    fn noise_level(&self) -> Option<f64> {
        Some(self.sigma)
    }

    fn query(&mut self, x: &[f64], inner_step: usize) -> Result<GradientSample> {
        check_dim(self.objective.dim(), x.len())?;
        let mut vector = self.objective.sample_gradient(x, &mut self.rng)?;
        add_gaussian_noise(&mut vector, self.sigma, &mut self.rng);
        self.queries += 1;
        Ok(GradientSample {
            vector,
            round: self.round,
            inner_step,
        })
    }

    fn value(&self, x: &[f64]) -> Option<f64> {
        Some(self.objective.value(x))
    }

    fn queries(&self) -> u64 {
        self.queries
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    /// Arbitrary sequence; regret against the best fixed point in hindsight.
    Adversarial,
    /// i.i.d. rounds; regret measured on the expected objective.
    Stochastic,
}

/// A replayable sequence of round objectives over one constraint set.
#[derive(Clone)]
pub struct ExperimentStream {
    pub name: String,
    pub constraint: Arc<dyn ConstraintSet>,
    pub sense: ObjectiveSense,
    pub regime: Regime,
    pub rounds: Vec<Arc<dyn RoundObjective>>,
    /// Expected round objective, for stochastic streams.
    pub expected: Option<Arc<dyn RoundObjective>>,
    /// Known minimizer of the comparator objective (hindsight sum for
    /// adversarial streams, expectation for stochastic ones).
    pub known_optimum: Option<Point>,
    /// Integral budget when the stream also has a discrete reading.
    pub discrete_budget: Option<usize>,
    pub batch_size: usize,
    pub seed: u64,
    pub sigma: f64,
    /// Batches were drawn with replacement because the data ran out.
    pub resampled: bool,
}

impl ExperimentStream {
    pub fn horizon(&self) -> usize {
        self.rounds.len()
    }

    pub fn dim(&self) -> usize {
        self.constraint.dim()
    }

    /// Objective of round `t` (1-based).
    pub fn round(&self, t: usize) -> &Arc<dyn RoundObjective> {
        &self.rounds[t - 1]
    }

    /// Fresh oracle for round `t` (1-based); replays identically.
    pub fn oracle(&self, t: usize) -> RoundOracle {
        RoundOracle::new(
            self.round(t).clone(),
            self.sigma,
            stream_rng(self.seed, ORACLE_STREAM + t as u64),
            t,
        )
    }

    /// `Σ_t f_t` over the first `horizon` rounds.
    pub fn hindsight(&self, horizon: usize) -> SumObjective {
        SumObjective::new(self.rounds[..horizon].to_vec())
    }

    /// Objective the comparator optimizes, scaled per round: the mean of the
    /// revealed rounds, or the expected objective.
    pub fn comparator_objective(&self) -> Arc<dyn RoundObjective> {
        match (&self.regime, &self.expected) {
            (Regime::Stochastic, Some(e)) => e.clone(),
            _ => Arc::new(SumObjective::mean(self.rounds.clone())),
        }
    }

    pub fn truncated(&self, horizon: usize) -> ExperimentStream {
        let mut s = self.clone();
        s.rounds.truncate(horizon);
        if horizon < self.horizon() && self.regime == Regime::Adversarial {
            s.known_optimum = None;
        }
        s
    }
}

impl std::fmt::Debug for ExperimentStream {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ExperimentStream")
            .field("name", &self.name)
            .field("constraint", &self.constraint.name())
            .field("sense", &self.sense)
            .field("regime", &self.regime)
            .field("rounds", &self.rounds.len())
            .field("batch_size", &self.batch_size)
            .field("seed", &self.seed)
            .finish()
    }
}
