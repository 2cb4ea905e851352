use std::sync::Arc;

use crate::domain::{ConstraintSet, ObjectiveSense, Point, Rng, StochasticGradientOracle};
use crate::error::{Error, Result};
use crate::olo::FplOracle;
use crate::schedule::Schedule;
use crate::vr::Averager;

use super::{ensure_feasible, fw_update, initial_point, OnlineAlgorithm, RoundOutcome};

#[derive(Clone, Debug)]
pub struct MetaFwConfig {
    /// Inner Frank-Wolfe steps `K`.
    pub inner_steps: usize,
    pub horizon: usize,
    pub variance_reduction: bool,
    /// `x₁` for convex runs; ignored (forced to 0) for submodular runs.
    pub initial_point: Option<Point>,
}

impl MetaFwConfig {
    /// `K = ⌈T^{3/2}⌉`.
    pub fn for_horizon(horizon: usize) -> Self {
        MetaFwConfig {
            inner_steps: default_inner_steps(horizon),
            horizon,
            variance_reduction: true,
            initial_point: None,
        }
    }
}

pub fn default_inner_steps(horizon: usize) -> usize {
    ((horizon as f64).powf(1.5).ceil() as usize).max(1)
}

/// K online linear oracles drive a K-step Frank-Wolfe pass each round; the
/// gradients queried along that pass are averaged and fed back to them.
pub struct MetaFrankWolfe {
    sense: ObjectiveSense,
    constraint: Arc<dyn ConstraintSet>,
    oracles: Vec<FplOracle>,
    averager: Averager,
    x1: Point,
    eta: Schedule,
    inner_steps: usize,
    /// `x^{(1)}, …, x^{(K)}` of the current round.
    iterates: Vec<Vec<f64>>,
    vertices: Vec<Point>,
    played: Option<Point>,
    round: usize,
    lmo_calls: u64,
}

impl MetaFrankWolfe {
    pub fn new(
        constraint: Arc<dyn ConstraintSet>,
        sense: ObjectiveSense,
        config: MetaFwConfig,
        rng: &mut Rng,
    ) -> Result<Self> {
        if config.inner_steps == 0 {
            return Err(Error::invalid("number of inner steps K must be at least 1"));
        }
        if config.horizon == 0 {
            return Err(Error::invalid("horizon must be at least 1"));
        }
        let x1 = initial_point(constraint.as_ref(), sense, config.initial_point)?;
        let oracles = (0..config.inner_steps)
            .map(|_| FplOracle::for_horizon(constraint.clone(), sense.direction(), config.horizon, rng))
            .collect::<Result<Vec<_>>>()?;
        let n = constraint.dim();
        let averager = if config.variance_reduction {
            Averager::new(n)
        } else {
            Averager::latest_only(n)
        };
        let eta = match sense {
            ObjectiveSense::MinimizeConvex => Schedule::eta_convex(),
            ObjectiveSense::MaximizeDRSubmodular => Schedule::EtaSubmodular,
        };
        Ok(MetaFrankWolfe {
            sense,
            constraint,
            oracles,
            averager,
            x1,
            eta,
            inner_steps: config.inner_steps,
            iterates: Vec::new(),
            vertices: Vec::new(),
            played: None,
            round: 0,
            lmo_calls: 0,
        })
    }

    pub fn inner_steps(&self) -> usize {
        self.inner_steps
    }

    pub fn oracles(&self) -> &[FplOracle] {
        &self.oracles
    }

    pub fn initial(&self) -> &Point {
        &self.x1
    }

    /// Oracle outputs `v^{(1)}, …, v^{(K)}` of the current round.
    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }
}

impl OnlineAlgorithm for MetaFrankWolfe {
    fn name(&self) -> &'static str {
        "meta-fw"
    }

    fn play(&mut self) -> Result<Point> {
        if let Some(x) = &self.played {
            return Ok(x.clone());
        }
        self.round += 1;
        self.iterates.clear();
        self.vertices.clear();
        let mut x = self.x1.to_vec();
        for (k, oracle) in self.oracles.iter().enumerate() {
            let v = oracle.next()?;
            self.lmo_calls += 1;
            self.iterates.push(x.clone());
            let eta = self.eta.value(k + 1, self.inner_steps)?;
            fw_update(&mut x, &v, eta, self.sense);
            self.vertices.push(v);
        }
        ensure_feasible(self.constraint.as_ref(), &x, "meta-fw")?;
        let x = Point::from_vec(x);
        self.played = Some(x.clone());
        Ok(x)
    }

    fn feedback(&mut self, oracle: &mut dyn StochasticGradientOracle) -> Result<RoundOutcome> {
        let played = self
            .played
            .take()
            .ok_or_else(|| Error::invalid("meta-fw feedback called before play"))?;
        self.averager.reset_zero();
        for (k, (x, fpl)) in self.iterates.iter().zip(self.oracles.iter_mut()).enumerate() {
            let sample = oracle.query(x, k + 1)?;
            let d = self.averager.feed(&sample)?;
            fpl.feedback(d)?;
        }
        Ok(RoundOutcome {
            value: oracle.value(&played),
            played,
            gradient_queries: self.inner_steps as u64,
            vertices: self.vertices.clone(),
        })
    }

    fn lmo_calls(&self) -> u64 {
        self.lmo_calls
    }
}
