use std::sync::Arc;

use crate::domain::{ConstraintSet, ObjectiveSense, Point, StochasticGradientOracle};
use crate::error::{Error, Result};
use crate::schedule::Schedule;
use crate::vr::Averager;

use super::{ensure_feasible, fw_update, initial_point, OnlineAlgorithm, RoundOutcome};

#[derive(Clone, Debug)]
pub struct OneShotConfig {
    pub horizon: usize,
    pub variance_reduction: bool,
    pub initial_point: Option<Point>,
}

impl OneShotConfig {
    pub fn for_horizon(horizon: usize) -> Self {
        OneShotConfig {
            horizon,
            variance_reduction: true,
            initial_point: None,
        }
    }
}

/// One averaged stochastic gradient and one Frank-Wolfe step per round.
pub struct OneShotFrankWolfe {
    sense: ObjectiveSense,
    constraint: Arc<dyn ConstraintSet>,
    averager: Averager,
    x: Point,
    eta: Schedule,
    horizon: usize,
    round: usize,
    lmo_calls: u64,
}

impl OneShotFrankWolfe {
    pub fn new(
        constraint: Arc<dyn ConstraintSet>,
        sense: ObjectiveSense,
        config: OneShotConfig,
    ) -> Result<Self> {
        if config.horizon == 0 {
            return Err(Error::invalid("horizon must be at least 1"));
        }
        let x = initial_point(constraint.as_ref(), sense, config.initial_point)?;
        let n = constraint.dim();
        let averager = if config.variance_reduction {
            Averager::new(n)
        } else {
            Averager::latest_only(n)
        };
        let eta = match sense {
            ObjectiveSense::MinimizeConvex => Schedule::eta_convex(),
            // 1/T per round; the played point after T rounds is the mean of v_1..v_T.
            ObjectiveSense::MaximizeDRSubmodular => Schedule::EtaSubmodular,
        };
        Ok(OneShotFrankWolfe {
            sense,
            constraint,
            averager,
            x,
            eta,
            horizon: config.horizon,
            round: 0,
            lmo_calls: 0,
        })
    }

    pub fn averaged_gradient(&self) -> &[f64] {
        self.averager.estimate()
    }

    /// Point to be played next round.
    pub fn current(&self) -> &Point {
        &self.x
    }
}

impl OnlineAlgorithm for OneShotFrankWolfe {
    fn name(&self) -> &'static str {
        "os-fw"
    }

    fn play(&mut self) -> Result<Point> {
        Ok(self.x.clone())
    }

    fn feedback(&mut self, oracle: &mut dyn StochasticGradientOracle) -> Result<RoundOutcome> {
        self.round += 1;
        let played = self.x.clone();
        let sample = oracle.query(&played, 0)?;
        let d = self.averager.feed(&sample)?;
        let v = self.constraint.linear_opt(d, self.sense.direction())?;
        self.lmo_calls += 1;
        let eta = self.eta.value(self.round, self.horizon)?;
        let mut next = played.to_vec();
        fw_update(&mut next, &v, eta, self.sense);
        ensure_feasible(self.constraint.as_ref(), &next, "os-fw")?;
        self.x = Point::from_vec(next);
        Ok(RoundOutcome {
            value: oracle.value(&played),
            played,
            gradient_queries: 1,
            vertices: vec![v],
        })
    }

    fn lmo_calls(&self) -> u64 {
        self.lmo_calls
    }
}
