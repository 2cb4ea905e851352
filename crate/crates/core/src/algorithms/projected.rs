use std::sync::Arc;

use crate::domain::{ConstraintSet, ObjectiveSense, Point, StochasticGradientOracle};
use crate::error::{Error, Result};
use crate::schedule::Schedule;

use super::{initial_point, OnlineAlgorithm, RoundOutcome};

/// Online projected gradient ascent (submodular) or descent (convex) with
/// step `c / √t`.
pub struct ProjectedGradient {
    sense: ObjectiveSense,
    constraint: Arc<dyn ConstraintSet>,
    x: Point,
    step: Schedule,
    round: usize,
}

impl ProjectedGradient {
    /// `scale` defaults to `D / √2`.
    pub fn new(
        constraint: Arc<dyn ConstraintSet>,
        sense: ObjectiveSense,
        scale: Option<f64>,
        initial: Option<Point>,
    ) -> Result<Self> {
        if !constraint.supports_projection() {
            return Err(Error::Unsupported(format!(
                "projected gradient needs a projection onto the {}",
                constraint.name()
            )));
        }
        let scale = scale.unwrap_or(constraint.diameter() / std::f64::consts::SQRT_2);
        let x = initial_point(constraint.as_ref(), sense, initial)?;
        Ok(ProjectedGradient {
            sense,
            constraint,
            x,
            step: Schedule::EtaProjectedGradient { scale },
            round: 0,
        })
    }
}

impl OnlineAlgorithm for ProjectedGradient {
    fn name(&self) -> &'static str {
        match self.sense {
            ObjectiveSense::MinimizeConvex => "ogd",
            ObjectiveSense::MaximizeDRSubmodular => "oga",
        }
    }

    fn play(&mut self) -> Result<Point> {
        Ok(self.x.clone())
    }

    fn feedback(&mut self, oracle: &mut dyn StochasticGradientOracle) -> Result<RoundOutcome> {
        self.round += 1;
        let played = self.x.clone();
        let g = oracle.query(&played, 0)?;
        let eta = self.step.value(self.round, self.round)?;
        let sign = match self.sense {
            ObjectiveSense::MinimizeConvex => -1.0,
            ObjectiveSense::MaximizeDRSubmodular => 1.0,
        };
        let y: Vec<f64> = played
            .iter()
            .zip(&g.vector)
            .map(|(x, g)| x + sign * eta * g)
            .collect();
        self.x = self.constraint.project(&y)?;
        Ok(RoundOutcome {
            value: oracle.value(&played),
            played,
            gradient_queries: 1,
            vertices: Vec::new(),
        })
    }

    fn lmo_calls(&self) -> u64 {
        0
    }
}
