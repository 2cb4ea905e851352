//! Online optimizers: Meta-Frank-Wolfe, One-Shot Frank-Wolfe, regularized
//! online Frank-Wolfe, online projected gradient and Online Greedy.

mod greedy;
mod meta_fw;
mod one_shot;
mod projected;
mod regularized;

pub use greedy::OnlineGreedy;
pub use meta_fw::{default_inner_steps, MetaFrankWolfe, MetaFwConfig};
pub use one_shot::{OneShotConfig, OneShotFrankWolfe};
pub use projected::ProjectedGradient;
pub use regularized::{solve_regularized_surrogate, surrogate_value, RegularizedOfw, RegularizedOfwConfig};

use crate::domain::{ConstraintSet, Direction, ObjectiveSense, Point, StochasticGradientOracle};
use crate::error::{Error, Result};
use crate::lmo::MEMBERSHIP_TOL;

/// What happened in one round of an online algorithm.
#[derive(Clone, Debug)]
pub struct RoundOutcome {
    pub played: Point,
    /// `f_t(x_t)` when the oracle exposes values.
    pub value: Option<f64>,
    pub gradient_queries: u64,
    /// Oracle or LMO outputs that built the played point or the next one.
    pub vertices: Vec<Point>,
}

/// A continuous online player: commits to a point, then learns from
/// stochastic gradient access to the revealed objective.
pub trait OnlineAlgorithm {
    fn name(&self) -> &'static str;

    /// Point for the current round. Idempotent until `feedback` is called.
    fn play(&mut self) -> Result<Point>;

    fn feedback(&mut self, oracle: &mut dyn StochasticGradientOracle) -> Result<RoundOutcome>;

    /// Linear optimization calls made so far (oracle or LMO).
    fn lmo_calls(&self) -> u64;
}

/// Starting point: `0` for submodular runs, otherwise `x₁` if given or the
/// minimizer of the zero objective (a canonical feasible vertex).
pub(crate) fn initial_point(
    constraint: &dyn ConstraintSet,
    sense: ObjectiveSense,
    given: Option<Point>,
) -> Result<Point> {
    let x = match (sense, given) {
        (ObjectiveSense::MaximizeDRSubmodular, _) => Point::zeros(constraint.dim()),
        (ObjectiveSense::MinimizeConvex, Some(x)) => x,
        (ObjectiveSense::MinimizeConvex, None) => {
            constraint.linear_opt(&vec![0.0; constraint.dim()], Direction::Minimize)?
        }
    };
    if !constraint.contains(&x, MEMBERSHIP_TOL) {
        return Err(Error::invalid(format!(
            "initial point is not feasible for the {}",
            constraint.name()
        )));
    }
    Ok(x)
}

/// Sense-specific Frank-Wolfe update.
pub(crate) fn fw_update(x: &mut [f64], v: &[f64], eta: f64, sense: ObjectiveSense) {
    match sense {
        ObjectiveSense::MinimizeConvex => {
            for (xi, vi) in x.iter_mut().zip(v) {
                *xi = (1.0 - eta) * *xi + eta * vi;
            }
        }
        ObjectiveSense::MaximizeDRSubmodular => {
            for (xi, vi) in x.iter_mut().zip(v) {
                *xi += eta * vi;
            }
        }
    }
}

pub(crate) fn ensure_feasible(constraint: &dyn ConstraintSet, x: &[f64], who: &str) -> Result<()> {
    if constraint.contains(x, MEMBERSHIP_TOL) {
        Ok(())
    } else {
        Err(Error::Invariant(format!(
            "{who} produced a point outside the {}",
            constraint.name()
        )))
    }
}
