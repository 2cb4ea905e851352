use crate::domain::{ObjectiveSense, Point};
use crate::error::Result;
use crate::lmo::BudgetedBox;
use crate::problems::{ExperimentStream, Regime};
use crate::submodular::{pipage_round, PipageStructure};

use super::offline::{brute_force_opt, offline_fw, ObjectiveExtension};
use super::ONE_MINUS_INV_E;

/// Submodular comparators switch from offline Frank-Wolfe to exact
/// enumeration at or below this ground-set size.
pub const BRUTE_FORCE_COMPARATOR_LIMIT: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ComparatorSource {
    /// Closed-form optimum supplied by the stream.
    Known,
    OfflineFw { steps: usize },
    /// Offline Frank-Wolfe followed by pipage rounding.
    RoundedOfflineFw { steps: usize },
    /// Exact optimum over feasible sets; regret uses `α = 1 − 1/e`.
    BruteForce,
}

/// Fixed comparator point with its per-round values.
#[derive(Clone, Debug)]
pub struct Comparator {
    pub point: Point,
    pub alpha: f64,
    pub per_round: Vec<f64>,
    pub source: ComparatorSource,
}

/// Best fixed decision for a stream: in hindsight over the revealed rounds,
/// or for the expected objective of a stochastic stream. With `discrete`,
/// the comparator is an integral point (a set).
pub fn compute_comparator(stream: &ExperimentStream, discrete: bool, steps: usize) -> Result<Comparator> {
    let objective = stream.comparator_objective();
    let set = stream.constraint.as_ref();
    let n = stream.dim();
    let mut alpha = 1.0;
    let (point, source) = match (stream.sense, stream.discrete_budget, objective.set_function()) {
        (ObjectiveSense::MaximizeDRSubmodular, Some(_), Some(f)) if n <= BRUTE_FORCE_COMPARATOR_LIMIT => {
            let (_, members) = brute_force_opt(&f, set)?;
            let mut x = vec![0.0; n];
            members.iter().for_each(|&i| x[i] = 1.0);
            alpha = ONE_MINUS_INV_E;
            (Point::new(x)?, ComparatorSource::BruteForce)
        }
        _ => match (&stream.known_optimum, discrete) {
            (Some(x), false) => (x.clone(), ComparatorSource::Known),
            _ => {
                let x = offline_fw(objective.as_ref(), set, steps, stream.sense)?;
                match (discrete, stream.discrete_budget) {
                    (true, Some(b)) => {
                        let structure = PipageStructure::from_budget(&BudgetedBox::new(n, b as f64)?)?;
                        let rounded = pipage_round(&x, &structure, &ObjectiveExtension(objective.as_ref()))?;
                        (Point::new(rounded.point)?, ComparatorSource::RoundedOfflineFw { steps })
                    }
                    _ => (x, ComparatorSource::OfflineFw { steps }),
                }
            }
        },
    };
    let per_round = match (stream.regime, &stream.expected) {
        (Regime::Stochastic, Some(e)) => vec![e.value(&point); stream.horizon()],
        _ => stream.rounds.iter().map(|f| f.value(&point)).collect(),
    };
    Ok(Comparator {
        point,
        alpha,
        per_round,
        source,
    })
}
