//! Follow the Perturbed Leader with a single (lazy) perturbation draw.

use std::sync::Arc;

use rand::Rng as _;

use crate::domain::{ConstraintSet, Direction, Point, Rng};
use crate::error::{check_dim, Error, Result};

/// Online linear optimizer over a constraint set: plays
/// `argopt_v ⟨Σ_s d_s + p, v⟩` with `p_i ~ Unif[0, 1/ε]` drawn once.
#[derive(Clone, Debug)]
pub struct FplOracle {
    cumulative: Vec<f64>,
    perturbation: Vec<f64>,
    epsilon: f64,
    direction: Direction,
    constraint: Arc<dyn ConstraintSet>,
}

impl FplOracle {
    pub fn new(
        constraint: Arc<dyn ConstraintSet>,
        direction: Direction,
        epsilon: f64,
        rng: &mut Rng,
    ) -> Result<Self> {
        if !(epsilon > 0.0) {
            return Err(Error::invalid("perturbation rate must be positive"));
        }
        let n = constraint.dim();
        let scale = 1.0 / epsilon;
        let perturbation = if scale.is_finite() {
            (0..n).map(|_| rng.random_range(0.0..=1.0) * scale).collect()
        } else {
            vec![0.0; n]
        };
        Ok(FplOracle {
            cumulative: vec![0.0; n],
            perturbation,
            epsilon,
            direction,
            constraint,
        })
    }

    /// Oracle tuned for a known horizon, `ε = 1/√T`.
    pub fn for_horizon(
        constraint: Arc<dyn ConstraintSet>,
        direction: Direction,
        horizon: usize,
        rng: &mut Rng,
    ) -> Result<Self> {
        Self::new(constraint, direction, 1.0 / (horizon.max(1) as f64).sqrt(), rng)
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }

    pub fn perturbation(&self) -> &[f64] {
        &self.perturbation
    }

    /// Current decision; does not change state.
    pub fn next(&self) -> Result<Point> {
        let objective: Vec<f64> = self
            .cumulative
            .iter()
            .zip(&self.perturbation)
            .map(|(c, p)| c + p)
            .collect();
        self.constraint.linear_opt(&objective, self.direction)
    }

    pub fn feedback(&mut self, d: &[f64]) -> Result<()> {
        check_dim(self.cumulative.len(), d.len())?;
        for (c, v) in self.cumulative.iter_mut().zip(d) {
            *c += v;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{dot, stream_rng};
    use crate::lmo::BudgetedBox;

    fn boxed(n: usize, b: f64) -> Arc<dyn ConstraintSet> {
        Arc::new(BudgetedBox::new(n, b).unwrap())
    }

    #[test]
    fn zero_history_plays_lmo_of_perturbation() {
        let set = boxed(4, 2.0);
        let o = FplOracle::new(set.clone(), Direction::Maximize, 0.1, &mut stream_rng(1, 0)).unwrap();
        let expected = set.linear_opt(o.perturbation(), Direction::Maximize).unwrap();
        assert_eq!(o.next().unwrap(), expected);
        assert!(o.perturbation().iter().all(|&p| (0.0..=10.0).contains(&p)));
    }

    #[test]
    fn follow_the_leader_limit() {
        let mut o =
            FplOracle::new(boxed(2, 1.0), Direction::Maximize, f64::INFINITY, &mut stream_rng(1, 0))
                .unwrap();
        o.feedback(&[1.0, 0.0]).unwrap();
        assert_eq!(o.next().unwrap().as_slice(), &[1.0, 0.0]);
    }

    #[test]
    fn feedback_cancels() {
        let mut o = FplOracle::new(boxed(3, 1.0), Direction::Maximize, 0.5, &mut stream_rng(4, 0)).unwrap();
        let base = o.next().unwrap();
        o.feedback(&[3.0, -1.0, 2.0]).unwrap();
        o.feedback(&[-3.0, 1.0, -2.0]).unwrap();
        assert_eq!(o.next().unwrap(), base);
        assert!(matches!(o.feedback(&[1.0]), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn converges_to_leader_after_crossing() {
        let d = [1.0, 0.5, 0.25];
        let mut o = FplOracle::new(boxed(3, 1.0), Direction::Maximize, 0.05, &mut stream_rng(8, 0)).unwrap();
        let p = o.perturbation().to_vec();
        let crossing = (1..3)
            .map(|i| ((p[i] - p[0]) / (d[0] - d[i])).max(0.0).floor() as usize + 1)
            .max()
            .unwrap();
        for t in 1..=crossing + 5 {
            o.feedback(&d).unwrap();
            if t >= crossing {
                assert_eq!(o.next().unwrap().as_slice(), &[1.0, 0.0, 0.0], "t={t}");
            }
        }
    }

    #[test]
    fn deterministic_under_seed() {
        let a = FplOracle::new(boxed(5, 2.0), Direction::Minimize, 0.3, &mut stream_rng(77, 2)).unwrap();
        let b = FplOracle::new(boxed(5, 2.0), Direction::Minimize, 0.3, &mut stream_rng(77, 2)).unwrap();
        assert_eq!(a.perturbation(), b.perturbation());
    }

    fn best_vertex_value(set: &BudgetedBox, total: &[f64]) -> f64 {
        set.vertices()
            .unwrap()
            .iter()
            .map(|v| dot(total, v))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    fn mean_regret(horizon: usize, seeds: u64, signs: bool) -> f64 {
        let set = BudgetedBox::new(5, 1.0).unwrap();
        let shared: Arc<dyn ConstraintSet> = Arc::new(set.clone());
        let mut sum = 0.0;
        for seed in 0..seeds {
            let mut rng = stream_rng(seed, 0);
            let mut data = stream_rng(seed, 1);
            let mut o = FplOracle::for_horizon(shared.clone(), Direction::Maximize, horizon, &mut rng).unwrap();
            let mut total = vec![0.0; 5];
            let mut gained = 0.0;
            for _ in 0..horizon {
                let v = o.next().unwrap();
                let d: Vec<f64> = (0..5)
                    .map(|_| {
                        if signs {
                            if data.random_bool(0.5) { 1.0 } else { -1.0 }
                        } else {
                            data.random_range(-1.0..1.0)
                        }
                    })
                    .collect();
                gained += dot(&d, &v);
                total.iter_mut().zip(&d).for_each(|(t, x)| *t += x);
                o.feedback(&d).unwrap();
            }
            sum += best_vertex_value(&set, &total) - gained;
        }
        sum / seeds as f64
    }

    #[test]
    fn sign_sequence_regret_within_bound() {
        let horizon = 400;
        let diameter = BudgetedBox::new(5, 1.0).unwrap().diameter();
        let r = mean_regret(horizon, 20, true);
        assert!(r <= 8.0 * diameter * (horizon as f64).sqrt(), "regret {r}");
    }

    #[test]
    fn regret_scales_as_sqrt_horizon() {
        let normalized: Vec<f64> = [100, 400, 1600]
            .iter()
            .map(|&t| mean_regret(t, 20, false) / (t as f64).sqrt())
            .collect();
        // No horizon may exceed the running maximum of the shorter ones by
        // more than 20%.
        let mut running = normalized[0];
        for &r in &normalized[1..] {
            assert!(r <= 1.2 * running, "normalized regrets {normalized:?}");
            running = running.max(r);
        }
    }
}
