use rand::Rng as _;

use crate::domain::Rng;
use crate::error::{Error, Result};
use crate::submodular::SetFunction;

/// One slot expert: follow the perturbed leader over ground-set singletons.
#[derive(Clone, Debug)]
struct SlotExpert {
    cumulative: Vec<f64>,
    perturbation: Vec<f64>,
}

impl SlotExpert {
    /// Best element not already taken by earlier slots, ties to lowest index.
    fn pick(&self, taken: &[bool]) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for (i, (c, p)) in self.cumulative.iter().zip(&self.perturbation).enumerate() {
            if taken[i] {
                continue;
            }
            let score = c + p;
            if best.is_none_or(|(_, s)| score > s) {
                best = Some((i, score));
            }
        }
        best.map(|(i, _)| i)
    }
}

/// Online Greedy for cardinality-constrained set selection. Slot `j` is an
/// expert whose reward for element `e` is `f_t(S_{j−1} ∪ {e}) − f_t(S_{j−1})`,
/// where `S_{j−1}` holds the picks of slots `1..j−1` this round.
#[derive(Clone, Debug)]
pub struct OnlineGreedy {
    n: usize,
    experts: Vec<SlotExpert>,
    picks: Option<Vec<usize>>,
}

impl OnlineGreedy {
    /// Perturbations are `Unif[0, 1/ε]`, `ε = 1/√T`.
    pub fn new(n: usize, budget: usize, horizon: usize, rng: &mut Rng) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("ground set must be nonempty"));
        }
        let scale = (horizon.max(1) as f64).sqrt();
        Self::with_perturbation(n, budget, scale, rng)
    }

    pub fn with_perturbation(n: usize, budget: usize, scale: f64, rng: &mut Rng) -> Result<Self> {
        if !(scale >= 0.0) || !scale.is_finite() {
            return Err(Error::invalid("perturbation scale must be finite and nonnegative"));
        }
        let experts = (0..budget.min(n))
            .map(|_| SlotExpert {
                cumulative: vec![0.0; n],
                perturbation: (0..n).map(|_| rng.random_range(0.0..=1.0) * scale).collect(),
            })
            .collect();
        Ok(OnlineGreedy {
            n,
            experts,
            picks: None,
        })
    }

    pub fn ground_size(&self) -> usize {
        self.n
    }

    pub fn budget(&self) -> usize {
        self.experts.len()
    }

    /// Picks of slots `1..b` in slot order. Idempotent until `feedback`.
    pub fn play(&mut self) -> Vec<usize> {
        if let Some(p) = &self.picks {
            return p.clone();
        }
        let mut taken = vec![false; self.n];
        let mut picks = Vec::with_capacity(self.experts.len());
        for expert in &self.experts {
            if let Some(e) = expert.pick(&taken) {
                taken[e] = true;
                picks.push(e);
            }
        }
        self.picks = Some(picks.clone());
        picks
    }

    pub fn play_indicator(&mut self) -> Vec<bool> {
        let mut members = vec![false; self.n];
        for e in self.play() {
            members[e] = true;
        }
        members
    }

    /// Reveals `f_t`; returns `f_t` of the played set.
    pub fn feedback(&mut self, f: &SetFunction) -> Result<f64> {
        if f.ground_size() != self.n {
            return Err(Error::dim_mismatch(self.n, f.ground_size()));
        }
        let picks = self
            .picks
            .take()
            .ok_or_else(|| Error::invalid("online greedy feedback called before play"))?;
        let mut prefix = vec![false; self.n];
        let mut base = f.eval(&prefix);
        for (expert, &pick) in self.experts.iter_mut().zip(&picks) {
            for e in 0..self.n {
                if prefix[e] {
                    continue;
                }
                prefix[e] = true;
                expert.cumulative[e] += f.eval(&prefix) - base;
                prefix[e] = false;
            }
            prefix[pick] = true;
            base = f.eval(&prefix);
        }
        Ok(base)
    }

    /// One full round: play, then learn from `f`.
    pub fn step(&mut self, f: &SetFunction) -> Result<(Vec<usize>, f64)> {
        let picks = self.play();
        let value = self.feedback(f)?;
        Ok((picks, value))
    }
}
