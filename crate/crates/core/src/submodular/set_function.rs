use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

type Evaluator = dyn Fn(&[bool]) -> f64 + Send + Sync;

/// A set function over the ground set `{0, …, n−1}` given by an evaluator on
/// membership masks. Clones share the evaluation counter.
#[derive(Clone)]
pub struct SetFunction {
    n: usize,
    eval: Arc<Evaluator>,
    evaluations: Arc<AtomicU64>,
}

impl SetFunction {
    pub fn new(n: usize, eval: impl Fn(&[bool]) -> f64 + Send + Sync + 'static) -> Self {
        SetFunction {
            n,
            eval: Arc::new(eval),
            evaluations: Arc::new(AtomicU64::new(0)),
        }
    }

    /// `f(S) = Σ_{i∈S} w_i`.
    pub fn modular(weights: Vec<f64>) -> Self {
        let n = weights.len();
        SetFunction::new(n, move |m| {
            m.iter().zip(&weights).filter(|(&m, _)| m).map(|(_, w)| w).sum()
        })
    }

    pub fn ground_size(&self) -> usize {
        self.n
    }

    pub fn eval(&self, members: &[bool]) -> f64 {
        debug_assert_eq!(members.len(), self.n);
        self.evaluations.fetch_add(1, Ordering::Relaxed);
        (self.eval)(members)
    }

    pub fn eval_indices(&self, set: &[usize]) -> f64 {
        let mut members = vec![false; self.n];
        for &i in set {
            members[i] = true;
        }
        self.eval(&members)
    }

    pub fn evaluations(&self) -> u64 {
        self.evaluations.load(Ordering::Relaxed)
    }
}

impl fmt::Debug for SetFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SetFunction")
            .field("n", &self.n)
            .field("evaluations", &self.evaluations())
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_evaluations_across_clones() {
        let f = SetFunction::modular(vec![1.0, 2.0, 4.0]);
        let g = f.clone();
        assert_eq!(f.eval_indices(&[0, 2]), 5.0);
        assert_eq!(g.eval(&[false, true, false]), 2.0);
        assert_eq!(f.evaluations(), 2);
    }
}
