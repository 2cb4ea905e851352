use rand_distr::{Distribution, StandardNormal};

use crate::domain::{dist_sq, norm_sq, Rng};
use crate::error::{Error, Result};
use crate::schedule::Schedule;
use crate::vr::Averager;

/// Constants of the averager tracking bound
/// `E‖a_t − d_t‖² ≤ Q / (t + s + 1)^{2/3}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnalysisConstants {
    /// Drift bound: `‖a_t − a_{t−1}‖ ≤ G/(t+s)`.
    pub g: f64,
    pub s: f64,
    pub sigma: f64,
    pub q: f64,
}

impl AnalysisConstants {
    /// `initial_gap_sq` is `‖a₀ − d₀‖²`.
    pub fn new(g: f64, s: f64, sigma: f64, initial_gap_sq: f64) -> Result<Self> {
        if !(g >= 0.0 && sigma >= 0.0 && initial_gap_sq >= 0.0) {
            return Err(Error::invalid("G, σ and the initial gap must be nonnegative"));
        }
        if !(s >= 3.0) {
            return Err(Error::invalid("shift s must be at least 3"));
        }
        let q = (initial_gap_sq * (s + 1.0).powf(2.0 / 3.0))
            .max(4.0 * sigma * sigma + 1.5 * g * g);
        Ok(AnalysisConstants { g, s, sigma, q })
    }

    pub fn bound(&self, t: usize) -> f64 {
        self.q / (t as f64 + self.s + 1.0).powf(2.0 / 3.0)
    }
}

/// One trial of the tracking experiment: `a_t` drifts by exactly
/// `G/(t+s)` in a random direction, `ã_t = a_t + ξ_t` with
/// `E‖ξ_t‖² = σ²`, and `d_0 = 0`. Returns `‖a_t − d_t‖²` for `t = 1..=horizon`.
pub fn drifting_trial(
    consts: &AnalysisConstants,
    a0: &[f64],
    horizon: usize,
    rng: &mut Rng,
) -> Vec<f64> {
    let n = a0.len();
    let per_coord = consts.sigma / (n as f64).sqrt();
    let mut a = a0.to_vec();
    let mut avg = Averager::with_schedule(n, Schedule::RhoVr { shift: consts.s });
    let normal = |rng: &mut Rng| -> f64 { StandardNormal.sample(rng) };
    (1..=horizon)
        .map(|t| {
            let mut dir: Vec<f64> = (0..n).map(|_| normal(rng)).collect();
            let len = norm_sq(&dir).sqrt().max(f64::MIN_POSITIVE);
            let step = consts.g / (t as f64 + consts.s);
            dir.iter_mut().for_each(|d| *d *= step / len);
            a.iter_mut().zip(&dir).for_each(|(ai, di)| *ai += di);
            let noisy: Vec<f64> = a.iter().map(|ai| ai + per_coord * normal(rng)).collect();
            let d = avg.feed_vector(&noisy).expect("dimensions agree");
            dist_sq(&a, d)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::stream_rng;

    #[test]
    fn q_takes_the_larger_term() {
        let c = AnalysisConstants::new(1.0, 3.0, 1.0, 1.0).unwrap();
        assert!((c.q - 5.5).abs() < 1e-12);
        let c = AnalysisConstants::new(0.0, 3.0, 0.0, 4.0).unwrap();
        assert!((c.q - 4.0 * 4f64.powf(2.0 / 3.0)).abs() < 1e-12);
        assert!(c.q >= 4.0 * c.sigma * c.sigma);
    }

    #[test]
    fn noiseless_static_sequence_converges() {
        let c = AnalysisConstants::new(0.0, 3.0, 0.0, 1.0).unwrap();
        let errs = drifting_trial(&c, &[1.0, 0.0], 200, &mut stream_rng(1, 0));
        assert!(errs[199] < errs[0]);
        assert!(errs.iter().enumerate().all(|(t, e)| *e <= c.bound(t + 1) + 1e-12));
    }

    #[test]
    fn rejects_small_shift() {
        assert!(AnalysisConstants::new(1.0, 2.0, 1.0, 0.0).is_err());
    }
}
