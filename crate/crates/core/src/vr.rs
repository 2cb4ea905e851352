//! Momentum averaging of stochastic gradients,
//! `d_k = (1 − ρ_k) d_{k−1} + ρ_k g̃_k`.

use crate::domain::GradientSample;
use crate::error::{check_dim, Error, Result};
use crate::schedule::Schedule;

#[derive(Clone, Debug)]
pub struct Averager {
    d: Vec<f64>,
    step_count: usize,
    schedule: Schedule,
}

impl Averager {
    /// Variance-reduced averager starting from `d₀ = 0`.
    pub fn new(dim: usize) -> Self {
        Self::with_schedule(dim, Schedule::rho_vr())
    }

    /// Averager that keeps only the most recent sample (`ρ ≡ 1`).
    pub fn latest_only(dim: usize) -> Self {
        Self::with_schedule(dim, Schedule::Unit)
    }

    pub fn with_schedule(dim: usize, schedule: Schedule) -> Self {
        Averager {
            d: vec![0.0; dim],
            step_count: 0,
            schedule,
        }
    }

    pub fn dim(&self) -> usize {
        self.d.len()
    }

    pub fn estimate(&self) -> &[f64] {
        &self.d
    }

    pub fn step_count(&self) -> usize {
        self.step_count
    }

    pub fn schedule(&self) -> Schedule {
        self.schedule
    }

    pub fn feed(&mut self, sample: &GradientSample) -> Result<&[f64]> {
        self.feed_vector(&sample.vector)
    }

    pub fn feed_vector(&mut self, sample: &[f64]) -> Result<&[f64]> {
        check_dim(self.d.len(), sample.len())?;
        let k = self.step_count + 1;
        let rho = self.schedule.value(k, k)?;
        for (d, g) in self.d.iter_mut().zip(sample) {
            *d = (1.0 - rho) * *d + rho * g;
        }
        self.step_count = k;
        Ok(&self.d)
    }

    pub fn reset(&mut self, d0: &[f64]) -> Result<()> {
        check_dim(self.d.len(), d0.len())?;
        if d0.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("averager reset vector must be finite"));
        }
        self.d.copy_from_slice(d0);
        self.step_count = 0;
        Ok(())
    }

    pub fn reset_zero(&mut self) {
        self.d.iter_mut().for_each(|v| *v = 0.0);
        self.step_count = 0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::stream_rng;
    use rand_distr::{Distribution, StandardNormal};

    fn sample(v: Vec<f64>) -> GradientSample {
        GradientSample {
            vector: v,
            round: 1,
            inner_step: 0,
        }
    }

    #[test]
    fn first_feed_scales_by_rho_one() {
        let mut a = Averager::new(2);
        let d = a.feed(&sample(vec![1.0, 2.0])).unwrap().to_vec();
        assert!((d[0] - 0.793_700_525_984_1).abs() < 1e-12);
        assert!((d[1] - 1.587_401_051_968_2).abs() < 1e-12);
        assert_eq!(a.step_count(), 1);
    }

    #[test]
    fn constant_stream_error_matches_unrolled_product() {
        let c = [1.5, -2.0, 0.5];
        let mut a = Averager::new(3);
        let mut product = 1.0;
        for k in 1..=100 {
            a.feed_vector(&c).unwrap();
            product *= 1.0 - Schedule::rho_vr().value(k, k).unwrap();
        }
        let err = a
            .estimate()
            .iter()
            .zip(&c)
            .map(|(d, c)| (d - c).abs())
            .fold(0.0, f64::max);
        // With d₀ = 0 and constant input the error is exactly ‖c‖∞·∏(1−ρ_k).
        assert!(err <= 2.0 * product + 1e-14);
        assert!((err - 2.0 * product).abs() < 1e-12);
    }

    #[test]
    fn dimension_mismatch() {
        let mut a = Averager::new(2);
        assert!(matches!(
            a.feed_vector(&[1.0, 2.0, 3.0]),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn reset_behaviour() {
        let mut a = Averager::new(2);
        a.feed_vector(&[5.0, 5.0]).unwrap();
        a.reset(&[0.25, -1.0]).unwrap();
        assert_eq!(a.estimate(), &[0.25, -1.0]);
        assert_eq!(a.step_count(), 0);

        a.reset_zero();
        let d = a.feed_vector(&[1.0, 2.0]).unwrap();
        assert!((d[0] - 0.793_700_525_984_1).abs() < 1e-12);
    }

    #[test]
    fn latest_only_tracks_last_sample() {
        let mut a = Averager::latest_only(2);
        a.feed_vector(&[1.0, 2.0]).unwrap();
        assert_eq!(a.feed_vector(&[3.0, -4.0]).unwrap(), &[3.0, -4.0]);
    }

    #[test]
    fn sup_norm_bounded_by_inputs_every_step() {
        let mut rng = stream_rng(9, 0);
        let mut a = Averager::new(4);
        a.reset(&[0.5, -0.5, 0.0, 1.0]).unwrap();
        let mut bound: f64 = 1.0;
        for _ in 0..500 {
            let s: Vec<f64> = (0..4usize)
                .map(|_| 3.0 * Distribution::<f64>::sample(&StandardNormal, &mut rng))
                .collect();
            bound = s.iter().fold(bound, |m, v| m.max(v.abs()));
            let d = a.feed_vector(&s).unwrap();
            assert!(d.iter().all(|v| v.abs() <= bound + 1e-12));
        }
    }

    #[test]
    fn identical_streams_identical_state() {
        let mut a = Averager::new(3);
        let mut b = Averager::new(3);
        let mut rng = stream_rng(5, 0);
        for _ in 0..50 {
            let s: Vec<f64> = (0..3).map(|_| StandardNormal.sample(&mut rng)).collect();
            let da = a.feed_vector(&s).unwrap().to_vec();
            let db = b.feed_vector(&s).unwrap().to_vec();
            assert_eq!(da, db);
        }
    }
}
