use std::sync::Arc;

use rand::Rng as _;

use crate::domain::stream_rng;
use crate::error::{check_dim, Error, Result};

use super::gradient::{enumerate_values, multilinear_from_values, BRUTE_FORCE_LIMIT};
use super::SetFunction;

/// A continuous extension with value and exact gradient.
pub trait Extension: Send + Sync {
    fn dim(&self) -> usize;
    fn value(&self, x: &[f64]) -> f64;
    fn gradient(&self, x: &[f64]) -> Vec<f64>;
}

#[derive(Debug)]
struct FacilityData {
    n: usize,
    ratings: Vec<Vec<f64>>,
    /// Per user, item indices by decreasing rating.
    order: Vec<Vec<usize>>,
}

/// Facility location `f(X) = Σ_u max_{j∈X} R_{uj}` and its multilinear
/// extension in sorted closed form.
#[derive(Clone, Debug)]
pub struct FacilityLocation {
    data: Arc<FacilityData>,
}

impl FacilityLocation {
    pub fn new(n_items: usize, ratings: Vec<Vec<f64>>) -> Result<Self> {
        for (u, row) in ratings.iter().enumerate() {
            check_dim(n_items, row.len())?;
            if let Some(j) = row.iter().position(|&r| !(r >= 0.0) || !r.is_finite()) {
                return Err(Error::invalid(format!(
                    "rating of user {u} for item {j} must be finite and nonnegative"
                )));
            }
        }
        let order = ratings
            .iter()
            .map(|row| {
                let mut idx: Vec<usize> = (0..n_items).collect();
                idx.sort_by(|&a, &b| row[b].total_cmp(&row[a]).then(a.cmp(&b)));
                idx
            })
            .collect();
        Ok(FacilityLocation {
            data: Arc::new(FacilityData {
                n: n_items,
                ratings,
                order,
            }),
        })
    }

    pub fn users(&self) -> usize {
        self.data.ratings.len()
    }

    pub fn ratings(&self) -> &[Vec<f64>] {
        &self.data.ratings
    }

    pub fn set_function(&self) -> SetFunction {
        let data = self.data.clone();
        SetFunction::new(data.n, move |m| {
            data.ratings
                .iter()
                .map(|row| {
                    row.iter()
                        .zip(m)
                        .filter(|(_, &in_set)| in_set)
                        .map(|(&r, _)| r)
                        .fold(0.0, f64::max)
                })
                .sum()
        })
    }
}

impl Extension for FacilityLocation {
    fn dim(&self) -> usize {
        self.data.n
    }

    fn value(&self, x: &[f64]) -> f64 {
        let mut total = 0.0;
        for (row, order) in self.data.ratings.iter().zip(&self.data.order) {
            let mut none_yet = 1.0;
            for &j in order {
                total += row[j] * x[j] * none_yet;
                none_yet *= 1.0 - x[j];
                if none_yet == 0.0 {
                    break;
                }
            }
        }
        total
    }

    /// For item `j_l` at rank `l`: `P_l (R_l − S_l)` with
    /// `P_l = Π_{m<l}(1 − x_m)` and `S_l = R_{l+1}x_{l+1} + (1 − x_{l+1}) S_{l+1}`.
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let n = self.data.n;
        let mut grad = vec![0.0; n];
        let mut prefix = vec![0.0; n];
        for (row, order) in self.data.ratings.iter().zip(&self.data.order) {
            let mut none_yet = 1.0;
            for (l, &j) in order.iter().enumerate() {
                prefix[l] = none_yet;
                none_yet *= 1.0 - x[j];
            }
            let mut tail = 0.0;
            for (l, &j) in order.iter().enumerate().rev() {
                grad[j] += prefix[l] * (row[j] - tail);
                tail = row[j] * x[j] + (1.0 - x[j]) * tail;
            }
        }
        grad
    }
}

pub fn facility_location_extension(ratings: &[Vec<f64>], x: &[f64]) -> Result<f64> {
    let f = FacilityLocation::new(x.len(), ratings.to_vec())?;
    Ok(f.value(x))
}

#[derive(Debug)]
struct CoverageData {
    /// `p[a][j]`: probability that document `a` covers topic `j`.
    p: Vec<Vec<f64>>,
    topics: usize,
}

/// Probabilistic coverage `f(X) = (1/J) Σ_j [1 − Π_{a∈X} (1 − p_a(j))]`.
#[derive(Clone, Debug)]
pub struct ProbabilisticCoverage {
    data: Arc<CoverageData>,
}

impl ProbabilisticCoverage {
    pub fn new(topics: usize, p: Vec<Vec<f64>>) -> Result<Self> {
        if topics == 0 {
            return Err(Error::invalid("coverage needs at least one topic"));
        }
        for (a, row) in p.iter().enumerate() {
            check_dim(topics, row.len())?;
            if let Some(j) = row.iter().position(|&v| !(0.0..=1.0).contains(&v)) {
                return Err(Error::invalid(format!(
                    "coverage probability p[{a}][{j}] = {} outside [0, 1]",
                    row[j]
                )));
            }
        }
        Ok(ProbabilisticCoverage {
            data: Arc::new(CoverageData { p, topics }),
        })
    }

    pub fn topics(&self) -> usize {
        self.data.topics
    }

    pub fn probabilities(&self) -> &[Vec<f64>] {
        &self.data.p
    }

    pub fn set_function(&self) -> SetFunction {
        let data = self.data.clone();
        SetFunction::new(data.p.len(), move |m| {
            let j_count = data.topics as f64;
            (0..data.topics)
                .map(|j| {
                    let miss: f64 = data
                        .p
                        .iter()
                        .zip(m)
                        .filter(|(_, &in_set)| in_set)
                        .map(|(row, _)| 1.0 - row[j])
                        .product();
                    1.0 - miss
                })
                .sum::<f64>()
                / j_count
        })
    }
}

impl Extension for ProbabilisticCoverage {
    fn dim(&self) -> usize {
        self.data.p.len()
    }

    fn value(&self, x: &[f64]) -> f64 {
        let d = &self.data;
        (0..d.topics)
            .map(|j| {
                let miss: f64 = d.p.iter().zip(x).map(|(row, &xa)| 1.0 - row[j] * xa).product();
                1.0 - miss
            })
            .sum::<f64>()
            / d.topics as f64
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let d = &self.data;
        let n = d.p.len();
        let mut grad = vec![0.0; n];
        let mut suffix = vec![1.0; n + 1];
        for j in 0..d.topics {
            for a in (0..n).rev() {
                suffix[a] = suffix[a + 1] * (1.0 - d.p[a][j] * x[a]);
            }
            let mut prefix = 1.0;
            for a in 0..n {
                grad[a] += d.p[a][j] * prefix * suffix[a + 1];
                prefix *= 1.0 - d.p[a][j] * x[a];
            }
        }
        let scale = 1.0 / d.topics as f64;
        grad.iter_mut().for_each(|g| *g *= scale);
        grad
    }
}

pub fn coverage_extension(p: &[Vec<f64>], x: &[f64]) -> Result<f64> {
    check_dim(p.len(), x.len())?;
    let topics = p.first().map_or(1, |r| r.len());
    Ok(ProbabilisticCoverage::new(topics, p.to_vec())?.value(x))
}

/// `F(x) = ⟨w, x⟩`.
#[derive(Clone, Debug)]
pub struct Modular {
    pub weights: Vec<f64>,
}

impl Extension for Modular {
    fn dim(&self) -> usize {
        self.weights.len()
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.weights.iter().zip(x).map(|(w, v)| w * v).sum()
    }

    fn gradient(&self, _x: &[f64]) -> Vec<f64> {
        self.weights.clone()
    }
}

/// Multilinear extension of an arbitrary set function by full enumeration.
/// All `2ⁿ` set values are evaluated once at construction.
#[derive(Clone, Debug)]
pub struct BruteMultilinear {
    n: usize,
    values: Vec<f64>,
}

impl BruteMultilinear {
    pub fn new(f: &SetFunction) -> Result<Self> {
        Ok(BruteMultilinear {
            n: f.ground_size(),
            values: enumerate_values(f)?,
        })
    }
}

impl Extension for BruteMultilinear {
    fn dim(&self) -> usize {
        self.n
    }

    fn value(&self, x: &[f64]) -> f64 {
        multilinear_from_values(&self.values, x)
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut y = x.to_vec();
        (0..self.n)
            .map(|i| {
                y[i] = 1.0;
                let hi = multilinear_from_values(&self.values, &y);
                y[i] = 0.0;
                let lo = multilinear_from_values(&self.values, &y);
                y[i] = x[i];
                hi - lo
            })
            .collect()
    }
}

/// Sampled multilinear extension with common random numbers: every call uses
/// the same `samples` threshold vectors, so comparisons between nearby points
/// are consistent.
#[derive(Clone, Debug)]
pub struct MonteCarloExtension {
    f: SetFunction,
    thresholds: Vec<Vec<f64>>,
}

impl MonteCarloExtension {
    pub const DEFAULT_SAMPLES: usize = 200;

    pub fn new(f: SetFunction, samples: usize, seed: u64) -> Self {
        let mut rng = stream_rng(seed, 0x4d43);
        let thresholds = (0..samples)
            .map(|_| (0..f.ground_size()).map(|_| rng.random::<f64>()).collect())
            .collect();
        MonteCarloExtension { f, thresholds }
    }
}

impl Extension for MonteCarloExtension {
    fn dim(&self) -> usize {
        self.f.ground_size()
    }

    fn value(&self, x: &[f64]) -> f64 {
        let mut mask = vec![false; x.len()];
        let total: f64 = self
            .thresholds
            .iter()
            .map(|u| {
                mask.iter_mut().zip(u).zip(x).for_each(|((m, &u), &x)| *m = u < x);
                self.f.eval(&mask)
            })
            .sum();
        total / self.thresholds.len().max(1) as f64
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let n = x.len();
        let mut grad = vec![0.0; n];
        let mut mask = vec![false; n];
        for u in &self.thresholds {
            mask.iter_mut().zip(u).zip(x).for_each(|((m, &u), &x)| *m = u < x);
            for i in 0..n {
                let keep = mask[i];
                mask[i] = true;
                let hi = self.f.eval(&mask);
                mask[i] = false;
                let lo = self.f.eval(&mask);
                mask[i] = keep;
                grad[i] += hi - lo;
            }
        }
        let s = self.thresholds.len().max(1) as f64;
        grad.iter_mut().for_each(|g| *g /= s);
        grad
    }
}

/// Extension for a set function without a closed form: full
/// enumeration up to the brute-force limit, sampling beyond it.
pub fn extension_for(f: &SetFunction, seed: u64) -> Box<dyn Extension> {
    if f.ground_size() <= BRUTE_FORCE_LIMIT {
        if let Ok(b) = BruteMultilinear::new(f) {
            return Box::new(b);
        }
    }
    Box::new(MonteCarloExtension::new(
        f.clone(),
        MonteCarloExtension::DEFAULT_SAMPLES,
        seed,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::submodular::brute_multilinear;
    use proptest::prelude::*;

    fn single_user() -> FacilityLocation {
        FacilityLocation::new(2, vec![vec![5.0, 3.0]]).unwrap()
    }

    #[test]
    fn facility_examples() {
        let f = single_user();
        assert_eq!(f.value(&[1.0, 0.0]), 5.0);
        assert_eq!(f.value(&[0.5, 0.5]), 3.25);
        assert_eq!(f.value(&[0.0, 0.0]), 0.0);
        assert_eq!(brute_multilinear(&f.set_function(), &[0.5, 0.5]).unwrap(), 3.25);
        assert!(FacilityLocation::new(2, vec![vec![-1.0, 3.0]]).is_err());
    }

    #[test]
    fn coverage_examples() {
        let c = ProbabilisticCoverage::new(1, vec![vec![1.0], vec![0.5]]).unwrap();
        assert_eq!(c.value(&[1.0, 0.0]), 1.0);
        assert_eq!(c.value(&[0.0, 1.0]), 0.5);
        assert!(ProbabilisticCoverage::new(1, vec![vec![1.5]]).is_err());
        assert_eq!(coverage_extension(&[vec![1.0], vec![0.5]], &[1.0, 0.0]).unwrap(), 1.0);
    }

    #[test]
    fn modular_extension_is_linear() {
        let w = vec![1.0, -2.0, 0.5];
        let f = SetFunction::modular(w.clone());
        let x = [0.3, 0.9, 0.1];
        let expected: f64 = w.iter().zip(&x).map(|(a, b)| a * b).sum();
        assert!((brute_multilinear(&f, &x).unwrap() - expected).abs() < 1e-12);
    }

    fn matrix(rows: usize, cols: usize, hi: f64) -> impl Strategy<Value = Vec<Vec<f64>>> {
        prop::collection::vec(prop::collection::vec(0.0..hi, cols), rows)
    }

    proptest! {
        #[test]
        fn facility_closed_form_matches_enumeration(
            ratings in matrix(3, 6, 20.0),
            x in prop::collection::vec(0.0..=1.0f64, 6),
        ) {
            let f = FacilityLocation::new(6, ratings).unwrap();
            let brute = BruteMultilinear::new(&f.set_function()).unwrap();
            prop_assert!((f.value(&x) - brute.value(&x)).abs() < 1e-10 * (1.0 + brute.value(&x)));
            for (a, b) in f.gradient(&x).iter().zip(brute.gradient(&x)) {
                prop_assert!((a - b).abs() < 1e-9);
            }
        }

        #[test]
        fn coverage_closed_form_matches_enumeration(
            p in matrix(6, 3, 1.0),
            x in prop::collection::vec(0.0..=1.0f64, 6),
        ) {
            let c = ProbabilisticCoverage::new(3, p).unwrap();
            let brute = BruteMultilinear::new(&c.set_function()).unwrap();
            prop_assert!((c.value(&x) - brute.value(&x)).abs() < 1e-10);
            for (a, b) in c.gradient(&x).iter().zip(brute.gradient(&x)) {
                prop_assert!((a - b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn monte_carlo_is_close_and_repeatable() {
        let f = single_user();
        let mc = MonteCarloExtension::new(f.set_function(), 20_000, 3);
        let v = mc.value(&[0.5, 0.5]);
        assert!((v - 3.25).abs() < 0.05, "{v}");
        assert_eq!(v, mc.value(&[0.5, 0.5]));
    }
}
