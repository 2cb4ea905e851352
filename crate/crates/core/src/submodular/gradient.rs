use rand::Rng as _;

use crate::domain::Rng;
use crate::error::{check_dim, Error, Result};

use super::{check_fractional, SetFunction};

/// Largest ground set accepted by the enumeration routines.
pub const BRUTE_FORCE_LIMIT: usize = 20;

/// `f(S)` for every mask `S`, bit `i` of the index standing for element `i`.
pub(crate) fn enumerate_values(f: &SetFunction) -> Result<Vec<f64>> {
    let n = f.ground_size();
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::SizeLimit {
            what: "ground set for enumeration",
            got: n,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let mut members = vec![false; n];
    Ok((0u32..1 << n)
        .map(|mask| {
            members.iter_mut().enumerate().for_each(|(i, m)| *m = mask >> i & 1 == 1);
            f.eval(&members)
        })
        .collect())
}

/// `Σ_S f(S) Π_{i∈S} x_i Π_{i∉S} (1 − x_i)` from tabulated set values.
pub(crate) fn multilinear_from_values(values: &[f64], x: &[f64]) -> f64 {
    let mut probs = Vec::with_capacity(values.len());
    probs.push(1.0);
    for &xi in x {
        let len = probs.len();
        for k in 0..len {
            let p = probs[k];
            probs.push(p * xi);
            probs[k] = p * (1.0 - xi);
        }
    }
    values.iter().zip(&probs).map(|(v, p)| v * p).sum()
}

/// Multilinear extension by full enumeration of `2ⁿ` subsets.
pub fn brute_multilinear(f: &SetFunction, x: &[f64]) -> Result<f64> {
    check_dim(f.ground_size(), x.len())?;
    check_fractional(x)?;
    Ok(multilinear_from_values(&enumerate_values(f)?, x))
}

/// Exact gradient of the multilinear extension,
/// `∂F/∂x_i = F(x | x_i = 1) − F(x | x_i = 0)`.
pub fn brute_multilinear_grad(f: &SetFunction, x: &[f64]) -> Result<Vec<f64>> {
    check_dim(f.ground_size(), x.len())?;
    check_fractional(x)?;
    let values = enumerate_values(f)?;
    let mut y = x.to_vec();
    Ok((0..x.len())
        .map(|i| {
            y[i] = 1.0;
            let hi = multilinear_from_values(&values, &y);
            y[i] = 0.0;
            let lo = multilinear_from_values(&values, &y);
            y[i] = x[i];
            hi - lo
        })
        .collect())
}

/// One-sample estimate of `∂F/∂x_i`: draw `R ⊆ [n] \ {i}` with
/// `P(j ∈ R) = x_j` independently and return `f(R ∪ {i}) − f(R)`.
pub fn grad_one_sample(f: &SetFunction, x: &[f64], i: usize, rng: &mut Rng) -> Result<f64> {
    check_dim(f.ground_size(), x.len())?;
    if i >= x.len() {
        return Err(Error::invalid(format!("coordinate {i} out of range")));
    }
    let mut members: Vec<bool> = x.iter().map(|&xj| rng.random::<f64>() < xj).collect();
    members[i] = true;
    let with = f.eval(&members);
    members[i] = false;
    let without = f.eval(&members);
    Ok(with - without)
}

/// Full gradient estimate from one shared draw `R`: coordinate `i` is
/// `f(R ∪ {i}) − f(R \ {i})`. Uses `n + 1` evaluations.
pub fn grad_one_sample_vector(f: &SetFunction, x: &[f64], rng: &mut Rng) -> Result<Vec<f64>> {
    check_dim(f.ground_size(), x.len())?;
    let mut members: Vec<bool> = x.iter().map(|&xj| rng.random::<f64>() < xj).collect();
    let base = f.eval(&members);
    Ok((0..x.len())
        .map(|i| {
            let was_in = members[i];
            members[i] = !was_in;
            let flipped = f.eval(&members);
            members[i] = was_in;
            if was_in {
                base - flipped
            } else {
                flipped - base
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::stream_rng;
    use crate::submodular::FacilityLocation;

    #[test]
    fn degenerate_sampling_is_exact() {
        let f = FacilityLocation::new(3, vec![vec![5.0, 3.0, 1.0], vec![0.0, 2.0, 4.0]])
            .unwrap()
            .set_function();
        let mut rng = stream_rng(1, 0);
        for i in 0..3 {
            let at_zero = grad_one_sample(&f, &[0.0; 3], i, &mut rng).unwrap();
            assert_eq!(at_zero, f.eval_indices(&[i]) - f.eval_indices(&[]));
            let rest: Vec<usize> = (0..3).filter(|&j| j != i).collect();
            let at_one = grad_one_sample(&f, &[1.0; 3], i, &mut rng).unwrap();
            assert_eq!(at_one, f.eval_indices(&[0, 1, 2]) - f.eval_indices(&rest));
        }
        let v = grad_one_sample_vector(&f, &[0.0; 3], &mut rng).unwrap();
        assert_eq!(v, vec![5.0, 5.0, 5.0]);
    }

    #[test]
    fn modular_vector_is_exact() {
        let w = vec![1.0, -2.0, 3.5, 0.0];
        let f = SetFunction::modular(w.clone());
        let mut rng = stream_rng(2, 0);
        for _ in 0..20 {
            assert_eq!(grad_one_sample_vector(&f, &[0.3, 0.5, 0.9, 0.1], &mut rng).unwrap(), w);
        }
    }

    #[test]
    fn vector_estimator_uses_n_plus_one_evaluations() {
        let f = SetFunction::modular(vec![1.0; 6]);
        grad_one_sample_vector(&f, &[0.5; 6], &mut stream_rng(0, 0)).unwrap();
        assert_eq!(f.evaluations(), 7);
    }

    #[test]
    fn single_coordinate_mean() {
        // One user rating (5, 3); x = (0, 0.5); coordinate 0.
        // E = 0.5·(5 − 0) + 0.5·(5 − 3) = 3.5, per-draw values {5, 2}.
        let f = FacilityLocation::new(2, vec![vec![5.0, 3.0]]).unwrap().set_function();
        let mut rng = stream_rng(3, 0);
        let draws = 100_000;
        let mean = (0..draws)
            .map(|_| grad_one_sample(&f, &[0.0, 0.5], 0, &mut rng).unwrap())
            .sum::<f64>()
            / draws as f64;
        let se = 1.5 / (draws as f64).sqrt();
        assert!((mean - 3.5).abs() < 3.0 * se, "mean {mean}");
    }

    #[test]
    fn size_limit() {
        let f = SetFunction::modular(vec![1.0; 21]);
        assert!(matches!(
            brute_multilinear(&f, &[0.5; 21]),
            Err(Error::SizeLimit { .. })
        ));
    }

    #[test]
    fn brute_agrees_on_vertices() {
        let f = FacilityLocation::new(4, vec![vec![4.0, 1.0, 2.0, 3.0], vec![1.0, 5.0, 0.0, 2.0]])
            .unwrap()
            .set_function();
        for mask in 0u32..16 {
            let x: Vec<f64> = (0..4).map(|i| (mask >> i & 1) as f64).collect();
            let set: Vec<usize> = (0..4).filter(|i| mask >> i & 1 == 1).collect();
            assert_eq!(brute_multilinear(&f, &x).unwrap(), f.eval_indices(&set));
        }
    }
}
