use crate::domain::{ConstraintSet, Direction, Point};
use crate::error::{check_dim, Error, Result};

use super::order_desc;

/// `{x ∈ [0,1]ⁿ : 1ᵀx ≤ b}`.
#[derive(Clone, Debug, PartialEq)]
pub struct BudgetedBox {
    n: usize,
    budget: f64,
}

impl BudgetedBox {
    pub fn new(n: usize, budget: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("budgeted box needs a positive dimension"));
        }
        if !(budget >= 0.0) || !budget.is_finite() {
            return Err(Error::invalid("budget must be finite and nonnegative"));
        }
        Ok(BudgetedBox { n, budget })
    }

    pub fn budget(&self) -> f64 {
        self.budget
    }

    /// Budget clipped to the dimension; the constraint is slack beyond it.
    fn effective_budget(&self) -> f64 {
        self.budget.min(self.n as f64)
    }

    /// All vertices of the polytope. Exponential in `n`; for oracles in tests.
    pub fn vertices(&self) -> Result<Vec<Vec<f64>>> {
        if self.n > 20 {
            return Err(Error::SizeLimit {
                what: "vertex enumeration dimension",
                got: self.n,
                limit: 20,
            });
        }
        let b = self.effective_budget();
        let whole = b.floor() as u32;
        let frac = b - b.floor();
        let mut out = Vec::new();
        for mask in 0u32..(1 << self.n) {
            let ones = mask.count_ones();
            let v: Vec<f64> = (0..self.n)
                .map(|i| if mask >> i & 1 == 1 { 1.0 } else { 0.0 })
                .collect();
            if ones <= whole {
                out.push(v.clone());
            }
            if frac > 0.0 && ones == whole {
                for j in 0..self.n {
                    if mask >> j & 1 == 0 {
                        let mut w = v.clone();
                        w[j] = frac;
                        out.push(w);
                    }
                }
            }
        }
        Ok(out)
    }

    fn lmo_max(&self, d: &[f64]) -> Vec<f64> {
        let mut v = vec![0.0; self.n];
        let mut remaining = self.effective_budget();
        for i in order_desc(d, 0..self.n) {
            if d[i] <= 0.0 || remaining <= 0.0 {
                break;
            }
            let take = remaining.min(1.0);
            v[i] = take;
            remaining -= take;
        }
        v
    }
}

impl ConstraintSet for BudgetedBox {
    fn dim(&self) -> usize {
        self.n
    }

    fn diameter(&self) -> f64 {
        // ‖u − v‖² ≤ ‖u − v‖₁ ≤ min(2b, n); tight for integral b.
        (2.0 * self.effective_budget()).min(self.n as f64).sqrt()
    }

    fn radius(&self) -> f64 {
        let b = self.effective_budget();
        let frac = b - b.floor();
        (b.floor() + frac * frac).sqrt()
    }

    fn contains(&self, x: &[f64], tol: f64) -> bool {
        x.len() == self.n
            && x.iter().all(|&v| v >= -tol && v <= 1.0 + tol)
            && x.iter().sum::<f64>() <= self.budget + tol
    }

    fn linear_opt(&self, d: &[f64], direction: Direction) -> Result<Point> {
        check_dim(self.n, d.len())?;
        let v = match direction {
            Direction::Maximize => self.lmo_max(d),
            Direction::Minimize => {
                let neg: Vec<f64> = d.iter().map(|v| -v).collect();
                self.lmo_max(&neg)
            }
        };
        Ok(Point::from_vec(v))
    }

    fn supports_projection(&self) -> bool {
        true
    }

    fn project(&self, y: &[f64]) -> Result<Point> {
        check_dim(self.n, y.len())?;
        Ok(Point::from_vec(project_capped_simplex(y, self.budget)))
    }

    fn name(&self) -> &'static str {
        "budgeted box"
    }
}

fn clipped_sum(y: &[f64], tau: f64) -> f64 {
    y.iter().map(|v| (v - tau).clamp(0.0, 1.0)).sum()
}

/// Euclidean projection onto `{x ∈ [0,1]ⁿ : 1ᵀx ≤ b}`.
///
/// The multiplier `τ ≥ 0` solving `Σ clip(y_i − τ, 0, 1) = b` is bracketed by
/// bisection and then refined in closed form on the active coordinates.
pub(crate) fn project_capped_simplex(y: &[f64], budget: f64) -> Vec<f64> {
    let clipped: Vec<f64> = y.iter().map(|v| v.clamp(0.0, 1.0)).collect();
    if clipped.iter().sum::<f64>() <= budget {
        return clipped;
    }
    let mut lo = 0.0;
    let mut hi = y.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if clipped_sum(y, mid) > budget {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut tau = hi;
    let (mut active_sum, mut active, mut ones) = (0.0, 0usize, 0usize);
    for &v in y {
        let s = v - hi;
        if s >= 1.0 {
            ones += 1;
        } else if s > 0.0 {
            active += 1;
            active_sum += v;
        }
    }
    if active > 0 {
        let exact = (active_sum + ones as f64 - budget) / active as f64;
        if exact >= lo - 1e-12 && exact <= hi && clipped_sum(y, exact) <= budget + 1e-13 {
            tau = exact;
        }
    }
    let mut x: Vec<f64> = y.iter().map(|v| (v - tau).clamp(0.0, 1.0)).collect();
    let excess = x.iter().sum::<f64>() - budget;
    if excess > 0.0 {
        // Rounding residue: shave it off the largest fractional coordinate.
        if let Some(i) = (0..x.len()).filter(|&i| x[i] > excess).max_by(|&a, &b| x[a].total_cmp(&x[b])) {
            x[i] -= excess;
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{dist_sq, dot, stream_rng};
    use rand::Rng;

    fn lmo(d: &[f64], b: f64) -> Vec<f64> {
        BudgetedBox::new(d.len(), b)
            .unwrap()
            .linear_opt(d, Direction::Maximize)
            .unwrap()
            .into_vec()
    }

    #[test]
    fn lmo_examples() {
        assert_eq!(lmo(&[3.0, 1.0, 2.0], 1.0), vec![1.0, 0.0, 0.0]);
        assert_eq!(lmo(&[3.0, 1.0, 2.0], 2.0), vec![1.0, 0.0, 1.0]);
        assert_eq!(lmo(&[-1.0, -2.0], 1.0), vec![0.0, 0.0]);
        assert_eq!(lmo(&[0.0, 0.0, 0.0], 2.0), vec![0.0, 0.0, 0.0]);
        assert_eq!(lmo(&[2.0, 5.0, 1.0], 1.5), vec![0.5, 1.0, 0.0]);
        // ties go to the lowest index
        assert_eq!(lmo(&[1.0, 1.0, 1.0], 1.0), vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn lmo_minimize_and_dimension_check() {
        let set = BudgetedBox::new(3, 1.0).unwrap();
        let v = set.linear_opt(&[3.0, -1.0, -2.0], Direction::Minimize).unwrap();
        assert_eq!(v.as_slice(), &[0.0, 0.0, 1.0]);
        assert!(set.linear_opt(&[1.0], Direction::Maximize).is_err());
    }

    #[test]
    fn lmo_matches_two_budget_vertex_enumeration() {
        let set = BudgetedBox::new(3, 2.0).unwrap();
        let d = [3.0, 1.0, 2.0];
        let best = set
            .vertices()
            .unwrap()
            .iter()
            .map(|v| dot(&d, v))
            .fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(best, 5.0);
    }

    #[test]
    fn projection_examples() {
        let set = BudgetedBox::new(2, 1.0).unwrap();
        assert_eq!(set.project(&[0.2, 0.3]).unwrap().as_slice(), &[0.2, 0.3]);
        assert_eq!(set.project(&[-1.0, -1.0]).unwrap().as_slice(), &[0.0, 0.0]);
        let p = set.project(&[2.0, 2.0]).unwrap();
        assert!((p[0] - 0.5).abs() < 1e-10 && (p[1] - 0.5).abs() < 1e-10);
        // grid check: no feasible grid point is closer to y
        let best = dist_sq(&p, &[2.0, 2.0]);
        for i in 0..=200 {
            for j in 0..=200 {
                let v = [i as f64 / 200.0, j as f64 / 200.0];
                if set.contains(&v, 0.0) {
                    assert!(best <= dist_sq(&v, &[2.0, 2.0]) + 1e-12);
                }
            }
        }
    }

    #[test]
    fn projection_is_feasible_and_closest() {
        let mut rng = stream_rng(17, 0);
        for _ in 0..200 {
            let n = rng.random_range(1..8);
            let b = rng.random_range(0.0..n as f64);
            let set = BudgetedBox::new(n, b).unwrap();
            let y: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..3.0)).collect();
            let x = set.project(&y).unwrap();
            assert!(set.contains(&x, 1e-12), "x={x:?} b={b}");
            let dx = dist_sq(&y, &x).sqrt();
            for _ in 0..100 {
                let v: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
                let v = set.project(&v).unwrap();
                assert!(dx <= dist_sq(&y, &v).sqrt() + 1e-8);
            }
        }
    }

    #[test]
    fn metadata() {
        let set = BudgetedBox::new(10, 3.0).unwrap();
        assert!((set.radius() - 3f64.sqrt()).abs() < 1e-15);
        assert!((set.diameter() - 6f64.sqrt()).abs() < 1e-15);
        assert!(set.diameter() <= 2.0 * set.radius());
    }
}
