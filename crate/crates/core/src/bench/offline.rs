use crate::domain::{dot, ConstraintSet, Direction, ObjectiveSense, Point};
use crate::error::{Error, Result};
use crate::problems::RoundObjective;
use crate::submodular::{Extension, SetFunction};

pub const DEFAULT_OFFLINE_STEPS: usize = 2000;
pub const BRUTE_FORCE_OPT_LIMIT: usize = 15;

/// Views a round objective as an extension (value and exact gradient).
pub struct ObjectiveExtension<'a>(pub &'a dyn RoundObjective);

impl Extension for ObjectiveExtension<'_> {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.0.value(x)
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        self.0.gradient(x)
    }
}

struct ExtensionObjective<'a>(&'a dyn Extension);

impl RoundObjective for ExtensionObjective<'_> {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.0.value(x)
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        self.0.gradient(x)
    }
}

/// Offline Frank-Wolfe with exact gradients.
///
/// Maximization runs the continuous-greedy variant: `x⁰ = 0`,
/// `xᵏ⁺¹ = xᵏ + (1/K)·v_k`. Minimization starts from the minimizer of the
/// zero objective and uses `η_k = 2/(k+2)`, or exact line search when the
/// objective reports its curvature.
pub fn offline_fw(
    objective: &dyn RoundObjective,
    set: &dyn ConstraintSet,
    steps: usize,
    sense: ObjectiveSense,
) -> Result<Point> {
    offline_fw_trace(objective, set, steps, sense).map(|(x, _)| x)
}

/// [`offline_fw`] that also returns the objective after each step
/// (first entry is the starting value).
pub fn offline_fw_trace(
    objective: &dyn RoundObjective,
    set: &dyn ConstraintSet,
    steps: usize,
    sense: ObjectiveSense,
) -> Result<(Point, Vec<f64>)> {
    if steps == 0 {
        return Err(Error::invalid("offline Frank-Wolfe needs at least one step"));
    }
    if objective.dim() != set.dim() {
        return Err(Error::dim_mismatch(set.dim(), objective.dim()));
    }
    let n = set.dim();
    let mut trace = Vec::with_capacity(steps + 1);
    let x = match sense {
        ObjectiveSense::MaximizeDRSubmodular => {
            let mut x = vec![0.0; n];
            trace.push(objective.value(&x));
            let step = 1.0 / steps as f64;
            for _ in 0..steps {
                let v = set.linear_opt(&objective.gradient(&x), Direction::Maximize)?;
                x.iter_mut().zip(&v[..]).for_each(|(xi, vi)| *xi += step * vi);
                trace.push(objective.value(&x));
            }
            x
        }
        ObjectiveSense::MinimizeConvex => {
            let mut x = set.linear_opt(&vec![0.0; n], Direction::Minimize)?.into_vec();
            trace.push(objective.value(&x));
            for k in 0..steps {
                let g = objective.gradient(&x);
                let v = set.linear_opt(&g, Direction::Minimize)?;
                let d: Vec<f64> = v.iter().zip(&x).map(|(a, b)| a - b).collect();
                let slope = dot(&g, &d);
                if slope >= 0.0 {
                    trace.push(objective.value(&x));
                    break;
                }
                let eta = match objective.curvature(&x, &d) {
                    Some(q) if q > 0.0 => (-slope / (2.0 * q)).min(1.0),
                    Some(_) => 1.0,
                    None => 2.0 / (k as f64 + 2.0),
                };
                x.iter_mut().zip(&d).for_each(|(xi, di)| *xi += eta * di);
                trace.push(objective.value(&x));
            }
            x
        }
    };
    Ok((Point::from_vec(x), trace))
}

/// Continuous-greedy offline Frank-Wolfe on an extension.
pub fn offline_fw_extension(ext: &dyn Extension, set: &dyn ConstraintSet, steps: usize) -> Result<Point> {
    offline_fw(&ExtensionObjective(ext), set, steps, ObjectiveSense::MaximizeDRSubmodular)
}

/// Exhaustive maximization of `f` over sets whose indicators lie in `set`.
/// Ties go to the set found first in mask order.
pub fn brute_force_opt(f: &SetFunction, set: &dyn ConstraintSet) -> Result<(f64, Vec<usize>)> {
    let n = f.ground_size();
    if n > BRUTE_FORCE_OPT_LIMIT {
        return Err(Error::SizeLimit {
            what: "ground set",
            got: n,
            limit: BRUTE_FORCE_OPT_LIMIT,
        });
    }
    if set.dim() != n {
        return Err(Error::dim_mismatch(n, set.dim()));
    }
    let mut best: Option<(f64, u32)> = None;
    let mut members = vec![false; n];
    let mut indicator = vec![0.0; n];
    for mask in 0u32..(1 << n) {
        for i in 0..n {
            members[i] = mask >> i & 1 == 1;
            indicator[i] = if members[i] { 1.0 } else { 0.0 };
        }
        if !set.contains(&indicator, crate::lmo::MEMBERSHIP_TOL) {
            continue;
        }
        let v = f.eval(&members);
        if best.is_none_or(|(b, _)| v > b) {
            best = Some((v, mask));
        }
    }
    let (v, mask) = best.ok_or_else(|| Error::Infeasible("no feasible set".into()))?;
    Ok((v, (0..n).filter(|i| mask >> i & 1 == 1).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lmo::BudgetedBox;
    use crate::submodular::{FacilityLocation, Modular};

    #[test]
    fn modular_reaches_top_b() {
        let w = vec![0.3, 2.0, 0.1, 1.5, -1.0, 0.7];
        let set = BudgetedBox::new(6, 2.0).unwrap();
        let x = offline_fw_extension(&Modular { weights: w.clone() }, &set, 50).unwrap();
        let top = [0.0, 1.0, 0.0, 1.0, 0.0, 0.0];
        assert!(x.iter().zip(&top).all(|(a, b)| (a - b).abs() < 1e-12));
        let (v, arg) = brute_force_opt(&SetFunction::modular(w), &set).unwrap();
        assert_eq!(arg, vec![1, 3]);
        assert!((v - 3.5).abs() < 1e-12);
    }

    #[test]
    fn one_step_is_lmo_of_gradient_at_zero() {
        let fl = FacilityLocation::new(3, vec![vec![1.0, 4.0, 2.0]]).unwrap();
        let set = BudgetedBox::new(3, 1.0).unwrap();
        let x = offline_fw_extension(&fl, &set, 1).unwrap();
        let v = set.linear_opt(&fl.gradient(&[0.0; 3]), Direction::Maximize).unwrap();
        assert_eq!(x.as_slice(), v.as_slice());
    }

    #[test]
    fn facility_brute_force_example() {
        let fl = FacilityLocation::new(2, vec![vec![5.0, 3.0]]).unwrap();
        let set = BudgetedBox::new(2, 1.0).unwrap();
        let (v, arg) = brute_force_opt(&fl.set_function(), &set).unwrap();
        assert_eq!((v, arg), (5.0, vec![0]));
    }

    #[test]
    fn brute_force_size_limit() {
        let f = SetFunction::modular(vec![1.0; 16]);
        let set = BudgetedBox::new(16, 2.0).unwrap();
        assert!(matches!(brute_force_opt(&f, &set), Err(Error::SizeLimit { .. })));
    }

    #[test]
    fn convex_line_search_hits_projection() {
        use crate::problems::Quadratic;
        let set = BudgetedBox::new(4, 1.5).unwrap();
        let q = Quadratic {
            center: vec![0.9, 0.2, 0.8, -0.3],
            offset: 0.0,
        };
        let x = offline_fw(&q, &set, 2000, ObjectiveSense::MinimizeConvex).unwrap();
        let p = set.project(&q.center).unwrap();
        assert!(q.value(&x) - q.value(&p) < 1e-6);
    }
}
