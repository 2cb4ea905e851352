use rand::Rng as _;

use crate::domain::{ConstraintSet, Rng};
use crate::error::{check_dim, Error, Result};
use crate::lmo::{BudgetedBox, PartitionMatroid};

use super::Extension;

/// Coordinates closer than this to 0 or 1 count as integral.
const SNAP: f64 = 1e-12;

/// Block structure of a partition-matroid polytope
/// (a budgeted box with integral budget is a single block).
#[derive(Clone, Debug, PartialEq)]
pub struct PipageStructure {
    n: usize,
    blocks: Vec<Vec<usize>>,
    capacities: Vec<usize>,
}

impl PipageStructure {
    pub fn from_budget(set: &BudgetedBox) -> Result<Self> {
        let b = set.budget();
        if b.fract() != 0.0 {
            return Err(Error::invalid(
                "pipage rounding needs an integral budget",
            ));
        }
        let n = set.dim();
        Ok(PipageStructure {
            n,
            blocks: vec![(0..n).collect()],
            capacities: vec![(b as usize).min(n)],
        })
    }

    pub fn from_matroid(m: &PartitionMatroid) -> Self {
        PipageStructure {
            n: m.dim(),
            blocks: m.blocks().to_vec(),
            capacities: m.capacities().to_vec(),
        }
    }

    fn contains(&self, x: &[f64], tol: f64) -> bool {
        x.len() == self.n
            && x.iter().all(|&v| v >= -tol && v <= 1.0 + tol)
            && self
                .blocks
                .iter()
                .zip(&self.capacities)
                .all(|(b, &c)| b.iter().map(|&i| x[i]).sum::<f64>() <= c as f64 + tol)
    }
}

#[derive(Clone, Debug)]
pub struct PipageOutcome {
    /// Integral point (entries exactly 0 or 1).
    pub point: Vec<f64>,
    /// Extension value before rounding and after every step.
    pub trace: Vec<f64>,
}

impl PipageOutcome {
    pub fn members(&self) -> Vec<bool> {
        self.point.iter().map(|&v| v == 1.0).collect()
    }
}

fn snap(v: &mut f64) {
    if *v <= SNAP {
        *v = 0.0;
    } else if *v >= 1.0 - SNAP {
        *v = 1.0;
    }
}

fn is_fractional(v: f64) -> bool {
    v > 0.0 && v < 1.0
}

/// Which endpoint of a pipage segment to take.
trait Chooser {
    /// Pick between `x + hi·(e_i − e_j)` and `x + lo·(e_i − e_j)`
    /// (`lo ≤ 0 ≤ hi`); returns the chosen step.
    fn pair(&mut self, x: &mut Vec<f64>, i: usize, j: usize, lo: f64, hi: f64) -> f64;
    /// Decide the last fractional coordinate of a block.
    fn single(&mut self, x: &mut Vec<f64>, i: usize, up_feasible: bool) -> f64;
}

struct Greedy<'a> {
    ext: &'a dyn Extension,
}

impl Chooser for Greedy<'_> {
    fn pair(&mut self, x: &mut Vec<f64>, i: usize, j: usize, lo: f64, hi: f64) -> f64 {
        let (xi, xj) = (x[i], x[j]);
        x[i] = xi + hi;
        x[j] = xj - hi;
        let f_hi = self.ext.value(x);
        x[i] = xi + lo;
        x[j] = xj - lo;
        let f_lo = self.ext.value(x);
        x[i] = xi;
        x[j] = xj;
        if f_hi >= f_lo {
            hi
        } else {
            lo
        }
    }

    fn single(&mut self, x: &mut Vec<f64>, i: usize, up_feasible: bool) -> f64 {
        let xi = x[i];
        x[i] = 0.0;
        let down = self.ext.value(x);
        x[i] = 1.0;
        let up = self.ext.value(x);
        x[i] = xi;
        if up_feasible && up >= down {
            1.0
        } else {
            0.0
        }
    }
}

struct Randomized<'a> {
    rng: &'a mut Rng,
}

impl Chooser for Randomized<'_> {
    fn pair(&mut self, _x: &mut Vec<f64>, _i: usize, _j: usize, lo: f64, hi: f64) -> f64 {
        // Mean-preserving: P(hi)·hi + P(lo)·lo = 0.
        let p_hi = -lo / (hi - lo);
        if self.rng.random::<f64>() < p_hi {
            hi
        } else {
            lo
        }
    }

    fn single(&mut self, x: &mut Vec<f64>, i: usize, up_feasible: bool) -> f64 {
        if up_feasible && self.rng.random::<f64>() < x[i] {
            1.0
        } else {
            0.0
        }
    }
}

fn run_pipage(
    x: &[f64],
    structure: &PipageStructure,
    chooser: &mut dyn Chooser,
    ext: Option<&dyn Extension>,
) -> Result<PipageOutcome> {
    check_dim(structure.n, x.len())?;
    if !structure.contains(x, 1e-9) {
        return Err(Error::invalid("pipage input is not in the matroid polytope"));
    }
    let mut y: Vec<f64> = x.iter().map(|v| v.clamp(0.0, 1.0)).collect();
    y.iter_mut().for_each(snap);
    let mut trace = Vec::new();
    if let Some(e) = ext {
        trace.push(e.value(x));
    }
    for (block, &cap) in structure.blocks.iter().zip(&structure.capacities) {
        let mut frac: Vec<usize> = block.iter().copied().filter(|&i| is_fractional(y[i])).collect();
        while frac.len() >= 2 {
            let (i, j) = (frac[0], frac[1]);
            let hi = (1.0 - y[i]).min(y[j]);
            let lo = -(y[i].min(1.0 - y[j]));
            let (yi, yj) = (y[i], y[j]);
            let t = chooser.pair(&mut y, i, j, lo, hi);
            y[i] = yi + t;
            y[j] = yj - t;
            // Pin whichever coordinate bound the step.
            if t == hi {
                if 1.0 - yi <= yj {
                    y[i] = 1.0;
                } else {
                    y[j] = 0.0;
                }
            } else if yi <= 1.0 - yj {
                y[i] = 0.0;
            } else {
                y[j] = 1.0;
            }
            snap(&mut y[i]);
            snap(&mut y[j]);
            if let Some(e) = ext {
                trace.push(e.value(&y));
            }
            frac.retain(|&k| is_fractional(y[k]));
        }
        if let Some(&i) = frac.first() {
            let others: f64 = block.iter().filter(|&&k| k != i).map(|&k| y[k]).sum();
            let up_feasible = others + 1.0 <= cap as f64 + 1e-9;
            y[i] = chooser.single(&mut y, i, up_feasible);
            if let Some(e) = ext {
                trace.push(e.value(&y));
            }
        }
    }
    debug_assert!(y.iter().all(|&v| v == 0.0 || v == 1.0));
    Ok(PipageOutcome { point: y, trace })
}

/// Pipage rounding guided by `ext`: each step moves along `e_i − e_j` to the
/// endpoint with the larger extension value. The extension is convex along
/// such directions, so the value never decreases.
pub fn pipage_round(
    x: &[f64],
    structure: &PipageStructure,
    ext: &dyn Extension,
) -> Result<PipageOutcome> {
    check_dim(ext.dim(), x.len())?;
    run_pipage(x, structure, &mut Greedy { ext }, Some(ext))
}

/// Randomized pipage rounding: endpoints are drawn so that every step is
/// mean-preserving, so `E[F(X)] ≥ F(x)` for any extension convex along
/// `e_i − e_j` without consulting it.
pub fn randomized_pipage_round(
    x: &[f64],
    structure: &PipageStructure,
    rng: &mut Rng,
) -> Result<PipageOutcome> {
    run_pipage(x, structure, &mut Randomized { rng }, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::stream_rng;
    use crate::submodular::{FacilityLocation, ProbabilisticCoverage};

    fn budget(n: usize, b: f64) -> PipageStructure {
        PipageStructure::from_budget(&BudgetedBox::new(n, b).unwrap()).unwrap()
    }

    #[test]
    fn integral_input_unchanged() {
        let f = FacilityLocation::new(3, vec![vec![1.0, 2.0, 3.0]]).unwrap();
        let out = pipage_round(&[1.0, 0.0, 1.0], &budget(3, 2.0), &f).unwrap();
        assert_eq!(out.point, vec![1.0, 0.0, 1.0]);
    }

    #[test]
    fn facility_pair_goes_to_better_item() {
        let f = FacilityLocation::new(2, vec![vec![5.0, 3.0]]).unwrap();
        let out = pipage_round(&[0.5, 0.5], &budget(2, 1.0), &f).unwrap();
        assert_eq!(out.point, vec![1.0, 0.0]);
        assert_eq!(f.value(&out.point), 5.0);
        assert!(out.trace.windows(2).all(|w| w[1] >= w[0] - 1e-12));
    }

    #[test]
    fn rejects_infeasible_and_fractional_budget() {
        let f = FacilityLocation::new(2, vec![vec![5.0, 3.0]]).unwrap();
        assert!(pipage_round(&[0.9, 0.9], &budget(2, 1.0), &f).is_err());
        assert!(PipageStructure::from_budget(&BudgetedBox::new(3, 1.5).unwrap()).is_err());
    }

    #[test]
    fn partition_blocks_respected() {
        let m = PartitionMatroid::new(4, vec![vec![0, 1], vec![2, 3]], vec![1, 1]).unwrap();
        let s = PipageStructure::from_matroid(&m);
        let cov = ProbabilisticCoverage::new(
            2,
            vec![vec![0.9, 0.1], vec![0.2, 0.3], vec![0.5, 0.5], vec![0.0, 1.0]],
        )
        .unwrap();
        let out = pipage_round(&[0.4, 0.6, 0.5, 0.3], &s, &cov).unwrap();
        assert!(m.is_independent(&out.members()));
        assert!(cov.value(&out.point) >= cov.value(&[0.4, 0.6, 0.5, 0.3]) - 1e-9);
    }

    #[test]
    fn randomized_rounding_is_feasible_and_mean_preserving() {
        let s = budget(4, 2.0);
        let x = [0.5, 0.5, 0.25, 0.75];
        let mut rng = stream_rng(5, 0);
        let trials = 20_000;
        let mut mean = [0.0; 4];
        for _ in 0..trials {
            let out = randomized_pipage_round(&x, &s, &mut rng).unwrap();
            assert!(out.point.iter().sum::<f64>() <= 2.0);
            mean.iter_mut().zip(&out.point).for_each(|(m, v)| *m += v);
        }
        for (m, xi) in mean.iter().zip(&x) {
            assert!((m / trials as f64 - xi).abs() < 0.02);
        }
    }
}
