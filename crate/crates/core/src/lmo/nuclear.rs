use nalgebra::DMatrix;
use rand_distr::{Distribution, StandardNormal};

use crate::domain::{stream_rng, ConstraintSet, Direction, Point};
use crate::error::{check_dim, Error, Result};

const POWER_TOL: f64 = 1e-8;
const POWER_MAX_ITERS: usize = 1000;

/// Matrices of shape `rows × cols` (flattened row-major) with nuclear norm
/// at most `radius`.
#[derive(Clone, Debug, PartialEq)]
pub struct NuclearBall {
    rows: usize,
    cols: usize,
    radius: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SingularTriple {
    pub left: Vec<f64>,
    pub value: f64,
    pub right: Vec<f64>,
}

/// Leading singular triple of the row-major `rows × cols` matrix `g`, by
/// power iteration on `gᵀg` from a fixed pseudo-random start.
pub fn top_singular_triple(g: &[f64], rows: usize, cols: usize) -> SingularTriple {
    let mut rng = stream_rng(0x5eed_5eed, 7);
    let mut v: Vec<f64> = (0..cols).map(|_| StandardNormal.sample(&mut rng)).collect();
    normalize(&mut v);
    let mut gv = vec![0.0; rows];
    let mut w = vec![0.0; cols];
    for _ in 0..POWER_MAX_ITERS {
        mat_vec(g, rows, cols, &v, &mut gv);
        mat_t_vec(g, rows, cols, &gv, &mut w);
        let lambda = normalize(&mut w);
        if lambda == 0.0 {
            break;
        }
        let change: f64 = w.iter().zip(&v).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        std::mem::swap(&mut v, &mut w);
        if change <= POWER_TOL {
            break;
        }
    }
    mat_vec(g, rows, cols, &v, &mut gv);
    let value = normalize(&mut gv);
    if value == 0.0 {
        return SingularTriple {
            left: vec![0.0; rows],
            value: 0.0,
            right: vec![0.0; cols],
        };
    }
    SingularTriple {
        left: gv,
        value,
        right: v,
    }
}

fn normalize(v: &mut [f64]) -> f64 {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
    n
}

fn mat_vec(g: &[f64], rows: usize, cols: usize, v: &[f64], out: &mut [f64]) {
    for i in 0..rows {
        out[i] = g[i * cols..(i + 1) * cols].iter().zip(v).map(|(a, b)| a * b).sum();
    }
}

fn mat_t_vec(g: &[f64], rows: usize, cols: usize, u: &[f64], out: &mut [f64]) {
    out.iter_mut().for_each(|x| *x = 0.0);
    for i in 0..rows {
        let ui = u[i];
        for (o, a) in out.iter_mut().zip(&g[i * cols..(i + 1) * cols]) {
            *o += ui * a;
        }
    }
}

impl NuclearBall {
    pub fn new(rows: usize, cols: usize, radius: f64) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::invalid("matrix shape must be positive"));
        }
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::invalid("nuclear ball radius must be positive"));
        }
        Ok(NuclearBall { rows, cols, radius })
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn radius_param(&self) -> f64 {
        self.radius
    }

    fn to_matrix(&self, x: &[f64]) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.rows, self.cols, x)
    }
}

/// Sum of singular values of a row-major matrix.
pub fn nuclear_norm(x: &[f64], rows: usize, cols: usize) -> f64 {
    DMatrix::from_row_slice(rows, cols, x).singular_values().sum()
}

impl ConstraintSet for NuclearBall {
    fn dim(&self) -> usize {
        self.rows * self.cols
    }

    fn diameter(&self) -> f64 {
        2.0 * self.radius
    }

    fn radius(&self) -> f64 {
        self.radius
    }

    fn contains(&self, x: &[f64], tol: f64) -> bool {
        x.len() == self.dim()
            && x.iter().all(|v| v.is_finite())
            && nuclear_norm(x, self.rows, self.cols) <= self.radius + tol.max(1e-9)
    }

    /// `∓k·u₁v₁ᵀ` for the top singular pair of `d`; zero when `d = 0`.
    fn linear_opt(&self, d: &[f64], direction: Direction) -> Result<Point> {
        check_dim(self.dim(), d.len())?;
        let t = top_singular_triple(d, self.rows, self.cols);
        let scale = match direction {
            Direction::Minimize => -self.radius,
            Direction::Maximize => self.radius,
        };
        let mut out = vec![0.0; self.dim()];
        if t.value > 0.0 {
            for i in 0..self.rows {
                for j in 0..self.cols {
                    out[i * self.cols + j] = scale * t.left[i] * t.right[j];
                }
            }
        }
        Ok(Point::from_vec(out))
    }

    fn supports_projection(&self) -> bool {
        true
    }

    /// Full SVD, then projection of the singular values onto
    /// `{σ ≥ 0 : Σσ ≤ k}`.
    fn project(&self, y: &[f64]) -> Result<Point> {
        check_dim(self.dim(), y.len())?;
        let svd = self.to_matrix(y).svd(true, true);
        let s: Vec<f64> = svd.singular_values.iter().copied().collect();
        if s.iter().sum::<f64>() <= self.radius {
            return Ok(Point::from_vec(y.to_vec()));
        }
        let mut sorted = s.clone();
        sorted.sort_by(|a, b| b.total_cmp(a));
        let mut tau = 0.0;
        let mut prefix = 0.0;
        for (i, &v) in sorted.iter().enumerate() {
            prefix += v;
            let candidate = (prefix - self.radius) / (i + 1) as f64;
            if v - candidate > 0.0 {
                tau = candidate;
            }
        }
        let shrunk = nalgebra::DVector::from_iterator(s.len(), s.iter().map(|v| (v - tau).max(0.0)));
        let u = svd.u.expect("requested u");
        let vt = svd.v_t.expect("requested v_t");
        let m = &u * DMatrix::from_diagonal(&shrunk) * &vt;
        let mut out = Vec::with_capacity(self.dim());
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.push(m[(i, j)]);
            }
        }
        Ok(Point::from_vec(out))
    }

    fn name(&self) -> &'static str {
        "nuclear-norm ball"
    }
}
