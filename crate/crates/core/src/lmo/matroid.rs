use crate::domain::{ConstraintSet, Direction, Point};
use crate::error::{check_dim, Error, Result};

use super::budget::project_capped_simplex;
use super::order_desc;

/// Partition matroid polytope: `x ∈ [0,1]ⁿ` with `Σ_{i∈B_j} x_i ≤ c_j` per block.
#[derive(Clone, Debug, PartialEq)]
pub struct PartitionMatroid {
    n: usize,
    blocks: Vec<Vec<usize>>,
    capacities: Vec<usize>,
}

impl PartitionMatroid {
    pub fn new(n: usize, blocks: Vec<Vec<usize>>, capacities: Vec<usize>) -> Result<Self> {
        if blocks.len() != capacities.len() {
            return Err(Error::invalid("one capacity per block required"));
        }
        let mut seen = vec![false; n];
        for &i in blocks.iter().flatten() {
            if i >= n {
                return Err(Error::invalid(format!("block index {i} out of range")));
            }
            if seen[i] {
                return Err(Error::invalid(format!("index {i} appears in two blocks")));
            }
            seen[i] = true;
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(Error::invalid(format!("index {i} is not covered by any block")));
        }
        Ok(PartitionMatroid {
            n,
            blocks,
            capacities,
        })
    }

    /// Uniform matroid of the given rank.
    pub fn uniform(n: usize, rank: usize) -> Result<Self> {
        Self::new(n, vec![(0..n).collect()], vec![rank])
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn capacities(&self) -> &[usize] {
        &self.capacities
    }

    pub fn rank(&self) -> usize {
        self.blocks
            .iter()
            .zip(&self.capacities)
            .map(|(b, &c)| b.len().min(c))
            .sum()
    }

    /// Is the indicator set independent?
    pub fn is_independent(&self, members: &[bool]) -> bool {
        members.len() == self.n
            && self
                .blocks
                .iter()
                .zip(&self.capacities)
                .all(|(b, &c)| b.iter().filter(|&&i| members[i]).count() <= c)
    }

    /// Indicator vectors of all independent sets, i.e. the polytope's vertices.
    pub fn vertices(&self) -> Result<Vec<Vec<f64>>> {
        if self.n > 20 {
            return Err(Error::SizeLimit {
                what: "vertex enumeration dimension",
                got: self.n,
                limit: 20,
            });
        }
        let mut out = Vec::new();
        for mask in 0u32..(1 << self.n) {
            let members: Vec<bool> = (0..self.n).map(|i| mask >> i & 1 == 1).collect();
            if self.is_independent(&members) {
                out.push(members.iter().map(|&m| if m { 1.0 } else { 0.0 }).collect());
            }
        }
        Ok(out)
    }

    fn greedy_max(&self, d: &[f64]) -> Vec<f64> {
        let mut v = vec![0.0; self.n];
        for (block, &cap) in self.blocks.iter().zip(&self.capacities) {
            for &i in order_desc(d, block.iter().copied())
                .iter()
                .take(cap)
                .take_while(|&&i| d[i] > 0.0)
            {
                v[i] = 1.0;
            }
        }
        v
    }
}

impl ConstraintSet for PartitionMatroid {
    fn dim(&self) -> usize {
        self.n
    }

    fn diameter(&self) -> f64 {
        self.blocks
            .iter()
            .zip(&self.capacities)
            .map(|(b, &c)| (2 * c).min(b.len()) as f64)
            .sum::<f64>()
            .sqrt()
    }

    fn radius(&self) -> f64 {
        (self.rank() as f64).sqrt()
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

    fn linear_opt(&self, d: &[f64], direction: Direction) -> Result<Point> {
        check_dim(self.n, d.len())?;
        let v = match direction {
            Direction::Maximize => self.greedy_max(d),
            Direction::Minimize => {
                let neg: Vec<f64> = d.iter().map(|v| -v).collect();
                self.greedy_max(&neg)
            }
        };
        Ok(Point::from_vec(v))
    }

    fn supports_projection(&self) -> bool {
        true
    }

    /// Blocks are decoupled, so the projection is a capped-simplex
    /// projection per block.
    fn project(&self, y: &[f64]) -> Result<Point> {
        check_dim(self.n, y.len())?;
        let mut x = vec![0.0; self.n];
        for (block, &cap) in self.blocks.iter().zip(&self.capacities) {
            let sub: Vec<f64> = block.iter().map(|&i| y[i]).collect();
            for (&i, v) in block.iter().zip(project_capped_simplex(&sub, cap as f64)) {
                x[i] = v;
            }
        }
        Ok(Point::from_vec(x))
    }

    fn name(&self) -> &'static str {
        "partition matroid"
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::dot;

    #[test]
    fn uniform_top_two() {
        let m = PartitionMatroid::uniform(4, 2).unwrap();
        let v = m.linear_opt(&[5.0, 1.0, 3.0, 2.0], Direction::Maximize).unwrap();
        assert_eq!(v.as_slice(), &[1.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn two_blocks_matches_enumeration() {
        let m = PartitionMatroid::new(4, vec![vec![0, 1], vec![2, 3]], vec![1, 1]).unwrap();
        let d = [1.0, 4.0, -1.0, -2.0];
        let v = m.linear_opt(&d, Direction::Maximize).unwrap();
        assert_eq!(v.as_slice(), &[0.0, 1.0, 0.0, 0.0]);
        let best = m
            .vertices()
            .unwrap()
            .iter()
            .map(|u| dot(&d, u))
            .fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(best, dot(&d, &v));
    }

    #[test]
    fn negative_direction_gives_empty_set() {
        let m = PartitionMatroid::uniform(3, 2).unwrap();
        let v = m.linear_opt(&[-1.0, -0.5, -2.0], Direction::Maximize).unwrap();
        assert_eq!(v.as_slice(), &[0.0; 3]);
    }

    #[test]
    fn rejects_bad_partitions() {
        assert!(PartitionMatroid::new(3, vec![vec![0, 1]], vec![1]).is_err());
        assert!(PartitionMatroid::new(3, vec![vec![0, 1], vec![1, 2]], vec![1, 1]).is_err());
        assert!(PartitionMatroid::new(2, vec![vec![0, 1]], vec![1, 2]).is_err());
    }

    #[test]
    fn projection_per_block() {
        let m = PartitionMatroid::new(4, vec![vec![0, 1], vec![2, 3]], vec![1, 2]).unwrap();
        let p = m.project(&[2.0, 2.0, 2.0, -1.0]).unwrap();
        assert!((p[0] - 0.5).abs() < 1e-10 && (p[1] - 0.5).abs() < 1e-10);
        assert_eq!(&p[2..], &[1.0, 0.0]);
    }
}
