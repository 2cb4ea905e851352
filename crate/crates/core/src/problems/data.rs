use std::path::Path;

use rand::Rng as _;
use rand_distr::{Distribution, Gamma, Normal};

use crate::domain::stream_rng;
use crate::error::{Error, Result};
use crate::lmo::FlowNetwork;

/// Ratings are rescaled into `[0, RATING_MAX]`.
pub const RATING_MAX: f64 = 20.0;

const ZACHARY: &str = include_str!("../../data/zachary_karate.edges");

/// Users × items nonnegative ratings within `[0, RATING_MAX]`.
#[derive(Clone, Debug, PartialEq)]
pub struct RatingsMatrix {
    items: usize,
    rows: Vec<Vec<f64>>,
}

impl RatingsMatrix {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let items = rows.first().map_or(0, |r| r.len());
        if rows.is_empty() || items == 0 {
            return Err(Error::invalid("ratings matrix is empty"));
        }
        for (u, row) in rows.iter().enumerate() {
            if row.len() != items {
                return Err(Error::invalid(format!(
                    "user {u} has {} ratings, expected {items}",
                    row.len()
                )));
            }
            if let Some(j) = row.iter().position(|r| !(0.0..=RATING_MAX).contains(r)) {
                return Err(Error::invalid(format!(
                    "rating ({u}, {j}) = {} outside [0, {RATING_MAX}]",
                    row[j]
                )));
            }
        }
        Ok(RatingsMatrix { items, rows })
    }

    pub fn users(&self) -> usize {
        self.rows.len()
    }

    pub fn items(&self) -> usize {
        self.items
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }
}

fn csv_rows(text: &str) -> Result<Vec<(usize, Vec<String>)>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Parse {
            row: e.position().map_or(0, |p| p.line() as usize),
            msg: e.to_string(),
        })?;
        let row = record.position().map_or(out.len() + 1, |p| p.line() as usize);
        out.push((row, record.iter().map(str::to_owned).collect()));
    }
    Ok(out)
}

/// Parses a users × items CSV grid, rescaling `[lo, hi]` affinely onto
/// `[0, 20]`. Empty cells are missing ratings and become 0.
pub fn parse_ratings_csv(text: &str, lo: f64, hi: f64) -> Result<RatingsMatrix> {
    if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::invalid("rating range needs lo < hi"));
    }
    let rows = csv_rows(text)?;
    let width = rows.first().map_or(0, |(_, r)| r.len());
    let mut out = Vec::with_capacity(rows.len());
    for (row, cells) in rows {
        if cells.len() != width {
            return Err(Error::Parse {
                row,
                msg: format!("expected {width} fields, found {}", cells.len()),
            });
        }
        let parsed = cells
            .iter()
            .map(|c| {
                if c.is_empty() {
                    return Ok(0.0);
                }
                let v: f64 = c.parse().map_err(|_| Error::Parse {
                    row,
                    msg: format!("non-numeric cell `{c}`"),
                })?;
                if !(lo..=hi).contains(&v) {
                    return Err(Error::Parse {
                        row,
                        msg: format!("rating {v} outside declared range [{lo}, {hi}]"),
                    });
                }
                Ok((v - lo) / (hi - lo) * RATING_MAX)
            })
            .collect::<Result<Vec<f64>>>()?;
        out.push(parsed);
    }
    RatingsMatrix::new(out)
}

pub fn load_ratings_csv(path: impl AsRef<Path>, lo: f64, hi: f64) -> Result<RatingsMatrix> {
    parse_ratings_csv(&std::fs::read_to_string(path)?, lo, hi)
}

/// Parses a docs × topics CSV whose rows are probability vectors.
pub fn parse_topics_csv(text: &str) -> Result<Vec<Vec<f64>>> {
    let rows = csv_rows(text)?;
    let width = rows.first().map_or(0, |(_, r)| r.len());
    rows.into_iter()
        .map(|(row, cells)| {
            if cells.len() != width {
                return Err(Error::Parse {
                    row,
                    msg: format!("expected {width} fields, found {}", cells.len()),
                });
            }
            cells
                .iter()
                .map(|c| {
                    c.parse::<f64>().map_err(|_| Error::Parse {
                        row,
                        msg: format!("non-numeric cell `{c}`"),
                    })
                })
                .collect()
        })
        .collect()
}

pub fn load_topics_csv(path: impl AsRef<Path>) -> Result<Vec<Vec<f64>>> {
    parse_topics_csv(&std::fs::read_to_string(path)?)
}

/// Clipped low-rank-plus-noise ratings: `R = 40·⟨u, v⟩/r + N(0, 4)`, clipped
/// to `[0, 20]`, with `u, v ~ Unif[0,1]^r`.
pub fn synthetic_ratings(users: usize, items: usize, rank: usize, seed: u64) -> Result<RatingsMatrix> {
    if users == 0 || items == 0 || rank == 0 {
        return Err(Error::invalid("synthetic ratings need positive sizes"));
    }
    let mut rng = stream_rng(seed, 0x7a7e);
    let user_f: Vec<Vec<f64>> = (0..users)
        .map(|_| (0..rank).map(|_| rng.random::<f64>()).collect())
        .collect();
    let item_f: Vec<Vec<f64>> = (0..items)
        .map(|_| (0..rank).map(|_| rng.random::<f64>()).collect())
        .collect();
    let noise = Normal::new(0.0, 2.0).expect("valid normal");
    let rows = user_f
        .iter()
        .map(|u| {
            item_f
                .iter()
                .map(|v| {
                    let base = 40.0 * u.iter().zip(v).map(|(a, b)| a * b).sum::<f64>() / rank as f64;
                    (base + noise.sample(&mut rng)).clamp(0.0, RATING_MAX)
                })
                .collect()
        })
        .collect();
    RatingsMatrix::new(rows)
}

/// Topic distributions drawn from a symmetric Dirichlet(α).
pub fn synthetic_topics(docs: usize, topics: usize, alpha: f64, seed: u64) -> Result<Vec<Vec<f64>>> {
    if topics == 0 {
        return Err(Error::invalid("need at least one topic"));
    }
    let gamma = Gamma::new(alpha, 1.0).map_err(|e| Error::invalid(format!("bad α: {e}")))?;
    let mut rng = stream_rng(seed, 0x70b1c);
    Ok((0..docs)
        .map(|_| loop {
            let g: Vec<f64> = (0..topics).map(|_| gamma.sample(&mut rng)).collect();
            let s: f64 = g.iter().sum();
            if s > 0.0 {
                break g.iter().map(|v| v / s).collect();
            }
        })
        .collect())
}

/// The bundled directed network derived from Zachary's karate club graph
/// (34 nodes, 78 arcs oriented from lower to higher index, source 0, sink 33).
pub fn zachary_network() -> FlowNetwork {
    FlowNetwork::parse_edge_list(ZACHARY).expect("bundled network is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rescales_declared_range() {
        let r = parse_ratings_csv("-10,10,0\n5,,-2.5\n", -10.0, 10.0).unwrap();
        assert_eq!(r.rows()[0], vec![0.0, 20.0, 10.0]);
        assert_eq!(r.rows()[1], vec![15.0, 0.0, 7.5]);
    }

    #[test]
    fn ragged_rows_name_the_row() {
        match parse_ratings_csv("1,2,3\n4,5,6\n7,8\n", 0.0, 10.0) {
            Err(Error::Parse { row, .. }) => assert_eq!(row, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn non_numeric_cell_rejected() {
        assert!(matches!(
            parse_ratings_csv("1,x\n", 0.0, 10.0),
            Err(Error::Parse { row: 1, .. })
        ));
    }

    #[test]
    fn synthetic_ratings_in_range_and_replayable() {
        let a = synthetic_ratings(200, 20, 3, 7).unwrap();
        let b = synthetic_ratings(200, 20, 3, 7).unwrap();
        assert_eq!(a, b);
        assert_eq!((a.users(), a.items()), (200, 20));
        assert!(a.rows().iter().flatten().all(|r| (0.0..=20.0).contains(r)));
        assert_ne!(a, synthetic_ratings(200, 20, 3, 8).unwrap());
    }

    #[test]
    fn synthetic_topics_are_distributions() {
        let p = synthetic_topics(100, 10, 0.3, 11).unwrap();
        for row in &p {
            assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
        assert_eq!(p, synthetic_topics(100, 10, 0.3, 11).unwrap());
    }

    #[test]
    fn zachary_shape() {
        let net = zachary_network();
        assert_eq!(net.n_nodes(), 34);
        assert_eq!(net.edges().len(), 78);
        assert_eq!(net.value(), 3.0);
    }

    #[test]
    fn topics_csv_roundtrip() {
        let p = parse_topics_csv("0.5,0.5\n1,0\n").unwrap();
        assert_eq!(p, vec![vec![0.5, 0.5], vec![1.0, 0.0]]);
    }
}
