use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};

use crate::domain::{stream_rng, ConstraintSet, ObjectiveSense, Point, Rng};
use crate::error::{Error, Result};
use crate::lmo::{nuclear_norm, BudgetedBox, FlowNetwork, NuclearBall};
use crate::submodular::{FacilityLocation, ProbabilisticCoverage};

use super::data::RatingsMatrix;
use super::objectives::{MatrixRound, Quadratic, SubmodularRound, WeightedSquares};
use super::{ExperimentStream, Regime, RoundObjective, DATA_STREAM};

#[derive(Clone, Debug)]
pub struct FacilityParams {
    pub batch_size: usize,
    pub budget: f64,
    pub horizon: usize,
    pub seed: u64,
}

impl FacilityParams {
    /// Continuous recommendation: `b = 1`, `B = 5`.
    pub fn continuous(horizon: usize, seed: u64) -> Self {
        FacilityParams {
            batch_size: 5,
            budget: 1.0,
            horizon,
            seed,
        }
    }

    /// Discrete recommendation of 10 items to batches of 40 users.
    pub fn discrete(horizon: usize, seed: u64) -> Self {
        FacilityParams {
            batch_size: 40,
            budget: 10.0,
            horizon,
            seed,
        }
    }
}

/// `T` batches of `size` indices out of `0..pool`: disjoint when the pool is
/// large enough, otherwise drawn with replacement (second field true).
fn draw_batches(pool: usize, size: usize, horizon: usize, rng: &mut Rng) -> (Vec<Vec<usize>>, bool) {
    if size * horizon <= pool {
        let mut order: Vec<usize> = (0..pool).collect();
        order.shuffle(rng);
        (order.chunks(size).take(horizon).map(<[usize]>::to_vec).collect(), false)
    } else {
        let batches = (0..horizon)
            .map(|_| (0..size).map(|_| rng.random_range(0..pool)).collect())
            .collect();
        (batches, true)
    }
}

fn integral_budget(b: f64) -> Option<usize> {
    (b.fract() == 0.0 && b >= 0.0).then_some(b as usize)
}

/// Round `t` maximizes the multilinear extension of facility location over
/// the `t`-th user batch, subject to `1ᵀx ≤ b`.
pub fn facility_stream(ratings: &RatingsMatrix, params: &FacilityParams) -> Result<ExperimentStream> {
    if params.batch_size == 0 || params.horizon == 0 {
        return Err(Error::invalid("batch size and horizon must be positive"));
    }
    let n = ratings.items();
    let constraint = BudgetedBox::new(n, params.budget)?;
    let mut rng = stream_rng(params.seed, DATA_STREAM);
    let (batches, resampled) =
        draw_batches(ratings.users(), params.batch_size, params.horizon, &mut rng);
    if resampled {
        log::warn!(
            "{} users cannot fill {} disjoint batches of {}; sampling with replacement",
            ratings.users(),
            params.horizon,
            params.batch_size
        );
    }
    let rounds = batches
        .iter()
        .map(|batch| {
            let rows = batch.iter().map(|&u| ratings.rows()[u].clone()).collect();
            let fl = FacilityLocation::new(n, rows)?;
            let f = fl.set_function();
            Ok(Arc::new(SubmodularRound::new(Arc::new(fl), f)?) as Arc<dyn RoundObjective>)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ExperimentStream {
        name: "facility".into(),
        constraint: Arc::new(constraint),
        sense: ObjectiveSense::MaximizeDRSubmodular,
        regime: Regime::Adversarial,
        rounds,
        expected: None,
        known_optimum: None,
        discrete_budget: integral_budget(params.budget),
        batch_size: params.batch_size,
        seed: params.seed,
        sigma: 0.0,
        resampled,
    })
}

#[derive(Clone, Debug)]
pub struct CoverageParams {
    pub batch_size: usize,
    pub budget: f64,
    pub horizon: usize,
    pub seed: u64,
}

impl CoverageParams {
    /// Batches of 50 documents, `1ᵀx ≤ 45`.
    pub fn standard(horizon: usize, seed: u64) -> Self {
        CoverageParams {
            batch_size: 50,
            budget: 45.0,
            horizon,
            seed,
        }
    }
}

/// Row sums of topic distributions must be within this of 1.
pub const TOPIC_SUM_TOL: f64 = 1e-6;

/// Round `t` maximizes probabilistic topic coverage of a fresh batch of
/// documents; coordinate `a` is the `a`-th document of the batch.
pub fn coverage_stream(topics: &[Vec<f64>], params: &CoverageParams) -> Result<ExperimentStream> {
    if params.batch_size == 0 || params.horizon == 0 {
        return Err(Error::invalid("batch size and horizon must be positive"));
    }
    let j = topics.first().map_or(0, |r| r.len());
    if j == 0 {
        return Err(Error::invalid("topic matrix is empty"));
    }
    for (a, row) in topics.iter().enumerate() {
        let s: f64 = row.iter().sum();
        if row.len() != j || (s - 1.0).abs() > TOPIC_SUM_TOL {
            return Err(Error::invalid(format!(
                "document {a} is not a distribution over {j} topics (sum {s})"
            )));
        }
    }
    if topics.len() < params.batch_size {
        return Err(Error::invalid(format!(
            "{} documents cannot fill a batch of {}",
            topics.len(),
            params.batch_size
        )));
    }
    let mut rng = stream_rng(params.seed, DATA_STREAM);
    let mut rounds: Vec<Arc<dyn RoundObjective>> = Vec::with_capacity(params.horizon);
    for _ in 0..params.horizon {
        let docs = rand::seq::index::sample(&mut rng, topics.len(), params.batch_size);
        let p = docs.iter().map(|a| topics[a].clone()).collect();
        let cov = ProbabilisticCoverage::new(j, p)?;
        let f = cov.set_function();
        rounds.push(Arc::new(SubmodularRound::new(Arc::new(cov), f)?));
    }
    Ok(ExperimentStream {
        name: "coverage".into(),
        constraint: Arc::new(BudgetedBox::new(params.batch_size, params.budget)?),
        sense: ObjectiveSense::MaximizeDRSubmodular,
        regime: Regime::Adversarial,
        rounds,
        expected: None,
        known_optimum: None,
        discrete_budget: integral_budget(params.budget),
        batch_size: params.batch_size,
        seed: params.seed,
        sigma: 0.0,
        resampled: false,
    })
}

pub const FLOW_WEIGHT_RANGE: (f64, f64) = (100.0, 120.0);

/// Round `t` minimizes `Σ_e w_e x(e)²` with fresh `w_e ~ Unif[100, 120]`.
pub fn flow_stream(net: FlowNetwork, horizon: usize, sigma: f64, seed: u64) -> Result<ExperimentStream> {
    if horizon == 0 {
        return Err(Error::invalid("horizon must be positive"));
    }
    let m = net.edges().len();
    let (lo, hi) = FLOW_WEIGHT_RANGE;
    let mut rng = stream_rng(seed, DATA_STREAM);
    let rounds = (0..horizon)
        .map(|_| {
            let weights = (0..m).map(|_| rng.random_range(lo..=hi)).collect();
            Arc::new(WeightedSquares { weights }) as Arc<dyn RoundObjective>
        })
        .collect();
    Ok(ExperimentStream {
        name: "flow".into(),
        constraint: Arc::new(net),
        sense: ObjectiveSense::MinimizeConvex,
        regime: Regime::Adversarial,
        rounds,
        expected: Some(Arc::new(WeightedSquares {
            weights: vec![(lo + hi) / 2.0; m],
        })),
        known_optimum: None,
        discrete_budget: None,
        batch_size: 1,
        seed,
        sigma,
        resampled: false,
    })
}

#[derive(Clone, Debug)]
pub struct MatrixParams {
    pub batch_size: usize,
    pub horizon: usize,
    /// Nuclear-norm radius; defaults to `‖M‖_*`.
    pub radius: Option<f64>,
    pub seed: u64,
}

/// Row-major `rows × cols` matrix `U Vᵀ / √r` with standard normal factors.
pub fn random_low_rank(rows: usize, cols: usize, rank: usize, seed: u64) -> Vec<f64> {
    let mut rng = stream_rng(seed, 0x10a7);
    let mut normal = || -> f64 { StandardNormal.sample(&mut rng) };
    let u: Vec<f64> = (0..rows * rank).map(|_| normal()).collect();
    let v: Vec<f64> = (0..cols * rank).map(|_| normal()).collect();
    let scale = 1.0 / (rank.max(1) as f64).sqrt();
    let mut m = vec![0.0; rows * cols];
    for i in 0..rows {
        for j in 0..cols {
            m[i * cols + j] = scale * (0..rank).map(|k| u[i * rank + k] * v[j * rank + k]).sum::<f64>();
        }
    }
    m
}

/// Round `t` minimizes squared error of `X` against `M` on `B` observed
/// entries drawn uniformly; decisions range over a nuclear-norm ball.
pub fn matrix_completion_stream(
    target: &[f64],
    rows: usize,
    cols: usize,
    params: &MatrixParams,
) -> Result<ExperimentStream> {
    if target.len() != rows * cols {
        return Err(Error::dim_mismatch(rows * cols, target.len()));
    }
    if params.batch_size == 0 || params.horizon == 0 {
        return Err(Error::invalid("batch size and horizon must be positive"));
    }
    let mut rng = stream_rng(params.seed, DATA_STREAM);
    let rounds = (0..params.horizon)
        .map(|_| {
            let obs = (0..params.batch_size)
                .map(|_| {
                    let (i, j) = (rng.random_range(0..rows), rng.random_range(0..cols));
                    (i, j, target[i * cols + j])
                })
                .collect();
            Ok(Arc::new(MatrixRound::new(rows, cols, obs)?) as Arc<dyn RoundObjective>)
        })
        .collect::<Result<Vec<_>>>()?;
    matrix_stream_from_rounds(target, rows, cols, rounds, params)
}

/// Same as [`matrix_completion_stream`] with caller-chosen observation
/// batches `(i, j)` per round.
pub fn matrix_stream_from_batches(
    target: &[f64],
    rows: usize,
    cols: usize,
    batches: &[Vec<(usize, usize)>],
    params: &MatrixParams,
) -> Result<ExperimentStream> {
    if target.len() != rows * cols {
        return Err(Error::dim_mismatch(rows * cols, target.len()));
    }
    let rounds = batches
        .iter()
        .map(|b| {
            let obs = b
                .iter()
                .map(|&(i, j)| (i, j, if i < rows && j < cols { target[i * cols + j] } else { 0.0 }))
                .collect();
            Ok(Arc::new(MatrixRound::new(rows, cols, obs)?) as Arc<dyn RoundObjective>)
        })
        .collect::<Result<Vec<_>>>()?;
    matrix_stream_from_rounds(target, rows, cols, rounds, params)
}

fn matrix_stream_from_rounds(
    target: &[f64],
    rows: usize,
    cols: usize,
    rounds: Vec<Arc<dyn RoundObjective>>,
    params: &MatrixParams,
) -> Result<ExperimentStream> {
    let norm = nuclear_norm(target, rows, cols);
    let radius = params.radius.unwrap_or(norm);
    let ball = NuclearBall::new(rows, cols, radius)?;
    // every round's loss is ≥ 0 with equality at M, so M is the hindsight
    // minimizer whenever it is feasible
    let known_optimum = if ball.contains(target, 1e-9 * norm.max(1.0)) {
        Some(Point::new(target.to_vec())?)
    } else {
        None
    };
    Ok(ExperimentStream {
        name: "matcomp".into(),
        constraint: Arc::new(ball),
        sense: ObjectiveSense::MinimizeConvex,
        regime: Regime::Adversarial,
        rounds,
        expected: None,
        known_optimum,
        discrete_budget: None,
        batch_size: params.batch_size,
        seed: params.seed,
        sigma: 0.0,
        resampled: false,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuadraticPattern {
    /// `c_t = μ + u_t` with `u_t ~ Unif[−½, ½]ⁿ` i.i.d.
    Iid,
    /// `c_t` jumps between two anchors by a seeded coin flip each round,
    /// plus the same jitter.
    Switching,
}

#[derive(Clone, Debug)]
pub struct QuadraticParams {
    pub n: usize,
    pub budget: f64,
    pub horizon: usize,
    pub pattern: QuadraticPattern,
    pub sigma: f64,
    pub seed: u64,
}

/// Losses `f_t(x) = ‖x − c_t‖²` over `BudgetedBox(n, b)`. Both the hindsight
/// and the expected minimizer are projections, so the comparator is exact.
pub fn quadratic_stream(params: &QuadraticParams) -> Result<ExperimentStream> {
    if params.horizon == 0 || params.n == 0 {
        return Err(Error::invalid("horizon and dimension must be positive"));
    }
    let n = params.n;
    let set = BudgetedBox::new(n, params.budget)?;
    let mut rng = stream_rng(params.seed, DATA_STREAM);
    let mut anchor = || -> Vec<f64> { (0..n).map(|_| rng.random::<f64>()).collect() };
    let a = anchor();
    let b = anchor();
    let mut centers = Vec::with_capacity(params.horizon);
    for _ in 0..params.horizon {
        let base = match params.pattern {
            QuadraticPattern::Iid => &a,
            QuadraticPattern::Switching => {
                if rng.random::<bool>() {
                    &a
                } else {
                    &b
                }
            }
        };
        let c: Vec<f64> = base.iter().map(|m| m + rng.random_range(-0.5..0.5)).collect();
        centers.push(c);
    }
    let (regime, expected, target) = match params.pattern {
        QuadraticPattern::Iid => (
            Regime::Stochastic,
            Some(Arc::new(Quadratic {
                center: a.clone(),
                offset: n as f64 / 12.0,
            }) as Arc<dyn RoundObjective>),
            a.clone(),
        ),
        QuadraticPattern::Switching => {
            let mean = (0..n)
                .map(|i| centers.iter().map(|c| c[i]).sum::<f64>() / params.horizon as f64)
                .collect();
            (Regime::Adversarial, None, mean)
        }
    };
    let known_optimum = Some(set.project(&target)?);
    let rounds = centers
        .into_iter()
        .map(|center| Arc::new(Quadratic { center, offset: 0.0 }) as Arc<dyn RoundObjective>)
        .collect();
    Ok(ExperimentStream {
        name: "quadratic".into(),
        constraint: Arc::new(set),
        sense: ObjectiveSense::MinimizeConvex,
        regime,
        rounds,
        expected,
        known_optimum,
        discrete_budget: None,
        batch_size: 1,
        seed: params.seed,
        sigma: params.sigma,
        resampled: false,
    })
}
