use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use serde::Serialize;

use crate::algorithms::{
    MetaFrankWolfe, MetaFwConfig, OneShotConfig, OneShotFrankWolfe, OnlineAlgorithm,
    OnlineGreedy, ProjectedGradient, RegularizedOfw, RegularizedOfwConfig,
};
use crate::bench::{compute_comparator, ComparatorSource, RegretLedger, CSV_HEADER};
use crate::domain::stream_rng;
use crate::error::{Error, Result};
use crate::lmo::{BudgetedBox, FlowNetwork};
use crate::problems::{
    coverage_stream, facility_stream, flow_stream, load_ratings_csv, load_topics_csv,
    matrix_completion_stream, quadratic_stream, random_low_rank, synthetic_ratings,
    synthetic_topics, zachary_network, CoverageParams, ExperimentStream, FacilityParams,
    MatrixParams, QuadraticParams, Regime, ALGORITHM_STREAM, ROUNDING_STREAM,
};
use crate::submodular::{randomized_pipage_round, PipageStructure};

use super::config::{AlgorithmKind, Experiment, RunConfig};

/// Items in synthetic recommendation data (the joke catalogue size).
pub const SYNTHETIC_ITEMS: usize = 100;
pub const SYNTHETIC_SUBMODULAR_ITEMS: usize = 20;
pub const SYNTHETIC_SUBMODULAR_BUDGET: f64 = 3.0;
pub const SYNTHETIC_RATING_RANK: usize = 3;
pub const SYNTHETIC_DOCS: usize = 1000;
pub const TOPICS: usize = 10;
pub const TOPIC_CONCENTRATION: f64 = 0.3;
pub const MATRIX_SIDE: usize = 50;
pub const MATRIX_RANK: usize = 10;
pub const MATRIX_BATCH: usize = 100;
pub const CONVEX_DIM: usize = 10;
pub const CONVEX_BUDGET: f64 = 3.0;

/// Builds the round sequence of an experiment.
pub fn build_stream(cfg: &RunConfig) -> Result<ExperimentStream> {
    let t = cfg.horizon;
    let seed = cfg.seed;
    let ratings = |users: usize, items: usize| match &cfg.ratings {
        Some(path) => load_ratings_csv(path, cfg.ratings_range.0, cfg.ratings_range.1),
        None => synthetic_ratings(users, items, SYNTHETIC_RATING_RANK, seed),
    };
    let mut stream = match cfg.experiment {
        Experiment::FacilityCont => {
            let p = FacilityParams::continuous(t, seed);
            facility_stream(&ratings(p.batch_size * t, SYNTHETIC_ITEMS)?, &p)?
        }
        Experiment::FacilityDisc => {
            let p = FacilityParams::discrete(t, seed);
            facility_stream(&ratings(p.batch_size * t, SYNTHETIC_ITEMS)?, &p)?
        }
        Experiment::SyntheticSubmodular => {
            let p = FacilityParams {
                budget: SYNTHETIC_SUBMODULAR_BUDGET,
                ..FacilityParams::continuous(t, seed)
            };
            let r = synthetic_ratings(p.batch_size * t, SYNTHETIC_SUBMODULAR_ITEMS, SYNTHETIC_RATING_RANK, seed)?;
            facility_stream(&r, &p)?
        }
        Experiment::Coverage => {
            let topics = match &cfg.topics {
                Some(path) => load_topics_csv(path)?,
                None => synthetic_topics(SYNTHETIC_DOCS, TOPICS, TOPIC_CONCENTRATION, seed)?,
            };
            coverage_stream(&topics, &CoverageParams::standard(t, seed))?
        }
        Experiment::Flow => {
            let net = match &cfg.network {
                Some(path) => FlowNetwork::load(path)?,
                None => zachary_network(),
            };
            flow_stream(net, t, cfg.sigma, seed)?
        }
        Experiment::Matcomp => {
            let m = random_low_rank(MATRIX_SIDE, MATRIX_SIDE, MATRIX_RANK, seed);
            let params = MatrixParams {
                batch_size: MATRIX_BATCH,
                horizon: t,
                radius: None,
                seed,
            };
            matrix_completion_stream(&m, MATRIX_SIDE, MATRIX_SIDE, &params)?
        }
        Experiment::SyntheticConvex => quadratic_stream(&QuadraticParams {
            n: CONVEX_DIM,
            budget: CONVEX_BUDGET,
            horizon: t,
            pattern: cfg.pattern.into(),
            sigma: cfg.sigma,
            seed,
        })?,
    };
    stream.sigma = cfg.sigma;
    Ok(stream)
}

fn build_algorithm(cfg: &RunConfig, stream: &ExperimentStream) -> Result<Box<dyn OnlineAlgorithm>> {
    let set = stream.constraint.clone();
    let sense = stream.sense;
    let t = cfg.horizon;
    let vr = !matches!(cfg.algorithm, AlgorithmKind::MetaFwNovr | AlgorithmKind::OsFwNovr);
    Ok(match cfg.algorithm {
        AlgorithmKind::MetaFw | AlgorithmKind::MetaFwNovr => {
            let mut rng = stream_rng(cfg.seed, ALGORITHM_STREAM);
            let mc = MetaFwConfig {
                inner_steps: cfg.inner_steps(),
                variance_reduction: vr,
                ..MetaFwConfig::for_horizon(t)
            };
            Box::new(MetaFrankWolfe::new(set, sense, mc, &mut rng)?)
        }
        AlgorithmKind::OsFw | AlgorithmKind::OsFwNovr => {
            let oc = OneShotConfig {
                variance_reduction: vr,
                ..OneShotConfig::for_horizon(t)
            };
            Box::new(OneShotFrankWolfe::new(set, sense, oc)?)
        }
        AlgorithmKind::Rofw => {
            let rc = RegularizedOfwConfig {
                lambda: cfg.lambda,
                ..RegularizedOfwConfig::for_horizon(t)
            };
            Box::new(RegularizedOfw::new(set, sense, rc)?)
        }
        AlgorithmKind::Pga => Box::new(ProjectedGradient::new(set, sense, None, None)?),
        AlgorithmKind::OnlineGreedy => {
            return Err(Error::Invariant("online-greedy is not a continuous algorithm".into()))
        }
    })
}

/// Result of one run.
#[derive(Clone, Debug)]
pub struct RunReport {
    pub config: RunConfig,
    pub ledger: RegretLedger,
    pub comparator: ComparatorSource,
    pub grad_queries: u64,
    pub lmo_calls: u64,
    pub seconds: f64,
}

#[derive(Serialize)]
struct Sidecar<'a> {
    config: &'a RunConfig,
    grad_queries: u64,
    lmo_calls: u64,
    seconds: f64,
}

impl RunReport {
    pub fn csv(&self) -> Result<String> {
        self.ledger.to_csv_string()
    }

    pub fn sidecar_json(&self) -> Result<String> {
        serde_json::to_string_pretty(&Sidecar {
            config: &self.config,
            grad_queries: self.grad_queries,
            lmo_calls: self.lmo_calls,
            seconds: self.seconds,
        })
        .map_err(|e| Error::Invariant(e.to_string()))
    }

    /// Writes the ledger CSV to `path` and the sidecar next to it
    /// (same stem, `.json`); both are validated first.
    pub fn write(&self, path: &Path) -> Result<PathBuf> {
        let csv = self.csv()?;
        validate_csv(&csv, self.config.horizon)?;
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        std::fs::write(path, csv)?;
        let sidecar = path.with_extension("json");
        std::fs::write(&sidecar, self.sidecar_json()?)?;
        Ok(sidecar)
    }
}

/// Checks a ledger CSV: exact header, rows `t = 1..=horizon`, finite numbers.
pub fn validate_csv(text: &str, horizon: usize) -> Result<()> {
    let mut lines = text.lines();
    if lines.next() != Some(CSV_HEADER) {
        return Err(Error::Parse {
            row: 1,
            msg: format!("header must be `{CSV_HEADER}`"),
        });
    }
    let mut count = 0;
    for (i, line) in lines.enumerate() {
        let row = i + 2;
        let fields: Vec<&str> = line.split(',').collect();
        let ok = fields.len() == 4
            && fields[0].parse::<usize>().ok() == Some(i + 1)
            && fields[1..].iter().all(|f| f.parse::<f64>().is_ok_and(f64::is_finite));
        if !ok {
            return Err(Error::Parse {
                row,
                msg: format!("malformed ledger row `{line}`"),
            });
        }
        count += 1;
    }
    if count != horizon {
        return Err(Error::Parse {
            row: count + 1,
            msg: format!("expected {horizon} rounds, found {count}"),
        });
    }
    Ok(())
}

/// Runs one configuration end to end (no files written).
pub fn run(cfg: &RunConfig) -> Result<RunReport> {
    cfg.validate()?;
    let started = Instant::now();
    let stream = build_stream(cfg)?;
    let report = run_on_stream(cfg, &stream)?;
    Ok(RunReport {
        seconds: started.elapsed().as_secs_f64(),
        ..report
    })
}

/// Runs the configured algorithm on a prepared stream.
pub fn run_on_stream(cfg: &RunConfig, stream: &ExperimentStream) -> Result<RunReport> {
    let started = Instant::now();
    let discrete = cfg.experiment.is_discrete();
    let comparator = compute_comparator(stream, discrete, cfg.comparator_steps)?;
    let mut ledger = RegretLedger::new(stream.sense, comparator.alpha)?;
    let horizon = stream.horizon();
    let mut grad_queries = 0;

    let lmo_calls = if cfg.algorithm == AlgorithmKind::OnlineGreedy {
        let budget = stream
            .discrete_budget
            .ok_or_else(|| Error::Config("online-greedy needs an integral budget".into()))?;
        let mut rng = stream_rng(cfg.seed, ALGORITHM_STREAM);
        let mut greedy = OnlineGreedy::new(stream.dim(), budget, horizon, &mut rng)?;
        for t in 1..=horizon {
            let f = stream.round(t).set_function().ok_or_else(|| {
                Error::Config(format!("{} rounds have no set function", stream.name))
            })?;
            let (_, value) = greedy.step(&f)?;
            ledger.record_round(value, comparator.per_round[t - 1]);
        }
        0
    } else {
        let mut alg = build_algorithm(cfg, stream)?;
        let structure = match (discrete, stream.discrete_budget) {
            (true, Some(b)) => Some(PipageStructure::from_budget(&BudgetedBox::new(
                stream.dim(),
                b as f64,
            )?)?),
            (true, None) => return Err(Error::Config("discrete run needs an integral budget".into())),
            _ => None,
        };
        let mut rounding_rng = stream_rng(cfg.seed, ROUNDING_STREAM);
        for t in 1..=horizon {
            let x = alg.play()?;
            let mut oracle = stream.oracle(t);
            let outcome = alg.feedback(&mut oracle)?;
            grad_queries += outcome.gradient_queries;
            let played = match (&structure, stream.regime, &stream.expected) {
                (Some(s), _, _) => {
                    let set = randomized_pipage_round(&x, s, &mut rounding_rng)?;
                    stream.round(t).value(&set.point)
                }
                (None, Regime::Stochastic, Some(e)) => e.value(&x),
                _ => stream.round(t).value(&x),
            };
            ledger.record_round(played, comparator.per_round[t - 1]);
        }
        alg.lmo_calls()
    };
    let mut config = cfg.clone();
    if matches!(cfg.algorithm, AlgorithmKind::MetaFw | AlgorithmKind::MetaFwNovr) {
        config.inner_steps = Some(cfg.inner_steps());
    }
    Ok(RunReport {
        config,
        ledger,
        comparator: comparator.source,
        grad_queries,
        lmo_calls,
        seconds: started.elapsed().as_secs_f64(),
    })
}

/// Output path of seed `seed` when a run fans out over several seeds.
pub fn seed_output_path(base: &Path, seed: u64) -> PathBuf {
    let stem = base.file_stem().and_then(|s| s.to_str()).unwrap_or("run");
    let ext = base.extension().and_then(|s| s.to_str()).unwrap_or("csv");
    base.with_file_name(format!("{stem}-seed{seed}.{ext}"))
}

/// Runs `seeds` consecutive seeds starting at `cfg.seed` on up to `jobs`
/// threads; each run has its own stream and ledger. Results are in seed order.
pub fn run_seeds(cfg: &RunConfig, seeds: usize, jobs: usize) -> Vec<Result<RunReport>> {
    let configs: Vec<RunConfig> = (0..seeds as u64)
        .map(|k| RunConfig {
            seed: cfg.seed + k,
            ..cfg.clone()
        })
        .collect();
    let jobs = jobs.clamp(1, configs.len().max(1));
    let configs = Arc::new(configs);
    let mut results: Vec<Option<Result<RunReport>>> = (0..configs.len()).map(|_| None).collect();
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..jobs)
            .map(|j| {
                let configs = configs.clone();
                scope.spawn(move || {
                    (j..configs.len())
                        .step_by(jobs)
                        .map(|i| (i, run(&configs[i])))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        for h in handles {
            for (i, r) in h.join().expect("run thread panicked") {
                results[i] = Some(r);
            }
        }
    });
    results.into_iter().map(|r| r.expect("every seed ran")).collect()
}
