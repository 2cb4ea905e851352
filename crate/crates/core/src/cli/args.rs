use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use crate::error::{Error, Result};

use super::config::{AlgorithmKind, Experiment, Pattern, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "online-fw", version, about = "Projection-free online optimization experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one experiment and write the regret ledger CSV plus a JSON sidecar.
    Run(RunArgs),
}

#[derive(Debug, Default, Args)]
pub struct RunArgs {
    /// JSON file with run settings; flags given here take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// facility-cont | facility-disc | coverage | flow | matcomp | synthetic-convex |
    /// synthetic-submodular [default: synthetic-submodular]
    #[arg(long = "exp")]
    pub experiment: Option<Experiment>,
    /// meta-fw | meta-fw-novr | os-fw | os-fw-novr | rofw | pga | online-greedy
    /// [default: meta-fw]
    #[arg(long = "alg")]
    pub algorithm: Option<AlgorithmKind>,
    /// Number of rounds [default: 64]
    #[arg(long = "T")]
    pub horizon: Option<usize>,
    /// Meta-FW inner steps [default: ceil(T^1.5)]
    #[arg(long = "K")]
    pub inner_steps: Option<usize>,
    /// Base seed [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Additive Gaussian gradient noise [default: 0]
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Output CSV path [default: <exp>-<alg>-T<T>-seed<seed>.csv]
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Ratings CSV (users x items) [default: synthetic ratings]
    #[arg(long)]
    pub ratings: Option<PathBuf>,
    /// Lower end of the ratings CSV scale [default: -10]
    #[arg(long, allow_hyphen_values = true)]
    pub ratings_lo: Option<f64>,
    /// Upper end of the ratings CSV scale [default: 10]
    #[arg(long, allow_hyphen_values = true)]
    pub ratings_hi: Option<f64>,
    /// Topic distribution CSV (docs x topics) [default: synthetic Dirichlet(0.3)]
    #[arg(long)]
    pub topics: Option<PathBuf>,
    /// Edge-list network file [default: bundled karate-club digraph]
    #[arg(long)]
    pub network: Option<PathBuf>,
    /// rofw regularization weight [default: sqrt(T)]
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Offline Frank-Wolfe steps for the comparator [default: 2000]
    #[arg(long)]
    pub comparator_steps: Option<usize>,
    /// synthetic-convex centers: switching | iid [default: switching]
    #[arg(long)]
    pub pattern: Option<Pattern>,
    /// Number of consecutive seeds to run, starting at --seed
    #[arg(long, default_value_t = 1)]
    pub seeds: usize,
    /// Worker threads for multi-seed runs
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

/// Settings accepted in a `--config` file; every field is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub experiment: Option<Experiment>,
    pub algorithm: Option<AlgorithmKind>,
    #[serde(rename = "T")]
    pub horizon: Option<usize>,
    #[serde(rename = "K")]
    pub inner_steps: Option<usize>,
    pub seed: Option<u64>,
    pub sigma: Option<f64>,
    pub out: Option<PathBuf>,
    pub ratings: Option<PathBuf>,
    pub ratings_range: Option<(f64, f64)>,
    pub topics: Option<PathBuf>,
    pub network: Option<PathBuf>,
    pub lambda: Option<f64>,
    pub comparator_steps: Option<usize>,
    pub pattern: Option<Pattern>,
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("config file: {e}")))
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }
}

fn pick<T: PartialEq + std::fmt::Debug>(name: &str, flag: Option<T>, file: Option<T>) -> Option<T> {
    match (flag, file) {
        (Some(a), Some(b)) => {
            if a != b {
                log::info!("--{name} {a:?} overrides config file value {b:?}");
            }
            Some(a)
        }
        (a, b) => a.or(b),
    }
}

/// Merges defaults, the config file and flags (flags win) and validates.
pub fn resolve(args: &RunArgs, file: Option<FileConfig>) -> Result<RunConfig> {
    let file = file.unwrap_or_default();
    let d = RunConfig::default();
    let range_flag = match (args.ratings_lo, args.ratings_hi) {
        (None, None) => None,
        (lo, hi) => {
            let base = file.ratings_range.unwrap_or(d.ratings_range);
            Some((lo.unwrap_or(base.0), hi.unwrap_or(base.1)))
        }
    };
    let cfg = RunConfig {
        experiment: pick("exp", args.experiment, file.experiment).unwrap_or(d.experiment),
        algorithm: pick("alg", args.algorithm, file.algorithm).unwrap_or(d.algorithm),
        horizon: pick("T", args.horizon, file.horizon).unwrap_or(d.horizon),
        inner_steps: pick("K", args.inner_steps, file.inner_steps),
        seed: pick("seed", args.seed, file.seed).unwrap_or(d.seed),
        sigma: pick("sigma", args.sigma, file.sigma).unwrap_or(d.sigma),
        out: pick("out", args.out.clone(), file.out),
        ratings: pick("ratings", args.ratings.clone(), file.ratings),
        ratings_range: pick("ratings-lo/hi", range_flag, file.ratings_range).unwrap_or(d.ratings_range),
        topics: pick("topics", args.topics.clone(), file.topics),
        network: pick("network", args.network.clone(), file.network),
        lambda: pick("lambda", args.lambda, file.lambda),
        comparator_steps: pick("comparator-steps", args.comparator_steps, file.comparator_steps)
            .unwrap_or(d.comparator_steps),
        pattern: pick("pattern", args.pattern, file.pattern).unwrap_or(d.pattern),
    };
    cfg.validate()?;
    Ok(cfg)
}

/// Default output file name for a configuration.
pub fn default_output(cfg: &RunConfig) -> PathBuf {
    PathBuf::from(format!(
        "{}-{}-T{}-seed{}.csv",
        cfg.experiment, cfg.algorithm, cfg.horizon, cfg.seed
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(argv: &[&str]) -> std::result::Result<Cli, clap::Error> {
        Cli::try_parse_from(std::iter::once("online-fw").chain(argv.iter().copied()))
    }

    fn run_args(argv: &[&str]) -> RunArgs {
        match parse(argv).unwrap().command {
            Command::Run(a) => a,
        }
    }

    #[test]
    fn horizon_alone_fills_defaults() {
        let cfg = resolve(&run_args(&["run", "--T", "100"]), None).unwrap();
        assert_eq!(cfg.horizon, 100);
        assert_eq!(cfg.inner_steps(), 1000);
        assert_eq!(
            cfg,
            RunConfig {
                horizon: 100,
                ..RunConfig::default()
            }
        );
    }

    #[test]
    fn zero_inner_steps_rejected() {
        let err = resolve(&run_args(&["run", "--K", "0"]), None).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }

    #[test]
    fn flag_beats_file() {
        let file = FileConfig::parse(r#"{"T": 10, "seed": 4, "algorithm": "os-fw"}"#).unwrap();
        let cfg = resolve(&run_args(&["run", "--T", "20"]), Some(file)).unwrap();
        assert_eq!(cfg.horizon, 20);
        assert_eq!(cfg.seed, 4);
        assert_eq!(cfg.algorithm, AlgorithmKind::OsFw);
    }

    #[test]
    fn unknown_flag_and_bad_type_are_usage_errors() {
        assert!(parse(&["run", "--bogus", "1"]).is_err());
        assert!(parse(&["run", "--T", "many"]).is_err());
        assert!(parse(&["run", "--alg", "sgd"]).is_err());
    }

    #[test]
    fn unknown_file_key_rejected() {
        assert!(FileConfig::parse(r#"{"horizon": 3}"#).is_err());
    }

    #[test]
    fn incompatible_pairs_rejected() {
        for argv in [
            &["run", "--alg", "pga", "--exp", "flow"][..],
            &["run", "--alg", "online-greedy", "--exp", "coverage"][..],
        ] {
            assert!(matches!(resolve(&run_args(argv), None), Err(Error::Config(_))));
        }
    }

    #[test]
    fn negative_rating_bounds_parse() {
        let cfg = resolve(&run_args(&["run", "--ratings-lo", "-5", "--ratings-hi", "5"]), None).unwrap();
        assert_eq!(cfg.ratings_range, (-5.0, 5.0));
    }
}
