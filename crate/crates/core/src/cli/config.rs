use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::algorithms::default_inner_steps;
use crate::bench::DEFAULT_OFFLINE_STEPS;
use crate::error::{Error, Result};
use crate::problems::QuadraticPattern;

macro_rules! named_enum {
    ($(#[$meta:meta])* $name:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        $(#[$meta])*
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
        pub enum $name {
            $(#[serde(rename = $text)] $variant),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn as_str(self) -> &'static str {
                match self {
                    $($name::$variant => $text),+
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $name {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($text => Ok($name::$variant),)+
                    _ => Err(Error::Config(format!(
                        "unknown {} `{s}`; expected one of: {}",
                        stringify!($name).to_lowercase(),
                        [$($text),+].join(", ")
                    ))),
                }
            }
        }
    };
}

named_enum!(Experiment {
    FacilityCont => "facility-cont",
    FacilityDisc => "facility-disc",
    Coverage => "coverage",
    Flow => "flow",
    Matcomp => "matcomp",
    SyntheticConvex => "synthetic-convex",
    SyntheticSubmodular => "synthetic-submodular",
});

named_enum!(AlgorithmKind {
    MetaFw => "meta-fw",
    MetaFwNovr => "meta-fw-novr",
    OsFw => "os-fw",
    OsFwNovr => "os-fw-novr",
    Rofw => "rofw",
    Pga => "pga",
    OnlineGreedy => "online-greedy",
});

named_enum!(
    /// Center sequence of the synthetic convex stream.
    Pattern {
        Switching => "switching",
        Iid => "iid",
    }
);

impl From<Pattern> for QuadraticPattern {
    fn from(p: Pattern) -> Self {
        match p {
            Pattern::Switching => QuadraticPattern::Switching,
            Pattern::Iid => QuadraticPattern::Iid,
        }
    }
}

impl Experiment {
    /// Played sets are integral (rounded) rather than fractional points.
    pub fn is_discrete(self) -> bool {
        self == Experiment::FacilityDisc
    }

    pub fn has_projection(self) -> bool {
        self != Experiment::Flow
    }
}

/// A fully resolved experiment run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub algorithm: AlgorithmKind,
    /// Horizon `T`.
    #[serde(rename = "T")]
    pub horizon: usize,
    /// Meta-FW inner steps `K`; `⌈T^{3/2}⌉` when absent.
    #[serde(rename = "K")]
    pub inner_steps: Option<usize>,
    pub seed: u64,
    /// Additive gradient noise level.
    pub sigma: f64,
    pub out: Option<PathBuf>,
    /// Ratings CSV (users × items); synthetic ratings when absent.
    pub ratings: Option<PathBuf>,
    /// Declared input range of the ratings CSV.
    pub ratings_range: (f64, f64),
    /// Topic-distribution CSV (docs × topics); synthetic when absent.
    pub topics: Option<PathBuf>,
    /// Edge-list network; the bundled Zachary network when absent.
    pub network: Option<PathBuf>,
    /// Regularization weight for rofw; `√T` when absent.
    pub lambda: Option<f64>,
    /// Offline Frank-Wolfe steps for the comparator.
    pub comparator_steps: usize,
    pub pattern: Pattern,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            experiment: Experiment::SyntheticSubmodular,
            algorithm: AlgorithmKind::MetaFw,
            horizon: 64,
            inner_steps: None,
            seed: 0,
            sigma: 0.0,
            out: None,
            ratings: None,
            ratings_range: (-10.0, 10.0),
            topics: None,
            network: None,
            lambda: None,
            comparator_steps: DEFAULT_OFFLINE_STEPS,
            pattern: Pattern::Switching,
        }
    }
}

impl RunConfig {
    pub fn inner_steps(&self) -> usize {
        self.inner_steps.unwrap_or_else(|| default_inner_steps(self.horizon))
    }

    /// Rejects configurations that cannot run, with an explanation.
    pub fn validate(&self) -> Result<()> {
        if self.horizon == 0 {
            return Err(Error::Config("T must be at least 1".into()));
        }
        if self.inner_steps == Some(0) {
            return Err(Error::Config("K must be at least 1".into()));
        }
        if !(self.sigma >= 0.0) || !self.sigma.is_finite() {
            return Err(Error::Config("sigma must be finite and nonnegative".into()));
        }
        if self.comparator_steps == 0 {
            return Err(Error::Config("comparator steps must be at least 1".into()));
        }
        if let Some(l) = self.lambda {
            if !(l >= 0.0) {
                return Err(Error::Config("lambda must be nonnegative".into()));
            }
        }
        let (lo, hi) = self.ratings_range;
        if !(hi > lo) {
            return Err(Error::Config("ratings range needs lo < hi".into()));
        }
        match self.algorithm {
            AlgorithmKind::Pga if !self.experiment.has_projection() => Err(Error::Config(format!(
                "pga needs a Euclidean projection, which the {} constraint (flow polytope) does not provide",
                self.experiment
            ))),
            AlgorithmKind::OnlineGreedy if !self.experiment.is_discrete() => {
                Err(Error::Config(format!(
                    "online-greedy selects sets and needs a discrete experiment (facility-disc), not {}",
                    self.experiment
                )))
            }
            _ => Ok(()),
        }
    }
}
