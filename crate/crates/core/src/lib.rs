//! Projection-free online optimization.
//!
//! Meta-Frank-Wolfe and One-Shot Frank-Wolfe for online convex minimization
//! and online monotone DR-submodular maximization with stochastic gradients,
//! the one-sample lifting pipeline for online submodular set maximization,
//! baselines, constraint oracles and a benchmark runner.

// `!(x >= 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algorithms;
pub mod bench;
pub mod cli;
pub mod domain;
pub mod error;
pub mod lmo;
pub mod olo;
pub mod oracle;
pub mod problems;
pub mod schedule;
pub mod submodular;
pub mod vr;

pub use domain::{
    stream_rng, ConstraintSet, Direction, GradientSample, ObjectiveSense, Point, Rng,
    StochasticGradientOracle,
};
pub use error::{Error, Result};
pub use schedule::Schedule;
