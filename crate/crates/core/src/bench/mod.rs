//! Comparators, regret accounting and the averager rate harness.

mod analysis;
mod comparator;
mod ledger;
mod offline;

pub use analysis::{drifting_trial, AnalysisConstants};
pub use comparator::{compute_comparator, Comparator, ComparatorSource, BRUTE_FORCE_COMPARATOR_LIMIT};
pub use ledger::{LedgerRow, RegretLedger, CSV_HEADER};
pub use offline::{
    brute_force_opt, offline_fw, offline_fw_extension, offline_fw_trace, ObjectiveExtension,
    BRUTE_FORCE_OPT_LIMIT, DEFAULT_OFFLINE_STEPS,
};

/// `1 − 1/e`.
pub const ONE_MINUS_INV_E: f64 = 1.0 - 1.0 / std::f64::consts::E;
