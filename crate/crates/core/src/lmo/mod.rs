//! Constraint sets with exact linear optimization oracles.

mod budget;
mod flow;
mod matroid;
mod nuclear;

pub use budget::BudgetedBox;
pub use flow::FlowNetwork;
pub use matroid::PartitionMatroid;
pub use nuclear::{nuclear_norm, top_singular_triple, NuclearBall, SingularTriple};

/// Membership tolerance used when checking oracle outputs.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

/// Indices of `d` ordered by decreasing value, ties by lowest index.
pub(crate) fn order_desc(d: &[f64], idx: impl IntoIterator<Item = usize>) -> Vec<usize> {
    let mut order: Vec<usize> = idx.into_iter().collect();
    order.sort_by(|&a, &b| d[b].total_cmp(&d[a]).then(a.cmp(&b)));
    order
}
