//! Seeded checkers, one per statement about maximal monotone operators and
//! their enlargements. Each validates its operator first (so a corrupted
//! graph fails before any sampling) and returns a [`Verdict`].
//!
//! Every checker draws from its own RNG stream derived from the seed and
//! its [`TheoremId`], so checkers can run in any order or in parallel.

mod domains;
mod enlargement;
mod regularity;
mod selection;
mod sums;

pub use domains::{check_constant_domain_closure, check_norm_weighted_domain};
pub use enlargement::{
    check_ball_inclusion, check_enlarged_slope_chain, check_enlargement_closed_form,
    check_enlargement_cross_monotone, check_enlargement_domain, check_enlargement_maximality,
    closed_form_pairs, EnlargementSettings,
};
pub use regularity::{check_regularity_battery, RegularityReport};
pub use selection::{check_compact_selection, check_compact_selection_batch, SelectionOutcome};
pub use sums::{check_bounded_sum, check_penalized_slope, BoundedSumSettings};

use crate::enlargements::sample_axis_count;
use crate::operators::{GraphSample, OperatorSpec};
use crate::rng::{self, CheckRng};
use crate::verdict::TheoremId;
use crate::{Error, Result};

/// Validates `t` and requires a maximal operator with a known dimension.
fn require_maximal(t: &OperatorSpec, dim: usize) -> Result<()> {
    t.validate()?;
    if !t.is_maximal() {
        return Err(Error::invalid(alloc::format!(
            "{} is not a maximal operator",
            t.kind_name()
        )));
    }
    if let Some(d) = t.dim() {
        if d != dim {
            return Err(Error::invalid(alloc::format!(
                "operator has dimension {d}, checker was given {dim}"
            )));
        }
    }
    if !(1..=crate::MAX_DIM).contains(&dim) {
        return Err(Error::invalid("dimension must be in 1..=8"));
    }
    Ok(())
}

/// The RNG stream of a checker.
fn stream(seed: u64, id: TheoremId) -> CheckRng {
    rng::stream(seed, id.stream_id())
}

/// A grid sample over `[-r, r]^n` with about `budget` points.
fn budget_sample(t: &OperatorSpec, dim: usize, r: f64, budget: usize) -> Result<GraphSample> {
    let per_axis = sample_axis_count(dim, budget);
    t.sample_graph(dim, r, 2.0 * r / (per_axis - 1) as f64)
}
