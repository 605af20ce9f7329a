//! Regularity `L = d` over the operator catalog.

use alloc::string::String;
use alloc::vec::Vec;

use crate::catalog::{self, CatalogEntry};
use crate::slope::regularity_gap;
use crate::verdict::{TheoremId, Verdict};
use crate::{Result, Vector};

use super::stream;

/// Regularity verdicts of a catalog run.
#[derive(Debug, Clone, PartialEq)]
pub struct RegularityReport {
    /// Every entry folded together.
    pub gap: Verdict,
    /// Entries with a closed convex domain or a domain with interior.
    pub qualified: Verdict,
    /// One verdict per entry, in catalog order.
    pub per_entry: Vec<(String, Verdict)>,
}

/// Runs [`regularity_gap`] on `queries` seeded random queries per entry.
pub fn check_regularity_battery(
    entries: &[CatalogEntry],
    queries: usize,
    seed: u64,
    tol: f64,
) -> Result<RegularityReport> {
    let mut gap = Verdict::new(TheoremId::RegularityGap, tol);
    let mut qualified = Verdict::new(TheoremId::QualifiedDomainRegularity, tol);
    let mut per_entry = Vec::with_capacity(entries.len());
    let mut qualified_count = 0usize;
    for (k, e) in entries.iter().enumerate() {
        let mut rng = stream(seed ^ ((k as u64 + 1) << 32), TheoremId::RegularityGap);
        let qs: Vec<(Vector, Vector)> = (0..queries)
            .map(|_| catalog::random_query(&e.operator, e.dim, &mut rng))
            .collect::<Result<_>>()?;
        let v = regularity_gap(&e.operator, &qs, tol)?;
        gap.absorb(&v);
        if e.qualified_domain {
            qualified_count += 1;
            qualified.absorb(&v);
        }
        per_entry.push((e.name.clone(), v));
    }
    gap.param("entries", entries.len() as f64)
        .param("queries_per_entry", queries as f64)
        .param("seed", seed as f64)
        .param("tol", tol);
    qualified
        .param("entries", qualified_count as f64)
        .param("queries_per_entry", queries as f64)
        .param("seed", seed as f64)
        .param("tol", tol);
    Ok(RegularityReport {
        gap,
        qualified,
        per_entry,
    })
}
