//! Outcome records of the theorem checkers.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::{ExtReal, Vector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TheoremId {
    /// Pairwise monotonicity of a graph sample.
    Monotone,
    /// Adding a bounded smooth gradient keeps the graph maximal.
    BoundedSumMaximal,
    /// Adding `d(. , x)` scaled by the slope zeroes the slope at `(x, x*)`.
    PenalizedSlope,
    /// Regularity on operators with a closed convex domain or a domain with interior.
    QualifiedDomainRegularity,
    /// The compact convex selection condition forces `C` to meet `T(x0)`.
    CompactSelection,
    /// The selection condition on operators with a convex graph.
    ConvexGraphSelection,
    /// `T(x) + eps B` lies in the norm-weighted enlargement.
    BallInclusion,
    /// Members of the norm-weighted enlargement sit over the domain.
    EnlargementDomain,
    /// The norm-weighted enlargement equals `T(x) + eps B`.
    EnlargementClosedForm,
    /// Cross monotonicity between two enlargement levels.
    EnlargementCrossMonotone,
    /// Maximality of the enlargement family.
    EnlargementMaximality,
    /// The slope of the enlargement equals `max(0, d - eps)`.
    EnlargedSlopeChain,
    /// The norm-weighted enlargement has the same domain as `T`.
    NormWeightedDomain,
    /// The constant enlargement's domain lies in the closure of the domain.
    ConstantDomainClosure,
    /// `L = d` on a query battery.
    RegularityGap,
}

impl TheoremId {
    pub const ALL: [TheoremId; 15] = [
        TheoremId::Monotone,
        TheoremId::BoundedSumMaximal,
        TheoremId::PenalizedSlope,
        TheoremId::QualifiedDomainRegularity,
        TheoremId::CompactSelection,
        TheoremId::ConvexGraphSelection,
        TheoremId::BallInclusion,
        TheoremId::EnlargementDomain,
        TheoremId::EnlargementClosedForm,
        TheoremId::EnlargementCrossMonotone,
        TheoremId::EnlargementMaximality,
        TheoremId::EnlargedSlopeChain,
        TheoremId::NormWeightedDomain,
        TheoremId::ConstantDomainClosure,
        TheoremId::RegularityGap,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TheoremId::Monotone => "monotone",
            TheoremId::BoundedSumMaximal => "bounded_sum_maximal",
            TheoremId::PenalizedSlope => "penalized_slope",
            TheoremId::QualifiedDomainRegularity => "qualified_domain_regularity",
            TheoremId::CompactSelection => "compact_selection",
            TheoremId::ConvexGraphSelection => "convex_graph_selection",
            TheoremId::BallInclusion => "ball_inclusion",
            TheoremId::EnlargementDomain => "enlargement_domain",
            TheoremId::EnlargementClosedForm => "enlargement_closed_form",
            TheoremId::EnlargementCrossMonotone => "enlargement_cross_monotone",
            TheoremId::EnlargementMaximality => "enlargement_maximality",
            TheoremId::EnlargedSlopeChain => "enlarged_slope_chain",
            TheoremId::NormWeightedDomain => "norm_weighted_domain",
            TheoremId::ConstantDomainClosure => "constant_domain_closure",
            TheoremId::RegularityGap => "regularity_gap",
        }
    }

    pub fn parse(name: &str) -> Option<TheoremId> {
        TheoremId::ALL.iter().copied().find(|t| t.as_str() == name)
    }

    /// Stable stream id for the per-checker RNG.
    pub fn stream_id(self) -> u64 {
        TheoremId::ALL.iter().position(|t| *t == self).unwrap() as u64 + 1
    }
}

/// A labeled tuple of points with the value that made it interesting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub label: String,
    pub points: Vec<Vector>,
    pub value: ExtReal,
}

impl Witness {
    pub fn new(label: impl Into<String>, points: Vec<Vector>, value: ExtReal) -> Self {
        Witness {
            label: label.into(),
            points,
            value,
        }
    }
}

/// Result of one theorem check.
///
/// `worst_violation` is the largest amount by which the checked statement
/// failed (0 when every instance satisfied it exactly, `+inf` for a
/// finiteness disagreement). `holds` is derived: it is true exactly when
/// `worst_violation <= tol` and no instance was flagged as a hard failure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub theorem_id: TheoremId,
    pub holds: bool,
    pub worst_violation: ExtReal,
    pub tol: f64,
    pub witnesses: Vec<Witness>,
    pub params: BTreeMap<String, f64>,
}

/// Witnesses kept per verdict.
pub const MAX_WITNESSES: usize = 8;

impl Verdict {
    pub fn new(theorem_id: TheoremId, tol: f64) -> Self {
        Verdict {
            theorem_id,
            holds: true,
            worst_violation: ExtReal::ZERO,
            tol,
            witnesses: Vec::new(),
            params: BTreeMap::new(),
        }
    }

    pub fn param(&mut self, name: &str, value: f64) -> &mut Self {
        self.params.insert(name.to_string(), value);
        self
    }

    /// Records an instance whose violation amount is `violation` (<= 0 means
    /// satisfied). Violations above `tol` keep a witness.
    pub fn record(&mut self, violation: ExtReal, witness: impl FnOnce() -> Witness) {
        let v = match violation {
            ExtReal::Finite(x) => ExtReal::Finite(x.max(0.0)),
            inf => inf,
        };
        let exceeds = !v.le(self.tol);
        if v > self.worst_violation {
            self.worst_violation = v;
        }
        if exceeds {
            self.holds = false;
            if self.witnesses.len() < MAX_WITNESSES {
                self.witnesses.push(witness());
            }
        }
    }

    /// Like [`Verdict::record`] but judged against the tighter of `tol` and
    /// the verdict tolerance, for statements with their own accuracy.
    pub fn record_within(&mut self, violation: ExtReal, tol: f64, witness: impl FnOnce() -> Witness) {
        let v = match violation {
            ExtReal::Finite(x) => ExtReal::Finite(x.max(0.0)),
            inf => inf,
        };
        if v > self.worst_violation {
            self.worst_violation = v;
        }
        if !v.le(tol.min(self.tol)) {
            self.holds = false;
            if self.witnesses.len() < MAX_WITNESSES {
                self.witnesses.push(witness());
            }
        }
    }

    /// Records a failure that is not a measured amount (for example a
    /// non-converged estimate); counted as an infinite violation.
    pub fn fail(&mut self, witness: Witness) {
        self.record(ExtReal::PosInf, || witness);
    }

    /// Keeps an informational witness without affecting `holds`.
    pub fn note(&mut self, witness: Witness) {
        if self.witnesses.len() < MAX_WITNESSES {
            self.witnesses.push(witness);
        }
    }

    /// Folds another verdict of any id into this one.
    pub fn absorb(&mut self, other: &Verdict) {
        if other.worst_violation > self.worst_violation {
            self.worst_violation = other.worst_violation;
        }
        if !other.holds {
            self.holds = false;
        }
        for w in &other.witnesses {
            if self.witnesses.len() < MAX_WITNESSES {
                self.witnesses.push(w.clone());
            }
        }
    }

    /// The structural invariant `holds => worst_violation <= tol`.
    pub fn is_consistent(&self) -> bool {
        !self.holds || self.worst_violation.le(self.tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn record_tracks_worst_and_holds() {
        let mut v = Verdict::new(TheoremId::BallInclusion, 1e-9);
        v.record(ExtReal::Finite(-3.0), || unreachable!());
        assert!(v.holds);
        assert_eq!(v.worst_violation, ExtReal::ZERO);
        v.record(ExtReal::Finite(5e-10), || unreachable!());
        assert!(v.holds && v.is_consistent());
        v.record(ExtReal::Finite(0.5), || Witness::new("bad", Vec::new(), ExtReal::Finite(0.5)));
        assert!(!v.holds);
        assert_eq!(v.witnesses.len(), 1);
        assert!(v.is_consistent());
    }

    #[test]
    fn stream_ids_are_distinct() {
        let mut ids: Vec<u64> = TheoremId::ALL.iter().map(|t| t.stream_id()).collect();
        ids.dedup();
        assert_eq!(ids.len(), TheoremId::ALL.len());
    }
}
