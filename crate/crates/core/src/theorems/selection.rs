//! The compact convex selection condition: if every graph pair `(y, y*)`
//! admits some `c` in a compact convex `C` with `<c, y - x0> <= <y*, y -
//! x0>`, then `C` meets `T(x0)`.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::catalog;
use crate::geometry::{ball_point, nearest_points, set_gap, ConvexSet};
use crate::operators::{GraphPoint, OperatorSpec};
use crate::verdict::{TheoremId, Verdict, Witness};
use crate::{Error, ExtReal, Result, Vector};

use super::{budget_sample, require_maximal, stream};

/// Path steps `4^-k` toward the nearest point of `C`.
const PATH_STEPS: usize = 30;
/// Relative slack below which the hypothesis counts as satisfied.
const HYPOTHESIS_TOL: f64 = 1e-13;
/// Tolerance of the re-evaluation of a hypothesis-failure witness.
const WITNESS_TOL: f64 = 1e-9;
/// Grid points of the background graph sample.
const SAMPLE_BUDGET: usize = 1024;

/// What a single selection instance showed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectionOutcome {
    /// The hypothesis held on every pair, and `C` was required to meet `T(x0)`.
    HypothesisHeld,
    /// A pair violated the hypothesis; the statement holds vacuously.
    HypothesisFailed,
}

/// `min_{c in C} <c, u>`.
fn min_over(c: &ConvexSet, u: &Vector) -> Result<f64> {
    let norm = u.norm();
    if norm == 0.0 {
        return Ok(0.0);
    }
    match c.support(&(-*u * (1.0 / norm)))? {
        ExtReal::Finite(s) => Ok(-s * norm),
        ExtReal::PosInf => Err(Error::invalid("selection set must be bounded")),
    }
}

/// Amount by which the pair violates the hypothesis (positive = violated).
fn hypothesis_excess(c: &ConvexSet, x0: &Vector, p: &GraphPoint) -> Result<(f64, f64)> {
    let u = p.y - *x0;
    let lhs = min_over(c, &u)?;
    let rhs = p.ystar.dot(&u);
    let scale = u.norm() * (1.0 + p.ystar.norm() + c_radius(c));
    Ok((lhs - rhs, HYPOTHESIS_TOL * scale))
}

fn c_radius(c: &ConvexSet) -> f64 {
    match c {
        ConvexSet::Ball { center, radius } => center.norm() + radius,
        ConvexSet::Polytope { vertices } => vertices.iter().map(|v| v.norm()).fold(0.0, f64::max),
        _ => 0.0,
    }
}

/// Checks one instance `(x0, C)` with `C` a ball or polytope.
///
/// Pairs come from a grid sample around `x0` and the resolvent path
/// `J_{tT}(x0 + t c)` toward the point `c` of `C` nearest to `T(x0)`; that
/// path is where a separating pair appears when `C` misses `T(x0)`. When
/// the hypothesis fails the witness pair is re-evaluated exactly.
pub fn check_compact_selection(
    t: &OperatorSpec,
    x0: &Vector,
    c: &ConvexSet,
    tol: f64,
) -> Result<(Verdict, SelectionOutcome)> {
    let dim = x0.dim();
    require_maximal(t, dim)?;
    if !matches!(c, ConvexSet::Ball { .. } | ConvexSet::Polytope { .. }) {
        return Err(Error::invalid("selection set must be a ball or a polytope"));
    }
    c.validate()?;
    c.dim().eq(&dim).then_some(()).ok_or_else(|| Error::invalid("selection set has the wrong dimension"))?;
    let image = t.evaluate(x0)?;
    let anchor = match nearest_points(c, &image)? {
        Some((p, _)) => p,
        None => c.project(x0)?.unwrap_or(*x0),
    };
    let r = 4.0 * (1.0 + x0.norm());
    let mut pairs: Vec<GraphPoint> = budget_sample(t, dim, r, SAMPLE_BUDGET)?.points;
    for k in 0..=PATH_STEPS {
        let mu = libm::pow(0.25, k as f64);
        pairs.push(t.resolvent_pair(mu, &(*x0 + anchor * mu))?);
    }
    let mut v = Verdict::new(TheoremId::CompactSelection, tol);
    v.param("tol", tol).param("pairs", pairs.len() as f64);
    let mut worst: Option<(f64, GraphPoint)> = None;
    for p in &pairs {
        let (excess, slack) = hypothesis_excess(c, x0, p)?;
        if excess > slack && worst.is_none_or(|(w, _)| excess > w) {
            worst = Some((excess, *p));
        }
    }
    match worst {
        Some((excess, p)) => {
            let on_graph = t.evaluate(&p.y)?.distance(&p.ystar)?;
            let (again, slack) = hypothesis_excess(c, x0, &p)?;
            let confirmed = on_graph.le(WITNESS_TOL * (1.0 + p.ystar.norm())) && again > slack;
            if confirmed {
                v.note(Witness::new(
                    "hypothesis fails at pair (y, y*)",
                    vec![p.y, p.ystar],
                    ExtReal::Finite(excess),
                ));
            } else {
                v.fail(Witness::new(
                    "hypothesis witness did not survive re-evaluation (y, y*)",
                    vec![p.y, p.ystar],
                    on_graph,
                ));
            }
            Ok((v, SelectionOutcome::HypothesisFailed))
        }
        None => {
            let gap = set_gap(c, &image)?;
            v.record(gap, || {
                Witness::new("hypothesis holds but C misses T(x0) (x0)", vec![*x0], gap)
            });
            Ok((v, SelectionOutcome::HypothesisHeld))
        }
    }
}

/// Random instances: `x0` in the domain (80%) or the window, `C` a ball or
/// a polytope placed within about 1.5 of a point of `T(x0)`.
///
/// The verdict id is `id` (the general or the convex-graph form); params
/// count the instances where the hypothesis held.
pub fn check_compact_selection_batch(
    t: &OperatorSpec,
    dim: usize,
    instances: usize,
    seed: u64,
    tol: f64,
    id: TheoremId,
) -> Result<Verdict> {
    require_maximal(t, dim)?;
    let mut rng = stream(seed, id);
    let mut v = Verdict::new(id, tol);
    let mut held = 0usize;
    for _ in 0..instances {
        let x0 = if rng.random::<f64>() < 0.8 {
            catalog::domain_point(t, dim, &mut rng)?
        } else {
            catalog::window_point(t, dim, &mut rng)
        };
        let center = catalog::near_image(t, &x0, 1.5, &mut rng)?;
        let radius = 0.05 + 0.95 * rng.random::<f64>();
        let c = if rng.random::<bool>() {
            ConvexSet::ball(center, radius)?
        } else {
            let count = rng.random_range(dim + 1..=dim + 4);
            let vertices = (0..count)
                .map(|_| center + ball_point(&mut rng, dim) * radius)
                .collect();
            ConvexSet::polytope(vertices)?
        };
        let (one, outcome) = check_compact_selection(t, &x0, &c, tol)?;
        if outcome == SelectionOutcome::HypothesisHeld {
            held += 1;
        }
        if !one.holds {
            v.absorb(&one);
        } else if one.worst_violation > v.worst_violation {
            v.worst_violation = one.worst_violation;
        }
    }
    v.param("instances", instances as f64)
        .param("hypothesis_held", held as f64)
        .param("seed", seed as f64)
        .param("tol", tol);
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Matrix;

    fn v(c: &[f64]) -> Vector {
        Vector::new(c).unwrap()
    }

    fn identity() -> OperatorSpec {
        OperatorSpec::linear(Matrix::identity(1)).unwrap()
    }

    #[test]
    fn identity_with_symmetric_interval_holds() {
        let c = ConvexSet::polytope(vec![v(&[-1.0]), v(&[1.0])]).unwrap();
        let (verdict, outcome) = check_compact_selection(&identity(), &v(&[0.0]), &c, 1e-6).unwrap();
        assert_eq!(outcome, SelectionOutcome::HypothesisHeld);
        assert!(verdict.holds);
    }

    #[test]
    fn identity_with_shifted_interval_fails_hypothesis() {
        let c = ConvexSet::polytope(vec![v(&[1.0]), v(&[2.0])]).unwrap();
        let (verdict, outcome) = check_compact_selection(&identity(), &v(&[0.0]), &c, 1e-6).unwrap();
        assert_eq!(outcome, SelectionOutcome::HypothesisFailed);
        assert!(verdict.holds);
        assert_eq!(verdict.witnesses.len(), 1);
    }

    #[test]
    fn rotation_with_unit_ball_holds() {
        let t = OperatorSpec::linear(Matrix::from_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]]).unwrap()).unwrap();
        let c = ConvexSet::ball(v(&[0.0, 0.0]), 1.0).unwrap();
        let (verdict, outcome) = check_compact_selection(&t, &v(&[0.0, 0.0]), &c, 1e-6).unwrap();
        assert_eq!(outcome, SelectionOutcome::HypothesisHeld);
        assert!(verdict.holds);
    }

    #[test]
    fn box_selection_set_is_rejected() {
        let c = ConvexSet::cuboid(v(&[0.0]), v(&[1.0])).unwrap();
        assert!(check_compact_selection(&identity(), &v(&[0.0]), &c, 1e-6).is_err());
    }

    #[test]
    fn batch_on_box_holds() {
        let t = OperatorSpec::box_normal_cone(v(&[0.0, 0.0]), v(&[1.0, 1.0])).unwrap();
        let verdict = check_compact_selection_batch(&t, 2, 40, 3, 1e-6, TheoremId::CompactSelection).unwrap();
        assert!(verdict.holds, "{verdict:?}");
        assert!(verdict.params["hypothesis_held"] > 0.0);
    }
}
