//! Checks on the norm-weighted enlargement `T^eps`: the ball inclusion
//! `T(x) + eps B` in `T^eps(x)`, its domain, the closed form, cross
//! monotonicity, maximality of the family, and the slope of `T^eps`.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::catalog;
use crate::enlargements::{image_plus_ball, local_pairs, EnlargementKind};
use crate::geometry::{ball_point, direction_grid, hausdorff_estimate, ConvexSet};
use crate::operators::{GraphPoint, OperatorSpec, MONOTONE_TOL};
use crate::slope::{estimator_tol, image_distance, slope_enlarged, MIN_SEPARATION};
use crate::verdict::{TheoremId, Verdict, Witness};
use crate::{Error, ExtReal, Result, Vector};

use super::{budget_sample, require_maximal, stream};

/// Sampling used by the enlargement checkers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnlargementSettings {
    /// Radius of the background graph sample.
    pub radius: f64,
    /// Approximate number of background sample points.
    pub sample_budget: usize,
    /// Offset `h` of the closed-form anchors; the closed-form tolerance is
    /// `2h + 1e-6`.
    pub density: f64,
}

impl Default for EnlargementSettings {
    fn default() -> Self {
        EnlargementSettings {
            radius: 8.0,
            sample_budget: 4096,
            density: 1e-3,
        }
    }
}

impl EnlargementSettings {
    pub fn closed_form_tol(&self) -> f64 {
        2.0 * self.density + 1e-6
    }
}

/// Smallest slack of `x*` at `x` over `pairs`.
fn worst_slack(kind: EnlargementKind, eps: f64, x: &Vector, xstar: &Vector, pairs: &[GraphPoint]) -> f64 {
    pairs
        .iter()
        .map(|p| {
            let dx = *x - p.y;
            (*xstar - p.ystar).dot(&dx) + kind.allowance(eps, dx.norm())
        })
        .fold(f64::INFINITY, f64::min)
}

/// Random points of `T(x) + eps B` must pass membership in `T^eps(x)`
/// against the background sample and the local resolvent path (worst
/// slack `>= -1e-9`).
pub fn check_ball_inclusion(
    t: &OperatorSpec,
    dim: usize,
    eps_values: &[f64],
    trials: usize,
    seed: u64,
    settings: EnlargementSettings,
) -> Result<Verdict> {
    require_maximal(t, dim)?;
    check_eps_list(eps_values)?;
    let sample = budget_sample(t, dim, settings.radius, settings.sample_budget)?;
    let mut rng = stream(seed, TheoremId::BallInclusion);
    let mut v = Verdict::new(TheoremId::BallInclusion, MONOTONE_TOL);
    for _ in 0..trials {
        let eps = eps_values[rng.random_range(0..eps_values.len())];
        let x = catalog::domain_point(t, dim, &mut rng)?;
        let xstar = t.evaluate(&x)?.sample_point(&mut rng, 1.0)? + ball_point(&mut rng, dim) * eps;
        let mut worst = worst_slack(EnlargementKind::NormWeighted, eps, &x, &xstar, &sample.points);
        worst = worst.min(worst_slack(
            EnlargementKind::NormWeighted,
            eps,
            &x,
            &xstar,
            &local_pairs(t, &x, &xstar)?,
        ));
        v.record(ExtReal::Finite(-worst), || {
            Witness::new("point of T(x) + eps B rejected (x, x*)", vec![x, xstar], ExtReal::Finite(worst))
        });
    }
    v.param("trials", trials as f64)
        .param("R", settings.radius)
        .param("h", sample.density)
        .param("seed", seed as f64);
    Ok(v)
}

/// Every `(x, x*)` found to be a member of `T^eps` has `x` within `tol` of
/// the domain. Candidates are window points paired with points near
/// `T(P x)`, `P` the projection onto the domain.
pub fn check_enlargement_domain(
    t: &OperatorSpec,
    dim: usize,
    eps: f64,
    trials: usize,
    seed: u64,
    tol: f64,
    settings: EnlargementSettings,
) -> Result<Verdict> {
    require_maximal(t, dim)?;
    check_eps_list(&[eps])?;
    let sample = budget_sample(t, dim, settings.radius, settings.sample_budget)?;
    let dom = t.domain(dim)?;
    let mut rng = stream(seed, TheoremId::EnlargementDomain);
    let mut v = Verdict::new(TheoremId::EnlargementDomain, tol);
    let mut members = 0usize;
    for _ in 0..trials {
        let x = catalog::window_point(t, dim, &mut rng);
        let base = dom.project(&x)?.ok_or_else(|| Error::invalid("empty domain"))?;
        let xstar = catalog::near_image(t, &base, 1.0 + eps, &mut rng)?;
        let mut worst = worst_slack(EnlargementKind::NormWeighted, eps, &x, &xstar, &sample.points);
        worst = worst.min(worst_slack(
            EnlargementKind::NormWeighted,
            eps,
            &x,
            &xstar,
            &local_pairs(t, &x, &xstar)?,
        ));
        if worst < -MONOTONE_TOL {
            continue;
        }
        members += 1;
        let d = dom.distance(&x)?;
        v.record(d, || Witness::new("member over a point off the domain (x, x*)", vec![x, xstar], d));
    }
    v.param("eps", eps)
        .param("trials", trials as f64)
        .param("members", members as f64)
        .param("seed", seed as f64)
        .param("tol", tol);
    Ok(v)
}

/// Directions used around `x` for the closed-form comparison.
fn anchor_directions(dim: usize) -> Vec<Vector> {
    match dim {
        1 => direction_grid(1, 2),
        2 => direction_grid(2, 1024),
        n => direction_grid(n, 64 * n),
    }
}

/// Graph pairs close to `x` in every direction: the resolvent points of
/// `x + p(u) + rho u` for `p(u)` the maximizer of `<., u>` over `T(x)` and
/// `rho` in `{h, h/32, h/1024}`. `T(x)` must be bounded and nonempty.
pub fn closed_form_pairs(t: &OperatorSpec, x: &Vector, dirs: &[Vector], h: f64) -> Result<Vec<GraphPoint>> {
    let image = t.evaluate(x)?;
    let mut out = Vec::with_capacity(3 * dirs.len());
    for u in dirs {
        let p = image
            .support_point(u)?
            .ok_or_else(|| Error::invalid("closed-form pairs need a bounded image"))?;
        for rho in [h, h / 32.0, h / 1024.0] {
            out.push(t.resolvent_point(&(*x + p + *u * rho))?);
        }
    }
    Ok(out)
}

fn bounded_image(t: &OperatorSpec, x: &Vector) -> Result<bool> {
    Ok(match t.evaluate(x)? {
        ConvexSet::Empty { .. } => false,
        img => direction_grid(x.dim(), 8)
            .iter()
            .all(|u| img.support(u).is_ok_and(|s| s.is_finite())),
    })
}

/// The polyhedron cut out by pairs near `x` agrees with `T(x) + eps B` in
/// support on a 32-direction grid, within `2h + 1e-6`. Points with an
/// unbounded image are skipped and counted.
pub fn check_enlargement_closed_form(
    t: &OperatorSpec,
    eps_values: &[f64],
    points: &[Vector],
    settings: EnlargementSettings,
) -> Result<Verdict> {
    let dim = points.first().map_or(1, |p| p.dim());
    require_maximal(t, dim)?;
    check_eps_list(eps_values)?;
    let tol = settings.closed_form_tol();
    let h = settings.density;
    let mut v = Verdict::new(TheoremId::EnlargementClosedForm, tol);
    let dirs = anchor_directions(dim);
    let grid = direction_grid(dim, 32);
    let (mut used, mut skipped) = (0usize, 0usize);
    for x in points {
        x.check_dim(dim)?;
        if !bounded_image(t, x)? {
            skipped += 1;
            continue;
        }
        used += 1;
        let pairs = closed_form_pairs(t, x, &dirs, h)?;
        for &eps in eps_values {
            let rows = pairs
                .iter()
                .filter_map(|p| {
                    let dx = *x - p.y;
                    let r = dx.norm();
                    (r >= MIN_SEPARATION).then(|| {
                        crate::Halfspace::new(dx, p.ystar.dot(&dx) - EnlargementKind::NormWeighted.allowance(eps, r))
                    })
                })
                .collect();
            let poly = ConvexSet::HalfspaceIntersection { dim, constraints: rows };
            let target = image_plus_ball(t, x, eps)?;
            let gap = hausdorff_estimate(&poly, &target, &grid)?;
            v.record(ExtReal::Finite(gap), || {
                Witness::new("enlargement polyhedron differs from T(x) + eps B (x)", vec![*x], ExtReal::Finite(gap))
            });
        }
    }
    v.param("h", h)
        .param("points", used as f64)
        .param("skipped", skipped as f64)
        .param("directions", grid.len() as f64);
    if let Some(&e) = eps_values.last() {
        v.param("eps", e);
    }
    Ok(v)
}

/// For random `(eps, delta, x, y)` with `x*` in `T(x) + eps B` and `y*` in
/// `T(y) + delta B`: `<x* - y*, x - y> >= -(eps + delta) |x - y| - 1e-9`.
pub fn check_enlargement_cross_monotone(
    t: &OperatorSpec,
    dim: usize,
    trials: usize,
    seed: u64,
) -> Result<Verdict> {
    require_maximal(t, dim)?;
    let mut rng = stream(seed, TheoremId::EnlargementCrossMonotone);
    let mut v = Verdict::new(TheoremId::EnlargementCrossMonotone, MONOTONE_TOL);
    let level = |rng: &mut crate::rng::CheckRng| if rng.random::<f64>() < 0.1 { 0.0 } else { rng.random::<f64>() };
    let (mut eps_max, mut delta_max) = (0.0f64, 0.0f64);
    for _ in 0..trials {
        let eps = level(&mut rng);
        let delta = level(&mut rng);
        eps_max = eps_max.max(eps);
        delta_max = delta_max.max(delta);
        let x = catalog::domain_point(t, dim, &mut rng)?;
        let y = catalog::domain_point(t, dim, &mut rng)?;
        let xstar = image_plus_ball(t, &x, eps)?.sample_point(&mut rng, 1.0)?;
        let ystar = image_plus_ball(t, &y, delta)?.sample_point(&mut rng, 1.0)?;
        let slack = (xstar - ystar).dot(&(x - y)) + (eps + delta) * x.dist(&y);
        v.record(ExtReal::Finite(-slack), || {
            Witness::new("cross monotonicity fails (x, x*, y, y*)", vec![x, xstar, y, ystar], ExtReal::Finite(slack))
        });
    }
    v.param("trials", trials as f64)
        .param("seed", seed as f64)
        .param("eps", eps_max)
        .param("delta", delta_max);
    Ok(v)
}

/// Scan of the `delta` family in the maximality check.
const MAXIMALITY_DELTAS: [f64; 4] = [0.0, 0.1, 1.0, 10.0];
/// Offsets (times `1 + eps`) of the candidates from the boundary of
/// `T(x) + eps B`.
const MAXIMALITY_OFFSETS: [f64; 7] = [-0.5, -0.1, -0.01, 0.0, 0.01, 0.1, 0.5];

/// A candidate `x*` satisfying `<x* - w*, x - y> >= -(eps + delta) |x - y|`
/// for every sampled `w*` in `T(y) + delta B` (over a `delta` grid) must lie
/// within `2h + 1e-6` of `T(x) + eps B`. Candidates are the boundary points
/// of `T(x) + eps B` moved along the outer normal.
pub fn check_enlargement_maximality(
    t: &OperatorSpec,
    eps_values: &[f64],
    points: &[Vector],
    settings: EnlargementSettings,
) -> Result<Verdict> {
    let dim = points.first().map_or(1, |p| p.dim());
    require_maximal(t, dim)?;
    check_eps_list(eps_values)?;
    let tol = settings.closed_form_tol();
    let h = settings.density;
    let mut v = Verdict::new(TheoremId::EnlargementMaximality, tol);
    let dirs = match dim {
        2 => direction_grid(2, 256),
        n => anchor_directions(n),
    };
    let cand_dirs = direction_grid(dim, 32);
    let side_dirs = direction_grid(dim, 4);
    let (mut accepted, mut excluded) = (0usize, 0usize);
    for x in points {
        x.check_dim(dim)?;
        if !bounded_image(t, x)? {
            continue;
        }
        let pairs = closed_form_pairs(t, x, &dirs, h)?;
        for &eps in eps_values {
            let target = image_plus_ball(t, x, eps)?;
            for u in &cand_dirs {
                let Some(b) = target.support_point(u)? else { continue };
                for s in MAXIMALITY_OFFSETS {
                    let cand = b + *u * (s * (1.0 + eps));
                    if passes_delta_family(&pairs, x, &cand, eps, &side_dirs) {
                        accepted += 1;
                        let d = target.distance(&cand)?;
                        v.record(d, || {
                            Witness::new("accepted candidate outside T(x) + eps B (x, x*)", vec![*x, cand], d)
                        });
                    } else {
                        excluded += 1;
                    }
                }
            }
        }
    }
    v.param("h", h)
        .param("accepted", accepted as f64)
        .param("excluded", excluded as f64)
        .param("delta", MAXIMALITY_DELTAS[MAXIMALITY_DELTAS.len() - 1]);
    Ok(v)
}

fn passes_delta_family(pairs: &[GraphPoint], x: &Vector, cand: &Vector, eps: f64, side: &[Vector]) -> bool {
    pairs.iter().all(|p| {
        let dx = *x - p.y;
        let r = dx.norm();
        if r < MIN_SEPARATION {
            return true;
        }
        let e = dx * (1.0 / r);
        MAXIMALITY_DELTAS.iter().all(|&delta| {
            core::iter::once(e).chain(side.iter().copied()).all(|w| {
                let wstar = p.ystar + w * delta;
                (*cand - wstar).dot(&dx) + (eps + delta) * r >= -MONOTONE_TOL
            })
        })
    })
}

/// For each `(x, x*, eps)`: `L(x, x*, T^eps) = max(0, d - eps)` within
/// `tol`, and `max(0, d - eps) = d(x*, T(x) + eps B)` within `1e-8`.
pub fn check_enlarged_slope_chain(
    t: &OperatorSpec,
    queries: &[(Vector, Vector, f64)],
    tol: f64,
) -> Result<Verdict> {
    let dim = queries.first().map_or(t.dim().unwrap_or(1), |q| q.0.dim());
    require_maximal(t, dim)?;
    let est = estimator_tol(tol);
    let mut v = Verdict::new(TheoremId::EnlargedSlopeChain, tol);
    for (x, xstar, eps) in queries {
        let d = image_distance(t, x, xstar)?;
        let shifted = match d {
            ExtReal::Finite(d) => ExtReal::Finite((d - eps).max(0.0)),
            inf => inf,
        };
        let l = match slope_enlarged(t, *eps, x, xstar, est) {
            Ok(r) => r.value,
            Err(Error::Numerical { best, .. }) => {
                v.fail(Witness::new("enlarged slope did not settle (x, x*)", vec![*x, *xstar], best));
                continue;
            }
            Err(e) => return Err(e),
        };
        let gap = ext_gap(l, shifted);
        v.record(gap, || Witness::new("enlarged slope differs from max(0, d - eps) (x, x*)", vec![*x, *xstar], gap));
        let ball = image_plus_ball(t, x, *eps)?.distance(xstar)?;
        let agree = ext_gap(shifted, ball);
        v.record_within(agree, 1e-8, || {
            Witness::new("max(0, d - eps) differs from d(x*, T(x) + eps B) (x, x*)", vec![*x, *xstar], agree)
        });
    }
    v.param("tol", tol).param("estimator_tol", est).param("queries", queries.len() as f64);
    Ok(v)
}

fn ext_gap(a: ExtReal, b: ExtReal) -> ExtReal {
    match (a, b) {
        (ExtReal::Finite(a), ExtReal::Finite(b)) => ExtReal::Finite((a - b).abs()),
        (ExtReal::PosInf, ExtReal::PosInf) => ExtReal::ZERO,
        _ => ExtReal::PosInf,
    }
}

fn check_eps_list(eps: &[f64]) -> Result<()> {
    if eps.is_empty() || eps.iter().any(|e| !(e.is_finite() && *e >= 0.0)) {
        return Err(Error::invalid("eps values must be a nonempty list of finite values >= 0"));
    }
    Ok(())
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

    fn rotation() -> OperatorSpec {
        OperatorSpec::linear(Matrix::from_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]]).unwrap()).unwrap()
    }

    #[test]
    fn identity_closed_form_at_origin() {
        let verdict =
            check_enlargement_closed_form(&identity(), &[1.0], &[v(&[0.0])], EnlargementSettings::default()).unwrap();
        assert!(verdict.holds, "{verdict:?}");
    }

    #[test]
    fn cross_monotone_without_enlargement_is_monotone() {
        let t = rotation();
        let mut rng = crate::rng::stream(4, 4);
        for _ in 0..100 {
            let x = catalog::domain_point(&t, 2, &mut rng).unwrap();
            let y = catalog::domain_point(&t, 2, &mut rng).unwrap();
            let xs = image_plus_ball(&t, &x, 0.0).unwrap().sample_point(&mut rng, 1.0).unwrap();
            let ys = image_plus_ball(&t, &y, 0.0).unwrap().sample_point(&mut rng, 1.0).unwrap();
            assert!((xs - ys).dot(&(x - y)) >= -1e-12);
        }
        assert!(check_enlargement_cross_monotone(&t, 2, 200, 9).unwrap().holds);
    }

    #[test]
    fn maximality_excludes_point_beyond_the_ball() {
        let x = v(&[0.0]);
        let pairs = closed_form_pairs(&identity(), &x, &direction_grid(1, 2), 1e-3).unwrap();
        let eps = 0.5;
        assert!(!passes_delta_family(&pairs, &x, &v(&[1.0 + eps]), eps, &direction_grid(1, 4)));
        assert!(passes_delta_family(&pairs, &x, &v(&[eps]), eps, &direction_grid(1, 4)));
        let verdict =
            check_enlargement_maximality(&identity(), &[eps], &[x], EnlargementSettings::default()).unwrap();
        assert!(verdict.holds, "{verdict:?}");
        assert!(verdict.params["excluded"] > 0.0);
    }

    #[test]
    fn chain_on_identity_and_rotation() {
        let verdict = check_enlarged_slope_chain(&identity(), &[(v(&[0.0]), v(&[2.0]), 0.5)], 1e-3).unwrap();
        assert!(verdict.holds, "{verdict:?}");
        let verdict = check_enlarged_slope_chain(&identity(), &[(v(&[0.0]), v(&[0.3]), 0.5)], 1e-3).unwrap();
        assert!(verdict.holds, "{verdict:?}");
        let verdict =
            check_enlarged_slope_chain(&rotation(), &[(v(&[0.0, 0.0]), v(&[1.0, 0.0]), 0.25)], 1e-3).unwrap();
        assert!(verdict.holds, "{verdict:?}");
    }

    #[test]
    fn ball_inclusion_and_domain_on_box() {
        let t = OperatorSpec::box_normal_cone(v(&[0.0, 0.0]), v(&[1.0, 1.0])).unwrap();
        let s = EnlargementSettings::default();
        assert!(check_ball_inclusion(&t, 2, &[0.0, 0.25, 1.0], 200, 1, s).unwrap().holds);
        let verdict = check_enlargement_domain(&t, 2, 0.5, 200, 1, 1e-6, s).unwrap();
        assert!(verdict.holds, "{verdict:?}");
        assert!(verdict.params["members"] > 0.0);
    }
}
