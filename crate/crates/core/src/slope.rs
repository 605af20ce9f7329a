//! The slope functional `L(x, x*, T) = 0 v sup <x* - y*, y - x> / |x - y|`
//! over graph pairs `(y, y*)` with `y != x`, the image distance
//! `d(x*, T(x))`, and the shifted slope of the norm-weighted enlargement.
//!
//! For a finite graph the supremum is a maximum and is computed exactly. For
//! a maximal operator it is approached from below by genuine graph pairs:
//! the main family is the path `y_t = J_{tT}(x + t x*)`, whose quotient
//! equals `|x* - y_t*|` and increases to `d(x*, T(x))` as `t -> 0` (and to
//! `+inf` off the domain), supplemented by a ring of resolvent points at
//! doubling radius around `x`.

use alloc::format;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::geometry::direction_grid;
use crate::operators::{GraphPoint, GraphSample, OperatorSpec};
use crate::verdict::{TheoremId, Verdict, Witness};
use crate::{Error, ExtReal, Result, Vector};

/// Sampled slopes above this value are reported as `+inf`.
pub const INFINITY_THRESHOLD: f64 = 1e6;
/// Pairs with `|y - x|` below this are excluded (the `y != x` restriction).
pub const MIN_SEPARATION: f64 = 1e-12;
/// Refinement levels tried before giving up.
pub const MAX_LEVELS: usize = 40;
/// Levels always run before convergence may be declared.
pub const MIN_LEVELS: usize = 3;
/// A plateau only counts once the path point is this close to `x`
/// (relative to `1 + |x|`).
pub const PATH_REACH: f64 = 1e-6;
/// Slack allowed on the one-sided bound `L <= d`.
pub const ONE_SIDED_TOL: f64 = 1e-9;

/// A value of the slope functional with its sampling provenance.
///
/// `truncation_radius` is the largest ring radius used and `density` the
/// smallest path step; both are 1 for exact finite-graph values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeResult {
    pub value: ExtReal,
    pub truncation_radius: f64,
    pub density: f64,
    pub is_lower_bound: bool,
    pub converged: bool,
    /// Every pair coincided with `x`.
    pub degenerate: bool,
}

/// `<x* - y*, y - x> / |y - x|`, or `None` when `y` is within
/// [`MIN_SEPARATION`] of `x`.
pub fn slope_term(p: &GraphPoint, x: &Vector, xstar: &Vector) -> Option<f64> {
    let dy = p.y - *x;
    let r = dy.norm();
    (r >= MIN_SEPARATION).then(|| (*xstar - p.ystar).dot(&dy) / r)
}

/// The slope over a finite sample.
pub fn slope_exact(s: &GraphSample, x: &Vector, xstar: &Vector) -> Result<SlopeResult> {
    if s.is_empty() {
        return Err(Error::invalid("slope of an empty sample"));
    }
    x.check_dim(s.dim())?;
    xstar.check_dim(s.dim())?;
    let mut best = 0.0f64;
    let mut any = false;
    for p in &s.points {
        if let Some(t) = slope_term(p, x, xstar) {
            any = true;
            best = best.max(t);
        }
    }
    Ok(SlopeResult {
        value: ExtReal::Finite(best),
        truncation_radius: s.truncation_radius,
        density: s.density,
        is_lower_bound: !s.complete,
        converged: true,
        degenerate: !any,
    })
}

/// `d(x*, T(x))`, `+inf` exactly off the domain.
pub fn image_distance(t: &OperatorSpec, x: &Vector, xstar: &Vector) -> Result<ExtReal> {
    xstar.check_dim(x.dim())?;
    t.evaluate(x)?.distance(xstar)
}

/// Running supremum of `score` over graph pairs of `t` near `(x, x*)`.
///
/// Levels refine the path step by 4 and double the ring radius. The
/// supremum (clamped below at 0) is reported once two successive level
/// changes are below `tol` and the path point is within [`PATH_REACH`] of
/// `x`, or as `+inf` once it passes
/// [`INFINITY_THRESHOLD`]. A finite graph is scored exactly.
pub fn sup_search(
    t: &OperatorSpec,
    x: &Vector,
    xstar: &Vector,
    tol: f64,
    mut score: impl FnMut(&GraphPoint) -> Option<f64>,
) -> Result<SlopeResult> {
    xstar.check_dim(x.dim())?;
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::invalid("estimation tolerance must be > 0"));
    }
    if let OperatorSpec::FiniteGraph { sample } = t {
        x.check_dim(sample.dim())?;
        let mut best = 0.0f64;
        let mut any = false;
        for p in &sample.points {
            if let Some(v) = score(p) {
                any = true;
                best = best.max(v);
            }
        }
        return Ok(SlopeResult {
            value: ExtReal::Finite(best),
            truncation_radius: sample.truncation_radius,
            density: sample.density,
            is_lower_bound: !sample.complete,
            converged: true,
            degenerate: !any,
        });
    }
    let n = x.dim();
    let ring = direction_grid(n, if n == 2 { 16 } else { 2 * n + 8 });
    let r0 = 2.0 * (x.norm() + 1.0);
    let mut best = 0.0f64;
    let mut path_best = f64::NEG_INFINITY;
    let mut any = false;
    let reach = PATH_REACH * (1.0 + x.norm());
    let mut history: Vec<f64> = Vec::with_capacity(MAX_LEVELS);
    for level in 0..MAX_LEVELS {
        let step = libm::pow(0.25, level as f64);
        let radius = r0 * libm::pow(2.0, level.min(20) as f64);
        let mut near = f64::INFINITY;
        for mu in [2.0 * step, step] {
            let p = t.resolvent_pair(mu, &(*x + *xstar * mu))?;
            near = p.y.dist(x);
            if let Some(v) = score(&p) {
                any = true;
                path_best = path_best.max(v);
            }
        }
        if path_best.is_finite() {
            best = best.max(path_best);
        }
        for u in &ring {
            if let Some(v) = score(&t.resolvent_point(&(*x + *u * radius))?) {
                any = true;
                best = best.max(v);
            }
        }
        if best > INFINITY_THRESHOLD {
            return Ok(SlopeResult {
                value: ExtReal::PosInf,
                truncation_radius: radius,
                density: step,
                is_lower_bound: true,
                converged: true,
                degenerate: false,
            });
        }
        // Convergence is judged on the unclamped path maximum alone: ring
        // points, or the clamp at 0, can make the running maximum plateau
        // while the path is still climbing. A path that has not reached `x`
        // may still be inside the domain while `x` is outside it.
        history.push(if path_best.is_finite() { path_best } else { 0.0 });
        let k = history.len();
        if k >= MIN_LEVELS
            && near <= reach
            && history[k - 1] - history[k - 2] < tol
            && history[k - 2] - history[k - 3] < tol
        {
            return Ok(SlopeResult {
                value: ExtReal::Finite(best),
                truncation_radius: radius,
                density: step,
                is_lower_bound: true,
                converged: true,
                degenerate: !any,
            });
        }
    }
    Err(Error::numerical(
        format!("slope estimate did not settle within {MAX_LEVELS} levels"),
        ExtReal::Finite(best),
    ))
}

/// Sampled lower bound of `L(x, x*, T)`; exact for a finite graph.
pub fn slope_estimate(
    t: &OperatorSpec,
    x: &Vector,
    xstar: &Vector,
    tol: f64,
) -> Result<SlopeResult> {
    sup_search(t, x, xstar, tol, |p| slope_term(p, x, xstar))
}

/// Number of intervals in the `delta` scan of the shifted slope.
const DELTA_STEPS: usize = 10;

/// `L(x, x*, T^eps) = 0 v sup (<x* - y*, y - x> / |x - y| - eps - delta)`
/// over `delta >= 0` and `y* = z* + u*` with `z*` in `T(y)`, `|u*| = delta`.
///
/// `delta` is scanned on `{0, dmax/10, ..., dmax}` with `dmax = d(x*,
/// T(x)) + 1` (10 when `d` is infinite); `u*` ranges over the extremal
/// direction `-(y - x)/|y - x|` and a fixed direction grid.
pub fn slope_enlarged(
    t: &OperatorSpec,
    eps: f64,
    x: &Vector,
    xstar: &Vector,
    tol: f64,
) -> Result<SlopeResult> {
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(Error::invalid("eps must be finite and >= 0"));
    }
    let dmax = match image_distance(t, x, xstar)? {
        ExtReal::Finite(d) => d + 1.0,
        ExtReal::PosInf => 10.0,
    };
    let deltas: Vec<f64> = (0..=DELTA_STEPS)
        .map(|k| dmax * k as f64 / DELTA_STEPS as f64)
        .collect();
    let dirs = direction_grid(x.dim(), 8);
    sup_search(t, x, xstar, tol, |p| {
        let dy = p.y - *x;
        let r = dy.norm();
        if r < MIN_SEPARATION {
            return None;
        }
        let e = dy * (1.0 / r);
        let mut best = f64::NEG_INFINITY;
        for &delta in &deltas {
            for u in core::iter::once(-e).chain(dirs.iter().copied()) {
                let ystar = p.ystar + u * delta;
                best = best.max((*xstar - ystar).dot(&e) - eps - delta);
            }
        }
        Some(best)
    })
}

/// Estimator tolerance used for a given verdict tolerance. It is floored so
/// that a verdict tolerance below the sampling accuracy produces reported
/// violations rather than a non-terminating estimate.
pub fn estimator_tol(verdict_tol: f64) -> f64 {
    (verdict_tol / 4.0).max(1e-7)
}

/// Regularity `L = d` on a list of queries.
///
/// Each finite pair must satisfy `|d - L| <= tol`, both sides must agree on
/// being infinite, and `L <= d + 1e-9` must hold unconditionally (a failure
/// there is a hard violation, since sampled `L` is a lower bound).
pub fn regularity_gap(
    t: &OperatorSpec,
    queries: &[(Vector, Vector)],
    tol: f64,
) -> Result<Verdict> {
    t.validate()?;
    let est = estimator_tol(tol);
    let mut v = Verdict::new(TheoremId::RegularityGap, tol);
    v.param("tol", tol).param("estimator_tol", est).param("queries", queries.len() as f64);
    for (x, xstar) in queries {
        let d = image_distance(t, x, xstar)?;
        let l = match slope_estimate(t, x, xstar, est) {
            Ok(r) => r.value,
            Err(Error::Numerical { best, .. }) => {
                v.fail(Witness::new("slope estimate did not settle (x, x*)", alloc::vec![*x, *xstar], best));
                continue;
            }
            Err(e) => return Err(e),
        };
        if let (ExtReal::Finite(lv), ExtReal::Finite(dv)) = (l, d) {
            if lv > dv + ONE_SIDED_TOL {
                v.fail(Witness::new(
                    "slope exceeds image distance (x, x*)",
                    alloc::vec![*x, *xstar],
                    ExtReal::Finite(lv - dv),
                ));
                continue;
            }
        }
        let gap = match (l, d) {
            (ExtReal::Finite(lv), ExtReal::Finite(dv)) => ExtReal::Finite((dv - lv).abs()),
            (ExtReal::PosInf, ExtReal::PosInf) => ExtReal::ZERO,
            _ => ExtReal::PosInf,
        };
        v.record(gap, || {
            Witness::new("regularity gap |d - L| at (x, x*)", alloc::vec![*x, *xstar], gap)
        });
    }
    Ok(v)
}
