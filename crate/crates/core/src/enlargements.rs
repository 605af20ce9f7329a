//! The norm-weighted enlargement `T^eps` (pairs with `<x* - y*, x - y> >=
//! -eps |x - y|`) and the constant enlargement `T_eps` (`>= -eps`):
//! membership, the polyhedron cut out by a graph sample, the closed form
//! `T(x) + eps B`, and domain probes.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::geometry::{self, ConvexSet, Halfspace};
use crate::operators::{GraphPoint, GraphSample, OperatorSpec, MONOTONE_TOL};
use crate::rng;
use crate::slope::MIN_SEPARATION;
use crate::{Error, Result, Vector};

/// Which enlargement a query refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnlargementKind {
    /// `T^eps`: violation bounded by `eps |x - y|`.
    NormWeighted,
    /// `T_eps`: violation bounded by the constant `eps`.
    Constant,
}

impl EnlargementKind {
    /// Allowed violation for a pair at distance `dist`.
    pub fn allowance(self, eps: f64, dist: f64) -> f64 {
        match self {
            EnlargementKind::NormWeighted => eps * dist,
            EnlargementKind::Constant => eps,
        }
    }
}

/// A point `x` at which an enlargement is examined, with the sampling
/// radius and step used for operator graphs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnlargementQuery {
    pub kind: EnlargementKind,
    pub eps: f64,
    pub x: Vector,
    pub truncation_radius: f64,
    pub density: f64,
}

impl EnlargementQuery {
    pub fn new(
        kind: EnlargementKind,
        eps: f64,
        x: Vector,
        truncation_radius: f64,
        density: f64,
    ) -> Result<Self> {
        let q = EnlargementQuery {
            kind,
            eps,
            x,
            truncation_radius,
            density,
        };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps >= 0.0 && self.eps.is_finite()) {
            return Err(Error::invalid("eps must be finite and >= 0"));
        }
        if !(self.truncation_radius > 0.0 && self.density > 0.0) {
            return Err(Error::invalid("truncation radius and density must be > 0"));
        }
        Ok(())
    }

    /// `<x* - y*, x - y> + allowance`; nonnegative exactly when the pair
    /// does not exclude `x*`.
    pub fn slack(&self, p: &GraphPoint, xstar: &Vector) -> f64 {
        let dx = self.x - p.y;
        (*xstar - p.ystar).dot(&dx) + self.kind.allowance(self.eps, dx.norm())
    }
}

/// Where graph pairs come from.
#[derive(Debug, Clone, Copy)]
pub enum GraphSource<'a> {
    Operator(&'a OperatorSpec),
    Sample(&'a GraphSample),
}

/// Pairs of a maximal operator concentrated around `(x, x*)`: the path
/// `J_{tT}(x + t x*)` for `t = 4^-k`, `k = 0..=15`.
pub(crate) fn local_pairs(t: &OperatorSpec, x: &Vector, xstar: &Vector) -> Result<Vec<GraphPoint>> {
    (0..=15)
        .map(|k| {
            let mu = libm::pow(0.25, k as f64);
            t.resolvent_pair(mu, &(*x + *xstar * mu))
        })
        .collect()
}

/// Membership of `x*` in the enlargement at `q.x`, as `(member, worst)`
/// with `worst` the smallest slack over the pairs.
///
/// A finite graph is decided exactly. For an operator the pairs are
/// `sample_graph(T, R, h)` plus a local path toward `(x, x*)`, so a `true`
/// answer means "member as far as radius `R` can tell".
pub fn enlargement_membership(
    source: GraphSource<'_>,
    q: &EnlargementQuery,
    xstar: &Vector,
) -> Result<(bool, f64)> {
    q.validate()?;
    xstar.check_dim(q.x.dim())?;
    let worst = match source {
        GraphSource::Sample(s) => {
            if s.is_empty() {
                return Err(Error::invalid("membership against an empty sample"));
            }
            q.x.check_dim(s.dim())?;
            s.points.iter().map(|p| q.slack(p, xstar)).fold(f64::INFINITY, f64::min)
        }
        GraphSource::Operator(t) => {
            let s = t.sample_graph(q.x.dim(), q.truncation_radius, q.density)?;
            let mut worst = s.points.iter().map(|p| q.slack(p, xstar)).fold(f64::INFINITY, f64::min);
            if t.is_maximal() {
                for p in local_pairs(t, &q.x, xstar)? {
                    worst = worst.min(q.slack(&p, xstar));
                }
            }
            worst
        }
    };
    Ok((worst >= -MONOTONE_TOL, worst))
}

/// The set of `x*` not excluded by any pair of `s`: one row
/// `<x*, x - y> >= <y*, x - y> - allowance` per pair with `y != x`.
pub fn enlargement_polyhedron(s: &GraphSample, q: &EnlargementQuery) -> Result<ConvexSet> {
    q.validate()?;
    if s.is_empty() {
        return Err(Error::invalid("polyhedron of an empty sample"));
    }
    q.x.check_dim(s.dim())?;
    let constraints = polyhedron_rows(&s.points, q);
    Ok(ConvexSet::HalfspaceIntersection {
        dim: q.x.dim(),
        constraints,
    })
}

fn polyhedron_rows(points: &[GraphPoint], q: &EnlargementQuery) -> Vec<Halfspace> {
    points
        .iter()
        .filter_map(|p| {
            let dx = q.x - p.y;
            let r = dx.norm();
            (r >= MIN_SEPARATION)
                .then(|| Halfspace::new(dx, p.ystar.dot(&dx) - q.kind.allowance(q.eps, r)))
        })
        .collect()
}

/// `T(x) + eps B`, empty off the domain.
pub fn image_plus_ball(t: &OperatorSpec, x: &Vector, eps: f64) -> Result<ConvexSet> {
    t.evaluate(x)?.minkowski_ball(eps)
}

/// Points drawn per full-enlargement verification.
pub const FULL_ENLARGEMENT_DRAWS: usize = 100;

/// A `delta` with `T(x) + delta B` inside `T^eps(x)`. Returns `eps`, after
/// checking [`FULL_ENLARGEMENT_DRAWS`] random points of `T(x) + eps B`
/// against a graph sample; a failure signals a sampling bug and is an
/// internal error.
pub fn full_enlargement_delta(t: &OperatorSpec, x: &Vector, eps: f64, seed: u64) -> Result<f64> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::invalid("eps must be finite and > 0"));
    }
    let image = t.evaluate(x)?;
    if matches!(image, ConvexSet::Empty { .. }) {
        return Err(Error::invalid("x is outside the domain"));
    }
    let n = x.dim();
    let r = 4.0 * (1.0 + x.norm());
    let per_axis = sample_axis_count(n, 2048);
    let sample = t.sample_graph(n, r, 2.0 * r / (per_axis - 1) as f64)?;
    let q = EnlargementQuery::new(EnlargementKind::NormWeighted, eps, *x, r, sample.density)?;
    let target = image.minkowski_ball(eps)?;
    let mut rng = rng::stream(seed, 0xf011);
    for _ in 0..FULL_ENLARGEMENT_DRAWS {
        let xstar = target.sample_point(&mut rng, 1.0)?;
        let (ok, worst) = enlargement_membership(GraphSource::Sample(&sample), &q, &xstar)?;
        if !ok {
            return Err(Error::Internal(alloc::format!(
                "point {:?} of T(x) + eps B failed membership by {worst:e}",
                xstar.as_slice()
            )));
        }
    }
    Ok(eps)
}

/// Odd per-axis grid count with `count^n` at most `budget` (at least 5).
pub fn sample_axis_count(dim: usize, budget: usize) -> usize {
    let mut m = libm::floor(libm::pow(budget as f64, 1.0 / dim as f64)) as usize;
    if m.is_multiple_of(2) {
        m -= 1;
    }
    m.max(5)
}

/// Settings of a domain probe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeSettings {
    /// Base sampling radius; the dual window is `|x*_i| <= radius`.
    pub radius: f64,
    /// Base grid step.
    pub density: f64,
    /// Number of scales; scale `k` uses radius and step times `2^k`.
    pub levels: usize,
}

impl ProbeSettings {
    /// Radius `10 (1 + max |g|)` over the grid; step 0.01 in one dimension,
    /// otherwise the step giving about 4096 points per scale; 8 scales.
    pub fn for_grid(grid: &[Vector]) -> Self {
        let gmax = grid.iter().map(|g| g.norm()).fold(0.0, f64::max);
        let radius = 10.0 * (1.0 + gmax);
        let dim = grid.first().map_or(1, |g| g.dim());
        let density = if dim == 1 {
            0.01
        } else {
            2.0 * radius / (sample_axis_count(dim, 4096) - 1) as f64
        };
        ProbeSettings {
            radius,
            density,
            levels: 8,
        }
    }
}

/// The multiscale sample a probe works from.
pub fn probe_sample(t: &OperatorSpec, dim: usize, settings: &ProbeSettings) -> Result<Vec<GraphPoint>> {
    let mut points = Vec::new();
    for k in 0..settings.levels {
        let scale = libm::pow(2.0, k as f64);
        let s = t.sample_graph(dim, settings.radius * scale, settings.density * scale)?;
        points.extend(s.points);
    }
    Ok(points)
}

/// Whether the enlargement at `x` meets the dual window, judged from
/// `points`. An empty answer is a certificate (a finite set of genuine
/// pairs already excludes the window).
pub fn probe_point(
    points: &[GraphPoint],
    kind: EnlargementKind,
    eps: f64,
    x: &Vector,
    window: f64,
) -> Result<bool> {
    let q = EnlargementQuery::new(kind, eps, *x, window, 1.0)?;
    let n = x.dim();
    let mut rows = polyhedron_rows(points, &q);
    for i in 0..n {
        rows.push(Halfspace::new(Vector::basis(n, i), -window));
        rows.push(Halfspace::new(-Vector::basis(n, i), -window));
    }
    let set = ConvexSet::HalfspaceIntersection { dim: n, constraints: rows };
    let empty = match set.is_empty() {
        Ok(e) => e,
        Err(Error::Resource(_)) => {
            let ConvexSet::HalfspaceIntersection { dim, constraints } = &set else {
                unreachable!()
            };
            geometry::polyhedron_is_empty_lp(*dim, constraints)?
        }
        Err(e) => return Err(e),
    };
    Ok(!empty)
}

/// For each grid point, whether the enlargement of `t` there is nonempty
/// (intersected with the dual window of [`ProbeSettings::for_grid`]).
pub fn domain_probe(
    t: &OperatorSpec,
    kind: EnlargementKind,
    eps: f64,
    grid: &[Vector],
) -> Result<Vec<(Vector, bool)>> {
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(Error::invalid("eps must be finite and >= 0"));
    }
    let Some(first) = grid.first() else {
        return Ok(Vec::new());
    };
    let n = first.dim();
    let settings = ProbeSettings::for_grid(grid);
    let points = probe_sample(t, n, &settings)?;
    grid.iter()
        .map(|x| {
            x.check_dim(n)?;
            Ok((*x, probe_point(&points, kind, eps, x, settings.radius)?))
        })
        .collect()
}
