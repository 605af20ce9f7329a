//! Closed convex sets in `R^n` and the queries every other module needs.

mod dykstra;
mod fm;
mod lp;
mod wolfe;

use alloc::boxed::Box as Boxed;
use alloc::format;
use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, ExtReal, Result, Vector};

pub use fm::{FM_MAX_DERIVED, FM_MAX_DIM};

/// Tolerance accepted on `||u|| = 1` for support queries.
pub const UNIT_TOL: f64 = 1e-12;
/// Target accuracy of the iterative projectors.
pub const PROJECTION_TOL: f64 = 1e-8;
/// Sweep cap for Dykstra's cyclic projections.
pub const MAX_SWEEPS: usize = 100_000;

/// `<normal, w> >= offset`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Halfspace {
    pub normal: Vector,
    pub offset: f64,
}

impl Halfspace {
    pub fn new(normal: Vector, offset: f64) -> Self {
        Halfspace { normal, offset }
    }

    pub fn satisfied_by(&self, w: &Vector) -> bool {
        self.normal.dot(w) >= self.offset
    }
}

/// Per-coordinate direction of an orthant cone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "-")]
    Neg,
    #[serde(rename = "0")]
    Zero,
    #[serde(rename = "+")]
    Pos,
}

/// A closed convex subset of `R^n`.
///
/// `FinitePoints` is the literal finite set; `Polytope` is the convex hull of
/// its vertices. `OrthantCone { apex, signs }` is `apex + {w : w_i >= 0 for
/// '+', w_i <= 0 for '-', w_i = 0 for '0'}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConvexSet {
    Empty { dim: usize },
    Singleton { point: Vector },
    FinitePoints { points: Vec<Vector> },
    Ball { center: Vector, radius: f64 },
    Box { lo: Vector, hi: Vector },
    Polytope { vertices: Vec<Vector> },
    HalfspaceIntersection { dim: usize, constraints: Vec<Halfspace> },
    OrthantCone { apex: Vector, signs: Vec<Sign> },
    BallSum { base: Boxed<ConvexSet>, radius: f64 },
}

fn check_radius(r: f64) -> Result<()> {
    if r.is_finite() && r >= 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("radius {r} must be finite and >= 0")))
    }
}

fn check_unit(u: &Vector) -> Result<()> {
    if (u.norm() - 1.0).abs() <= UNIT_TOL {
        Ok(())
    } else {
        Err(Error::invalid("support direction must have unit norm"))
    }
}

impl ConvexSet {
    pub fn empty(dim: usize) -> Self {
        ConvexSet::Empty { dim }
    }

    /// All of `R^dim`, written as an intersection of no half-spaces.
    pub fn whole(dim: usize) -> Self {
        ConvexSet::HalfspaceIntersection {
            dim,
            constraints: Vec::new(),
        }
    }

    pub fn singleton(point: Vector) -> Self {
        ConvexSet::Singleton { point }
    }

    pub fn ball(center: Vector, radius: f64) -> Result<Self> {
        check_radius(radius)?;
        Ok(ConvexSet::Ball { center, radius })
    }

    pub fn cuboid(lo: Vector, hi: Vector) -> Result<Self> {
        let s = ConvexSet::Box { lo, hi };
        s.validate()?;
        Ok(s)
    }

    pub fn polytope(vertices: Vec<Vector>) -> Result<Self> {
        let s = ConvexSet::Polytope { vertices };
        s.validate()?;
        Ok(s)
    }

    pub fn finite_points(points: Vec<Vector>) -> Result<Self> {
        let s = ConvexSet::FinitePoints { points };
        s.validate()?;
        Ok(s)
    }

    pub fn halfspaces(dim: usize, constraints: Vec<Halfspace>) -> Result<Self> {
        let s = ConvexSet::HalfspaceIntersection { dim, constraints };
        s.validate()?;
        Ok(s)
    }

    pub fn orthant_cone(apex: Vector, signs: Vec<Sign>) -> Result<Self> {
        let s = ConvexSet::OrthantCone { apex, signs };
        s.validate()?;
        Ok(s)
    }

    /// Checks the structural invariants (used after deserialization).
    pub fn validate(&self) -> Result<()> {
        match self {
            ConvexSet::Empty { dim } => {
                if !(1..=crate::MAX_DIM).contains(dim) {
                    return Err(Error::invalid(format!("dimension {dim} out of range")));
                }
            }
            ConvexSet::Singleton { .. } => {}
            ConvexSet::FinitePoints { points: pts } | ConvexSet::Polytope { vertices: pts } => {
                let first = pts
                    .first()
                    .ok_or_else(|| Error::invalid("point list must be nonempty"))?;
                for p in pts {
                    p.check_dim(first.dim())?;
                }
            }
            ConvexSet::Ball { radius, .. } => check_radius(*radius)?,
            ConvexSet::Box { lo, hi } => {
                hi.check_dim(lo.dim())?;
                if (0..lo.dim()).any(|i| lo[i] > hi[i]) {
                    return Err(Error::invalid("box requires lo <= hi componentwise"));
                }
            }
            ConvexSet::HalfspaceIntersection { dim, constraints } => {
                if !(1..=crate::MAX_DIM).contains(dim) {
                    return Err(Error::invalid(format!("dimension {dim} out of range")));
                }
                for c in constraints {
                    c.normal.check_dim(*dim)?;
                    if !c.offset.is_finite() {
                        return Err(Error::invalid("halfspace offset must be finite"));
                    }
                }
            }
            ConvexSet::OrthantCone { apex, signs } => {
                if signs.len() != apex.dim() {
                    return Err(Error::invalid("orthant cone needs one sign per coordinate"));
                }
            }
            ConvexSet::BallSum { base, radius } => {
                check_radius(*radius)?;
                if matches!(**base, ConvexSet::BallSum { .. }) {
                    return Err(Error::invalid("ball sum base must not itself be a ball sum"));
                }
                base.validate()?;
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        match self {
            ConvexSet::Empty { dim } | ConvexSet::HalfspaceIntersection { dim, .. } => *dim,
            ConvexSet::Singleton { point } => point.dim(),
            ConvexSet::FinitePoints { points: pts } | ConvexSet::Polytope { vertices: pts } => {
                pts[0].dim()
            }
            ConvexSet::Ball { center, .. } => center.dim(),
            ConvexSet::Box { lo, .. } => lo.dim(),
            ConvexSet::OrthantCone { apex, .. } => apex.dim(),
            ConvexSet::BallSum { base, .. } => base.dim(),
        }
    }

    /// Euclidean projection of `p`, `None` for an empty set.
    pub fn project(&self, p: &Vector) -> Result<Option<Vector>> {
        p.check_dim(self.dim())?;
        let q = match self {
            ConvexSet::Empty { .. } => return Ok(None),
            ConvexSet::Singleton { point } => *point,
            ConvexSet::FinitePoints { points } => *points
                .iter()
                .min_by(|a, b| a.dist(p).total_cmp(&b.dist(p)))
                .unwrap(),
            ConvexSet::Ball { center, radius } => {
                let d = p.dist(center);
                if d <= *radius {
                    *p
                } else {
                    *center + (*p - *center) * (radius / d)
                }
            }
            ConvexSet::Box { lo, hi } => Vector::from_fn(p.dim(), |i| p[i].clamp(lo[i], hi[i])),
            ConvexSet::Polytope { vertices } => wolfe::project(vertices, p)?,
            ConvexSet::HalfspaceIntersection { dim, constraints } => {
                if constraints.iter().all(|c| c.satisfied_by(p)) {
                    *p
                } else if *dim == 1 {
                    match interval_of(constraints) {
                        Some((lo, hi)) => Vector::splat(1, p[0].clamp(lo, hi)),
                        None => return Ok(None),
                    }
                } else {
                    match dykstra::project(constraints, p)? {
                        Some(q) => q,
                        None => return Ok(None),
                    }
                }
            }
            ConvexSet::OrthantCone { apex, signs } => Vector::from_fn(p.dim(), |i| {
                let w = p[i] - apex[i];
                apex[i]
                    + match signs[i] {
                        Sign::Pos => w.max(0.0),
                        Sign::Neg => w.min(0.0),
                        Sign::Zero => 0.0,
                    }
            }),
            ConvexSet::BallSum { base, radius } => match base.project(p)? {
                None => return Ok(None),
                Some(b) => {
                    let d = p.dist(&b);
                    if d <= *radius {
                        *p
                    } else {
                        b + (*p - b) * (radius / d)
                    }
                }
            },
        };
        Ok(Some(q))
    }

    /// Euclidean distance from `p`; `+inf` exactly for the empty set.
    pub fn distance(&self, p: &Vector) -> Result<ExtReal> {
        p.check_dim(self.dim())?;
        match self {
            ConvexSet::Ball { center, radius } => {
                Ok(ExtReal::Finite((p.dist(center) - radius).max(0.0)))
            }
            ConvexSet::BallSum { base, radius } => Ok(base.distance(p)?.shrink(*radius)),
            _ => Ok(match self.project(p)? {
                None => ExtReal::PosInf,
                Some(q) => ExtReal::Finite(p.dist(&q)),
            }),
        }
    }

    /// `distance(p) <= tol`, with exact (tol = 0) answers for the closed-form
    /// variants and half-space intersections.
    pub fn contains(&self, p: &Vector, tol: f64) -> Result<bool> {
        p.check_dim(self.dim())?;
        if tol.is_nan() || tol < 0.0 {
            return Err(Error::invalid("tolerance must be >= 0"));
        }
        match self {
            ConvexSet::Empty { .. } => Ok(false),
            ConvexSet::Singleton { point } => Ok(p.dist(point) <= tol),
            ConvexSet::Ball { center, radius } => Ok(p.dist(center) <= radius + tol),
            ConvexSet::HalfspaceIntersection { constraints, .. } => {
                if constraints.iter().all(|c| c.satisfied_by(p)) {
                    Ok(true)
                } else if tol == 0.0 {
                    Ok(false)
                } else {
                    Ok(self.distance(p)?.le(tol))
                }
            }
            _ => Ok(self.distance(p)?.le(tol)),
        }
    }

    /// Support function `sup_{w in S} <w, u>` for a unit vector `u`.
    pub fn support(&self, u: &Vector) -> Result<ExtReal> {
        u.check_dim(self.dim())?;
        check_unit(u)?;
        let v = match self {
            ConvexSet::Empty { .. } => {
                return Err(Error::invalid("support of the empty set"));
            }
            ConvexSet::Singleton { point } => point.dot(u),
            ConvexSet::FinitePoints { points: pts } | ConvexSet::Polytope { vertices: pts } => {
                pts.iter().map(|v| v.dot(u)).fold(f64::NEG_INFINITY, f64::max)
            }
            ConvexSet::Ball { center, radius } => center.dot(u) + radius,
            ConvexSet::Box { lo, hi } => (0..u.dim()).map(|i| (lo[i] * u[i]).max(hi[i] * u[i])).sum(),
            ConvexSet::OrthantCone { apex, signs } => {
                if cone_bounded_along(signs, u) {
                    apex.dot(u)
                } else {
                    return Ok(ExtReal::PosInf);
                }
            }
            ConvexSet::HalfspaceIntersection { dim, constraints } => {
                return lp::support(*dim, constraints, u);
            }
            ConvexSet::BallSum { base, radius } => return Ok(base.support(u)?.shift(*radius)),
        };
        Ok(ExtReal::Finite(v))
    }

    /// A maximizer of `<., u>` over the set, or `None` when the support is
    /// infinite. Not available for half-space intersections.
    pub fn support_point(&self, u: &Vector) -> Result<Option<Vector>> {
        u.check_dim(self.dim())?;
        Ok(Some(match self {
            ConvexSet::Empty { .. } => return Err(Error::invalid("support of the empty set")),
            ConvexSet::Singleton { point } => *point,
            ConvexSet::FinitePoints { points: pts } | ConvexSet::Polytope { vertices: pts } => *pts
                .iter()
                .max_by(|a, b| a.dot(u).total_cmp(&b.dot(u)))
                .unwrap(),
            ConvexSet::Ball { center, radius } => match u.normalized() {
                Some(d) => *center + d * *radius,
                None => *center,
            },
            ConvexSet::Box { lo, hi } => {
                Vector::from_fn(u.dim(), |i| if u[i] >= 0.0 { hi[i] } else { lo[i] })
            }
            ConvexSet::OrthantCone { apex, signs } => {
                if cone_bounded_along(signs, u) {
                    *apex
                } else {
                    return Ok(None);
                }
            }
            ConvexSet::HalfspaceIntersection { .. } => {
                return Err(Error::Unsupported("support point of a half-space intersection".into()))
            }
            ConvexSet::BallSum { base, radius } => match base.support_point(u)? {
                None => return Ok(None),
                Some(b) => match u.normalized() {
                    Some(d) => b + d * *radius,
                    None => b,
                },
            },
        }))
    }

    /// Emptiness; half-space intersections are decided by Fourier–Motzkin
    /// elimination (dimension <= 4, bounded number of derived rows).
    pub fn is_empty(&self) -> Result<bool> {
        match self {
            ConvexSet::Empty { .. } => Ok(true),
            ConvexSet::HalfspaceIntersection { dim, constraints } => fm::is_empty(*dim, constraints),
            ConvexSet::BallSum { base, .. } => base.is_empty(),
            _ => Ok(false),
        }
    }

    /// `S + r B` where `B` is the closed unit ball.
    pub fn minkowski_ball(&self, r: f64) -> Result<ConvexSet> {
        check_radius(r)?;
        if r == 0.0 {
            return Ok(self.clone());
        }
        Ok(match self {
            ConvexSet::Empty { dim } => ConvexSet::Empty { dim: *dim },
            ConvexSet::Singleton { point } => ConvexSet::Ball {
                center: *point,
                radius: r,
            },
            ConvexSet::Ball { center, radius } => ConvexSet::Ball {
                center: *center,
                radius: radius + r,
            },
            ConvexSet::BallSum { base, radius } => ConvexSet::BallSum {
                base: base.clone(),
                radius: radius + r,
            },
            other => ConvexSet::BallSum {
                base: Boxed::new(other.clone()),
                radius: r,
            },
        })
    }

    /// `S + t`.
    pub fn translate(&self, t: &Vector) -> Result<ConvexSet> {
        t.check_dim(self.dim())?;
        let shift = |v: &Vector| *v + *t;
        Ok(match self {
            ConvexSet::Empty { dim } => ConvexSet::Empty { dim: *dim },
            ConvexSet::Singleton { point } => ConvexSet::Singleton { point: shift(point) },
            ConvexSet::FinitePoints { points } => ConvexSet::FinitePoints {
                points: points.iter().map(shift).collect(),
            },
            ConvexSet::Ball { center, radius } => ConvexSet::Ball {
                center: shift(center),
                radius: *radius,
            },
            ConvexSet::Box { lo, hi } => ConvexSet::Box {
                lo: shift(lo),
                hi: shift(hi),
            },
            ConvexSet::Polytope { vertices } => ConvexSet::Polytope {
                vertices: vertices.iter().map(shift).collect(),
            },
            ConvexSet::HalfspaceIntersection { dim, constraints } => {
                ConvexSet::HalfspaceIntersection {
                    dim: *dim,
                    constraints: constraints
                        .iter()
                        .map(|c| Halfspace::new(c.normal, c.offset + c.normal.dot(t)))
                        .collect(),
                }
            }
            ConvexSet::OrthantCone { apex, signs } => ConvexSet::OrthantCone {
                apex: shift(apex),
                signs: signs.clone(),
            },
            ConvexSet::BallSum { base, radius } => ConvexSet::BallSum {
                base: Boxed::new(base.translate(t)?),
                radius: *radius,
            },
        })
    }

    /// Minkowski sum `S1 + S2` for the combinations this representation can
    /// express exactly.
    pub fn minkowski_sum(&self, other: &ConvexSet) -> Result<ConvexSet> {
        if self.dim() != other.dim() {
            return Err(Error::invalid("minkowski sum of sets of different dimension"));
        }
        use ConvexSet as S;
        match (self, other) {
            (S::Empty { dim }, _) | (_, S::Empty { dim }) => Ok(S::Empty { dim: *dim }),
            (S::Singleton { point }, s) | (s, S::Singleton { point }) => s.translate(point),
            (S::Ball { center, radius }, s) | (s, S::Ball { center, radius }) => {
                s.translate(center)?.minkowski_ball(*radius)
            }
            (S::BallSum { base, radius }, s) | (s, S::BallSum { base, radius }) => {
                base.minkowski_sum(s)?.minkowski_ball(*radius)
            }
            (S::Box { lo: l1, hi: h1 }, S::Box { lo: l2, hi: h2 }) => Ok(S::Box {
                lo: *l1 + *l2,
                hi: *h1 + *h2,
            }),
            (S::FinitePoints { points: a }, S::FinitePoints { points: b }) => Ok(S::FinitePoints {
                points: pairwise_sums(a, b),
            }),
            (S::Polytope { .. } | S::Box { .. }, S::Polytope { .. } | S::Box { .. }) => {
                Ok(S::Polytope {
                    vertices: pairwise_sums(&self.hull_vertices(), &other.hull_vertices()),
                })
            }
            (S::OrthantCone { apex: a1, signs: s1 }, S::OrthantCone { apex: a2, signs: s2 }) => {
                let mut signs = Vec::with_capacity(s1.len());
                for (x, y) in s1.iter().zip(s2) {
                    signs.push(match (x, y) {
                        (Sign::Zero, s) | (s, Sign::Zero) => *s,
                        (a, b) if a == b => *a,
                        _ => {
                            return Err(Error::Unsupported(
                                "sum of opposite orthant cones is not an orthant cone".into(),
                            ))
                        }
                    });
                }
                Ok(S::OrthantCone {
                    apex: *a1 + *a2,
                    signs,
                })
            }
            _ => Err(Error::Unsupported(format!(
                "minkowski sum of {} and {}",
                self.kind_name(),
                other.kind_name()
            ))),
        }
    }

    fn hull_vertices(&self) -> Vec<Vector> {
        match self {
            ConvexSet::Polytope { vertices } => vertices.clone(),
            ConvexSet::Box { lo, hi } => {
                let n = lo.dim();
                (0..1usize << n)
                    .map(|mask| {
                        Vector::from_fn(n, |i| if mask >> i & 1 == 1 { hi[i] } else { lo[i] })
                    })
                    .collect()
            }
            _ => unreachable!("hull_vertices on a non-polytope"),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            ConvexSet::Empty { .. } => "empty",
            ConvexSet::Singleton { .. } => "singleton",
            ConvexSet::FinitePoints { .. } => "finite_points",
            ConvexSet::Ball { .. } => "ball",
            ConvexSet::Box { .. } => "box",
            ConvexSet::Polytope { .. } => "polytope",
            ConvexSet::HalfspaceIntersection { .. } => "halfspace_intersection",
            ConvexSet::OrthantCone { .. } => "orthant_cone",
            ConvexSet::BallSum { .. } => "ball_sum",
        }
    }

    /// Draws a point of the set. Cone multipliers are exponential with mean
    /// `scale`. Half-space intersections and empty sets are rejected.
    pub fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R, scale: f64) -> Result<Vector> {
        Ok(match self {
            ConvexSet::Empty { .. } => return Err(Error::invalid("sampling the empty set")),
            ConvexSet::Singleton { point } => *point,
            ConvexSet::FinitePoints { points } => points[rng.random_range(0..points.len())],
            ConvexSet::Ball { center, radius } => *center + ball_point(rng, center.dim()) * *radius,
            ConvexSet::Box { lo, hi } => {
                Vector::from_fn(lo.dim(), |i| lo[i] + (hi[i] - lo[i]) * rng.random::<f64>())
            }
            ConvexSet::Polytope { vertices } => {
                let w: Vec<f64> = vertices
                    .iter()
                    .map(|_| -libm::log(1.0 - rng.random::<f64>()))
                    .collect();
                let total: f64 = w.iter().sum();
                let mut p = Vector::zeros(vertices[0].dim());
                for (v, wi) in vertices.iter().zip(&w) {
                    p += *v * (wi / total);
                }
                p
            }
            ConvexSet::OrthantCone { apex, signs } => Vector::from_fn(apex.dim(), |i| {
                let t = -scale * libm::log(1.0 - rng.random::<f64>());
                apex[i]
                    + match signs[i] {
                        Sign::Pos => t,
                        Sign::Neg => -t,
                        Sign::Zero => 0.0,
                    }
            }),
            ConvexSet::BallSum { base, radius } => {
                base.sample_point(rng, scale)? + ball_point(rng, base.dim()) * *radius
            }
            ConvexSet::HalfspaceIntersection { .. } => {
                return Err(Error::Unsupported("sampling a half-space intersection".into()))
            }
        })
    }
}

fn cone_bounded_along(signs: &[Sign], u: &Vector) -> bool {
    signs.iter().enumerate().all(|(i, s)| match s {
        Sign::Pos => u[i] <= 0.0,
        Sign::Neg => u[i] >= 0.0,
        Sign::Zero => true,
    })
}

fn pairwise_sums(a: &[Vector], b: &[Vector]) -> Vec<Vector> {
    a.iter().flat_map(|x| b.iter().map(move |y| *x + *y)).collect()
}

/// `[lo, hi]` described by one-dimensional half-spaces, `None` when empty.
pub(crate) fn interval_of(constraints: &[Halfspace]) -> Option<(f64, f64)> {
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    for c in constraints {
        let a = c.normal[0];
        if a > 0.0 {
            lo = lo.max(c.offset / a);
        } else if a < 0.0 {
            hi = hi.min(c.offset / a);
        } else if c.offset > 0.0 {
            return None;
        }
    }
    (lo <= hi).then_some((lo, hi))
}

/// A uniform point of the closed unit ball.
pub fn ball_point<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vector {
    let dir = unit_vector(rng, dim);
    dir * libm::pow(rng.random::<f64>(), 1.0 / dim as f64)
}

/// A uniform point of the unit sphere.
pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vector {
    loop {
        let v = Vector::from_fn(dim, |_| 2.0 * rng.random::<f64>() - 1.0);
        let n = v.norm();
        if n > 1e-3 && n <= 1.0 {
            return v * (1.0 / n);
        }
    }
}

/// Largest support-function gap over `directions`: a lower bound of the
/// Hausdorff distance between two bounded nonempty sets.
pub fn hausdorff_estimate(a: &ConvexSet, b: &ConvexSet, directions: &[Vector]) -> Result<f64> {
    if directions.is_empty() {
        return Err(Error::invalid("no directions given"));
    }
    if a.dim() != b.dim() {
        return Err(Error::invalid("sets of different dimension"));
    }
    let mut worst: f64 = 0.0;
    for u in directions {
        match (a.support(u)?, b.support(u)?) {
            (ExtReal::Finite(sa), ExtReal::Finite(sb)) => worst = worst.max((sa - sb).abs()),
            _ => return Err(Error::invalid("hausdorff estimate of an unbounded set")),
        }
    }
    Ok(worst)
}

/// Distance between two closed convex sets, `inf_{a in A, b in B} ||a - b||`.
///
/// Closed forms for points and balls; alternating projections otherwise.
pub fn set_gap(a: &ConvexSet, b: &ConvexSet) -> Result<ExtReal> {
    Ok(match nearest_points(a, b)? {
        Some((p, q)) => ExtReal::Finite(p.dist(&q)),
        None => ExtReal::PosInf,
    })
}

/// A pair `(p, q)` with `p` in `a` and `q` in `b` realizing the gap between
/// the sets, or `None` when one of them is empty.
pub fn nearest_points(a: &ConvexSet, b: &ConvexSet) -> Result<Option<(Vector, Vector)>> {
    use ConvexSet as S;
    if a.dim() != b.dim() {
        return Err(Error::invalid("sets of different dimension"));
    }
    let swap = |r: Option<(Vector, Vector)>| r.map(|(p, q)| (q, p));
    match (a, b) {
        (S::Empty { .. }, _) | (_, S::Empty { .. }) => Ok(None),
        (S::Singleton { point }, s) => Ok(s.project(point)?.map(|q| (*point, q))),
        (s, S::Singleton { .. }) => Ok(swap(nearest_points(b, s)?)),
        (S::Ball { center, radius }, s) => Ok(s
            .project(center)?
            .map(|q| (toward(center, &q, *radius), q))),
        (s, S::Ball { .. }) => Ok(swap(nearest_points(b, s)?)),
        (S::BallSum { base, radius }, s) => Ok(nearest_points(base, s)?
            .map(|(p, q)| (toward(&p, &q, *radius), q))),
        (s, S::BallSum { .. }) => Ok(swap(nearest_points(b, s)?)),
        _ => {
            let mut x = a
                .project(&Vector::zeros(a.dim()))?
                .ok_or_else(|| Error::invalid("projection onto the empty set"))?;
            let mut gap = f64::INFINITY;
            for _ in 0..MAX_SWEEPS {
                let Some(y) = b.project(&x)? else {
                    return Ok(None);
                };
                let nx = a.project(&y)?.unwrap();
                let g = nx.dist(&y);
                if (gap - g).abs() <= 1e-13 && nx.dist(&x) <= 1e-12 {
                    return Ok(Some((nx, y)));
                }
                gap = g;
                x = nx;
            }
            Err(Error::numerical(
                "alternating projections did not converge",
                ExtReal::Finite(0.0),
            ))
        }
    }
}

/// The point at distance at most `r` from `from` in the direction of `to`.
fn toward(from: &Vector, to: &Vector, r: f64) -> Vector {
    let d = from.dist(to);
    if d <= r {
        *to
    } else {
        *from + (*to - *from) * (r / d)
    }
}

/// Intersection of two operator domains. Supports the whole space, boxes
/// and finite point sets, which is every domain the operator catalog
/// produces.
pub fn intersect(a: &ConvexSet, b: &ConvexSet) -> Result<ConvexSet> {
    use ConvexSet as S;
    if a.dim() != b.dim() {
        return Err(Error::invalid("sets of different dimension"));
    }
    match (a, b) {
        (S::Empty { dim }, _) | (_, S::Empty { dim }) => Ok(S::Empty { dim: *dim }),
        (S::HalfspaceIntersection { constraints, .. }, s)
        | (s, S::HalfspaceIntersection { constraints, .. })
            if constraints.is_empty() =>
        {
            Ok(s.clone())
        }
        (S::Box { lo: l1, hi: h1 }, S::Box { lo: l2, hi: h2 }) => {
            let n = l1.dim();
            let lo = Vector::from_fn(n, |i| l1[i].max(l2[i]));
            let hi = Vector::from_fn(n, |i| h1[i].min(h2[i]));
            if (0..n).any(|i| lo[i] > hi[i]) {
                Ok(S::Empty { dim: n })
            } else {
                Ok(S::Box { lo, hi })
            }
        }
        (S::FinitePoints { points }, s) | (s, S::FinitePoints { points }) => {
            let mut kept = Vec::new();
            for p in points {
                if s.contains(p, 0.0)? {
                    kept.push(*p);
                }
            }
            if kept.is_empty() {
                Ok(S::Empty { dim: a.dim() })
            } else {
                Ok(S::FinitePoints { points: kept })
            }
        }
        _ => Err(Error::Unsupported(format!(
            "intersection of {} and {}",
            a.kind_name(),
            b.kind_name()
        ))),
    }
}

/// Emptiness of `{w : <a_i, w> >= b_i}` decided by the simplex method.
/// Unlike [`ConvexSet::is_empty`] this has no dimension or row budget; the
/// answer is exact up to the pivot tolerance.
pub fn polyhedron_is_empty_lp(dim: usize, constraints: &[Halfspace]) -> Result<bool> {
    lp::is_empty(dim, constraints)
}

/// Deterministic unit directions: `+-1` in one dimension, `count` equally
/// spaced angles in the plane, and the signed axes followed by a fixed
/// pseudo-random sequence above that.
pub fn direction_grid(dim: usize, count: usize) -> Vec<Vector> {
    match dim {
        1 => alloc::vec![Vector::splat(1, 1.0), Vector::splat(1, -1.0)],
        2 => (0..count.max(1))
            .map(|k| {
                let t = 2.0 * core::f64::consts::PI * k as f64 / count.max(1) as f64;
                Vector::from_fn(2, |i| if i == 0 { libm::cos(t) } else { libm::sin(t) })
            })
            .collect(),
        _ => {
            let mut out = Vec::with_capacity(count.max(2 * dim));
            for i in 0..dim {
                out.push(Vector::basis(dim, i));
                out.push(-Vector::basis(dim, i));
            }
            let mut rng = crate::rng::stream(0x5eed, 0);
            while out.len() < count {
                out.push(unit_vector(&mut rng, dim));
            }
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn v(c: &[f64]) -> Vector {
        Vector::new(c).unwrap()
    }

    #[test]
    fn contains_examples() {
        let b = ConvexSet::ball(v(&[0.0, 0.0]), 1.0).unwrap();
        assert!(b.contains(&v(&[1.0, 0.0]), 0.0).unwrap());
        assert!(!b.contains(&v(&[1.5, 0.0]), 0.0).unwrap());
        let strip = ConvexSet::halfspaces(
            1,
            vec![
                Halfspace::new(v(&[1.0]), 0.0),
                Halfspace::new(v(&[-1.0]), -1.0),
            ],
        )
        .unwrap();
        assert!(strip.contains(&v(&[0.5]), 0.0).unwrap());
        assert!(!strip.contains(&v(&[1.5]), 0.0).unwrap());
        assert!(b.contains(&v(&[1.0, 0.0, 0.0]), 0.0).is_err());
    }

    #[test]
    fn distance_examples() {
        let b = ConvexSet::ball(v(&[0.0, 0.0]), 1.0).unwrap();
        assert_eq!(b.distance(&v(&[3.0, 0.0])).unwrap(), ExtReal::Finite(2.0));
        assert_eq!(ConvexSet::empty(2).distance(&v(&[3.0, 0.0])).unwrap(), ExtReal::PosInf);
        // brute force over the segment [0, 1]: min_t |2 - t| = 1
        let seg = ConvexSet::polytope(vec![v(&[0.0]), v(&[1.0])]).unwrap();
        let brute = (0..=1000)
            .map(|k| (2.0 - k as f64 / 1000.0f64).abs())
            .fold(f64::INFINITY, f64::min);
        let d = seg.distance(&v(&[2.0])).unwrap().finite().unwrap();
        assert!((d - brute).abs() < 1e-12);
    }

    #[test]
    fn support_examples() {
        let u = v(&[0.6, 0.8]);
        let b = ConvexSet::ball(v(&[1.0, 2.0]), 0.5).unwrap();
        assert!((b.support(&u).unwrap().finite().unwrap() - (0.6 + 1.6 + 0.5)).abs() < 1e-15);
        let p = ConvexSet::polytope(vec![v(&[0.0, 0.0]), v(&[1.0, 0.0]), v(&[0.0, 2.0])]).unwrap();
        assert!((p.support(&u).unwrap().finite().unwrap() - 1.6).abs() < 1e-15);
        let ray = ConvexSet::orthant_cone(v(&[0.0]), vec![Sign::Neg]).unwrap();
        assert_eq!(ray.support(&v(&[1.0])).unwrap(), ExtReal::Finite(0.0));
        assert_eq!(ray.support(&v(&[-1.0])).unwrap(), ExtReal::PosInf);
        assert!(ConvexSet::empty(1).support(&v(&[1.0])).is_err());
        assert!(b.support(&v(&[1.0, 1.0])).is_err());
    }

    #[test]
    fn emptiness_examples() {
        let contradictory = ConvexSet::halfspaces(
            1,
            vec![Halfspace::new(v(&[1.0]), 1.0), Halfspace::new(v(&[-1.0]), 0.0)],
        )
        .unwrap();
        assert!(contradictory.is_empty().unwrap());
        assert!(!ConvexSet::ball(v(&[4.0, 4.0]), 0.0).unwrap().is_empty().unwrap());
        // simplex w1 >= 0, w2 >= 0, w1 + w2 <= 1: eliminating w2 leaves
        // 0 <= w1 <= 1, which is nonempty.
        let simplex = ConvexSet::halfspaces(
            2,
            vec![
                Halfspace::new(v(&[1.0, 0.0]), 0.0),
                Halfspace::new(v(&[0.0, 1.0]), 0.0),
                Halfspace::new(v(&[-1.0, -1.0]), -1.0),
            ],
        )
        .unwrap();
        assert!(!simplex.is_empty().unwrap());
    }

    #[test]
    fn minkowski_ball_examples() {
        let s = ConvexSet::singleton(v(&[0.0, 0.0])).minkowski_ball(1.0).unwrap();
        assert_eq!(s, ConvexSet::ball(v(&[0.0, 0.0]), 1.0).unwrap());
        let b = ConvexSet::ball(v(&[1.0, 0.0]), 1.0).unwrap().minkowski_ball(0.5).unwrap();
        assert_eq!(b, ConvexSet::ball(v(&[1.0, 0.0]), 1.5).unwrap());
        let bx = ConvexSet::cuboid(v(&[0.0]), v(&[1.0])).unwrap();
        assert_eq!(bx.minkowski_ball(0.0).unwrap(), bx);
        assert!(bx.minkowski_ball(-1.0).is_err());
        let grown = bx.minkowski_ball(0.25).unwrap();
        assert_eq!(grown.distance(&v(&[2.0])).unwrap(), ExtReal::Finite(0.75));
    }

    #[test]
    fn hausdorff_examples() {
        let dirs = vec![v(&[1.0, 0.0]), v(&[0.0, 1.0]), v(&[-1.0, 0.0]), v(&[0.0, -1.0])];
        let b1 = ConvexSet::ball(v(&[0.0, 0.0]), 1.0).unwrap();
        let b2 = ConvexSet::ball(v(&[0.0, 0.0]), 2.0).unwrap();
        assert!((hausdorff_estimate(&b1, &b2, &dirs).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(hausdorff_estimate(&b1, &b1, &dirs).unwrap(), 0.0);
        let bx = ConvexSet::cuboid(v(&[0.0, 0.0]), v(&[1.0, 1.0])).unwrap();
        let disk = ConvexSet::ball(v(&[0.5, 0.5]), 0.5).unwrap();
        assert!(hausdorff_estimate(&bx, &disk, &dirs).unwrap() < 1e-15);
        let s = 1.0 / libm::sqrt(2.0);
        // box support sqrt(2), disk support 1/sqrt(2) + 1/2
        let expected = libm::sqrt(2.0) - (s + 0.5);
        let diag = hausdorff_estimate(&bx, &disk, &[v(&[s, s])]).unwrap();
        assert!((diag - expected).abs() < 1e-12);
        assert!((diag - 0.2071).abs() < 1e-4);
        let ray = ConvexSet::orthant_cone(v(&[0.0, 0.0]), vec![Sign::Pos, Sign::Zero]).unwrap();
        assert!(hausdorff_estimate(&ray, &b1, &dirs).is_err());
    }

    #[test]
    fn minkowski_sums() {
        let cone = ConvexSet::orthant_cone(v(&[0.0, 0.0]), vec![Sign::Pos, Sign::Zero]).unwrap();
        let sum = cone.minkowski_sum(&ConvexSet::singleton(v(&[1.0, 2.0]))).unwrap();
        assert_eq!(
            sum,
            ConvexSet::orthant_cone(v(&[1.0, 2.0]), vec![Sign::Pos, Sign::Zero]).unwrap()
        );
        let bs = cone.minkowski_sum(&ConvexSet::ball(v(&[0.0, 0.0]), 1.0).unwrap()).unwrap();
        assert!(matches!(bs, ConvexSet::BallSum { .. }));
        let other = ConvexSet::orthant_cone(v(&[0.0, 0.0]), vec![Sign::Neg, Sign::Zero]).unwrap();
        assert!(cone.minkowski_sum(&other).is_err());
        let e = cone.minkowski_sum(&ConvexSet::empty(2)).unwrap();
        assert!(e.is_empty().unwrap());
    }

    #[test]
    fn gap_between_sets() {
        let a = ConvexSet::polytope(vec![v(&[2.0, 0.0]), v(&[3.0, 1.0]), v(&[3.0, -1.0])]).unwrap();
        let cone = ConvexSet::orthant_cone(v(&[0.0, 0.0]), vec![Sign::Neg, Sign::Neg]).unwrap();
        let g = set_gap(&a, &cone).unwrap().finite().unwrap();
        assert!((g - 2.0).abs() < 1e-9);
        let b = ConvexSet::ball(v(&[0.0, 5.0]), 1.0).unwrap();
        // nearest triangle point to (0,5) is the vertex (3,1), at distance 5
        assert!((set_gap(&a, &b).unwrap().finite().unwrap() - 4.0).abs() < 1e-9);
    }
}
