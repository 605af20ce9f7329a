//! The operator catalog: exact images `T(x)`, resolvents, graph sampling and
//! monotonicity validation.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::geometry::{self, ConvexSet, Sign};
use crate::verdict::{TheoremId, Verdict, Witness};
use crate::{Error, ExtReal, Matrix, Result, Vector};

/// Pairwise monotonicity is accepted down to this inner product.
pub const MONOTONE_TOL: f64 = 1e-9;
/// Largest graph sample `sample_graph` will build.
pub const MAX_SAMPLE_POINTS: usize = 1_000_000;
/// Eigenvalue floor for the symmetric part of a monotone matrix.
pub const PSD_TOL: f64 = 1e-10;

const DR_MAX_ITER: usize = 100_000;

/// A pair `(y, y*)` of the graph of an operator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GraphPoint {
    pub y: Vector,
    pub ystar: Vector,
}

impl GraphPoint {
    pub fn new(y: Vector, ystar: Vector) -> Result<Self> {
        ystar.check_dim(y.dim())?;
        Ok(GraphPoint { y, ystar })
    }

    /// `<y* - x*, y - x>` against another pair.
    pub fn pairing(&self, x: &Vector, xstar: &Vector) -> f64 {
        (self.ystar - *xstar).dot(&(self.y - *x))
    }
}

/// A finite list of graph pairs with the radius and step it was drawn at.
///
/// `complete` marks a sample that is the whole graph (a finite graph
/// operator), so quantities computed from it are exact rather than lower
/// bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphSample {
    pub points: Vec<GraphPoint>,
    #[serde(default = "finite_source")]
    pub source: String,
    #[serde(default = "unit")]
    pub truncation_radius: f64,
    #[serde(default = "unit")]
    pub density: f64,
    #[serde(default)]
    pub complete: bool,
}

fn finite_source() -> String {
    String::from("finite_graph")
}

fn unit() -> f64 {
    1.0
}

impl GraphSample {
    /// Builds a sample. Grid samples have distinct pairs by construction
    /// (`z = y + y*` differs), so no deduplication is done here.
    pub fn new(
        points: Vec<GraphPoint>,
        source: impl Into<String>,
        truncation_radius: f64,
        density: f64,
    ) -> Result<Self> {
        let s = GraphSample {
            points,
            source: source.into(),
            truncation_radius,
            density,
            complete: false,
        };
        s.check_shape()?;
        Ok(s)
    }

    /// A sample that is the entire graph of a finite operator; exact
    /// duplicate pairs are dropped.
    pub fn finite(points: Vec<GraphPoint>) -> Result<Self> {
        let mut s = GraphSample::new(points, "finite_graph", 1.0, 1.0)?;
        s.dedup();
        s.complete = true;
        Ok(s)
    }

    pub fn dim(&self) -> usize {
        self.points.first().map_or(0, |p| p.y.dim())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn dedup(&mut self) {
        let mut seen: Vec<GraphPoint> = Vec::with_capacity(self.points.len());
        for p in self.points.drain(..) {
            if !seen.contains(&p) {
                seen.push(p);
            }
        }
        self.points = seen;
    }

    fn check_shape(&self) -> Result<()> {
        if !(self.truncation_radius > 0.0 && self.truncation_radius.is_finite()) {
            return Err(Error::invalid("truncation radius must be finite and > 0"));
        }
        if !(self.density > 0.0 && self.density.is_finite()) {
            return Err(Error::invalid("density must be finite and > 0"));
        }
        let dim = self.dim();
        for p in &self.points {
            p.y.check_dim(dim)?;
            p.ystar.check_dim(dim)?;
        }
        Ok(())
    }

    /// The most negative pairwise inner product `(i, j, value)`, if any pair
    /// falls below `-MONOTONE_TOL`.
    pub fn worst_pair(&self) -> Option<(usize, usize, f64)> {
        let mut worst: Option<(usize, usize, f64)> = None;
        for i in 0..self.points.len() {
            for j in i + 1..self.points.len() {
                let (a, b) = (&self.points[i], &self.points[j]);
                let v = a.pairing(&b.y, &b.ystar);
                if v < -MONOTONE_TOL && worst.is_none_or(|w| v < w.2) {
                    worst = Some((i, j, v));
                }
            }
        }
        worst
    }

    /// Structural checks plus pairwise monotonicity; the error names the
    /// worst offending pair.
    pub fn validate(&self) -> Result<()> {
        self.check_shape()?;
        if self.points.is_empty() {
            return Err(Error::invalid("graph sample must be nonempty"));
        }
        if let Some((i, j, v)) = self.worst_pair() {
            let (a, b) = (&self.points[i], &self.points[j]);
            return Err(Error::invalid(format!(
                "graph is not monotone: pair {i} (y={:?}, y*={:?}) and pair {j} (y={:?}, y*={:?}) give {v:e}",
                a.y.as_slice(),
                a.ystar.as_slice(),
                b.y.as_slice(),
                b.ystar.as_slice()
            )));
        }
        Ok(())
    }
}

/// Smooth bounded gradients available as operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SmoothId {
    /// `x -> x / sqrt(1 + |x|^2)`, the gradient of `sqrt(1 + |x|^2)`;
    /// bounded by 1.
    Sqrt1p,
}

impl SmoothId {
    /// Uniform bound on the norm of the gradient.
    pub fn bound(self) -> f64 {
        match self {
            SmoothId::Sqrt1p => 1.0,
        }
    }

    fn apply(self, x: &Vector) -> Vector {
        match self {
            SmoothId::Sqrt1p => *x * (1.0 / libm::sqrt(1.0 + x.norm_sq())),
        }
    }

    /// Solves `x + mu * grad(x) = w`.
    fn resolvent(self, mu: f64, w: &Vector) -> Result<Vector> {
        match self {
            SmoothId::Sqrt1p => {
                // x = s * w/|w| with s + mu s / sqrt(1 + s^2) = |w|.
                let r = w.norm();
                if r == 0.0 {
                    return Ok(Vector::zeros(w.dim()));
                }
                let f = |s: f64| s + mu * s / libm::sqrt(1.0 + s * s) - r;
                let (mut lo, mut hi) = (0.0f64, r);
                for _ in 0..2000 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        return Ok(*w * (mid / r));
                    }
                    if f(mid) > 0.0 {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                Err(Error::numerical(
                    "bisection for the smooth resolvent did not converge",
                    ExtReal::Finite(hi - lo),
                ))
            }
        }
    }
}

/// A monotone operator on `R^n`.
#[allow(clippy::large_enum_variant)]
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OperatorSpec {
    /// The finite graph itself (monotone, not maximal).
    FiniteGraph { sample: GraphSample },
    /// `x -> A x` with `A + A^T` positive semidefinite.
    Linear { matrix: Matrix },
    /// Subdifferential of `z -> lambda |z - center|`.
    NormSubdiff { lambda: f64, center: Vector },
    /// Normal cone of the box `[lo, hi]` (`lo < hi` componentwise).
    BoxNormalCone { lo: Vector, hi: Vector },
    SmoothGradient { id: SmoothId },
    Sum { terms: Vec<OperatorSpec> },
}

impl OperatorSpec {
    pub fn linear(matrix: Matrix) -> Result<Self> {
        let t = OperatorSpec::Linear { matrix };
        t.validate()?;
        Ok(t)
    }

    pub fn norm_subdiff(lambda: f64, center: Vector) -> Result<Self> {
        let t = OperatorSpec::NormSubdiff { lambda, center };
        t.validate()?;
        Ok(t)
    }

    pub fn box_normal_cone(lo: Vector, hi: Vector) -> Result<Self> {
        let t = OperatorSpec::BoxNormalCone { lo, hi };
        t.validate()?;
        Ok(t)
    }

    pub fn smooth(id: SmoothId, dim: usize) -> Result<Self> {
        // The smooth catalog is dimension-free; `dim` is only range-checked.
        if !(1..=crate::MAX_DIM).contains(&dim) {
            return Err(Error::invalid(format!("dimension {dim} out of range")));
        }
        Ok(OperatorSpec::SmoothGradient { id })
    }

    pub fn sum(terms: Vec<OperatorSpec>) -> Result<Self> {
        let t = OperatorSpec::Sum { terms };
        t.validate()?;
        Ok(t)
    }

    pub fn finite_graph(sample: GraphSample) -> Result<Self> {
        let t = OperatorSpec::FiniteGraph { sample };
        t.validate()?;
        Ok(t)
    }

    /// Dimension of the operator, `None` when it is dimension-free (smooth
    /// gradients) or malformed.
    pub fn dim(&self) -> Option<usize> {
        match self {
            OperatorSpec::FiniteGraph { sample } => sample.points.first().map(|p| p.y.dim()),
            OperatorSpec::Linear { matrix } => Some(matrix.dim()),
            OperatorSpec::NormSubdiff { center, .. } => Some(center.dim()),
            OperatorSpec::BoxNormalCone { lo, .. } => Some(lo.dim()),
            OperatorSpec::SmoothGradient { .. } => None,
            OperatorSpec::Sum { terms } => terms.iter().find_map(|t| t.dim()),
        }
    }

    fn check_point(&self, x: &Vector) -> Result<()> {
        if let Some(d) = self.dim() {
            x.check_dim(d)?;
        }
        Ok(())
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            OperatorSpec::FiniteGraph { .. } => "finite_graph",
            OperatorSpec::Linear { .. } => "linear",
            OperatorSpec::NormSubdiff { .. } => "norm_subdiff",
            OperatorSpec::BoxNormalCone { .. } => "box_normal_cone",
            OperatorSpec::SmoothGradient { .. } => "smooth_gradient",
            OperatorSpec::Sum { .. } => "sum",
        }
    }

    /// True for catalog members whose graph is maximal (everything except a
    /// finite graph and sums containing one).
    pub fn is_maximal(&self) -> bool {
        match self {
            OperatorSpec::FiniteGraph { .. } => false,
            OperatorSpec::Sum { terms } => terms.iter().all(|t| t.is_maximal()),
            _ => true,
        }
    }

    /// Checks every structural invariant, including monotonicity of a
    /// finite graph and a common domain point for sums.
    pub fn validate(&self) -> Result<()> {
        match self {
            OperatorSpec::FiniteGraph { sample } => sample.validate(),
            OperatorSpec::Linear { matrix } => {
                let min = matrix
                    .symmetric_part()
                    .symmetric_eigenvalues()
                    .into_iter()
                    .fold(f64::INFINITY, f64::min);
                if min < -PSD_TOL {
                    return Err(Error::invalid(format!(
                        "matrix is not monotone: symmetric part has eigenvalue {min:e}"
                    )));
                }
                Ok(())
            }
            OperatorSpec::NormSubdiff { lambda, .. } => {
                if lambda.is_finite() && *lambda > 0.0 {
                    Ok(())
                } else {
                    Err(Error::invalid(format!("lambda {lambda} must be finite and > 0")))
                }
            }
            OperatorSpec::BoxNormalCone { lo, hi } => {
                hi.check_dim(lo.dim())?;
                if (0..lo.dim()).any(|i| lo[i] >= hi[i]) {
                    return Err(Error::invalid("box normal cone requires lo < hi componentwise"));
                }
                Ok(())
            }
            OperatorSpec::SmoothGradient { .. } => Ok(()),
            OperatorSpec::Sum { terms } => {
                if terms.is_empty() {
                    return Err(Error::invalid("sum needs at least one term"));
                }
                let dim = self
                    .dim()
                    .ok_or_else(|| Error::invalid("sum of dimension-free terms has no dimension"))?;
                for t in terms {
                    t.validate()?;
                    if let Some(d) = t.dim() {
                        if d != dim {
                            return Err(Error::invalid(format!(
                                "sum terms have dimensions {dim} and {d}"
                            )));
                        }
                    }
                }
                if self.domain(dim)?.is_empty()? {
                    return Err(Error::invalid("sum terms have no common domain point"));
                }
                Ok(())
            }
        }
    }

    /// The domain `D_T` (closed for every catalog member).
    pub fn domain(&self, dim: usize) -> Result<ConvexSet> {
        Ok(match self {
            OperatorSpec::FiniteGraph { sample } => {
                ConvexSet::finite_points(sample.points.iter().map(|p| p.y).collect())?
            }
            OperatorSpec::BoxNormalCone { lo, hi } => ConvexSet::Box { lo: *lo, hi: *hi },
            OperatorSpec::Sum { terms } => {
                let mut d = ConvexSet::whole(dim);
                for t in terms {
                    d = geometry::intersect(&d, &t.domain(dim)?)?;
                }
                d
            }
            _ => ConvexSet::whole(dim),
        })
    }

    /// The image `T(x)` as a closed convex set (empty outside the domain).
    pub fn evaluate(&self, x: &Vector) -> Result<ConvexSet> {
        self.check_point(x)?;
        let n = x.dim();
        Ok(match self {
            OperatorSpec::FiniteGraph { sample } => {
                let pts: Vec<Vector> = sample
                    .points
                    .iter()
                    .filter(|p| p.y == *x)
                    .map(|p| p.ystar)
                    .collect();
                match pts.len() {
                    0 => ConvexSet::empty(n),
                    1 => ConvexSet::singleton(pts[0]),
                    _ => ConvexSet::FinitePoints { points: pts },
                }
            }
            OperatorSpec::Linear { matrix } => ConvexSet::singleton(matrix.apply(x)),
            OperatorSpec::NormSubdiff { lambda, center } => {
                let d = *x - *center;
                let r = d.norm();
                if r == 0.0 {
                    ConvexSet::Ball {
                        center: Vector::zeros(n),
                        radius: *lambda,
                    }
                } else {
                    ConvexSet::singleton(d * (lambda / r))
                }
            }
            OperatorSpec::BoxNormalCone { lo, hi } => {
                if (0..n).any(|i| x[i] < lo[i] || x[i] > hi[i]) {
                    ConvexSet::empty(n)
                } else {
                    let signs: Vec<Sign> = (0..n)
                        .map(|i| {
                            if x[i] == lo[i] {
                                Sign::Neg
                            } else if x[i] == hi[i] {
                                Sign::Pos
                            } else {
                                Sign::Zero
                            }
                        })
                        .collect();
                    if signs.iter().all(|s| *s == Sign::Zero) {
                        ConvexSet::singleton(Vector::zeros(n))
                    } else {
                        ConvexSet::OrthantCone {
                            apex: Vector::zeros(n),
                            signs,
                        }
                    }
                }
            }
            OperatorSpec::SmoothGradient { id } => ConvexSet::singleton(id.apply(x)),
            OperatorSpec::Sum { terms } => {
                let mut acc = ConvexSet::singleton(Vector::zeros(n));
                for t in terms {
                    let img = t.evaluate(x)?;
                    if matches!(img, ConvexSet::Empty { .. }) {
                        return Ok(ConvexSet::empty(n));
                    }
                    acc = acc.minkowski_sum(&img)?;
                }
                acc
            }
        })
    }

    /// `J_{mu T}(w) = (I + mu T)^{-1} w`.
    pub fn resolvent_scaled(&self, mu: f64, w: &Vector) -> Result<Vector> {
        self.check_point(w)?;
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::invalid("resolvent step must be finite and > 0"));
        }
        match self {
            OperatorSpec::FiniteGraph { .. } => Err(Error::Unsupported(
                "resolvent of a finite graph (not maximal)".into(),
            )),
            OperatorSpec::Linear { matrix } => matrix.shifted_identity(mu).solve(w),
            OperatorSpec::NormSubdiff { lambda, center } => {
                let d = *w - *center;
                let r = d.norm();
                let thr = mu * lambda;
                Ok(if r <= thr {
                    *center
                } else {
                    *center + d * (1.0 - thr / r)
                })
            }
            OperatorSpec::BoxNormalCone { lo, hi } => {
                Ok(Vector::from_fn(w.dim(), |i| w[i].clamp(lo[i], hi[i])))
            }
            OperatorSpec::SmoothGradient { id } => id.resolvent(mu, w),
            OperatorSpec::Sum { terms } => {
                let x = sum_resolvent(terms, mu, w)?;
                let dom = self.domain(w.dim())?;
                dom.project(&x)?
                    .ok_or_else(|| Error::Internal("sum has an empty domain".into()))
            }
        }
    }

    /// The graph pair `(x, x*)` with `x + mu x* = w` (up to the resolvent's
    /// accuracy); `x*` is taken in `T(x)` exactly.
    pub fn resolvent_pair(&self, mu: f64, w: &Vector) -> Result<GraphPoint> {
        let x = self.resolvent_scaled(mu, w)?;
        let residual = (*w - x) * (1.0 / mu);
        let xstar = self
            .evaluate(&x)?
            .project(&residual)?
            .ok_or_else(|| Error::Internal("resolvent left the domain".into()))?;
        GraphPoint::new(x, xstar)
    }

    /// The Minty point of `z`: `(x, z - x)` with `x = (I + T)^{-1} z`.
    pub fn resolvent_point(&self, z: &Vector) -> Result<GraphPoint> {
        self.resolvent_pair(1.0, z)
    }

    /// Graph pairs from a grid of `z` over `[-R, R]^n` with step `h`, mapped
    /// through the resolvent, in lexicographic grid order. A finite graph
    /// returns its stored pairs.
    pub fn sample_graph(&self, dim: usize, r: f64, h: f64) -> Result<GraphSample> {
        if let OperatorSpec::FiniteGraph { sample } = self {
            return Ok(sample.clone());
        }
        if !(r > 0.0 && h > 0.0 && h <= r && r.is_finite()) {
            return Err(Error::invalid("sample_graph requires 0 < h <= R"));
        }
        let per_axis = libm::floor(2.0 * r / h + 1e-9) as usize + 1;
        let total = (0..dim).try_fold(1usize, |acc, _| acc.checked_mul(per_axis));
        let total = match total {
            Some(t) if t <= MAX_SAMPLE_POINTS => t,
            _ => {
                return Err(Error::Resource(format!(
                    "graph sample of {per_axis}^{dim} points exceeds {MAX_SAMPLE_POINTS}"
                )))
            }
        };
        let mut points = Vec::with_capacity(total);
        let mut idx = alloc::vec![0usize; dim];
        for _ in 0..total {
            let z = Vector::from_fn(dim, |i| -r + idx[i] as f64 * h);
            points.push(self.resolvent_point(&z)?);
            for i in (0..dim).rev() {
                idx[i] += 1;
                if idx[i] < per_axis {
                    break;
                }
                idx[i] = 0;
            }
        }
        GraphSample::new(points, self.kind_name(), r, h)
    }
}

/// Resolvent of a sum by Douglas–Rachford splitting. With `A' = mu A +
/// (. - w)/2` and `B'` likewise, the zero of `A' + B'` is `J_{mu(A+B)}(w)`,
/// and with step 2 each half step is a plain resolvent of the member.
fn sum_resolvent(terms: &[OperatorSpec], mu: f64, w: &Vector) -> Result<Vector> {
    match terms {
        [] => Err(Error::invalid("sum needs at least one term")),
        [t] => t.resolvent_scaled(mu, w),
        [a, rest @ ..] => {
            let tol = 1e-13 * (1.0 + w.norm());
            let mut v = *w;
            let mut xa = a.resolvent_scaled(mu, &((v + *w) * 0.5))?;
            for _ in 0..DR_MAX_ITER {
                xa = a.resolvent_scaled(mu, &((v + *w) * 0.5))?;
                let xb = sum_resolvent(rest, mu, &((xa * 2.0 - v + *w) * 0.5))?;
                let step = xb - xa;
                v += step;
                if step.norm() <= tol {
                    break;
                }
            }
            // An unconverged iterate still yields an exact graph pair after
            // the caller projects it; only its position is approximate.
            Ok(xa)
        }
    }
}

/// Pairwise monotonicity of a sample as a verdict; witnesses carry the
/// worst pair.
pub fn validate_monotone(sample: &GraphSample) -> Verdict {
    let mut v = Verdict::new(TheoremId::Monotone, MONOTONE_TOL);
    v.param("pairs", sample.len() as f64);
    let mut worst = f64::INFINITY;
    let mut worst_pair = None;
    for i in 0..sample.points.len() {
        for j in i + 1..sample.points.len() {
            let (a, b) = (&sample.points[i], &sample.points[j]);
            let p = a.pairing(&b.y, &b.ystar);
            if p < worst {
                worst = p;
                worst_pair = Some((i, j));
            }
        }
    }
    if let Some((i, j)) = worst_pair {
        let (a, b) = (&sample.points[i], &sample.points[j]);
        v.record(ExtReal::Finite(-worst), || {
            Witness::new(
                "worst pair (y_i, y_i*, y_j, y_j*)",
                alloc::vec![a.y, a.ystar, b.y, b.ystar],
                ExtReal::Finite(worst),
            )
        });
    }
    v
}

/// `min_i <y_i* - x*, y_i - x>` over the sample and whether it is `>= -tol`.
pub fn monotone_related(
    x: &Vector,
    xstar: &Vector,
    sample: &GraphSample,
    tol: f64,
) -> Result<(bool, f64)> {
    if sample.is_empty() {
        return Err(Error::invalid("monotone_related on an empty sample"));
    }
    x.check_dim(sample.dim())?;
    xstar.check_dim(sample.dim())?;
    let worst = sample
        .points
        .iter()
        .map(|p| p.pairing(x, xstar))
        .fold(f64::INFINITY, f64::min);
    Ok((worst >= -tol, worst))
}

/// Boxed helper used by checkers that build `T + S`.
pub fn sum_of(a: &OperatorSpec, b: &OperatorSpec) -> Result<OperatorSpec> {
    OperatorSpec::sum(alloc::vec![a.clone(), b.clone()])
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn v(c: &[f64]) -> Vector {
        Vector::new(c).unwrap()
    }

    fn identity(n: usize) -> OperatorSpec {
        OperatorSpec::linear(Matrix::identity(n)).unwrap()
    }

    fn unit_box() -> OperatorSpec {
        OperatorSpec::box_normal_cone(v(&[0.0]), v(&[1.0])).unwrap()
    }

    fn gp(y: &[f64], ys: &[f64]) -> GraphPoint {
        GraphPoint::new(v(y), v(ys)).unwrap()
    }

    #[test]
    fn evaluate_examples() {
        let g = OperatorSpec::norm_subdiff(1.0, v(&[0.0, 0.0])).unwrap();
        assert_eq!(
            g.evaluate(&v(&[0.0, 0.0])).unwrap(),
            ConvexSet::Ball {
                center: v(&[0.0, 0.0]),
                radius: 1.0
            }
        );
        let g2 = OperatorSpec::norm_subdiff(2.0, v(&[0.0, 0.0])).unwrap();
        assert_eq!(g2.evaluate(&v(&[3.0, 0.0])).unwrap(), ConvexSet::singleton(v(&[2.0, 0.0])));
        assert_eq!(unit_box().evaluate(&v(&[2.0])).unwrap(), ConvexSet::empty(1));
        assert_eq!(unit_box().evaluate(&v(&[0.5])).unwrap(), ConvexSet::singleton(v(&[0.0])));
        assert_eq!(
            unit_box().evaluate(&v(&[1.0])).unwrap(),
            ConvexSet::OrthantCone {
                apex: v(&[0.0]),
                signs: vec![Sign::Pos]
            }
        );
        assert!(identity(2).evaluate(&v(&[1.0])).is_err());
    }

    #[test]
    fn resolvent_examples() {
        assert_eq!(identity(1).resolvent_point(&v(&[2.0])).unwrap(), gp(&[1.0], &[1.0]));
        assert_eq!(unit_box().resolvent_point(&v(&[3.0])).unwrap(), gp(&[1.0], &[2.0]));
        let g = OperatorSpec::norm_subdiff(1.0, v(&[0.0])).unwrap();
        assert_eq!(g.resolvent_point(&v(&[0.5])).unwrap(), gp(&[0.0], &[0.5]));
    }

    #[test]
    fn smooth_resolvent_solves_fixed_point() {
        let s = OperatorSpec::smooth(SmoothId::Sqrt1p, 2).unwrap();
        let z = v(&[3.0, -4.0]);
        let p = s.resolvent_point(&z).unwrap();
        assert!((p.y + p.ystar - z).norm() < 1e-12);
        assert!((p.ystar - SmoothId::Sqrt1p.apply(&p.y)).norm() == 0.0);
    }

    #[test]
    fn sum_resolvent_lands_on_graph() {
        let t = sum_of(&unit_box(), &OperatorSpec::smooth(SmoothId::Sqrt1p, 1).unwrap()).unwrap();
        for z in [-3.0, -0.2, 0.4, 1.3, 5.0] {
            let p = t.resolvent_point(&v(&[z])).unwrap();
            assert!(t.evaluate(&p.y).unwrap().contains(&p.ystar, 1e-12).unwrap());
            assert!((p.y[0] + p.ystar[0] - z).abs() < 1e-9, "z={z} {p:?}");
        }
        let rot = Matrix::from_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]]).unwrap();
        let t = sum_of(
            &OperatorSpec::linear(rot).unwrap(),
            &OperatorSpec::norm_subdiff(0.7, v(&[0.3, 0.1])).unwrap(),
        )
        .unwrap();
        let z = v(&[1.0, 2.0]);
        let p = t.resolvent_point(&z).unwrap();
        assert!((p.y + p.ystar - z).norm() < 1e-9);
    }

    #[test]
    fn sample_graph_examples() {
        let s = identity(1).sample_graph(1, 1.0, 1.0).unwrap();
        assert_eq!(
            s.points,
            vec![gp(&[-0.5], &[-0.5]), gp(&[0.0], &[0.0]), gp(&[0.5], &[0.5])]
        );
        let b = unit_box().sample_graph(1, 3.0, 1.0).unwrap();
        assert!(b.points.contains(&gp(&[1.0], &[2.0])));
        assert!(b.points.contains(&gp(&[0.0], &[-2.0])));
        assert!(validate_monotone(&b).holds);
        assert!(matches!(
            identity(2).sample_graph(2, 10.0, 0.001),
            Err(Error::Resource(_))
        ));
    }

    #[test]
    fn validate_monotone_examples() {
        let ok = GraphSample::finite(vec![gp(&[0.0], &[0.0]), gp(&[1.0], &[1.0])]).unwrap();
        assert!(validate_monotone(&ok).holds);
        let bad = GraphSample::finite(vec![gp(&[0.0], &[1.0]), gp(&[1.0], &[0.0])]).unwrap();
        let verdict = validate_monotone(&bad);
        assert!(!verdict.holds);
        assert_eq!(verdict.worst_violation, ExtReal::Finite(1.0));
        assert_eq!(verdict.witnesses[0].value, ExtReal::Finite(-1.0));
        let err = OperatorSpec::finite_graph(bad).unwrap_err();
        assert!(format!("{err}").contains("pair 0"));
    }

    #[test]
    fn monotone_related_examples() {
        let s = GraphSample::finite(vec![gp(&[0.0], &[0.0]), gp(&[1.0], &[1.0])]).unwrap();
        assert_eq!(monotone_related(&v(&[0.5]), &v(&[0.5]), &s, 0.0).unwrap(), (true, 0.25));
        assert_eq!(monotone_related(&v(&[0.0]), &v(&[1.0]), &s, 0.0).unwrap(), (true, 0.0));
        assert_eq!(monotone_related(&v(&[0.5]), &v(&[-1.0]), &s, 0.0).unwrap(), (false, -0.5));
        let empty = GraphSample {
            points: vec![],
            source: "x".into(),
            truncation_radius: 1.0,
            density: 1.0,
            complete: true,
        };
        assert!(monotone_related(&v(&[0.0]), &v(&[0.0]), &empty, 0.0).is_err());
    }

    #[test]
    fn non_monotone_matrix_rejected() {
        let m = Matrix::from_rows(&[vec![1.0, 3.0], vec![0.0, 1.0]]).unwrap();
        assert!(OperatorSpec::linear(m).is_err());
        let m = Matrix::from_rows(&[vec![1.0, 2.0], vec![0.0, 1.0]]).unwrap();
        assert!(OperatorSpec::linear(m).is_ok());
    }

    #[test]
    fn singleton_sum_matches_member() {
        let g = OperatorSpec::norm_subdiff(1.0, v(&[0.0, 0.0])).unwrap();
        let s = OperatorSpec::sum(vec![g.clone()]).unwrap();
        for x in [v(&[0.0, 0.0]), v(&[1.0, -2.0])] {
            assert_eq!(s.evaluate(&x).unwrap(), g.evaluate(&x).unwrap());
        }
    }
}
