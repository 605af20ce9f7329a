//! Named operators used by the checker batteries, and seeded generators of
//! domain points and queries for them.

use alloc::vec;
use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;

use crate::geometry::{ball_point, ConvexSet};
use crate::operators::{OperatorSpec, SmoothId};
use crate::{Matrix, Result, Vector};

/// A named operator with its dimension and structural tags.
#[derive(Debug, Clone, PartialEq)]
pub struct CatalogEntry {
    pub name: String,
    pub dim: usize,
    pub operator: OperatorSpec,
    /// Closed convex domain, or a domain with nonempty interior (linear maps
    /// and box normal cones).
    pub qualified_domain: bool,
    /// Linear with a nonzero skew part, so the graph is a convex set that is
    /// not the graph of a gradient.
    pub convex_graph: bool,
}

impl CatalogEntry {
    /// Builds an entry and derives its tags from the operator.
    pub fn new(name: impl Into<String>, dim: usize, operator: OperatorSpec) -> Self {
        let qualified_domain = matches!(
            operator,
            OperatorSpec::Linear { .. } | OperatorSpec::BoxNormalCone { .. }
        );
        let convex_graph = match &operator {
            OperatorSpec::Linear { matrix } => (0..matrix.dim())
                .any(|i| (0..matrix.dim()).any(|j| matrix.get(i, j) != matrix.get(j, i))),
            _ => false,
        };
        CatalogEntry {
            name: name.into(),
            dim,
            operator,
            qualified_domain,
            convex_graph,
        }
    }
}

fn v(c: &[f64]) -> Vector {
    Vector::new(c).expect("catalog literal")
}

/// The maximal monotone catalog: identity on the line, a planar rotation,
/// a nonsymmetric positive semidefinite matrix, box normal cones on the
/// line and in the plane, a shifted norm subdifferential and the bounded
/// gradient `x / sqrt(1 + |x|^2)`.
pub fn regular_catalog() -> Vec<CatalogEntry> {
    let rotation = Matrix::from_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]]).expect("literal");
    let shear = Matrix::from_rows(&[vec![1.0, 2.0], vec![0.0, 1.0]]).expect("literal");
    vec![
        CatalogEntry::new("identity", 1, OperatorSpec::Linear { matrix: Matrix::identity(1) }),
        CatalogEntry::new("rotation", 2, OperatorSpec::Linear { matrix: rotation }),
        CatalogEntry::new("psd_nonsymmetric", 2, OperatorSpec::Linear { matrix: shear }),
        CatalogEntry::new(
            "box_normal_cone_1d",
            1,
            OperatorSpec::BoxNormalCone { lo: v(&[0.0]), hi: v(&[1.0]) },
        ),
        CatalogEntry::new(
            "box_normal_cone_2d",
            2,
            OperatorSpec::BoxNormalCone { lo: v(&[0.0, 0.0]), hi: v(&[1.0, 1.0]) },
        ),
        CatalogEntry::new(
            "norm_subdiff",
            2,
            OperatorSpec::NormSubdiff { lambda: 1.0, center: v(&[0.5, -0.25]) },
        ),
        CatalogEntry::new("sqrt1p_gradient", 2, OperatorSpec::SmoothGradient { id: SmoothId::Sqrt1p }),
    ]
}

/// Looks an entry up by name.
pub fn find(name: &str) -> Option<CatalogEntry> {
    regular_catalog().into_iter().find(|e| e.name == name)
}

/// Per-axis window `[lo, hi]` that contains the interesting part of the
/// domain with a margin of one.
pub fn window(op: &OperatorSpec, dim: usize) -> (Vector, Vector) {
    match op {
        OperatorSpec::BoxNormalCone { lo, hi } => (*lo - Vector::splat(dim, 1.0), *hi + Vector::splat(dim, 1.0)),
        OperatorSpec::NormSubdiff { center, .. } => {
            (*center - Vector::splat(dim, 2.0), *center + Vector::splat(dim, 2.0))
        }
        OperatorSpec::Sum { terms } => {
            let mut lo = Vector::splat(dim, -2.0);
            let mut hi = Vector::splat(dim, 2.0);
            for t in terms {
                if let OperatorSpec::BoxNormalCone { .. } = t {
                    let (l, h) = window(t, dim);
                    lo = l;
                    hi = h;
                }
            }
            (lo, hi)
        }
        _ => (Vector::splat(dim, -2.0), Vector::splat(dim, 2.0)),
    }
}

/// A uniform point of the window.
pub fn window_point<R: Rng + ?Sized>(op: &OperatorSpec, dim: usize, rng: &mut R) -> Vector {
    let (lo, hi) = window(op, dim);
    Vector::from_fn(dim, |i| lo[i] + (hi[i] - lo[i]) * rng.random::<f64>())
}

/// A point of the domain. Boxes put a third of their draws on a face and a
/// sixth on a corner; a norm subdifferential returns its center a quarter
/// of the time.
pub fn domain_point<R: Rng + ?Sized>(op: &OperatorSpec, dim: usize, rng: &mut R) -> Result<Vector> {
    let dom = op.domain(dim)?;
    Ok(match (&dom, op) {
        (ConvexSet::Box { lo, hi }, _) => {
            let mut p = Vector::from_fn(dim, |i| lo[i] + (hi[i] - lo[i]) * rng.random::<f64>());
            let u: f64 = rng.random();
            if u < 1.0 / 6.0 {
                p = Vector::from_fn(dim, |i| if rng.random::<bool>() { lo[i] } else { hi[i] });
            } else if u < 0.5 {
                let i = rng.random_range(0..dim);
                p.set(i, if rng.random::<bool>() { lo[i] } else { hi[i] });
            }
            p
        }
        (_, OperatorSpec::NormSubdiff { center, .. }) if rng.random::<f64>() < 0.25 => *center,
        _ => match dom.project(&window_point(op, dim, rng))? {
            Some(p) => p,
            None => return Err(crate::Error::invalid("operator has an empty domain")),
        },
    })
}

/// A point of `T(x)` plus a uniform perturbation of radius up to `spread`.
pub fn near_image<R: Rng + ?Sized>(
    op: &OperatorSpec,
    x: &Vector,
    spread: f64,
    rng: &mut R,
) -> Result<Vector> {
    let img = op.evaluate(x)?;
    let base = match img {
        ConvexSet::Empty { .. } => Vector::zeros(x.dim()),
        _ => img.sample_point(rng, 1.0)?,
    };
    Ok(base + ball_point(rng, x.dim()) * (spread * rng.random::<f64>()))
}

/// A query with `x` in the domain and `x*` within 2 of `T(x)`, so that
/// the slope is finite for a regular operator.
pub fn domain_query<R: Rng + ?Sized>(
    op: &OperatorSpec,
    dim: usize,
    rng: &mut R,
) -> Result<(Vector, Vector)> {
    let x = domain_point(op, dim, rng)?;
    let xstar = near_image(op, &x, 2.0, rng)?;
    Ok((x, xstar))
}

/// A query `(x, x*)`: 70% of `x` in the domain, the rest uniform over the
/// window; `x*` within 2 of a point of `T(x)` (of 0 off the domain).
pub fn random_query<R: Rng + ?Sized>(
    op: &OperatorSpec,
    dim: usize,
    rng: &mut R,
) -> Result<(Vector, Vector)> {
    let x = if rng.random::<f64>() < 0.7 {
        domain_point(op, dim, rng)?
    } else {
        window_point(op, dim, rng)
    };
    let xstar = near_image(op, &x, 2.0, rng)?;
    Ok((x, xstar))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_members_validate_and_are_tagged() {
        let cat = regular_catalog();
        assert_eq!(cat.len(), 7);
        for e in &cat {
            e.operator.validate().unwrap();
            if let Some(d) = e.operator.dim() {
                assert_eq!(d, e.dim);
            }
        }
        assert!(find("rotation").unwrap().convex_graph);
        assert!(find("box_normal_cone_1d").unwrap().qualified_domain);
        assert!(!find("norm_subdiff").unwrap().qualified_domain);
    }

    #[test]
    fn domain_points_lie_in_domain() {
        let mut rng = crate::rng::stream(1, 1);
        for e in regular_catalog() {
            let dom = e.operator.domain(e.dim).unwrap();
            for _ in 0..50 {
                let p = domain_point(&e.operator, e.dim, &mut rng).unwrap();
                assert!(dom.contains(&p, 0.0).unwrap());
                assert!(!matches!(e.operator.evaluate(&p).unwrap(), ConvexSet::Empty { .. }));
            }
        }
    }
}
