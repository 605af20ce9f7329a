//! Sums with a bounded gradient and with a slope-weighted distance penalty.

use alloc::vec;

use rand::Rng;

use crate::catalog;
use crate::geometry::ball_point;
use crate::operators::{sum_of, OperatorSpec, MONOTONE_TOL};
use crate::slope::{estimator_tol, image_distance, slope_estimate};
use crate::verdict::{TheoremId, Verdict, Witness};
use crate::{Error, ExtReal, Matrix, Result, Vector};

use super::{require_maximal, stream};

/// Related points whose slope against `T` alone is also estimated.
const SLOPE_CHECKS: usize = 25;
/// Accuracy of those slope estimates.
const SLOPE_TOL: f64 = 1e-6;

/// Sampling of `G(T + S)` for the bounded-sum search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundedSumSettings {
    pub radius: f64,
    pub density: f64,
}

impl BoundedSumSettings {
    /// Radius 4; step 0.01 on the line, otherwise about 4096 grid points.
    pub fn for_dim(dim: usize) -> Self {
        let radius = 4.0;
        let density = if dim == 1 {
            0.01
        } else {
            let per_axis = crate::enlargements::sample_axis_count(dim, 4096);
            2.0 * radius / (per_axis - 1) as f64
        };
        BoundedSumSettings { radius, density }
    }

    /// Graph tolerance band `5 h`.
    pub fn band(&self) -> f64 {
        5.0 * self.density
    }
}

/// Randomized search for points monotonically related to a sample of
/// `G(T + S)` that lie off the graph, where `S` is a bounded gradient.
///
/// Candidates are perturbed sample pairs, window points near the image and
/// planted points outside `D_T`. Only candidates with `|x + x*|_inf <= R/2`
/// are judged, so the sampling boundary cannot manufacture related points.
/// A related candidate must satisfy `d(x*, (T + S)(x)) <= 5h` and
/// `L(x, x*, T) <= M + 5h` (checked for the first few related ones).
pub fn check_bounded_sum(
    t: &OperatorSpec,
    s: &OperatorSpec,
    dim: usize,
    trials: usize,
    settings: BoundedSumSettings,
    seed: u64,
) -> Result<Verdict> {
    require_maximal(t, dim)?;
    let bound = match s {
        OperatorSpec::SmoothGradient { id } => id.bound(),
        _ => return Err(Error::invalid("the bounded term must be a smooth gradient")),
    };
    let sum = sum_of(t, s)?;
    let (r, h) = (settings.radius, settings.density);
    let band = settings.band();
    let sample = sum.sample_graph(dim, r, h)?;
    let dom_t = t.domain(dim)?;
    let mut rng = stream(seed, TheoremId::BoundedSumMaximal);
    let mut v = Verdict::new(TheoremId::BoundedSumMaximal, band);
    let (mut judged, mut related, mut slopes) = (0usize, 0usize, 0usize);
    for _ in 0..trials {
        let u: f64 = rng.random();
        let (x, xstar) = if u < 0.4 {
            let p = sample.points[rng.random_range(0..sample.len())];
            (
                p.y + ball_point(&mut rng, dim) * (3.0 * h),
                p.ystar + ball_point(&mut rng, dim) * (3.0 * h),
            )
        } else if u < 0.8 || dom_t == crate::ConvexSet::whole(dim) {
            let x = catalog::window_point(&sum, dim, &mut rng);
            let xstar = if dom_t.contains(&x, 0.0)? {
                catalog::near_image(&sum, &x, 4.0 * h, &mut rng)?
            } else {
                ball_point(&mut rng, dim) * (r / 4.0)
            };
            (x, xstar)
        } else {
            let x = outside_point(&sum, &dom_t, dim, &mut rng)?;
            (x, ball_point(&mut rng, dim) * (r / 4.0))
        };
        if (x + xstar).max_abs() > r / 2.0 {
            continue;
        }
        judged += 1;
        let (is_related, _) = crate::operators::monotone_related(&x, &xstar, &sample, MONOTONE_TOL)?;
        if !is_related {
            continue;
        }
        related += 1;
        let d = image_distance(&sum, &x, &xstar)?;
        v.record(d, || {
            Witness::new("related point off the graph of T + S (x, x*)", vec![x, xstar], d)
        });
        if slopes < SLOPE_CHECKS {
            slopes += 1;
            let l = match slope_estimate(t, &x, &xstar, SLOPE_TOL) {
                Ok(res) => res.value,
                Err(Error::Numerical { best, .. }) => best,
                Err(e) => return Err(e),
            };
            let excess = match l {
                ExtReal::Finite(l) => ExtReal::Finite(l - bound),
                ExtReal::PosInf => ExtReal::PosInf,
            };
            v.record(excess, || {
                Witness::new("slope against T exceeds the gradient bound (x, x*)", vec![x, xstar], l)
            });
        }
    }
    v.param("R", r)
        .param("h", h)
        .param("tol_h", band)
        .param("M", bound)
        .param("trials", trials as f64)
        .param("judged", judged as f64)
        .param("related", related as f64)
        .param("seed", seed as f64);
    Ok(v)
}

/// A window point outside `dom`, pushed out by up to 1.
fn outside_point<R: Rng + ?Sized>(
    op: &OperatorSpec,
    dom: &crate::ConvexSet,
    dim: usize,
    rng: &mut R,
) -> Result<Vector> {
    for _ in 0..64 {
        let x = catalog::window_point(op, dim, rng);
        if !dom.contains(&x, 1e-3)? {
            return Ok(x);
        }
    }
    Err(Error::Internal("no window point outside the domain".into()))
}

/// Adding `lambda d(., x)` with `lambda = L(x, x*, T)` makes the slope of
/// the sum vanish at `(x, x*)`. Queries with infinite slope are skipped
/// (kept as notes); a slope below `1e-12` adds the zero operator instead.
pub fn check_penalized_slope(
    t: &OperatorSpec,
    queries: &[(Vector, Vector)],
    tol: f64,
) -> Result<Verdict> {
    let dim = queries.first().map_or(t.dim().unwrap_or(1), |q| q.0.dim());
    require_maximal(t, dim)?;
    let est = estimator_tol(tol);
    let mut v = Verdict::new(TheoremId::PenalizedSlope, tol);
    let (mut used, mut skipped) = (0usize, 0usize);
    let mut lambda_max = 0.0f64;
    for (x, xstar) in queries {
        let lambda = match slope_estimate(t, x, xstar, est) {
            Ok(r) => r.value,
            Err(Error::Numerical { best, .. }) => {
                v.fail(Witness::new("slope of T did not settle (x, x*)", vec![*x, *xstar], best));
                continue;
            }
            Err(e) => return Err(e),
        };
        let ExtReal::Finite(lambda) = lambda else {
            skipped += 1;
            v.note(Witness::new("infinite slope, skipped (x, x*)", vec![*x, *xstar], ExtReal::PosInf));
            continue;
        };
        used += 1;
        lambda_max = lambda_max.max(lambda);
        let penalty = if lambda <= 1e-12 {
            OperatorSpec::linear(Matrix::zeros(x.dim()))?
        } else {
            OperatorSpec::norm_subdiff(lambda, *x)?
        };
        let combined = sum_of(t, &penalty)?;
        let l = match slope_estimate(&combined, x, xstar, est) {
            Ok(r) => r.value,
            Err(Error::Numerical { best, .. }) => {
                v.fail(Witness::new("slope of the penalized sum did not settle (x, x*)", vec![*x, *xstar], best));
                continue;
            }
            Err(e) => return Err(e),
        };
        v.record(l, || Witness::new("penalized slope is positive (x, x*)", vec![*x, *xstar], l));
    }
    v.param("tol", tol)
        .param("estimator_tol", est)
        .param("queries", used as f64)
        .param("skipped", skipped as f64)
        .param("lambda", lambda_max);
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::SmoothId;

    fn v(c: &[f64]) -> Vector {
        Vector::new(c).unwrap()
    }

    fn unit_box() -> OperatorSpec {
        OperatorSpec::box_normal_cone(v(&[0.0]), v(&[1.0])).unwrap()
    }

    #[test]
    fn box_plus_bounded_gradient_has_no_related_outliers() {
        let s = OperatorSpec::smooth(SmoothId::Sqrt1p, 1).unwrap();
        let verdict = check_bounded_sum(&unit_box(), &s, 1, 500, BoundedSumSettings::for_dim(1), 7).unwrap();
        assert!(verdict.holds, "{verdict:?}");
        assert!(verdict.params["related"] > 0.0);
    }

    #[test]
    fn graph_points_of_the_sum_are_related_at_distance_zero() {
        let s = OperatorSpec::smooth(SmoothId::Sqrt1p, 1).unwrap();
        let sum = sum_of(&unit_box(), &s).unwrap();
        let sample = sum.sample_graph(1, 4.0, 0.01).unwrap();
        let x = v(&[0.4]);
        let xstar = s.evaluate(&x).unwrap().project(&v(&[0.0])).unwrap().unwrap();
        let (related, _) = crate::operators::monotone_related(&x, &xstar, &sample, MONOTONE_TOL).unwrap();
        assert!(related);
        assert_eq!(image_distance(&sum, &x, &xstar).unwrap(), ExtReal::ZERO);
    }

    #[test]
    fn planted_outside_point_is_not_related() {
        let s = OperatorSpec::smooth(SmoothId::Sqrt1p, 1).unwrap();
        let sum = sum_of(&unit_box(), &s).unwrap();
        let sample = sum.sample_graph(1, 4.0, 0.01).unwrap();
        for xstar in [-1.0, 0.0, 0.5, 1.5] {
            let (related, worst) = crate::operators::monotone_related(&v(&[1.5]), &v(&[xstar]), &sample, MONOTONE_TOL).unwrap();
            assert!(!related && worst < 0.0);
        }
    }

    #[test]
    fn bounded_term_must_be_a_gradient() {
        assert!(check_bounded_sum(&unit_box(), &unit_box(), 1, 1, BoundedSumSettings::for_dim(1), 0).is_err());
    }

    #[test]
    fn identity_penalized_at_zero_two() {
        let t = OperatorSpec::linear(Matrix::identity(1)).unwrap();
        let verdict = check_penalized_slope(&t, &[(v(&[0.0]), v(&[2.0]))], 1e-3).unwrap();
        assert!(verdict.holds, "{verdict:?}");
        assert!((verdict.params["lambda"] - 2.0).abs() < 1e-3);
    }

    #[test]
    fn graph_point_uses_zero_penalty() {
        let t = OperatorSpec::linear(Matrix::identity(1)).unwrap();
        let verdict = check_penalized_slope(&t, &[(v(&[0.7]), v(&[0.7]))], 1e-3).unwrap();
        assert!(verdict.holds);
        assert_eq!(verdict.worst_violation, ExtReal::ZERO);
    }

    #[test]
    fn rotation_penalized_at_origin() {
        let t = OperatorSpec::linear(Matrix::from_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]]).unwrap()).unwrap();
        let verdict = check_penalized_slope(&t, &[(v(&[0.0, 0.0]), v(&[1.0, 0.0]))], 1e-3).unwrap();
        assert!(verdict.holds, "{verdict:?}");
        assert!((verdict.params["lambda"] - 1.0).abs() < 1e-3);
    }

    #[test]
    fn infinite_slope_is_skipped() {
        let verdict = check_penalized_slope(&unit_box(), &[(v(&[2.0]), v(&[0.0]))], 1e-3).unwrap();
        assert!(verdict.holds);
        assert_eq!(verdict.params["skipped"], 1.0);
    }
}
