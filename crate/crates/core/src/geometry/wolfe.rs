//! Projection onto the convex hull of finitely many points (Wolfe's
//! minimum-norm-point algorithm).

use alloc::vec::Vec;

use crate::{Error, ExtReal, Result, Vector};

const MAX_MAJOR: usize = 10_000;

pub(super) fn project(vertices: &[Vector], p: &Vector) -> Result<Vector> {
    let shifted: Vec<Vector> = vertices.iter().map(|v| *v - *p).collect();
    Ok(*p + min_norm_point(&shifted)?)
}

/// Minimum-norm point of `conv(points)`.
fn min_norm_point(points: &[Vector]) -> Result<Vector> {
    let scale = points.iter().map(Vector::norm_sq).fold(0.0f64, f64::max).max(1e-300);
    let start = (0..points.len())
        .min_by(|&i, &j| points[i].norm_sq().total_cmp(&points[j].norm_sq()))
        .unwrap();
    let mut active: Vec<usize> = alloc::vec![start];
    let mut weights: Vec<f64> = alloc::vec![1.0];
    let mut x = points[start];
    for _ in 0..MAX_MAJOR {
        let (j, best) = points
            .iter()
            .enumerate()
            .map(|(j, q)| (j, x.dot(q)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        if x.norm_sq() - best <= 1e-13 * scale || active.contains(&j) {
            return Ok(x);
        }
        active.push(j);
        weights.push(0.0);
        loop {
            let alpha = affine_minimizer(points, &active);
            let Some(alpha) = alpha else {
                // Degenerate active set: drop the newest point and stop.
                active.pop();
                weights.pop();
                return Ok(combine(points, &active, &weights));
            };
            if alpha.iter().all(|&a| a > 1e-14) {
                weights = alpha;
                break;
            }
            let mut theta: f64 = 1.0;
            for (w, a) in weights.iter().zip(&alpha) {
                if *a <= 1e-14 {
                    theta = theta.min(w / (w - a));
                }
            }
            for (w, a) in weights.iter_mut().zip(&alpha) {
                *w += theta * (a - *w);
            }
            let mut k = 0;
            while k < active.len() {
                if weights[k] <= 1e-14 {
                    active.remove(k);
                    weights.remove(k);
                } else {
                    k += 1;
                }
            }
            let total: f64 = weights.iter().sum();
            for w in &mut weights {
                *w /= total;
            }
            if active.len() == 1 {
                weights[0] = 1.0;
                break;
            }
        }
        x = combine(points, &active, &weights);
    }
    Err(Error::numerical(
        "minimum-norm-point iteration did not converge",
        ExtReal::Finite(x.norm()),
    ))
}

fn combine(points: &[Vector], active: &[usize], weights: &[f64]) -> Vector {
    let mut x = Vector::zeros(points[0].dim());
    for (&i, w) in active.iter().zip(weights) {
        x += points[i] * *w;
    }
    x
}

/// Weights of the minimum-norm point of the affine hull of `active`:
/// solves `[G 1; 1^T 0] [alpha; mu] = [0; 1]` with `G = P^T P`.
fn affine_minimizer(points: &[Vector], active: &[usize]) -> Option<Vec<f64>> {
    let k = active.len();
    let m = k + 1;
    let mut a = alloc::vec![0.0; m * m];
    let mut rhs = alloc::vec![0.0; m];
    for r in 0..k {
        for c in 0..k {
            a[r * m + c] = points[active[r]].dot(&points[active[c]]);
        }
        a[r * m + k] = 1.0;
        a[k * m + r] = 1.0;
    }
    rhs[k] = 1.0;
    let scale = (0..k).map(|r| a[r * m + r]).fold(1.0f64, f64::max);
    for col in 0..m {
        let piv = (col..m).max_by(|&i, &j| a[i * m + col].abs().total_cmp(&a[j * m + col].abs()))?;
        if a[piv * m + col].abs() <= 1e-13 * scale {
            return None;
        }
        if piv != col {
            for c in 0..m {
                a.swap(col * m + c, piv * m + c);
            }
            rhs.swap(col, piv);
        }
        for r in 0..m {
            if r != col {
                let f = a[r * m + col] / a[col * m + col];
                if f != 0.0 {
                    for c in col..m {
                        a[r * m + c] -= f * a[col * m + c];
                    }
                    rhs[r] -= f * rhs[col];
                }
            }
        }
    }
    Some((0..k).map(|r| rhs[r] / a[r * m + r]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn v(c: &[f64]) -> Vector {
        Vector::new(c).unwrap()
    }

    #[test]
    fn projection_onto_triangle_edge_and_interior() {
        let tri = vec![v(&[0.0, 0.0]), v(&[2.0, 0.0]), v(&[0.0, 2.0])];
        let q = project(&tri, &v(&[2.0, 2.0])).unwrap();
        assert!((q[0] - 1.0).abs() < 1e-12 && (q[1] - 1.0).abs() < 1e-12);
        let inside = v(&[0.3, 0.4]);
        assert!(project(&tri, &inside).unwrap().dist(&inside) < 1e-12);
        let q = project(&tri, &v(&[-1.0, -1.0])).unwrap();
        assert!(q.norm() < 1e-12);
    }

    #[test]
    fn duplicate_and_collinear_vertices() {
        let pts = vec![v(&[0.0, 0.0]), v(&[1.0, 0.0]), v(&[1.0, 0.0]), v(&[2.0, 0.0])];
        let q = project(&pts, &v(&[1.5, 3.0])).unwrap();
        assert!((q[0] - 1.5).abs() < 1e-12 && q[1].abs() < 1e-12);
    }
}
