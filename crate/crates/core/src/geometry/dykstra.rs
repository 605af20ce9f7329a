//! Dykstra's cyclic projections onto an intersection of half-spaces.

use alloc::vec::Vec;

use super::{Halfspace, MAX_SWEEPS, PROJECTION_TOL};
use crate::{Error, ExtReal, Result, Vector};

/// Projects `p` onto `{w : <a_i, w> >= b_i}`. `Ok(None)` when a row with a
/// vanishing normal is violated.
pub(super) fn project(constraints: &[Halfspace], p: &Vector) -> Result<Option<Vector>> {
    let mut rows: Vec<(Vector, f64)> = Vec::with_capacity(constraints.len());
    for c in constraints {
        let n = c.normal.norm();
        if n <= 1e-300 {
            if c.offset > 0.0 {
                return Ok(None);
            }
            continue;
        }
        rows.push((c.normal * (1.0 / n), c.offset / n));
    }
    let mut x = *p;
    let mut incr = alloc::vec![Vector::zeros(p.dim()); rows.len()];
    for _ in 0..MAX_SWEEPS {
        let prev = x;
        for ((a, b), e) in rows.iter().zip(incr.iter_mut()) {
            let w = x + *e;
            let s = a.dot(&w);
            x = if s >= *b { w } else { w + *a * (b - s) };
            *e = w - x;
        }
        let violation = rows
            .iter()
            .map(|(a, b)| b - a.dot(&x))
            .fold(0.0f64, f64::max);
        if x.dist(&prev) <= 1e-2 * PROJECTION_TOL && violation <= 1e-1 * PROJECTION_TOL {
            return Ok(Some(x));
        }
    }
    Err(Error::numerical(
        "cyclic projections did not converge",
        ExtReal::Finite(p.dist(&x)),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn projects_onto_a_wedge() {
        // {w1 >= 0, w2 >= 0}; (-1, -2) projects to the corner.
        let cs = vec![
            Halfspace::new(Vector::new(&[1.0, 0.0]).unwrap(), 0.0),
            Halfspace::new(Vector::new(&[0.0, 1.0]).unwrap(), 0.0),
        ];
        let q = project(&cs, &Vector::new(&[-1.0, -2.0]).unwrap()).unwrap().unwrap();
        assert!(q.norm() < 1e-9);
        // {w1 + w2 >= 2}: (0,0) projects to (1,1)
        let cs = vec![Halfspace::new(Vector::new(&[1.0, 1.0]).unwrap(), 2.0)];
        let q = project(&cs, &Vector::new(&[0.0, 0.0]).unwrap()).unwrap().unwrap();
        assert!((q[0] - 1.0).abs() < 1e-9 && (q[1] - 1.0).abs() < 1e-9);
    }
}
