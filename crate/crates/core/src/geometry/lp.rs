//! Support function of `{w : A w >= b}` through its dual
//! `min -b^T y  s.t.  A^T y = -u, y >= 0`, solved by a dense two-phase simplex
//! (the dual has only `n <= MAX_DIM` equality rows).

#![allow(clippy::needless_range_loop)]

use alloc::vec::Vec;

use super::Halfspace;
use crate::{Error, ExtReal, Result, Vector};

const PIV_TOL: f64 = 1e-9;
const COST_TOL: f64 = 1e-10;

enum Outcome {
    Optimal(f64),
    Infeasible,
    Unbounded,
}

pub(super) fn support(dim: usize, constraints: &[Halfspace], u: &Vector) -> Result<ExtReal> {
    let mut cols: Vec<(Vector, f64)> = Vec::with_capacity(constraints.len());
    for c in constraints {
        let n = c.normal.norm();
        if n <= 1e-300 {
            if c.offset > 0.0 {
                return Err(Error::invalid("support of the empty set"));
            }
            continue;
        }
        cols.push((c.normal * (1.0 / n), c.offset / n));
    }
    match solve_dual(dim, &cols, u)? {
        Outcome::Optimal(v) => Ok(ExtReal::Finite(v)),
        Outcome::Unbounded => Err(Error::invalid("support of the empty set")),
        Outcome::Infeasible => {
            // Primal is unbounded along u or empty; the u = 0 problem tells.
            match solve_dual(dim, &cols, &Vector::zeros(dim))? {
                Outcome::Unbounded => Err(Error::invalid("support of the empty set")),
                _ => Ok(ExtReal::PosInf),
            }
        }
    }
}

pub(super) fn is_empty(dim: usize, constraints: &[Halfspace]) -> Result<bool> {
    let mut cols: Vec<(Vector, f64)> = Vec::with_capacity(constraints.len());
    for c in constraints {
        let n = c.normal.norm();
        if n <= 1e-300 {
            if c.offset > 0.0 {
                return Ok(true);
            }
            continue;
        }
        cols.push((c.normal * (1.0 / n), c.offset / n));
    }
    // The dual of the zero objective is always feasible; it is unbounded
    // exactly when a Farkas certificate of primal infeasibility exists.
    Ok(matches!(
        solve_dual(dim, &cols, &Vector::zeros(dim))?,
        Outcome::Unbounded
    ))
}

struct Tableau {
    rows: usize,
    width: usize,
    data: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.width + c]
    }

    fn rhs(&self, r: usize) -> f64 {
        self.at(r, self.width - 1)
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let w = self.width;
        let p = self.data[pr * w + pc];
        for c in 0..w {
            self.data[pr * w + c] /= p;
        }
        for r in 0..=self.rows {
            if r == pr {
                continue;
            }
            let f = self.data[r * w + pc];
            if f != 0.0 {
                for c in 0..w {
                    self.data[r * w + c] -= f * self.data[pr * w + c];
                }
            }
        }
        self.basis[pr] = pc;
    }

    /// Minimizes the objective stored in the last row over columns
    /// `< allowed`. Returns `false` when unbounded.
    fn optimize(&mut self, allowed: usize) -> Result<bool> {
        let obj = self.rows;
        let max_iter = 50 * (self.width + 20);
        let mut best = f64::INFINITY;
        let mut stall = 0usize;
        for _ in 0..max_iter {
            let bland = stall > 50;
            let mut enter = None;
            let mut most = -COST_TOL;
            for c in 0..allowed {
                let d = self.at(obj, c);
                if d < most {
                    enter = Some(c);
                    if bland {
                        break;
                    }
                    most = d;
                }
            }
            let Some(pc) = enter else {
                return Ok(true);
            };
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.rows {
                let a = self.at(r, pc);
                if a > PIV_TOL {
                    let ratio = self.rhs(r) / a;
                    match leave {
                        Some((lr, lratio))
                            if ratio > lratio + 1e-12
                                || (ratio >= lratio - 1e-12 && self.basis[r] > self.basis[lr]) => {}
                        _ => leave = Some((r, ratio)),
                    }
                }
            }
            let Some((pr, _)) = leave else {
                return Ok(false);
            };
            self.pivot(pr, pc);
            let value = -self.rhs(obj);
            if value < best - 1e-12 {
                best = value;
                stall = 0;
            } else {
                stall += 1;
            }
        }
        Err(Error::numerical("simplex iteration limit", ExtReal::PosInf))
    }
}

fn solve_dual(dim: usize, cols: &[(Vector, f64)], u: &Vector) -> Result<Outcome> {
    let m = cols.len();
    let n = dim;
    let width = m + n + 1;
    let mut t = Tableau {
        rows: n,
        width,
        data: alloc::vec![0.0; (n + 1) * width],
        basis: (m..m + n).collect(),
    };
    for r in 0..n {
        let rhs = -u[r];
        let sign = if rhs < 0.0 { -1.0 } else { 1.0 };
        for (c, (a, _)) in cols.iter().enumerate() {
            t.data[r * width + c] = sign * a[r];
        }
        t.data[r * width + m + r] = 1.0;
        t.data[r * width + width - 1] = sign * rhs;
    }
    // Phase 1: minimize the sum of artificials.
    for c in 0..width {
        if (m..m + n).contains(&c) {
            continue;
        }
        let s: f64 = (0..n).map(|r| t.data[r * width + c]).sum();
        t.data[n * width + c] = -s;
    }
    if !t.optimize(m + n)? {
        return Err(Error::Internal("phase-one simplex reported unbounded".into()));
    }
    let scale = 1.0 + u.norm();
    if -t.rhs(n) > 1e-9 * scale {
        return Ok(Outcome::Infeasible);
    }
    // Drive remaining artificials out of the basis where possible.
    for r in 0..n {
        if t.basis[r] >= m {
            if let Some(c) = (0..m).find(|&c| t.at(r, c).abs() > PIV_TOL) {
                t.pivot(r, c);
            }
        }
    }
    // Phase 2 objective: c_j = -b_j on original columns.
    for c in 0..width {
        t.data[n * width + c] = if c < m { -cols[c].1 } else { 0.0 };
    }
    for r in 0..n {
        let bc = t.basis[r];
        let cost = if bc < m { -cols[bc].1 } else { 0.0 };
        if cost != 0.0 {
            for c in 0..width {
                t.data[n * width + c] -= cost * t.data[r * width + c];
            }
        }
    }
    if !t.optimize(m)? {
        return Ok(Outcome::Unbounded);
    }
    Ok(Outcome::Optimal(-t.rhs(n)))
}
