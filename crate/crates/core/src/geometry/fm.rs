//! Fourier–Motzkin feasibility for small polyhedra `{w : A w >= b}`.

use alloc::format;
use alloc::vec::Vec;

use super::Halfspace;
use crate::{Error, Result};

/// Largest dimension accepted by [`is_empty`].
pub const FM_MAX_DIM: usize = 4;
/// Largest number of distinct rows one elimination step may produce.
pub const FM_MAX_DERIVED: usize = 64;

const COEF_TOL: f64 = 1e-12;
const FEAS_TOL: f64 = 1e-9;

#[derive(Clone)]
struct Row {
    a: Vec<f64>,
    b: f64,
}

/// Scales the row so its largest coefficient has magnitude one. Returns
/// `None` for rows whose coefficients all vanish.
fn normalize(mut r: Row) -> Option<Row> {
    let m = r.a.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    if m <= COEF_TOL {
        return None;
    }
    for c in &mut r.a {
        *c /= m;
        if c.abs() <= COEF_TOL {
            *c = 0.0;
        }
    }
    r.b /= m;
    Some(r)
}

/// Sorts rows and merges those with equal coefficients (within tolerance),
/// keeping the tightest right-hand side.
fn dedup(mut rows: Vec<Row>) -> Vec<Row> {
    rows.sort_by(|x, y| {
        x.a.iter()
            .zip(&y.a)
            .map(|(p, q)| p.total_cmp(q))
            .find(|o| o.is_ne())
            .unwrap_or(core::cmp::Ordering::Equal)
    });
    let mut out: Vec<Row> = Vec::with_capacity(rows.len());
    for r in rows {
        if let Some(last) = out.last_mut() {
            if last.a.iter().zip(&r.a).all(|(p, q)| (p - q).abs() <= COEF_TOL) {
                last.b = last.b.max(r.b);
                continue;
            }
        }
        out.push(r);
    }
    out
}

/// Splits off vanishing rows; `Err(())` if one of them is infeasible.
fn prepare(rows: Vec<Row>) -> core::result::Result<Vec<Row>, ()> {
    let mut kept = Vec::with_capacity(rows.len());
    for r in rows {
        let b = r.b;
        match normalize(r) {
            Some(n) => kept.push(n),
            None => {
                if b > FEAS_TOL {
                    return Err(());
                }
            }
        }
    }
    Ok(dedup(kept))
}

pub(crate) fn is_empty(dim: usize, constraints: &[Halfspace]) -> Result<bool> {
    if dim > FM_MAX_DIM {
        return Err(Error::Resource(format!(
            "Fourier-Motzkin limited to dimension {FM_MAX_DIM}, got {dim}"
        )));
    }
    let rows: Vec<Row> = constraints
        .iter()
        .map(|c| Row {
            a: c.normal.to_vec(),
            b: c.offset,
        })
        .collect();
    let Ok(mut rows) = prepare(rows) else {
        return Ok(true);
    };
    let mut vars = dim;
    while vars > 1 {
        let k = vars - 1;
        let (mut pos, mut neg, mut rest) = (Vec::new(), Vec::new(), Vec::new());
        for r in rows {
            if r.a[k] > 0.0 {
                pos.push(r);
            } else if r.a[k] < 0.0 {
                neg.push(r);
            } else {
                rest.push(r);
            }
        }
        let mut derived = Vec::new();
        for p in &pos {
            for q in &neg {
                let (sp, sq) = (1.0 / p.a[k], 1.0 / -q.a[k]);
                derived.push(Row {
                    a: (0..k).map(|j| p.a[j] * sp + q.a[j] * sq).collect(),
                    b: p.b * sp + q.b * sq,
                });
            }
            if derived.len() > 64 * FM_MAX_DERIVED {
                derived = dedup(derived);
                if derived.len() > FM_MAX_DERIVED {
                    return Err(budget_error(derived.len()));
                }
            }
        }
        let Ok(derived) = prepare(derived) else {
            return Ok(true);
        };
        if derived.len() > FM_MAX_DERIVED {
            return Err(budget_error(derived.len()));
        }
        for r in &mut rest {
            r.a.truncate(k);
        }
        let Ok(next) = prepare(rest.into_iter().chain(derived).collect()) else {
            return Ok(true);
        };
        rows = next;
        vars = k;
    }
    // One variable left: every row is w >= b or -w >= b.
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    for r in &rows {
        if r.a[0] > 0.0 {
            lo = lo.max(r.b / r.a[0]);
        } else {
            hi = hi.min(r.b / r.a[0]);
        }
    }
    Ok(lo > hi + FEAS_TOL)
}

fn budget_error(count: usize) -> Error {
    Error::Resource(format!(
        "Fourier-Motzkin elimination produced {count} rows (budget {FM_MAX_DERIVED})"
    ))
}
