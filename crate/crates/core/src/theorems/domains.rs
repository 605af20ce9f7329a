//! Domain probes of the two enlargements compared with the analytic
//! domain of `T`.

use alloc::vec;

use crate::enlargements::{domain_probe, EnlargementKind};
use crate::operators::OperatorSpec;
use crate::verdict::{TheoremId, Verdict, Witness};
use crate::{Error, ExtReal, Result, Vector};

fn grid_dim(t: &OperatorSpec, grid: &[Vector], eps_list: &[f64]) -> Result<usize> {
    t.validate()?;
    let dim = grid
        .first()
        .map(|g| g.dim())
        .ok_or_else(|| Error::invalid("probe grid is empty"))?;
    if eps_list.is_empty() || eps_list.iter().any(|e| !(e.is_finite() && *e >= 0.0)) {
        return Err(Error::invalid("eps values must be a nonempty list of finite values >= 0"));
    }
    Ok(dim)
}

/// The norm-weighted probe must reproduce the domain indicator of `T`
/// exactly on every grid point, for every `eps`.
pub fn check_norm_weighted_domain(t: &OperatorSpec, eps_list: &[f64], grid: &[Vector]) -> Result<Verdict> {
    let dim = grid_dim(t, grid, eps_list)?;
    let dom = t.domain(dim)?;
    let mut v = Verdict::new(TheoremId::NormWeightedDomain, 0.0);
    let mut mismatches = 0usize;
    for &eps in eps_list {
        for (x, nonempty) in domain_probe(t, EnlargementKind::NormWeighted, eps, grid)? {
            let inside = dom.contains(&x, 0.0)?;
            if inside != nonempty {
                mismatches += 1;
                v.record(ExtReal::Finite(1.0), || {
                    Witness::new(
                        if inside {
                            "probe empty over a domain point (x)"
                        } else {
                            "probe nonempty off the domain (x)"
                        },
                        vec![x],
                        ExtReal::Finite(eps),
                    )
                });
            }
        }
    }
    v.param("grid_points", grid.len() as f64)
        .param("eps_count", eps_list.len() as f64)
        .param("mismatches", mismatches as f64);
    if let Some(&e) = eps_list.iter().max_by(|a, b| a.total_cmp(b)) {
        v.param("eps", e);
    }
    Ok(v)
}

/// Grid points where the constant-enlargement probe is nonempty must lie
/// within `tol` of the closed domain; empty points are unconstrained.
pub fn check_constant_domain_closure(
    t: &OperatorSpec,
    eps_list: &[f64],
    grid: &[Vector],
    tol: f64,
) -> Result<Verdict> {
    let dim = grid_dim(t, grid, eps_list)?;
    let dom = t.domain(dim)?;
    let mut v = Verdict::new(TheoremId::ConstantDomainClosure, tol);
    let (mut nonempty_count, mut empty_count) = (0usize, 0usize);
    for &eps in eps_list {
        for (x, nonempty) in domain_probe(t, EnlargementKind::Constant, eps, grid)? {
            if !nonempty {
                empty_count += 1;
                continue;
            }
            nonempty_count += 1;
            let d = dom.distance(&x)?;
            v.record(d, || Witness::new("constant enlargement nonempty off the closed domain (x)", vec![x], d));
        }
    }
    v.param("tol", tol)
        .param("nonempty", nonempty_count as f64)
        .param("empty", empty_count as f64);
    if let Some(&e) = eps_list.iter().max_by(|a, b| a.total_cmp(b)) {
        v.param("eps", e);
    }
    Ok(v)
}
