//! Executes the checks of a scenario and assembles the report.

use std::time::Instant;

use monotone_core::catalog::{self, CatalogEntry};
use monotone_core::operators::{validate_monotone, OperatorSpec};
use monotone_core::rng;
use monotone_core::theorems::{
    check_ball_inclusion, check_bounded_sum, check_compact_selection_batch, check_constant_domain_closure,
    check_enlarged_slope_chain, check_enlargement_closed_form, check_enlargement_cross_monotone,
    check_enlargement_domain, check_enlargement_maximality, check_norm_weighted_domain, check_penalized_slope,
    check_regularity_battery, BoundedSumSettings, EnlargementSettings,
};
use monotone_core::{ExtReal, TheoremId, Vector, Verdict};
use rand::Rng;
use rayon::prelude::*;

use crate::error::{CliError, CliResult};
use crate::report::{Provenance, Report, ReportEntry};
use crate::scenario::{CheckSpec, GridSpec, Scenario};

/// Exit code when every verdict holds.
pub const EXIT_HOLDS: i32 = 0;
/// Exit code when at least one verdict fails.
pub const EXIT_VIOLATION: i32 = 1;
/// Exit code for invalid input, configuration or IO.
pub const EXIT_INVALID: i32 = 2;

const DEFAULT_EPS: [f64; 3] = [0.0, 0.25, 1.0];
const DEFAULT_PROBE_EPS: [f64; 3] = [0.1, 0.7, 2.0];
const DEFAULT_GRID: GridSpec = GridSpec { lo: -1.0, hi: 2.0, points: 41 };
const MONOTONE_SAMPLE_BUDGET: usize = 1024;

/// Largest `eps` drawn for the enlarged-slope chain.
const CHAIN_EPS_MAX: f64 = 1.5;

/// Per-check seed: the scenario seed mixed with the check index, so two
/// checks of the same theorem draw different streams.
fn check_seed(seed: u64, index: usize) -> u64 {
    seed ^ (index as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

struct Ctx<'a> {
    scenario: &'a Scenario,
    check: &'a CheckSpec,
    seed: u64,
}

impl Ctx<'_> {
    fn entries(&self) -> CliResult<Vec<CatalogEntry>> {
        self.check
            .operators
            .iter()
            .map(|id| {
                let e = self.scenario.operator(id)?;
                Ok(CatalogEntry::new(id.clone(), self.scenario.dim_of(e)?, e.spec.clone()))
            })
            .collect()
    }

    fn enlargement_settings(&self) -> EnlargementSettings {
        crate::effective_enlargement(self.scenario)
    }

    fn eps(&self, default: &[f64]) -> Vec<f64> {
        self.check.params.eps.clone().unwrap_or_else(|| default.to_vec())
    }

    fn tol(&self, fallback: f64) -> f64 {
        self.scenario.tol_for(self.check, fallback)
    }

    /// Tolerance for checks whose verdict tolerance is fixed by the
    /// statement: a tighter requested value re-judges the verdict.
    fn tighten(&self, mut v: Verdict) -> Verdict {
        let t = self.tol(v.tol);
        if t < v.tol {
            v.tol = t;
            v.holds = v.holds && v.worst_violation.le(t);
        }
        v
    }
}

/// Folds per-operator verdicts into one.
fn merge(id: TheoremId, tol: f64, parts: Vec<Verdict>) -> Verdict {
    let mut out = Verdict::new(id, tol);
    for p in &parts {
        out.absorb(p);
        for (k, v) in &p.params {
            out.params.entry(k.clone()).or_insert(*v);
        }
    }
    out.param("operators", parts.len() as f64);
    out
}

/// [`merge`] at the tolerance the checker fixed for itself.
fn merge_own(id: TheoremId, parts: Vec<Verdict>) -> Verdict {
    let tol = parts.first().map_or(0.0, |v| v.tol);
    merge(id, tol, parts)
}

fn run_check(scenario: &Scenario, index: usize, seed: u64) -> CliResult<(Verdict, Provenance)> {
    let check = &scenario.checks[index];
    let ctx = Ctx {
        scenario,
        check,
        seed: check_seed(seed, index),
    };
    let id = check.theorem;
    let wrap = |e: CliError| match e {
        CliError::Core(source) => CliError::Check {
            index,
            theorem: id.as_str(),
            source,
        },
        other => other,
    };
    let enl = ctx.enlargement_settings();
    let mut radius = enl.radius;
    let mut density = enl.density;
    let verdict = (|| -> CliResult<Verdict> {
        let entries = ctx.entries()?;
        let p = &check.params;
        Ok(match id {
            TheoremId::Monotone => {
                let parts = entries
                    .iter()
                    .map(|e| {
                        let sample = match &e.operator {
                            OperatorSpec::FiniteGraph { sample } => sample.clone(),
                            op => {
                                let per_axis = monotone_core::enlargements::sample_axis_count(e.dim, MONOTONE_SAMPLE_BUDGET);
                                op.sample_graph(e.dim, enl.radius, 2.0 * enl.radius / (per_axis - 1) as f64)?
                            }
                        };
                        Ok(validate_monotone(&sample))
                    })
                    .collect::<CliResult<Vec<_>>>()?;
                ctx.tighten(merge_own(id, parts))
            }
            TheoremId::RegularityGap | TheoremId::QualifiedDomainRegularity => {
                let tol = ctx.tol(1e-3);
                let chosen: Vec<CatalogEntry> = if id == TheoremId::QualifiedDomainRegularity {
                    entries.into_iter().filter(|e| e.qualified_domain).collect()
                } else {
                    entries
                };
                if chosen.is_empty() {
                    return Err(CliError::invalid(format!("check {index}: no operator with a qualified domain")));
                }
                let r = check_regularity_battery(&chosen, p.queries.unwrap_or(200), ctx.seed, tol)?;
                if id == TheoremId::RegularityGap {
                    r.gap
                } else {
                    r.qualified
                }
            }
            TheoremId::PenalizedSlope => {
                let tol = ctx.tol(1e-3);
                let parts = entries
                    .iter()
                    .enumerate()
                    .map(|(k, e)| {
                        let mut rng = rng::stream(ctx.seed ^ k as u64, id.stream_id());
                        let qs = (0..p.queries.unwrap_or(50))
                            .map(|_| catalog::domain_query(&e.operator, e.dim, &mut rng))
                            .collect::<monotone_core::Result<Vec<_>>>()?;
                        Ok(check_penalized_slope(&e.operator, &qs, tol)?)
                    })
                    .collect::<CliResult<Vec<_>>>()?;
                merge(id, tol, parts)
            }
            TheoremId::BoundedSumMaximal => {
                let bounded_id = check
                    .bounded
                    .as_deref()
                    .ok_or_else(|| CliError::invalid(format!("check {index}: `bounded` operator is required")))?;
                let s = &scenario.operator(bounded_id)?.spec;
                let mut parts = Vec::new();
                for e in &entries {
                    let mut settings = BoundedSumSettings::for_dim(e.dim);
                    if let Some(r) = scenario.sampling.radius {
                        settings.radius = r;
                    }
                    if let Some(h) = scenario.sampling.density {
                        settings.density = h;
                    }
                    radius = settings.radius;
                    density = settings.density;
                    parts.push(check_bounded_sum(&e.operator, s, e.dim, p.trials.unwrap_or(500), settings, ctx.seed)?);
                }
                ctx.tighten(merge_own(id, parts))
            }
            TheoremId::CompactSelection | TheoremId::ConvexGraphSelection => {
                let tol = ctx.tol(1e-6);
                if id == TheoremId::ConvexGraphSelection {
                    if let Some(e) = entries.iter().find(|e| !e.convex_graph) {
                        return Err(CliError::invalid(format!(
                            "check {index}: operator `{}` does not have a convex non-gradient graph",
                            e.name
                        )));
                    }
                }
                let parts = entries
                    .iter()
                    .map(|e| Ok(check_compact_selection_batch(&e.operator, e.dim, p.instances.unwrap_or(200), ctx.seed, tol, id)?))
                    .collect::<CliResult<Vec<_>>>()?;
                merge(id, tol, parts)
            }
            TheoremId::BallInclusion => {
                let eps = ctx.eps(&DEFAULT_EPS);
                let parts = entries
                    .iter()
                    .map(|e| Ok(check_ball_inclusion(&e.operator, e.dim, &eps, p.trials.unwrap_or(1000), ctx.seed, enl)?))
                    .collect::<CliResult<Vec<_>>>()?;
                ctx.tighten(merge_own(id, parts))
            }
            TheoremId::EnlargementDomain => {
                let tol = ctx.tol(1e-6);
                let mut parts = Vec::new();
                for e in &entries {
                    for &eps in &ctx.eps(&[0.5]) {
                        parts.push(check_enlargement_domain(&e.operator, e.dim, eps, p.trials.unwrap_or(200), ctx.seed, tol, enl)?);
                    }
                }
                merge(id, tol, parts)
            }
            TheoremId::EnlargementClosedForm | TheoremId::EnlargementMaximality => {
                let eps = ctx.eps(&DEFAULT_EPS);
                let count = p.points.unwrap_or(if id == TheoremId::EnlargementMaximality { 2 } else { 4 });
                let parts = entries
                    .iter()
                    .enumerate()
                    .map(|(k, e)| {
                        let mut rng = rng::stream(ctx.seed ^ k as u64, id.stream_id());
                        let pts = (0..count)
                            .map(|_| catalog::domain_point(&e.operator, e.dim, &mut rng))
                            .collect::<monotone_core::Result<Vec<_>>>()?;
                        Ok(if id == TheoremId::EnlargementClosedForm {
                            check_enlargement_closed_form(&e.operator, &eps, &pts, enl)?
                        } else {
                            check_enlargement_maximality(&e.operator, &eps, &pts, enl)?
                        })
                    })
                    .collect::<CliResult<Vec<_>>>()?;
                ctx.tighten(merge_own(id, parts))
            }
            TheoremId::EnlargementCrossMonotone => {
                let parts = entries
                    .iter()
                    .map(|e| Ok(check_enlargement_cross_monotone(&e.operator, e.dim, p.trials.unwrap_or(1000), ctx.seed)?))
                    .collect::<CliResult<Vec<_>>>()?;
                ctx.tighten(merge_own(id, parts))
            }
            TheoremId::EnlargedSlopeChain => {
                let tol = ctx.tol(1e-3);
                let parts = entries
                    .iter()
                    .enumerate()
                    .map(|(k, e)| {
                        let mut rng = rng::stream(ctx.seed ^ k as u64, id.stream_id());
                        let qs = (0..p.queries.unwrap_or(100))
                            .map(|_| {
                                let (x, xs) = catalog::random_query(&e.operator, e.dim, &mut rng)?;
                                Ok((x, xs, CHAIN_EPS_MAX * rng.random::<f64>()))
                            })
                            .collect::<monotone_core::Result<Vec<(Vector, Vector, f64)>>>()?;
                        Ok(check_enlarged_slope_chain(&e.operator, &qs, tol)?)
                    })
                    .collect::<CliResult<Vec<_>>>()?;
                merge(id, tol, parts)
            }
            TheoremId::NormWeightedDomain | TheoremId::ConstantDomainClosure => {
                let eps = ctx.eps(&DEFAULT_PROBE_EPS);
                let grid = p.grid.unwrap_or(DEFAULT_GRID);
                let tol = ctx.tol(if id == TheoremId::NormWeightedDomain { 0.0 } else { 1e-9 });
                let parts = entries
                    .iter()
                    .map(|e| {
                        let g = grid.points(e.dim)?;
                        Ok(if id == TheoremId::NormWeightedDomain {
                            check_norm_weighted_domain(&e.operator, &eps, &g)?
                        } else {
                            check_constant_domain_closure(&e.operator, &eps, &g, tol)?
                        })
                    })
                    .collect::<CliResult<Vec<_>>>()?;
                merge(id, tol, parts)
            }
        })
    })()
    .map_err(wrap)?;
    let mut verdict = verdict;
    verdict.param("seed", ctx.seed as f64);
    Ok((
        verdict.clone(),
        Provenance {
            seed: ctx.seed,
            radius,
            density,
            tol: verdict.tol,
        },
    ))
}

/// Runs every check (in parallel when `jobs` allows) and assembles the
/// report in check order.
pub fn run_checks(scenario: &Scenario) -> CliResult<Report> {
    let seed = scenario.effective_seed()?;
    let timings = scenario.timings;
    let run = || {
        (0..scenario.checks.len())
            .into_par_iter()
            .map(|i| {
                let start = Instant::now();
                let (verdict, provenance) = run_check(scenario, i, seed)?;
                Ok(ReportEntry {
                    index: i,
                    operators: scenario.checks[i].operators.clone(),
                    verdict,
                    provenance,
                    runtime_ms: timings.then(|| start.elapsed().as_secs_f64() * 1e3),
                })
            })
            .collect::<CliResult<Vec<_>>>()
    };
    let entries = match scenario.jobs {
        Some(n) if n > 0 => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::invalid(format!("cannot start {n} workers: {e}")))?
            .install(run)?,
        _ => run()?,
    };
    Ok(Report {
        scenario: scenario.name.clone(),
        seed,
        entries,
    })
}

/// One line describing the worst failing verdict.
pub fn summarize_failure(e: &ReportEntry) -> String {
    let v = &e.verdict;
    let worst = match v.worst_violation {
        ExtReal::Finite(x) => crate::report::float(x),
        ExtReal::PosInf => "inf".into(),
    };
    let mut line = format!(
        "violation: check {} `{}` on [{}]: worst_violation {} > tol {}",
        e.index,
        v.theorem_id.as_str(),
        e.operators.join(", "),
        worst,
        crate::report::float(v.tol)
    );
    if let Some(w) = v.witnesses.first() {
        let pts: Vec<String> = w.points.iter().map(|p| format!("{:?}", p.as_slice())).collect();
        line.push_str(&format!("; witness {}: {}", w.label, pts.join(" ")));
    }
    line
}
