//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Runs without the libtest harness so the lines always
//! show in `cargo test` output.

use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use monotone_core::catalog::{self, regular_catalog, CatalogEntry};
use monotone_core::enlargements::{domain_probe, EnlargementKind};
use monotone_core::operators::OperatorSpec;
use monotone_core::slope::{image_distance, slope_estimate, ONE_SIDED_TOL};
use monotone_core::theorems::{
    check_ball_inclusion, check_bounded_sum, check_compact_selection, check_compact_selection_batch,
    check_constant_domain_closure, check_enlarged_slope_chain, check_enlargement_closed_form,
    check_enlargement_cross_monotone, check_norm_weighted_domain, check_penalized_slope, check_regularity_battery,
    BoundedSumSettings, EnlargementSettings, SelectionOutcome,
};
use monotone_core::{rng, ConvexSet, ExtReal, Matrix, SmoothId, TheoremId, Vector, Verdict};
use rand::Rng;

const SEED: u64 = 20240601;

type Outcome = Result<String, String>;

fn vec(c: &[f64]) -> Vector {
    Vector::new(c).unwrap()
}

fn worst(v: &Verdict) -> String {
    match v.worst_violation {
        ExtReal::Finite(x) => format!("{x:.3e}"),
        ExtReal::PosInf => "inf".into(),
    }
}

fn judge(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn fold(id: TheoremId, tol: f64, parts: impl IntoIterator<Item = Verdict>) -> Verdict {
    let mut out = Verdict::new(id, tol);
    for p in parts {
        out.absorb(&p);
    }
    out
}

fn unwrap<T>(r: monotone_core::Result<T>) -> Result<T, String> {
    r.map_err(|e| format!("error: {e}"))
}

fn regularity_equality() -> Outcome {
    let start = Instant::now();
    let report = unwrap(check_regularity_battery(&regular_catalog(), 200, SEED, 1e-3))?;
    let elapsed = start.elapsed();
    judge(
        report.gap.holds && elapsed < Duration::from_secs(30),
        format!(
            "7 operators x 200 queries, worst |L - d| {} (tol 1e-3), {:.2} s (limit 30 s)",
            worst(&report.gap),
            elapsed.as_secs_f64()
        ),
    )
}

fn one_sided_bound() -> Outcome {
    let (mut total, mut infinite, mut excess) = (0usize, 0usize, f64::NEG_INFINITY);
    let mut bad = Vec::new();
    for (k, e) in regular_catalog().iter().enumerate() {
        let mut r = rng::stream(SEED ^ k as u64, 2);
        for _ in 0..200 {
            let (x, xs) = unwrap(catalog::random_query(&e.operator, e.dim, &mut r))?;
            let l = unwrap(slope_estimate(&e.operator, &x, &xs, 2.5e-4))?.value;
            total += 1;
            match unwrap(image_distance(&e.operator, &x, &xs))? {
                ExtReal::PosInf => infinite += 1,
                ExtReal::Finite(d) => match l {
                    ExtReal::Finite(lv) => {
                        excess = excess.max(lv - d);
                        if lv > d + ONE_SIDED_TOL {
                            bad.push(e.name.clone());
                        }
                    }
                    ExtReal::PosInf => bad.push(e.name.clone()),
                },
            }
        }
    }
    judge(
        bad.is_empty(),
        format!("{total} queries ({infinite} with infinite d), max L - d {excess:.3e} (tol 1e-9), failures {bad:?}"),
    )
}

fn ball_inclusion() -> Outcome {
    let s = EnlargementSettings::default();
    let parts = regular_catalog()
        .iter()
        .map(|e| unwrap(check_ball_inclusion(&e.operator, e.dim, &[0.0, 0.25, 1.0], 1000, SEED, s)))
        .collect::<Result<Vec<_>, _>>()?;
    let v = fold(TheoremId::BallInclusion, 1e-9, parts);
    judge(
        v.holds,
        format!("7 operators x 1000 inclusions, worst slack deficit {} (tol 1e-9), failures {}", worst(&v), v.witnesses.len()),
    )
}

fn closed_form() -> Outcome {
    let s = EnlargementSettings::default();
    let start = Instant::now();
    let mut parts = Vec::new();
    for (k, e) in regular_catalog().iter().enumerate() {
        let mut r = rng::stream(SEED ^ k as u64, 4);
        let pts = (0..4)
            .map(|_| catalog::domain_point(&e.operator, e.dim, &mut r))
            .collect::<monotone_core::Result<Vec<_>>>();
        parts.push(unwrap(check_enlargement_closed_form(&e.operator, &[0.0, 0.25, 1.0], &unwrap(pts)?, s))?);
    }
    let elapsed = start.elapsed();
    let v = fold(TheoremId::EnlargementClosedForm, s.closed_form_tol(), parts);
    judge(
        v.holds && elapsed < Duration::from_secs(10),
        format!(
            "eps in {{0, 0.25, 1}}, 32 directions, worst Hausdorff {} (tol {:.3e}), {:.2} s (limit 10 s)",
            worst(&v),
            s.closed_form_tol(),
            elapsed.as_secs_f64()
        ),
    )
}

fn cross_monotone() -> Outcome {
    let parts = regular_catalog()
        .iter()
        .map(|e| unwrap(check_enlargement_cross_monotone(&e.operator, e.dim, 1000, SEED)))
        .collect::<Result<Vec<_>, _>>()?;
    let v = fold(TheoremId::EnlargementCrossMonotone, 1e-9, parts);
    judge(v.holds, format!("7 operators x 1000 draws, worst slack deficit {} (tol 1e-9)", worst(&v)))
}

fn slope_chain() -> Outcome {
    let mut parts = Vec::new();
    for (k, e) in regular_catalog().iter().enumerate() {
        let mut r = rng::stream(SEED ^ k as u64, 6);
        let mut qs = Vec::new();
        for _ in 0..100 {
            let (x, xs) = unwrap(catalog::random_query(&e.operator, e.dim, &mut r))?;
            qs.push((x, xs, 1.5 * r.random::<f64>()));
        }
        parts.push(unwrap(check_enlarged_slope_chain(&e.operator, &qs, 1e-3))?);
    }
    let v = fold(TheoremId::EnlargedSlopeChain, 1e-3, parts);
    judge(
        v.holds,
        format!("7 operators x 100 draws, worst gap {} (tol 1e-3; ball-distance agreement tol 1e-8)", worst(&v)),
    )
}

fn probe_operators() -> Vec<CatalogEntry> {
    vec![
        CatalogEntry::new("box", 1, OperatorSpec::box_normal_cone(vec(&[0.0]), vec(&[1.0])).unwrap()),
        CatalogEntry::new("identity", 1, OperatorSpec::linear(Matrix::identity(1)).unwrap()),
        CatalogEntry::new("norm_subdiff", 1, OperatorSpec::norm_subdiff(1.0, vec(&[0.0])).unwrap()),
    ]
}

fn probe_grid() -> Vec<Vector> {
    (0..41).map(|k| vec(&[-1.0 + 3.0 * k as f64 / 40.0])).collect()
}

const PROBE_EPS: [f64; 3] = [0.1, 0.7, 2.0];

fn norm_weighted_domain() -> Outcome {
    let mut mismatches = 0.0;
    let mut held = true;
    for e in probe_operators() {
        let verdict = unwrap(check_norm_weighted_domain(&e.operator, &PROBE_EPS, &probe_grid()))?;
        held &= verdict.holds;
        mismatches += verdict.params["mismatches"];
    }
    judge(held && mismatches == 0.0, format!("3 operators x 3 eps x 41 points, {mismatches} mismatches"))
}

fn constant_domain_closure() -> Outcome {
    let mut parts = Vec::new();
    for e in probe_operators() {
        parts.push(unwrap(check_constant_domain_closure(&e.operator, &PROBE_EPS, &probe_grid(), 1e-9))?);
    }
    let v = fold(TheoremId::ConstantDomainClosure, 1e-9, parts);
    let unit_box = &probe_operators()[0].operator;
    let mut planted_empty = true;
    for eps in PROBE_EPS {
        let probe = unwrap(domain_probe(unit_box, EnlargementKind::Constant, eps, &[vec(&[2.0])]))?;
        planted_empty &= !probe[0].1;
    }
    judge(
        v.holds && planted_empty,
        format!("worst distance to closed domain {} (tol 1e-9), x = 2 for box [0, 1] empty: {planted_empty}", worst(&v)),
    )
}

fn compact_selection() -> Outcome {
    let mut parts = Vec::new();
    let mut held = 0.0;
    for e in regular_catalog() {
        let verdict = unwrap(check_compact_selection_batch(&e.operator, e.dim, 200, SEED, 1e-6, TheoremId::CompactSelection))?;
        held += verdict.params["hypothesis_held"];
        parts.push(verdict);
    }
    let v = fold(TheoremId::CompactSelection, 1e-6, parts);
    // A planted failure: C = [1, 2] against the identity at 0.
    let id = OperatorSpec::linear(Matrix::identity(1)).unwrap();
    let c = ConvexSet::polytope(vec![vec(&[1.0]), vec(&[2.0])]).unwrap();
    let (planted, outcome) = unwrap(check_compact_selection(&id, &vec(&[0.0]), &c, 1e-6))?;
    let witnessed = outcome == SelectionOutcome::HypothesisFailed && planted.holds && !planted.witnesses.is_empty();
    judge(
        v.holds && witnessed,
        format!(
            "7 operators x 200 instances ({held} with the hypothesis), worst gap {} (tol 1e-6), planted failure re-evaluated: {witnessed}",
            worst(&v)
        ),
    )
}

fn bounded_sum_and_penalty() -> Outcome {
    let s = OperatorSpec::smooth(SmoothId::Sqrt1p, 1).unwrap();
    let cat = regular_catalog();
    let mut sums = Vec::new();
    for name in ["box_normal_cone_1d", "identity", "box_normal_cone_2d", "rotation"] {
        let e = cat.iter().find(|e| e.name == name).unwrap();
        let settings = BoundedSumSettings::for_dim(e.dim);
        sums.push(unwrap(check_bounded_sum(&e.operator, &s, e.dim, 500, settings, SEED))?);
    }
    // Each part is judged against its own band; the fold only keeps the
    // worst distance and the combined outcome.
    let band = sums.iter().map(|v| v.tol).fold(0.0, f64::max);
    let sum = fold(TheoremId::BoundedSumMaximal, band, sums);
    let mut pens = Vec::new();
    let mut used = 0.0;
    for (k, e) in cat.iter().enumerate() {
        if matches!(e.operator, OperatorSpec::SmoothGradient { .. }) {
            continue;
        }
        let mut r = rng::stream(SEED ^ k as u64, 10);
        let qs = (0..50)
            .map(|_| catalog::domain_query(&e.operator, e.dim, &mut r))
            .collect::<monotone_core::Result<Vec<_>>>();
        let verdict = unwrap(check_penalized_slope(&e.operator, &unwrap(qs)?, 1e-3))?;
        used += verdict.params["queries"];
        pens.push(verdict);
    }
    let pen = fold(TheoremId::PenalizedSlope, 1e-3, pens);
    judge(
        sum.holds && pen.holds,
        format!(
            "4 operators x 500 trials, worst distance to G(T+S) {} (band 5h: {:.3e} in 1-D, {:.3e} in 2-D); {used} finite-lambda queries, worst penalized slope {} (tol 1e-3)",
            worst(&sum),
            BoundedSumSettings::for_dim(1).band(),
            BoundedSumSettings::for_dim(2).band(),
            worst(&pen)
        ),
    )
}

fn determinism() -> Outcome {
    let scenario = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios/full-battery.json");
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut reports = Vec::new();
    for name in ["first.json", "second.json"] {
        let out = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_monotone"))
            .arg("check")
            .arg(&scenario)
            .arg("--out")
            .arg(&out)
            .env_remove("MONOTONE_SEED")
            .status()
            .map_err(|e| e.to_string())?;
        if status.code() != Some(0) {
            return Err(format!("full-battery exited with {status}"));
        }
        reports.push(std::fs::read(&out).map_err(|e| e.to_string())?);
    }
    judge(
        reports[0] == reports[1],
        format!("two full-battery runs, exit 0, {} bytes each, identical: {}", reports[0].len(), reports[0] == reports[1]),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("regularity equality", regularity_equality),
        ("one-sided bound L <= d", one_sided_bound),
        ("ball inclusion", ball_inclusion),
        ("closed form of the norm-weighted enlargement", closed_form),
        ("cross monotonicity", cross_monotone),
        ("enlarged slope chain", slope_chain),
        ("norm-weighted enlargement domain", norm_weighted_domain),
        ("constant enlargement domain closure", constant_domain_closure),
        ("compact selection", compact_selection),
        ("bounded sums and penalized slope", bounded_sum_and_penalty),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (tag, detail) = match run() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("{tag} criterion {:>2} {name}: {detail} [{:.2} s]", k + 1, start.elapsed().as_secs_f64());
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
