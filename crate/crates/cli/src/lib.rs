//! Scenario runner for `monotone-core`: loads JSON scenarios, runs the
//! checks and writes JSON or CSV reports.
//!
//! Exit codes: 0 when every verdict holds, 1 when at least one fails (the
//! worst is summarized on standard error), 2 for invalid input,
//! configuration or IO.

pub mod error;
pub mod report;
pub mod run;
pub mod scenario;

use std::path::Path;

use monotone_core::catalog;
use monotone_core::enlargements::{
    domain_probe, enlargement_membership, enlargement_polyhedron, image_plus_ball, EnlargementKind, EnlargementQuery,
    GraphSource,
};
use monotone_core::geometry::direction_grid;
use monotone_core::operators::{validate_monotone, OperatorSpec};
use monotone_core::slope::{image_distance, slope_enlarged, slope_estimate, SlopeResult};
use monotone_core::theorems::EnlargementSettings;
use monotone_core::{ExtReal, TheoremId, Vector};
use serde::Serialize;

pub use error::{CliError, CliResult};
pub use report::{Provenance, Report, ReportEntry};
pub use run::{EXIT_HOLDS, EXIT_INVALID, EXIT_VIOLATION};
pub use scenario::{Format, Overrides, Scenario};

/// Loads, validates and runs a scenario, writes its report and returns the
/// exit code. Diagnostics go to standard error.
pub fn run_scenario(path: &Path, overrides: &Overrides) -> i32 {
    finish(check_scenario(path, overrides))
}

/// Like [`run_scenario`] but returns the report instead of writing it.
pub fn check_scenario(path: &Path, overrides: &Overrides) -> CliResult<Report> {
    let scenario = load(path, overrides)?;
    let report = run::run_checks(&scenario)?;
    write_report(&report, &scenario)?;
    Ok(report)
}

/// Validates every operator of a scenario and reports one monotonicity
/// verdict per operator (finite graphs exactly, operators on their
/// sampled graph).
pub fn validate_scenario(path: &Path, overrides: &Overrides) -> i32 {
    finish((|| {
        let scenario = load(path, overrides)?;
        let seed = scenario.effective_seed()?;
        let settings = effective_enlargement(&scenario);
        let mut entries = Vec::new();
        for (index, op) in scenario.operators.iter().enumerate() {
            let dim = scenario.dim_of(op)?;
            let sample = match &op.spec {
                OperatorSpec::FiniteGraph { sample } => sample.clone(),
                spec => sampled(spec, dim, &settings)?,
            };
            let verdict = validate_monotone(&sample);
            entries.push(ReportEntry {
                index,
                operators: vec![op.id.clone()],
                provenance: Provenance {
                    seed,
                    radius: sample.truncation_radius,
                    density: sample.density,
                    tol: verdict.tol,
                },
                verdict,
                runtime_ms: None,
            });
        }
        let report = Report {
            scenario: scenario.name.clone(),
            seed,
            entries,
        };
        write_report(&report, &scenario)?;
        Ok(report)
    })())
}

/// Re-emits a saved JSON report in the requested format.
pub fn rewrite_report(input: &Path, format: Format, out: Option<&Path>) -> i32 {
    finish((|| {
        let text = std::fs::read_to_string(input).map_err(|e| CliError::io(input, e))?;
        let report = Report::from_json(&text).map_err(|message| CliError::Parse {
            path: input.to_path_buf(),
            message,
        })?;
        report.emit(format, out)?;
        Ok(report)
    })())
}

/// An operator named on the command line: an id of the scenario at
/// `scenario`, or a catalog name when no scenario is given.
pub fn resolve_operator(scenario: Option<&Path>, id: &str, overrides: &Overrides) -> CliResult<(OperatorSpec, usize)> {
    match scenario {
        Some(path) => {
            let s = load(path, overrides)?;
            let entry = s.operator(id)?;
            Ok((entry.spec.clone(), s.dim_of(entry)?))
        }
        None => {
            let e = catalog::find(id).ok_or_else(|| {
                let names: Vec<String> = catalog::regular_catalog().into_iter().map(|e| e.name).collect();
                CliError::invalid(format!("unknown operator `{id}`; catalog names are {}", names.join(", ")))
            })?;
            Ok((e.operator, e.dim))
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SlopeOutput {
    pub operator: String,
    pub x: Vector,
    pub xstar: Vector,
    pub eps: f64,
    /// `L(x, x*, T)`, or `L(x, x*, T^eps)` when `eps > 0`.
    pub slope: SlopeResult,
    /// `d(x*, T(x) + eps B)`.
    pub distance: ExtReal,
}

/// `L` and `d` at one query.
pub fn slope_query(
    t: &OperatorSpec,
    name: &str,
    x: Vector,
    xstar: Vector,
    eps: f64,
    tol: f64,
) -> CliResult<SlopeOutput> {
    let slope = if eps > 0.0 {
        slope_enlarged(t, eps, &x, &xstar, tol)?
    } else {
        slope_estimate(t, &x, &xstar, tol)?
    };
    let distance = match image_distance(t, &x, &xstar)? {
        ExtReal::Finite(d) => ExtReal::Finite((d - eps).max(0.0)),
        inf => inf,
    };
    Ok(SlopeOutput {
        operator: name.to_string(),
        x,
        xstar,
        eps,
        slope,
        distance,
    })
}

#[derive(Debug, Serialize)]
pub struct MembershipOutput {
    pub member: bool,
    /// Smallest slack over the graph pairs; negative means excluded.
    pub worst_slack: f64,
    pub radius: f64,
    pub density: f64,
}

#[derive(Debug, Serialize)]
pub struct SetOutput {
    pub directions: Vec<Vector>,
    /// Support function of the sampled enlargement polyhedron.
    pub support: Vec<ExtReal>,
    /// Support function of `T(x) + eps B` (the norm-weighted enlargement
    /// of a maximal operator).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub closed_form_support: Option<Vec<ExtReal>>,
    pub radius: f64,
    pub density: f64,
}

#[derive(Debug, Serialize)]
pub struct ProbeOutput {
    pub eps: f64,
    pub points: Vec<Vector>,
    pub nonempty: Vec<bool>,
}

/// Whether `xstar` belongs to the enlargement at `x`.
pub fn enlarge_membership(
    t: &OperatorSpec,
    kind: EnlargementKind,
    eps: f64,
    x: Vector,
    xstar: Vector,
    settings: &EnlargementSettings,
) -> CliResult<MembershipOutput> {
    let step = budget_step(x.dim(), settings);
    let q = EnlargementQuery::new(kind, eps, x, settings.radius, step)?;
    let (member, worst_slack) = match t {
        OperatorSpec::FiniteGraph { sample } => enlargement_membership(GraphSource::Sample(sample), &q, &xstar)?,
        _ => enlargement_membership(GraphSource::Operator(t), &q, &xstar)?,
    };
    Ok(MembershipOutput {
        member,
        worst_slack,
        radius: settings.radius,
        density: step,
    })
}

/// The enlargement at `x` as support values on `directions` unit vectors.
pub fn enlarge_set(
    t: &OperatorSpec,
    dim: usize,
    kind: EnlargementKind,
    eps: f64,
    x: Vector,
    directions: usize,
    settings: &EnlargementSettings,
) -> CliResult<SetOutput> {
    let q = EnlargementQuery::new(kind, eps, x, settings.radius, settings.density)?;
    let sample = match t {
        OperatorSpec::FiniteGraph { sample } => sample.clone(),
        _ => sampled(t, dim, settings)?,
    };
    let set = enlargement_polyhedron(&sample, &q)?;
    let dirs = direction_grid(dim, directions);
    let support = dirs.iter().map(|u| set.support(u)).collect::<monotone_core::Result<Vec<_>>>()?;
    let closed_form_support = if kind == EnlargementKind::NormWeighted && t.is_maximal() {
        let image = image_plus_ball(t, &x, eps)?;
        Some(dirs.iter().map(|u| image.support(u)).collect::<monotone_core::Result<Vec<_>>>()?)
    } else {
        None
    };
    Ok(SetOutput {
        directions: dirs,
        support,
        closed_form_support,
        radius: sample.truncation_radius,
        density: sample.density,
    })
}

/// Emptiness of the enlargement at each grid point.
pub fn enlarge_probe(
    t: &OperatorSpec,
    dim: usize,
    kind: EnlargementKind,
    eps: f64,
    grid: scenario::GridSpec,
) -> CliResult<ProbeOutput> {
    let points = grid.points(dim)?;
    let probe = domain_probe(t, kind, eps, &points)?;
    let (points, nonempty) = probe.into_iter().unzip();
    Ok(ProbeOutput { eps, points, nonempty })
}

/// Writes a command result as JSON to `out` or standard output.
pub fn write_json<T: Serialize>(value: &T, out: Option<&Path>) -> CliResult<()> {
    let bytes = report::fixed_json(value);
    match out {
        Some(p) => std::fs::write(p, bytes).map_err(|e| CliError::io(p, e)),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(&bytes).map_err(|e| CliError::io("<stdout>", e))
        }
    }
}

/// Maps a command result to an exit code, printing the diagnostic.
pub fn finish(result: CliResult<Report>) -> i32 {
    match result {
        Ok(report) => match report.worst_failure() {
            None => EXIT_HOLDS,
            Some(entry) => {
                let failing = report.entries.iter().filter(|e| !e.verdict.holds).count();
                eprintln!("{}", run::summarize_failure(entry));
                eprintln!("{failing} of {} checks failed", report.entries.len());
                EXIT_VIOLATION
            }
        },
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INVALID
        }
    }
}

/// Enlargement sampling settings with the scenario's radius and density.
pub fn effective_enlargement(scenario: &Scenario) -> EnlargementSettings {
    let mut s = EnlargementSettings::default();
    if let Some(r) = scenario.sampling.radius {
        s.radius = r;
    }
    if let Some(h) = scenario.sampling.density {
        s.density = h;
    }
    s
}

/// Grid step of a sampled graph: the requested density, coarsened to stay
/// within the point budget.
fn budget_step(dim: usize, settings: &EnlargementSettings) -> f64 {
    let per_axis = monotone_core::enlargements::sample_axis_count(dim, settings.sample_budget);
    (2.0 * settings.radius / (per_axis - 1) as f64).max(settings.density)
}

fn sampled(t: &OperatorSpec, dim: usize, settings: &EnlargementSettings) -> CliResult<monotone_core::GraphSample> {
    Ok(t.sample_graph(dim, settings.radius, budget_step(dim, settings))?)
}

fn load(path: &Path, overrides: &Overrides) -> CliResult<Scenario> {
    let mut scenario = Scenario::load(path)?;
    scenario.apply(overrides);
    scenario.validate()?;
    Ok(scenario)
}

fn write_report(report: &Report, scenario: &Scenario) -> CliResult<()> {
    let format = scenario.output.format.unwrap_or(Format::Json);
    report.emit(format, scenario.output.path.as_deref().map(Path::new))
}

/// Theorem ids accepted in scenarios, for help texts.
pub fn theorem_ids() -> Vec<&'static str> {
    TheoremId::ALL.iter().map(|t| t.as_str()).collect()
}
