//! Scenario files: named operators, a list of checks and the sampling and
//! tolerance settings they run with. The format is JSON; unknown fields are
//! rejected so typos surface as diagnostics instead of silent defaults.

use std::collections::BTreeMap;
use std::path::Path;

use monotone_core::operators::{GraphSample, OperatorSpec};
use monotone_core::{TheoremId, Vector, MAX_DIM};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Report format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    /// Falls back to `MONOTONE_SEED`, then 0.
    #[serde(default)]
    pub seed: Option<u64>,
    /// Tolerance per theorem id, plus an optional `"default"` entry.
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default)]
    pub sampling: Sampling,
    #[serde(default)]
    pub output: Output,
    /// Worker threads; 0 or absent lets the pool decide.
    #[serde(default)]
    pub jobs: Option<usize>,
    /// Fill the `runtime_ms` column (makes reports run-dependent).
    #[serde(default)]
    pub timings: bool,
    pub operators: Vec<OperatorEntry>,
    pub checks: Vec<CheckSpec>,
}

/// Sampling settings shared by every check.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sampling {
    /// Dimension of operators that do not fix one (smooth gradients).
    #[serde(default)]
    pub dim: Option<usize>,
    /// Graph sampling radius `R`.
    #[serde(default)]
    pub radius: Option<f64>,
    /// Graph sampling step `h`.
    #[serde(default)]
    pub density: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Output {
    #[serde(default)]
    pub format: Option<Format>,
    /// Report path; standard output when absent.
    #[serde(default)]
    pub path: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorEntry {
    pub id: String,
    #[serde(default)]
    pub dim: Option<usize>,
    pub spec: OperatorSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckSpec {
    pub theorem: TheoremId,
    pub operators: Vec<String>,
    /// The bounded gradient added by the bounded-sum check.
    #[serde(default)]
    pub bounded: Option<String>,
    #[serde(default)]
    pub params: CheckParams,
}

/// Per-check parameters; absent values take the documented defaults.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckParams {
    #[serde(default)]
    pub trials: Option<usize>,
    #[serde(default)]
    pub queries: Option<usize>,
    #[serde(default)]
    pub instances: Option<usize>,
    #[serde(default)]
    pub points: Option<usize>,
    #[serde(default)]
    pub eps: Option<Vec<f64>>,
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub grid: Option<GridSpec>,
}

/// A product grid with `points` values per axis in `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl GridSpec {
    pub fn points(&self, dim: usize) -> CliResult<Vec<Vector>> {
        if !(self.lo < self.hi && self.lo.is_finite() && self.hi.is_finite()) || self.points < 2 {
            return Err(CliError::invalid("grid needs finite lo < hi and at least 2 points"));
        }
        let total = (self.points as u64).checked_pow(dim as u32).filter(|t| *t <= 100_000);
        let Some(total) = total else {
            return Err(CliError::invalid("grid has more than 100000 points"));
        };
        let step = (self.hi - self.lo) / (self.points - 1) as f64;
        let mut idx = vec![0usize; dim];
        let mut out = Vec::with_capacity(total as usize);
        for _ in 0..total {
            out.push(Vector::from_fn(dim, |i| self.lo + idx[i] as f64 * step));
            for i in (0..dim).rev() {
                idx[i] += 1;
                if idx[i] < self.points {
                    break;
                }
                idx[i] = 0;
            }
        }
        Ok(out)
    }
}

/// Flag values that take precedence over the scenario file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub dim: Option<usize>,
    pub radius: Option<f64>,
    pub density: Option<f64>,
    pub tol: Option<f64>,
    pub format: Option<Format>,
    pub out: Option<String>,
    pub jobs: Option<usize>,
    pub timings: bool,
}

impl Scenario {
    /// Reads and parses a scenario; diagnostics carry the JSON path, line
    /// and column of the offending field.
    pub fn load(path: &Path) -> CliResult<Scenario> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Scenario::parse(&text).map_err(|message| CliError::Parse {
            path: path.to_path_buf(),
            message,
        })
    }

    pub fn parse(text: &str) -> Result<Scenario, String> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            if path.is_empty() || path == "." {
                inner.to_string()
            } else {
                format!("field `{path}`: {inner}")
            }
        })
    }

    /// Folds the flags into the scenario (flags win).
    pub fn apply(&mut self, o: &Overrides) {
        if o.seed.is_some() {
            self.seed = o.seed;
        }
        if o.dim.is_some() {
            self.sampling.dim = o.dim;
        }
        if o.radius.is_some() {
            self.sampling.radius = o.radius;
        }
        if o.density.is_some() {
            self.sampling.density = o.density;
        }
        if let Some(t) = o.tol {
            self.tolerances.insert("override".into(), t);
        }
        if o.format.is_some() {
            self.output.format = o.format;
        }
        if o.out.is_some() {
            self.output.path = o.out.clone();
        }
        if o.jobs.is_some() {
            self.jobs = o.jobs;
        }
        self.timings |= o.timings;
    }

    /// The seed, falling back to `MONOTONE_SEED` and then 0.
    pub fn effective_seed(&self) -> CliResult<u64> {
        if let Some(s) = self.seed {
            return Ok(s);
        }
        match std::env::var("MONOTONE_SEED") {
            Ok(v) => v
                .trim()
                .parse()
                .map_err(|_| CliError::invalid(format!("MONOTONE_SEED `{v}` is not an unsigned integer"))),
            Err(_) => Ok(0),
        }
    }

    /// The operator with `id`.
    pub fn operator(&self, id: &str) -> CliResult<&OperatorEntry> {
        self.operators
            .iter()
            .find(|o| o.id == id)
            .ok_or_else(|| CliError::invalid(format!("unknown operator id `{id}`")))
    }

    /// Dimension of an operator entry.
    pub fn dim_of(&self, entry: &OperatorEntry) -> CliResult<usize> {
        let dim = entry
            .dim
            .or(entry.spec.dim())
            .or(self.sampling.dim)
            .ok_or_else(|| CliError::invalid(format!("operator `{}` needs a dimension", entry.id)))?;
        if let (Some(a), Some(b)) = (entry.dim, entry.spec.dim()) {
            if a != b {
                return Err(CliError::invalid(format!(
                    "operator `{}` declares dim {a} but its data has dim {b}",
                    entry.id
                )));
            }
        }
        if !(1..=MAX_DIM).contains(&dim) {
            return Err(CliError::invalid(format!("operator `{}`: dim {dim} outside 1..={MAX_DIM}", entry.id)));
        }
        Ok(dim)
    }

    /// Tolerance of a check: the `--tol` flag, then the check's own value,
    /// then the per-theorem and `"default"` entries, then `fallback`.
    pub fn tol_for(&self, check: &CheckSpec, fallback: f64) -> f64 {
        self.tolerances
            .get("override")
            .copied()
            .or(check.params.tol)
            .or_else(|| self.tolerances.get(check.theorem.as_str()).copied())
            .or_else(|| self.tolerances.get("default").copied())
            .unwrap_or(fallback)
    }

    /// Checks references and ranges, normalizes finite graphs and
    /// validates every operator (so a corrupted graph stops the run before
    /// any check samples it).
    pub fn validate(&mut self) -> CliResult<()> {
        if self.operators.is_empty() {
            return Err(CliError::invalid("scenario has no operators"));
        }
        let mut seen = std::collections::BTreeSet::new();
        for op in &mut self.operators {
            if !seen.insert(op.id.clone()) {
                return Err(CliError::invalid(format!("duplicate operator id `{}`", op.id)));
            }
            normalize_finite(&mut op.spec)
                .map_err(|e| CliError::invalid(format!("operator `{}`: {e}", op.id)))?;
        }
        for op in &self.operators {
            self.dim_of(op)?;
            op.spec
                .validate()
                .map_err(|e| CliError::invalid(format!("operator `{}`: {e}", op.id)))?;
        }
        for (k, t) in &self.tolerances {
            if !(t.is_finite() && *t >= 0.0) {
                return Err(CliError::invalid(format!("tolerance `{k}` must be finite and >= 0")));
            }
            if k != "default" && k != "override" && TheoremId::parse(k).is_none() {
                return Err(CliError::invalid(format!("tolerance key `{k}` is not a theorem id")));
            }
        }
        if let Some(r) = self.sampling.radius {
            if !(r.is_finite() && r > 0.0) {
                return Err(CliError::invalid("sampling.radius must be finite and > 0"));
            }
        }
        if let Some(h) = self.sampling.density {
            if !(h.is_finite() && h > 0.0) {
                return Err(CliError::invalid("sampling.density must be finite and > 0"));
            }
        }
        for (i, c) in self.checks.iter().enumerate() {
            if c.operators.is_empty() {
                return Err(CliError::invalid(format!("check {i}: no operators listed")));
            }
            for id in c.operators.iter().chain(c.bounded.iter()) {
                self.operator(id).map_err(|e| CliError::invalid(format!("check {i}: {e}")))?;
            }
            if let Some(eps) = &c.params.eps {
                if eps.is_empty() || eps.iter().any(|e| !(e.is_finite() && *e >= 0.0)) {
                    return Err(CliError::invalid(format!("check {i}: eps must be a nonempty list of values >= 0")));
                }
            }
            if let Some(t) = c.params.tol {
                if !(t.is_finite() && t >= 0.0) {
                    return Err(CliError::invalid(format!("check {i}: tol must be finite and >= 0")));
                }
            }
        }
        Ok(())
    }
}

/// Rebuilds a user-supplied finite graph as a complete sample, so its
/// quantities are reported as exact.
fn normalize_finite(spec: &mut OperatorSpec) -> monotone_core::Result<()> {
    match spec {
        OperatorSpec::FiniteGraph { sample } => {
            *sample = GraphSample::finite(std::mem::take(&mut sample.points))?;
            Ok(())
        }
        OperatorSpec::Sum { terms } => terms.iter_mut().try_for_each(normalize_finite),
        _ => Ok(()),
    }
}
