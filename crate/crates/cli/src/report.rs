//! Reports: one entry per check, written as JSON or CSV with floats at 17
//! significant digits and a fixed field order, so equal runs give equal
//! bytes.

use std::io::{self, Write};
use std::path::Path;

use monotone_core::{ExtReal, Verdict};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::scenario::Format;

/// Sampling settings a verdict was produced with.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: u64,
    pub radius: f64,
    pub density: f64,
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportEntry {
    pub index: usize,
    pub operators: Vec<String>,
    pub verdict: Verdict,
    pub provenance: Provenance,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub scenario: String,
    pub seed: u64,
    pub entries: Vec<ReportEntry>,
}

impl Report {
    pub fn all_hold(&self) -> bool {
        self.entries.iter().all(|e| e.verdict.holds)
    }

    /// The failing entry with the largest violation.
    pub fn worst_failure(&self) -> Option<&ReportEntry> {
        self.entries
            .iter()
            .filter(|e| !e.verdict.holds)
            .max_by(|a, b| {
                a.verdict
                    .worst_violation
                    .partial_cmp(&b.verdict.worst_violation)
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
    }

    pub fn from_json(text: &str) -> Result<Report, String> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            format!("field `{path}`: {}", e.into_inner())
        })
    }

    pub fn to_json(&self) -> Vec<u8> {
        fixed_json(self)
    }

    pub fn to_csv(&self) -> Vec<u8> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(CSV_HEADER).expect("in-memory write");
        for e in &self.entries {
            let v = &e.verdict;
            let param = |name: &str| v.params.get(name).map(|x| float(*x)).unwrap_or_default();
            w.write_record([
                v.theorem_id.as_str().to_string(),
                v.holds.to_string(),
                ext(v.worst_violation),
                param("eps"),
                param("delta"),
                param("lambda"),
                e.provenance.seed.to_string(),
                e.runtime_ms.map(float).unwrap_or_default(),
            ])
            .expect("in-memory write");
        }
        w.into_inner().expect("in-memory flush")
    }

    pub fn render(&self, format: Format) -> Vec<u8> {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
        }
    }

    /// Writes the report to `path`, or to standard output.
    pub fn emit(&self, format: Format, path: Option<&Path>) -> CliResult<()> {
        if self.entries.is_empty() {
            return Err(CliError::invalid("report has no verdicts"));
        }
        let bytes = self.render(format);
        match path {
            Some(p) => std::fs::write(p, bytes).map_err(|e| CliError::io(p, e)),
            None => io::stdout().write_all(&bytes).map_err(|e| CliError::io("<stdout>", e)),
        }
    }
}

pub const CSV_HEADER: [&str; 8] = [
    "theorem_id",
    "holds",
    "worst_violation",
    "eps",
    "delta",
    "lambda",
    "seed",
    "runtime_ms",
];

/// Pretty JSON of `value` with floats in [`float`] form and a trailing
/// newline.
pub fn fixed_json<T: Serialize + ?Sized>(value: &T) -> Vec<u8> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, FixedFloats::default());
    value.serialize(&mut ser).expect("serializing to memory cannot fail");
    out.push(b'\n');
    out
}

/// `{:.16e}`: 17 significant digits, round-trips every `f64`.
pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

fn ext(x: ExtReal) -> String {
    match x {
        ExtReal::Finite(v) => float(v),
        ExtReal::PosInf => "inf".into(),
    }
}

/// Pretty JSON with every float in `{:.16e}` form.
#[derive(Default)]
struct FixedFloats {
    pretty: serde_json::ser::PrettyFormatter<'static>,
}

impl serde_json::ser::Formatter for FixedFloats {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(float(value).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.begin_array(w)
    }

    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.end_array(w)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.pretty.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.end_array_value(w)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.begin_object(w)
    }

    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.end_object(w)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.pretty.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.end_object_value(w)
    }
}
