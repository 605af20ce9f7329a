use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use monotone::scenario::GridSpec;
use monotone::{CliError, CliResult, Format, Overrides, EXIT_HOLDS, EXIT_INVALID};
use monotone_core::enlargements::EnlargementKind;
use monotone_core::Vector;

/// Slope functional, enlargements and randomized checks for monotone
/// operators on R^n.
#[derive(Parser)]
#[command(name = "monotone", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

/// Flags shared by every command; each overrides the scenario field of the
/// same name.
#[derive(Args)]
struct Flags {
    /// Seed (scenario `seed`).
    #[arg(long, global = true, env = "MONOTONE_SEED")]
    seed: Option<u64>,
    /// Default dimension (scenario `sampling.dim`).
    #[arg(long, global = true)]
    dim: Option<usize>,
    /// Sampling radius R (scenario `sampling.radius`).
    #[arg(long, global = true)]
    radius: Option<f64>,
    /// Sampling density h (scenario `sampling.density`).
    #[arg(long, global = true)]
    density: Option<f64>,
    /// Verdict tolerance for every check (scenario `tolerances`).
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Report format (scenario `output.format`).
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Output file (scenario `output.path`); standard output by default.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (scenario `jobs`).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Record per-check runtimes (scenario `timings`).
    #[arg(long, global = true)]
    timings: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Validate the operators of a scenario and report their monotonicity.
    Validate { scenario: PathBuf },
    /// Run the checks of a scenario.
    Check { scenario: PathBuf },
    /// Evaluate L(x, x*, T) (or of the enlargement with --eps) and d(x*, T(x)).
    Slope {
        #[command(flatten)]
        op: OperatorArgs,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        x: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        xstar: Vec<f64>,
        #[arg(long, default_value_t = 0.0)]
        eps: f64,
    },
    /// Membership in, support of, or domain probe of an enlargement.
    Enlarge {
        #[command(flatten)]
        op: OperatorArgs,
        #[arg(long, value_enum, default_value_t = Mode::Membership)]
        mode: Mode,
        #[arg(long, value_enum, default_value_t = Kind::NormWeighted)]
        kind: Kind,
        #[arg(long, default_value_t = 0.0)]
        eps: f64,
        /// Base point (membership and set modes).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        x: Option<Vec<f64>>,
        /// Candidate dual point (membership mode).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        xstar: Option<Vec<f64>>,
        /// Number of support directions (set mode).
        #[arg(long, default_value_t = 32)]
        directions: usize,
        /// Probe grid `lo,hi,points` per axis (probe mode).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, num_args = 1)]
        grid: Option<Vec<f64>>,
    },
    /// Re-emit a JSON report as JSON or CSV.
    Report { input: PathBuf },
}

#[derive(Args)]
struct OperatorArgs {
    /// Operator id in --scenario, or a catalog name.
    #[arg(long)]
    operator: String,
    /// Scenario file defining the operator.
    #[arg(long)]
    scenario: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Membership,
    Set,
    Probe,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    NormWeighted,
    Constant,
}

impl From<Kind> for EnlargementKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::NormWeighted => EnlargementKind::NormWeighted,
            Kind::Constant => EnlargementKind::Constant,
        }
    }
}

fn overrides(f: &Flags) -> Overrides {
    Overrides {
        seed: f.seed,
        dim: f.dim,
        radius: f.radius,
        density: f.density,
        tol: f.tol,
        format: f.format,
        out: f.out.as_ref().map(|p| p.display().to_string()),
        jobs: f.jobs,
        timings: f.timings,
    }
}

fn vector(name: &str, c: &[f64], dim: usize) -> CliResult<Vector> {
    if c.len() != dim {
        return Err(CliError::invalid(format!("--{name} has {} coordinates, the operator has dimension {dim}", c.len())));
    }
    Ok(Vector::new(c)?)
}

fn settings(flags: &Flags) -> monotone_core::theorems::EnlargementSettings {
    let mut s = monotone_core::theorems::EnlargementSettings::default();
    if let Some(r) = flags.radius {
        s.radius = r;
    }
    if let Some(h) = flags.density {
        s.density = h;
    }
    s
}

fn query(command: Command, flags: &Flags) -> CliResult<()> {
    let o = overrides(flags);
    let out = flags.out.as_deref();
    match command {
        Command::Slope { op, x, xstar, eps } => {
            let (t, dim) = monotone::resolve_operator(op.scenario.as_deref(), &op.operator, &o)?;
            let r = monotone::slope_query(
                &t,
                &op.operator,
                vector("x", &x, dim)?,
                vector("xstar", &xstar, dim)?,
                eps,
                flags.tol.unwrap_or(1e-6),
            )?;
            monotone::write_json(&r, out)
        }
        Command::Enlarge {
            op,
            mode,
            kind,
            eps,
            x,
            xstar,
            directions,
            grid,
        } => {
            let (t, dim) = monotone::resolve_operator(op.scenario.as_deref(), &op.operator, &o)?;
            let s = settings(flags);
            let need = |name: &str, v: Option<Vec<f64>>| {
                v.ok_or_else(|| CliError::invalid(format!("--{name} is required in this mode")))
                    .and_then(|c| vector(name, &c, dim))
            };
            match mode {
                Mode::Membership => {
                    let r = monotone::enlarge_membership(&t, kind.into(), eps, need("x", x)?, need("xstar", xstar)?, &s)?;
                    monotone::write_json(&r, out)
                }
                Mode::Set => {
                    let r = monotone::enlarge_set(&t, dim, kind.into(), eps, need("x", x)?, directions, &s)?;
                    monotone::write_json(&r, out)
                }
                Mode::Probe => {
                    let g = match grid.as_deref() {
                        None => GridSpec { lo: -1.0, hi: 2.0, points: 41 },
                        Some([lo, hi, n]) if *n >= 1.0 && n.fract() == 0.0 => GridSpec {
                            lo: *lo,
                            hi: *hi,
                            points: *n as usize,
                        },
                        Some(_) => return Err(CliError::invalid("--grid takes lo,hi,points")),
                    };
                    let r = monotone::enlarge_probe(&t, dim, kind.into(), eps, g)?;
                    monotone::write_json(&r, out)
                }
            }
        }
        _ => unreachable!("scenario commands are handled by the caller"),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let o = overrides(&cli.flags);
    let code = match cli.command {
        Command::Validate { scenario } => monotone::validate_scenario(&scenario, &o),
        Command::Check { scenario } => monotone::run_scenario(&scenario, &o),
        Command::Report { input } => {
            monotone::rewrite_report(&input, cli.flags.format.unwrap_or(Format::Json), cli.flags.out.as_deref())
        }
        command => match query(command, &cli.flags) {
            Ok(()) => EXIT_HOLDS,
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_INVALID
            }
        },
    };
    ExitCode::from(code as u8)
}
