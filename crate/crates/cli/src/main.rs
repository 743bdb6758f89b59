//! `wagner`: geometry tables, geodesics and verification for the frame-bundle lift.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use wagner_core::geodesic::{Coupling, Method};
use wagner_core::surface::CATALOG;
use wagner_core::{catalog, ConformalSurface, Point};

#[derive(Parser, Debug)]
#[command(
    name = "wagner",
    version,
    about = "Lift of a surface metric to its orthonormal frame bundle"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Base-surface quantities.
    Surface {
        #[command(subcommand)]
        command: SurfaceCommand,
    },
    /// Lifted-metric tables.
    Lift {
        #[command(subcommand)]
        command: LiftCommand,
    },
    /// Integrate a geodesic of the lifted metric.
    Geodesic(GeodesicArgs),
    /// Integrate a geodesic of the base metric.
    BaseGeodesic(BaseGeodesicArgs),
    /// Cross-check the closed forms and the geodesic invariants; exit 1 on failure.
    Verify(VerifyArgs),
}

#[derive(Subcommand, Debug)]
enum SurfaceCommand {
    /// λ, the structure functions, K and its frame derivatives at a point.
    Info(PointArgs),
}

#[derive(Subcommand, Debug)]
enum LiftCommand {
    /// Lifted frame, structure functions, connection, curvature and sectional curvatures.
    Table(PointArgs),
}

#[derive(Args, Debug)]
struct SurfaceArg {
    /// Catalog name (sphere, halfplane, bump) or path to a JSON surface config.
    #[arg(long, value_parser = parse_surface)]
    surface: ConformalSurface,
}

#[derive(Args, Debug)]
struct PointArgs {
    #[command(flatten)]
    surface: SurfaceArg,
    /// Chart point `X1,X2`.
    #[arg(long, value_name = "X1,X2", allow_hyphen_values = true, value_parser = parse_coords::<2>)]
    at: [f64; 2],
    #[arg(long, value_enum, default_value_t = TextFormat::Text)]
    format: TextFormat,
}

impl PointArgs {
    fn point(&self) -> Point {
        self.at.into()
    }
}

#[derive(Args, Debug)]
struct IntegrationArgs {
    /// Integrate over [0, T].
    #[arg(long, value_name = "T", value_parser = parse_positive)]
    t_max: f64,
    /// Fixed step for rk4, initial step for rk45.
    #[arg(long, value_name = "H", value_parser = parse_positive)]
    step: f64,
    /// Fixed-step RK4 or adaptive Dormand-Prince RK45 (absolute tolerance 1e-9).
    #[arg(long, value_enum, default_value_t = MethodArg::Rk4)]
    method: MethodArg,
    /// Also compute the Wong-equation residual column.
    #[arg(long)]
    wong: bool,
    /// Output file; standard output when absent.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = TrajectoryFormat::Csv)]
    format: TrajectoryFormat,
}

#[derive(Args, Debug)]
struct GeodesicArgs {
    #[command(flatten)]
    surface: SurfaceArg,
    /// Initial point on the bundle `X1,X2,PHI`.
    #[arg(long, value_name = "X1,X2,PHI", allow_hyphen_values = true, value_parser = parse_coords::<3>)]
    start: [f64; 3],
    /// Initial velocity in the lifted frame `Q1,Q2,Q3`.
    #[arg(long, value_name = "Q1,Q2,Q3", allow_hyphen_values = true, value_parser = parse_coords::<3>)]
    velocity: [f64; 3],
    #[command(flatten)]
    integration: IntegrationArgs,
    /// Charge C of the Wong residual; defaults to Q3/K at the start.
    #[arg(long, allow_hyphen_values = true, requires = "wong")]
    charge: Option<f64>,
    /// Sign convention of the fiber couplings.
    #[arg(long, value_enum, default_value_t = CouplingArg::Printed)]
    coupling: CouplingArg,
}

#[derive(Args, Debug)]
struct BaseGeodesicArgs {
    #[command(flatten)]
    surface: SurfaceArg,
    /// Initial point `X1,X2`.
    #[arg(long, value_name = "X1,X2", allow_hyphen_values = true, value_parser = parse_coords::<2>)]
    start: [f64; 2],
    /// Initial velocity in the base frame `P1,P2`.
    #[arg(long, value_name = "P1,P2", allow_hyphen_values = true, value_parser = parse_coords::<2>)]
    velocity: [f64; 2],
    #[command(flatten)]
    integration: IntegrationArgs,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    surface: SurfaceArg,
    /// Number of seeded sample points for the lift checks.
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    samples: u64,
    /// Seed of the sample points and the geodesic initial states.
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Tolerance of the closed-form versus frame-calculus comparisons.
    #[arg(long, default_value_t = 1e-8, value_parser = parse_positive)]
    tol: f64,
    /// Check the lift only, skipping the geodesic invariant suite.
    #[arg(long)]
    lift_only: bool,
    /// Also write the report to this file.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TextFormat {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TrajectoryFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Rk4,
    Rk45,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Rk4 => Method::Rk4,
            MethodArg::Rk45 => Method::Rk45,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CouplingArg {
    Printed,
    Derived,
}

impl From<CouplingArg> for Coupling {
    fn from(c: CouplingArg) -> Self {
        match c {
            CouplingArg::Printed => Coupling::Printed,
            CouplingArg::Derived => Coupling::Derived,
        }
    }
}

fn parse_surface(s: &str) -> Result<ConformalSurface, String> {
    if CATALOG.contains(&s) {
        return catalog(s).map_err(|e| e.to_string());
    }
    let text = std::fs::read_to_string(s).map_err(|e| {
        format!(
            "`{s}` is neither a catalog surface ({}) nor a readable config file: {e}",
            CATALOG.join(", ")
        )
    })?;
    ConformalSurface::from_json(&text).map_err(|e| format!("{s}: {e}"))
}

fn parse_coords<const N: usize>(s: &str) -> Result<[f64; N], String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != N {
        return Err(format!(
            "expected {N} comma-separated numbers, got {}",
            parts.len()
        ));
    }
    let mut out = [0.0; N];
    for (o, p) in out.iter_mut().zip(parts) {
        let v: f64 = p
            .trim()
            .parse()
            .map_err(|_| format!("`{p}` is not a number"))?;
        if !v.is_finite() {
            return Err(format!("`{p}` is not finite"));
        }
        *o = v;
    }
    Ok(out)
}

fn parse_positive(s: &str) -> Result<f64, String> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| format!("`{s}` is not a number"))?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{s}` must be a positive number"))
    }
}

/// Exit status of a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Status {
    Ok,
    /// Verification ran and some check failed.
    Failed,
    /// Evaluation error; the message has been printed.
    Runtime,
}

impl From<Status> for ExitCode {
    fn from(s: Status) -> Self {
        ExitCode::from(match s {
            Status::Ok => 0,
            Status::Failed => 1,
            Status::Runtime => 3,
        })
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        // usage errors exit with 2, help and version with 0
        Err(e) => e.exit(),
    };
    commands::run(cli).into()
}
