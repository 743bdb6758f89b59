//! Subcommand implementations.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;
use wagner_core::geodesic::{
    attach_wong, base_geodesic_residual, geodesic_suite, integrate_base, integrate_lift_with,
    project, wong_residual, write_base_csv, write_base_json, write_lift_csv, write_lift_json,
    BaseState, Coupling, GeodesicReport, LiftState, SuiteConfig, Trajectory,
};
use wagner_core::lift::{
    lifted_connection, lifted_curvature, lifted_frame, lifted_sectionals, lifted_structure,
    verify_lift,
};
use wagner_core::surface::gauss_curvature;
use wagner_core::{Error, LiftedCurvature, Point, VerifyReport};

use crate::{
    BaseGeodesicArgs, Cli, Command, GeodesicArgs, IntegrationArgs, LiftCommand, PointArgs, Status,
    SurfaceCommand, TextFormat, TrajectoryFormat, VerifyArgs,
};

/// Why a subcommand stopped.
enum Failure {
    Eval {
        error: Error,
        point: Option<Point>,
    },
    Io {
        path: Option<PathBuf>,
        error: io::Error,
    },
}

impl Failure {
    fn at(point: Point) -> impl FnOnce(Error) -> Failure {
        move |error| {
            let p = error.point().unwrap_or(point);
            Failure::Eval {
                error,
                point: Some(p),
            }
        }
    }

    fn io(path: Option<&Path>) -> impl FnOnce(io::Error) -> Failure + '_ {
        move |error| Failure::Io {
            path: path.map(Path::to_path_buf),
            error,
        }
    }
}

impl From<Error> for Failure {
    fn from(error: Error) -> Self {
        Failure::Eval {
            point: error.point(),
            error,
        }
    }
}

pub(crate) fn run(cli: Cli) -> Status {
    let result = match cli.command {
        Command::Surface {
            command: SurfaceCommand::Info(args),
        } => surface_info(&args),
        Command::Lift {
            command: LiftCommand::Table(args),
        } => lift_table(&args),
        Command::Geodesic(args) => geodesic(&args),
        Command::BaseGeodesic(args) => base_geodesic(&args),
        Command::Verify(args) => verify(&args),
    };
    match result {
        Ok(status) => status,
        Err(Failure::Eval { error, point }) => {
            eprintln!("error: {error}");
            if let Some(p) = point {
                eprintln!("point: {p}");
            }
            Status::Runtime
        }
        Err(Failure::Io { path, error }) => {
            match path {
                Some(p) => eprintln!("error: {}: {error}", p.display()),
                None => eprintln!("error: {error}"),
            }
            Status::Runtime
        }
    }
}

fn print_json<T: Serialize>(value: &T) -> Result<(), Failure> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value).map_err(|e| Failure::io(None)(e.into()))?;
    writeln!(out).map_err(Failure::io(None))
}

/// Prints `-0` as `0` in text tables.
fn unsigned_zero(v: f64) -> f64 {
    v + 0.0
}

fn surface_info(args: &PointArgs) -> Result<Status, Failure> {
    let s = &args.surface.surface;
    let x = args.point();
    let lambda = s.lambda_jet(x, 0).map_err(Failure::at(x))?.value();
    let g = gauss_curvature(s, x).map_err(Failure::at(x))?;
    let rows = [
        ("lambda", lambda),
        ("c1_12", g.c112),
        ("c2_12", g.c212),
        ("K", g.k),
        ("e1K", g.e1k),
        ("e2K", g.e2k),
    ];
    match args.format {
        TextFormat::Text => {
            let mut out = io::stdout().lock();
            let mut w = || -> io::Result<()> {
                writeln!(out, "surface  {}", s.name())?;
                writeln!(out, "point    {x}")?;
                for (name, v) in rows {
                    writeln!(out, "{name:<8} {}", unsigned_zero(v))?;
                }
                Ok(())
            };
            w().map_err(Failure::io(None))?;
        }
        TextFormat::Json => {
            let values: BTreeMap<&str, f64> = rows.into_iter().collect();
            print_json(&json!({ "surface": s.name(), "point": x, "values": values }))?;
        }
    }
    Ok(Status::Ok)
}

const PLANES: [&str; 3] = ["E1E2", "E1E3", "E2E3"];

fn lift_table(args: &PointArgs) -> Result<Status, Failure> {
    let s = &args.surface.surface;
    let x = args.point();
    let err = || Failure::at(x);
    let frame = lifted_frame(s, x).map_err(err())?;
    let structure = lifted_structure(s, x).map_err(err())?.table;
    let gamma = lifted_connection(s, x).map_err(err())?;
    let curvature = lifted_curvature(s, x).map_err(err())?;
    let sectional = lifted_sectionals(s, x).map_err(err())?;

    let mut c_entries = Vec::new();
    for k in 0..3 {
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            c_entries.push((
                format!("c{}_{}{}", k + 1, i + 1, j + 1),
                structure.get(k, i, j),
            ));
        }
    }
    let mut g_entries = Vec::new();
    for k in 0..3 {
        for i in 0..3 {
            for j in 0..3 {
                g_entries.push((
                    format!("Gamma{}_{}{}", k + 1, i + 1, j + 1),
                    gamma.get(k, i, j),
                ));
            }
        }
    }
    let r_entries: Vec<(String, f64)> = LiftedCurvature::NAMES
        .iter()
        .map(|n| n.to_string())
        .zip(curvature.as_array())
        .collect();
    let k_entries: Vec<(String, f64)> = PLANES
        .iter()
        .map(|p| format!("K({p})"))
        .zip(sectional)
        .collect();

    match args.format {
        TextFormat::Text => {
            let mut out = io::stdout().lock();
            let mut w = || -> io::Result<()> {
                writeln!(out, "surface  {}", s.name())?;
                writeln!(out, "point    {x}")?;
                writeln!(out)?;
                writeln!(
                    out,
                    "lifted frame, rows E1 E2 E3 in the basis (d1, d2, dphi)"
                )?;
                for (i, row) in frame.matrix.iter().enumerate() {
                    let [a, b, c] = row.map(unsigned_zero);
                    writeln!(out, "  E{}  {a} {b} {c}", i + 1)?;
                }
                let sections: [(&str, &[(String, f64)]); 4] = [
                    ("structure functions [E_i, E_j] = c^k_ij E_k", &c_entries),
                    ("connection nabla_{E_i} E_j = Gamma^k_ij E_k", &g_entries),
                    ("curvature R_abcd = <R(E_a, E_b) E_c, E_d>", &r_entries),
                    ("sectional curvature <R(X, Y) Y, X>", &k_entries),
                ];
                for (title, entries) in sections {
                    writeln!(out)?;
                    writeln!(out, "{title}")?;
                    for (name, v) in entries {
                        writeln!(out, "  {name:<10} {}", unsigned_zero(*v))?;
                    }
                }
                Ok(())
            };
            w().map_err(Failure::io(None))?;
        }
        TextFormat::Json => {
            let map = |e: &[(String, f64)]| e.iter().cloned().collect::<BTreeMap<String, f64>>();
            print_json(&json!({
                "surface": s.name(),
                "point": x,
                "frame": frame.matrix,
                "structure": map(&c_entries),
                "connection": map(&g_entries),
                "curvature": map(&r_entries),
                "sectional": map(&k_entries),
            }))?;
        }
    }
    Ok(Status::Ok)
}

/// Writes to `path`, or to standard output when there is none.
fn with_output(
    path: Option<&Path>,
    write: impl FnOnce(&mut dyn Write) -> io::Result<()>,
) -> Result<(), Failure> {
    match path {
        Some(p) => {
            let file = File::create(p).map_err(Failure::io(Some(p)))?;
            let mut w = BufWriter::new(file);
            write(&mut w)
                .and_then(|()| w.flush())
                .map_err(Failure::io(Some(p)))
        }
        None => {
            let mut out = io::stdout().lock();
            write(&mut out)
                .and_then(|()| out.flush())
                .map_err(Failure::io(None))
        }
    }
}

/// Reports an early stop after the partial output has been written.
fn halt_status<S>(traj: &Trajectory<S>, last_point: Option<Point>) -> Status {
    match &traj.halt {
        None => Status::Ok,
        Some(h) => {
            eprintln!("error: integration stopped at t = {}: {}", h.t, h.error);
            if let Some(p) = h.error.point().or(last_point) {
                eprintln!("point: {p}");
            }
            Status::Runtime
        }
    }
}

fn residuals_wanted(
    integration: &IntegrationArgs,
    len: usize,
    halted: bool,
) -> Result<bool, Failure> {
    if !integration.wong {
        return Ok(false);
    }
    // a halted run keeps its partial output even when it is too short to difference
    if len < 3 && halted {
        return Ok(false);
    }
    if len < 3 {
        return Err(Error::TooShort(len).into());
    }
    Ok(true)
}

fn geodesic(args: &GeodesicArgs) -> Result<Status, Failure> {
    let s = &args.surface.surface;
    let [x1, x2, phi] = args.start;
    let s0 = LiftState::new(x1, x2, phi, args.velocity);
    let it = &args.integration;
    let coupling: Coupling = args.coupling.into();
    let mut traj = integrate_lift_with(s, s0, it.t_max, it.step, it.method.into(), coupling)
        .map_err(Failure::at(s0.point()))?;
    if residuals_wanted(it, traj.len(), traj.halt.is_some())? {
        let base = project(&traj);
        // the derived flow reverses the sign of Q3 relative to the printed one
        let charge = args.charge.or_else(|| {
            let c = base.samples[0].monitors.q3_over_k?;
            Some(match coupling {
                Coupling::Printed => c,
                Coupling::Derived => -c,
            })
        });
        let r = wong_residual(s, &base, charge)?;
        attach_wong(&mut traj, &r);
    }
    with_output(it.out.as_deref(), |w| match it.format {
        TrajectoryFormat::Csv => write_lift_csv(&traj, w),
        TrajectoryFormat::Json => write_lift_json(&traj, w),
    })?;
    Ok(halt_status(&traj, traj.last().map(|s| s.state.point())))
}

fn base_geodesic(args: &BaseGeodesicArgs) -> Result<Status, Failure> {
    let s = &args.surface.surface;
    let b0 = BaseState::new(args.start[0], args.start[1], args.velocity);
    let it = &args.integration;
    let mut traj = integrate_base(s, b0, it.t_max, it.step, it.method.into())
        .map_err(Failure::at(b0.point()))?;
    if residuals_wanted(it, traj.len(), traj.halt.is_some())? {
        let r = base_geodesic_residual(s, &traj)?;
        for (smp, v) in traj.samples.iter_mut().zip(r) {
            smp.monitors.wong_residual = v;
        }
    }
    with_output(it.out.as_deref(), |w| match it.format {
        TrajectoryFormat::Csv => write_base_csv(&traj, w),
        TrajectoryFormat::Json => write_base_json(&traj, w),
    })?;
    Ok(halt_status(&traj, traj.last().map(|s| s.state.point())))
}

#[derive(Serialize)]
struct FullReport {
    surface: String,
    lift: VerifyReport,
    geodesic: Option<GeodesicReport>,
    passed: bool,
}

fn verify(args: &VerifyArgs) -> Result<Status, Failure> {
    let s = &args.surface.surface;
    let samples = usize::try_from(args.samples).map_err(|_| {
        Error::InvalidArgument(format!("sample count {} is too large", args.samples))
    })?;
    let lift = verify_lift(s, samples, args.seed, args.tol)?;
    let geodesic = if args.lift_only {
        None
    } else {
        Some(geodesic_suite(s, args.seed, &SuiteConfig::default())?)
    };
    let passed = lift.passed && geodesic.as_ref().map_or(true, |g| g.passed);
    let report = FullReport {
        surface: s.name().to_string(),
        lift,
        geodesic,
        passed,
    };
    print_json(&report)?;
    if let Some(path) = &args.out {
        with_output(Some(path), |w| {
            serde_json::to_writer_pretty(&mut *w, &report)?;
            writeln!(w)
        })?;
    }
    let failed: Vec<&str> = report
        .lift
        .checks
        .iter()
        .chain(report.geodesic.iter().flat_map(|g| &g.checks))
        .filter(|c| !c.passed)
        .map(|c| c.name.as_str())
        .collect();
    if failed.is_empty() {
        eprintln!("verify: all checks passed");
        Ok(Status::Ok)
    } else {
        eprintln!("verify: failed checks: {}", failed.join(", "));
        Ok(Status::Failed)
    }
}
