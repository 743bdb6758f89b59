//! CSV and JSON serialization of trajectories.
//!
//! Floats are written with 17 significant digits so that every value
//! round-trips. The fiber angle is reduced to `[0, 2π)` here and nowhere else.

use std::f64::consts::TAU;
use std::io::{self, Write};

use serde::Serialize;

use super::{BaseState, Halt, LiftState, Trajectory};
use crate::Point;

pub const LIFT_COLUMNS: [&str; 10] = [
    "t",
    "x1",
    "x2",
    "phi",
    "Q1",
    "Q2",
    "Q3",
    "speed",
    "Q3_over_K",
    "wong_residual",
];
pub const BASE_COLUMNS: [&str; 7] = ["t", "x1", "x2", "P1", "P2", "speed", "wong_residual"];

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

#[derive(Serialize)]
struct LiftRow {
    t: f64,
    x1: f64,
    x2: f64,
    phi: f64,
    #[serde(rename = "Q1")]
    q1: f64,
    #[serde(rename = "Q2")]
    q2: f64,
    #[serde(rename = "Q3")]
    q3: f64,
    speed: f64,
    #[serde(rename = "Q3_over_K")]
    q3_over_k: Option<f64>,
    wong_residual: Option<f64>,
}

#[derive(Serialize)]
struct BaseRow {
    t: f64,
    x1: f64,
    x2: f64,
    #[serde(rename = "P1")]
    p1: f64,
    #[serde(rename = "P2")]
    p2: f64,
    speed: f64,
    wong_residual: Option<f64>,
}

#[derive(Serialize)]
struct HaltRecord {
    t: f64,
    point: Option<Point>,
    message: String,
}

#[derive(Serialize)]
struct Document<R> {
    samples: Vec<R>,
    halt: Option<HaltRecord>,
}

impl From<&Halt> for HaltRecord {
    fn from(h: &Halt) -> Self {
        Self {
            t: h.t,
            point: h.error.point(),
            message: h.error.to_string(),
        }
    }
}

fn lift_rows(traj: &Trajectory<LiftState>) -> Vec<LiftRow> {
    traj.samples
        .iter()
        .map(|s| LiftRow {
            t: s.t,
            x1: s.state.x1,
            x2: s.state.x2,
            phi: s.state.phi.rem_euclid(TAU),
            q1: s.state.q[0],
            q2: s.state.q[1],
            q3: s.state.q[2],
            speed: s.monitors.speed,
            q3_over_k: s.monitors.q3_over_k,
            wong_residual: s.monitors.wong_residual,
        })
        .collect()
}

fn base_rows(traj: &Trajectory<BaseState>) -> Vec<BaseRow> {
    traj.samples
        .iter()
        .map(|s| BaseRow {
            t: s.t,
            x1: s.state.x1,
            x2: s.state.x2,
            p1: s.state.p[0],
            p2: s.state.p[1],
            speed: s.monitors.speed,
            wong_residual: s.monitors.wong_residual,
        })
        .collect()
}

pub fn write_lift_csv<W: Write>(traj: &Trajectory<LiftState>, mut w: W) -> io::Result<()> {
    writeln!(w, "{}", LIFT_COLUMNS.join(","))?;
    for r in lift_rows(traj) {
        let fields = [
            num(r.t),
            num(r.x1),
            num(r.x2),
            num(r.phi),
            num(r.q1),
            num(r.q2),
            num(r.q3),
            num(r.speed),
            opt(r.q3_over_k),
            opt(r.wong_residual),
        ];
        writeln!(w, "{}", fields.join(","))?;
    }
    Ok(())
}

pub fn write_base_csv<W: Write>(traj: &Trajectory<BaseState>, mut w: W) -> io::Result<()> {
    writeln!(w, "{}", BASE_COLUMNS.join(","))?;
    for r in base_rows(traj) {
        let fields = [
            num(r.t),
            num(r.x1),
            num(r.x2),
            num(r.p1),
            num(r.p2),
            num(r.speed),
            opt(r.wong_residual),
        ];
        writeln!(w, "{}", fields.join(","))?;
    }
    Ok(())
}

pub fn write_lift_json<W: Write>(traj: &Trajectory<LiftState>, w: W) -> io::Result<()> {
    let doc = Document {
        samples: lift_rows(traj),
        halt: traj.halt.as_ref().map(HaltRecord::from),
    };
    serde_json::to_writer_pretty(w, &doc).map_err(io::Error::other)
}

pub fn write_base_json<W: Write>(traj: &Trajectory<BaseState>, w: W) -> io::Result<()> {
    let doc = Document {
        samples: base_rows(traj),
        halt: traj.halt.as_ref().map(HaltRecord::from),
    };
    serde_json::to_writer_pretty(w, &doc).map_err(io::Error::other)
}
