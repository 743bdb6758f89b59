//! Geodesics of the lifted metric `ĝ` on the frame bundle and of `g` on the surface.
//!
//! A lifted geodesic is written `dγ̂/dt = Q^i Ɛ_i`, which in the chart
//! `(x¹, x², φ)` reads
//!
//! ```text
//! dx/dt = e^{-λ}(Q¹, Q²),   dφ/dt = -Q¹c¹₁₂ - Q²c²₁₂ + Q³K,
//! ```
//!
//! and the frame components obey
//!
//! ```text
//! dQ¹/dt = -c¹₁₂Q¹Q² - c²₁₂(Q²)² - Q²Q³ - (e₁K/K)(Q³)²
//! dQ²/dt =  c¹₁₂(Q¹)² + c²₁₂Q¹Q² + Q¹Q³ - (e₂K/K)(Q³)²
//! dQ³/dt = (e₁K/K)Q¹Q³ + (e₂K/K)Q²Q³
//! ```
//!
//! Expanding `dQ^k/dt = -Γ̂^k_{ij}Q^iQ^j` with the Levi-Civita coefficients of
//! `ĝ` reproduces this system except for the sign of the `Q²Q³` and `Q¹Q³`
//! couplings; see [`Coupling`] and [`coupling_comparison`].

mod coupling;
mod ode;
mod output;
mod suite;
mod wong;

use serde::Serialize;

use crate::connection::{connection_from_structure, StructureTable};
use crate::lift::structure_table;
use crate::surface::ConformalSurface;
use crate::{Error, Point, Result};

pub use coupling::{coupling_comparison, CouplingComparison, CouplingTerm};
pub use output::{write_base_csv, write_base_json, write_lift_csv, write_lift_json};
pub use suite::{
    geodesic_suite, initial_states, Convergence, GeodesicReport, HaltNote, SuiteConfig,
};
pub use wong::{attach_wong, base_geodesic_residual, wong_residual};

/// Absolute local error tolerance of the adaptive integrator.
pub const RK45_ATOL: f64 = 1e-9;

/// Point on the frame bundle with a tangent vector in the lifted frame.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LiftState {
    pub x1: f64,
    pub x2: f64,
    /// Fiber angle, unreduced.
    pub phi: f64,
    /// Components along `Ɛ₁, Ɛ₂, Ɛ₃`.
    pub q: [f64; 3],
}

impl LiftState {
    pub fn new(x1: f64, x2: f64, phi: f64, q: [f64; 3]) -> Self {
        Self { x1, x2, phi, q }
    }

    pub fn point(&self) -> Point {
        Point::new(self.x1, self.x2)
    }

    pub fn speed(&self) -> f64 {
        norm(&self.q)
    }

    fn to_array(self) -> [f64; 6] {
        [self.x1, self.x2, self.phi, self.q[0], self.q[1], self.q[2]]
    }

    fn from_array(y: &[f64; 6]) -> Self {
        Self::new(y[0], y[1], y[2], [y[3], y[4], y[5]])
    }
}

/// Point on the surface with a tangent vector in the base frame.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BaseState {
    pub x1: f64,
    pub x2: f64,
    /// Components along `e₁, e₂`.
    pub p: [f64; 2],
}

impl BaseState {
    pub fn new(x1: f64, x2: f64, p: [f64; 2]) -> Self {
        Self { x1, x2, p }
    }

    pub fn point(&self) -> Point {
        Point::new(self.x1, self.x2)
    }

    pub fn speed(&self) -> f64 {
        norm(&self.p)
    }

    fn to_array(self) -> [f64; 4] {
        [self.x1, self.x2, self.p[0], self.p[1]]
    }

    fn from_array(y: &[f64; 4]) -> Self {
        Self::new(y[0], y[1], [y[2], y[3]])
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum Method {
    /// Classical fixed-step Runge-Kutta.
    #[default]
    Rk4,
    /// Adaptive Dormand-Prince with absolute tolerance [`RK45_ATOL`].
    Rk45,
}

/// Sign convention for the `Q²Q³`, `Q¹Q³` couplings of the lifted system.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum Coupling {
    /// `-Q²Q³` in `dQ¹/dt` and `+Q¹Q³` in `dQ²/dt`, as in the module docs.
    #[default]
    Printed,
    /// `dQ^k/dt = -Γ̂^k_{ij}Q^iQ^j` from the Levi-Civita coefficients of `ĝ`,
    /// which carries the opposite coupling signs. The two flows differ by
    /// `Q³ ↦ -Q³`.
    Derived,
}

/// Quantities tracked along a trajectory.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Monitors {
    pub speed: f64,
    /// `Q³/K` at the sample; lifted trajectories and their projections only.
    pub q3_over_k: Option<f64>,
    /// Norm of the Wong-equation residual, once computed.
    pub wong_residual: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Sample<S> {
    pub t: f64,
    pub state: S,
    pub monitors: Monitors,
}

/// Why an integration stopped before `t_max`.
#[derive(Clone, Debug, PartialEq)]
pub struct Halt {
    /// Time of the last recorded sample.
    pub t: f64,
    pub error: Error,
}

/// Samples in strictly increasing `t`, possibly cut short.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory<S> {
    pub samples: Vec<Sample<S>>,
    pub halt: Option<Halt>,
}

impl<S> Trajectory<S> {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn last(&self) -> Option<&Sample<S>> {
        self.samples.last()
    }

    pub fn is_complete(&self) -> bool {
        self.halt.is_none()
    }
}

impl Trajectory<LiftState> {
    /// `max_t |Q³/K - (Q³/K)(0)|`.
    pub fn q3_over_k_drift(&self) -> f64 {
        drift(self.samples.iter().filter_map(|s| s.monitors.q3_over_k))
    }

    /// `max_t ||Q(t)| - |Q(0)||`.
    pub fn speed_drift(&self) -> f64 {
        drift(self.samples.iter().map(|s| s.monitors.speed))
    }
}

impl Trajectory<BaseState> {
    pub fn speed_drift(&self) -> f64 {
        drift(self.samples.iter().map(|s| s.monitors.speed))
    }
}

fn drift(mut values: impl Iterator<Item = f64>) -> f64 {
    let Some(first) = values.next() else {
        return 0.0;
    };
    values.fold(0.0, |acc, v| {
        let d = (v - first).abs();
        if d.is_nan() {
            f64::NAN
        } else {
            acc.max(d)
        }
    })
}

/// Base data entering the equations of motion at one point.
#[derive(Clone, Copy, Debug)]
struct PointData {
    /// `e^{-λ}`
    scale: f64,
    c112: f64,
    c212: f64,
    k: f64,
    /// `e_aK`
    grad_k: [f64; 2],
}

impl PointData {
    /// For the lift: needs `e_aK`, fails where `ĝ` is singular.
    fn lift(surface: &ConformalSurface, x: Point) -> Result<Self> {
        let f = surface.fields(x, 3)?;
        let k = f.nonsingular_curvature()?;
        Ok(Self {
            scale: f.conformal.value(),
            c112: f.c112.value(),
            c212: f.c212.value(),
            k,
            grad_k: [
                f.along(0, &f.curvature).value(),
                f.along(1, &f.curvature).value(),
            ],
        })
    }

    /// For the base: only the frame and its structure functions.
    fn base(surface: &ConformalSurface, x: Point) -> Result<Self> {
        let f = surface.fields(x, 2)?;
        Ok(Self {
            scale: f.conformal.value(),
            c112: f.c112.value(),
            c212: f.c212.value(),
            k: f.curvature.value(),
            grad_k: [f64::NAN; 2],
        })
    }

    fn log_gradient(&self) -> [f64; 2] {
        [self.grad_k[0] / self.k, self.grad_k[1] / self.k]
    }
}

/// Time derivative of a lifted state under the printed coupling signs.
pub fn lift_rhs(surface: &ConformalSurface, s: &LiftState) -> Result<LiftState> {
    lift_rhs_with(surface, s, Coupling::Printed)
}

pub fn lift_rhs_with(
    surface: &ConformalSurface,
    s: &LiftState,
    coupling: Coupling,
) -> Result<LiftState> {
    let d = PointData::lift(surface, s.point())?;
    let [q1, q2, q3] = s.q;
    let [g1, g2] = d.log_gradient();
    let dq = match coupling {
        Coupling::Printed => [
            -d.c112 * q1 * q2 - d.c212 * q2 * q2 - q2 * q3 - g1 * q3 * q3,
            d.c112 * q1 * q1 + d.c212 * q1 * q2 + q1 * q3 - g2 * q3 * q3,
            g1 * q1 * q3 + g2 * q2 * q3,
        ],
        Coupling::Derived => {
            geodesic_acceleration(&structure_table(d.c112, d.c212, [g1, g2]), &s.q)
        }
    };
    let out = LiftState::new(
        d.scale * q1,
        d.scale * q2,
        -q1 * d.c112 - q2 * d.c212 + q3 * d.k,
        dq,
    );
    finite_or(out.to_array(), s.point(), "lift geodesic rhs")?;
    Ok(out)
}

/// Time derivative of a base state: `dx = e^{-λ}P`, `dP^k = -Γ^k_{ij}P^iP^j`.
pub fn base_rhs(surface: &ConformalSurface, s: &BaseState) -> Result<BaseState> {
    let d = PointData::base(surface, s.point())?;
    let mut c = StructureTable::zeros(2);
    c.set(0, 0, 1, d.c112);
    c.set(1, 0, 1, d.c212);
    let out = BaseState::new(
        d.scale * s.p[0],
        d.scale * s.p[1],
        geodesic_acceleration(&c, &s.p),
    );
    finite_or(out.to_array(), s.point(), "base geodesic rhs")?;
    Ok(out)
}

/// `-Γ^k_{ij}v^iv^j` for the frame with structure functions `c`.
fn geodesic_acceleration<const N: usize>(c: &StructureTable, v: &[f64; N]) -> [f64; N] {
    let gamma = connection_from_structure(c);
    std::array::from_fn(|k| {
        let mut acc = 0.0;
        for i in 0..N {
            for j in 0..N {
                acc -= gamma.get(k, i, j) * v[i] * v[j];
            }
        }
        acc
    })
}

fn finite_or<const N: usize>(v: [f64; N], point: Point, what: &'static str) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite { what, point })
    }
}

fn check_interval(t_max: f64, h: f64) -> Result<()> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "step must be positive, got {h}"
        )));
    }
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "t_max must be positive, got {t_max}"
        )));
    }
    Ok(())
}

fn lift_sample(
    surface: &ConformalSurface,
    t: f64,
    y: &[f64; 6],
) -> Result<(Sample<LiftState>, f64)> {
    let state = LiftState::from_array(y);
    let f = surface.fields(state.point(), 2)?;
    let k = f.nonsingular_curvature()?;
    let sample = Sample {
        t,
        state,
        monitors: Monitors {
            speed: state.speed(),
            q3_over_k: Some(state.q[2] / k),
            wong_residual: None,
        },
    };
    Ok((sample, k))
}

/// Integrates a lifted geodesic with the printed coupling signs.
pub fn integrate_lift(
    surface: &ConformalSurface,
    s0: LiftState,
    t_max: f64,
    h: f64,
    method: Method,
) -> Result<Trajectory<LiftState>> {
    integrate_lift_with(surface, s0, t_max, h, method, Coupling::Printed)
}

pub fn integrate_lift_with(
    surface: &ConformalSurface,
    s0: LiftState,
    t_max: f64,
    h: f64,
    method: Method,
    coupling: Coupling,
) -> Result<Trajectory<LiftState>> {
    check_interval(t_max, h)?;
    let rhs = |y: &[f64; 6]| {
        lift_rhs_with(surface, &LiftState::from_array(y), coupling).map(LiftState::to_array)
    };
    let mut samples: Vec<Sample<LiftState>> = Vec::new();
    let mut last_k = None;
    let record = |t: f64, y: &[f64; 6]| {
        let (sample, k) = lift_sample(surface, t, y)?;
        // a step that jumps across K = 0 has passed through a singular fiber
        if last_k.is_some_and(|prev: f64| prev.signum() != k.signum()) {
            return Err(Error::SingularCurvature {
                point: sample.state.point(),
                curvature: k,
            });
        }
        last_k = Some(k);
        samples.push(sample);
        Ok(())
    };
    let halt = match method {
        Method::Rk4 => ode::rk4(rhs, s0.to_array(), t_max, h, record)?,
        Method::Rk45 => ode::rk45(rhs, s0.to_array(), t_max, h, RK45_ATOL, record)?,
    };
    Ok(finish(samples, halt))
}

/// Integrates a geodesic of the base metric.
pub fn integrate_base(
    surface: &ConformalSurface,
    b0: BaseState,
    t_max: f64,
    h: f64,
    method: Method,
) -> Result<Trajectory<BaseState>> {
    check_interval(t_max, h)?;
    let rhs = |y: &[f64; 4]| base_rhs(surface, &BaseState::from_array(y)).map(BaseState::to_array);
    let mut samples = Vec::new();
    let record = |t: f64, y: &[f64; 4]| {
        let state = BaseState::from_array(y);
        surface.check(state.point())?;
        samples.push(Sample {
            t,
            state,
            monitors: Monitors {
                speed: state.speed(),
                q3_over_k: None,
                wong_residual: None,
            },
        });
        Ok(())
    };
    let halt = match method {
        Method::Rk4 => ode::rk4(rhs, b0.to_array(), t_max, h, record)?,
        Method::Rk45 => ode::rk45(rhs, b0.to_array(), t_max, h, RK45_ATOL, record)?,
    };
    Ok(finish(samples, halt))
}

fn finish<S>(samples: Vec<Sample<S>>, halt: Option<Error>) -> Trajectory<S> {
    let t = samples.last().map_or(0.0, |s| s.t);
    Trajectory {
        samples,
        halt: halt.map(|error| Halt { t, error }),
    }
}

/// Drops `(φ, Q³)` and keeps `(x, Q¹, Q²)` as the base tangent vector, along
/// with the lifted `Q³/K` monitor.
pub fn project(traj: &Trajectory<LiftState>) -> Trajectory<BaseState> {
    Trajectory {
        samples: traj
            .samples
            .iter()
            .map(|s| {
                let state = BaseState::new(s.state.x1, s.state.x2, [s.state.q[0], s.state.q[1]]);
                Sample {
                    t: s.t,
                    state,
                    monitors: Monitors {
                        speed: state.speed(),
                        q3_over_k: s.monitors.q3_over_k,
                        wong_residual: s.monitors.wong_residual,
                    },
                }
            })
            .collect(),
        halt: traj.halt.clone(),
    }
}

/// Largest chart distance between two trajectories sampled at the same times.
pub fn sup_distance(a: &Trajectory<BaseState>, b: &Trajectory<BaseState>) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::InvalidArgument(format!(
            "trajectories have {} and {} samples",
            a.len(),
            b.len()
        )));
    }
    let mut worst = 0.0f64;
    for (p, q) in a.samples.iter().zip(&b.samples) {
        if p.t != q.t {
            return Err(Error::InvalidArgument(format!(
                "sample times differ: {} vs {}",
                p.t, q.t
            )));
        }
        worst = worst.max((p.state.x1 - q.state.x1).hypot(p.state.x2 - q.state.x2));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::catalog;
    use crate::{parse, Guard};

    #[test]
    fn fiber_rotation_is_stationary() {
        for name in ["sphere", "halfplane"] {
            let s = catalog(name).unwrap();
            let st = LiftState::new(0.3, 1.2, 0.0, [0.0, 0.0, 0.7]);
            let d = lift_rhs(&s, &st).unwrap();
            let k = crate::surface::gauss_curvature(&s, st.point()).unwrap().k;
            assert_eq!([d.x1, d.x2], [0.0, 0.0]);
            assert!(d.q.iter().all(|v| v.abs() < 1e-13), "{d:?}");
            assert!((d.phi - 0.7 * k).abs() < 1e-13);
        }
    }

    #[test]
    fn horizontal_start_stays_horizontal() {
        let s = catalog("bump").unwrap();
        let d = lift_rhs(&s, &LiftState::new(0.3, 0.1, 0.0, [0.6, -0.8, 0.0])).unwrap();
        assert_eq!(d.q[2], 0.0);
    }

    #[test]
    fn half_plane_unit_step() {
        let s = catalog("halfplane").unwrap();
        let d = lift_rhs(&s, &LiftState::new(0.0, 1.0, 0.0, [1.0, 0.0, 0.0])).unwrap();
        assert!((d.q[1] + 1.0).abs() < 1e-14);
        assert!((d.phi - 1.0).abs() < 1e-14);
        assert!((d.x1 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn derived_and_printed_differ_by_fiber_flip() {
        let s = catalog("bump").unwrap();
        let st = LiftState::new(0.2, -0.4, 0.0, [0.3, 0.5, 0.9]);
        let printed = lift_rhs_with(&s, &st, Coupling::Printed).unwrap();
        let mut flipped = st;
        flipped.q[2] = -st.q[2];
        let derived = lift_rhs_with(&s, &flipped, Coupling::Derived).unwrap();
        assert!((printed.q[0] - derived.q[0]).abs() < 1e-12);
        assert!((printed.q[1] - derived.q[1]).abs() < 1e-12);
        assert!((printed.q[2] + derived.q[2]).abs() < 1e-12);
        let same = lift_rhs_with(&s, &st, Coupling::Derived).unwrap();
        assert!((same.q[0] - printed.q[0]).abs() > 0.1);
    }

    #[test]
    fn base_rhs_matches_half_plane() {
        // c¹₁₂ = -1, c²₁₂ = 0: dP¹ = P¹P², dP² = -(P¹)²
        let s = catalog("halfplane").unwrap();
        let d = base_rhs(&s, &BaseState::new(0.0, 2.0, [0.6, 0.8])).unwrap();
        assert!((d.p[0] - 0.48).abs() < 1e-14 && (d.p[1] + 0.36).abs() < 1e-14);
    }

    #[test]
    fn vertical_ray_in_half_plane() {
        // unit-speed vertical geodesic: x2(t) = e^t
        let s = catalog("halfplane").unwrap();
        let traj = integrate_base(
            &s,
            BaseState::new(0.0, 1.0, [0.0, 1.0]),
            2.0,
            1e-3,
            Method::Rk4,
        )
        .unwrap();
        for smp in &traj.samples {
            assert_eq!(smp.state.x1, 0.0);
            assert!((smp.state.x2 - smp.t.exp()).abs() < 1e-9 * smp.t.exp());
        }
    }

    #[test]
    fn singularity_halts_with_last_time() {
        // K = -6x1 e^{-2x1^3} vanishes along x1 = 0
        let s = ConformalSurface::new("ridge", parse("x1^3").unwrap(), Guard::All);
        let traj = integrate_lift(
            &s,
            LiftState::new(-0.5, 0.0, 0.0, [1.0, 0.0, 0.0]),
            5.0,
            1e-2,
            Method::Rk4,
        )
        .unwrap();
        let halt = traj.halt.as_ref().expect("halts");
        assert!(matches!(halt.error, Error::SingularCurvature { .. }));
        assert_eq!(halt.t, traj.last().unwrap().t);
        assert!(halt.t < 5.0);
    }

    #[test]
    fn invalid_start_is_an_error() {
        let s = catalog("halfplane").unwrap();
        let bad = LiftState::new(0.0, -1.0, 0.0, [1.0, 0.0, 0.0]);
        assert!(matches!(
            integrate_lift(&s, bad, 1.0, 1e-2, Method::Rk4),
            Err(Error::OutsideChart { .. })
        ));
        let ok = LiftState::new(0.0, 1.0, 0.0, [1.0, 0.0, 0.0]);
        assert!(integrate_lift(&s, ok, 1.0, 0.0, Method::Rk4).is_err());
        assert!(integrate_lift(&s, ok, -1.0, 0.1, Method::Rk4).is_err());
    }

    #[test]
    fn adaptive_conserves_ratio() {
        let s = catalog("bump").unwrap();
        let traj = integrate_lift(
            &s,
            LiftState::new(0.3, 0.1, 0.0, [0.6, 0.0, 0.8]),
            2.0,
            1e-2,
            Method::Rk45,
        )
        .unwrap();
        assert!(traj.is_complete());
        assert!(traj.q3_over_k_drift() < 1e-6, "{}", traj.q3_over_k_drift());
        assert!(traj.samples.windows(2).all(|w| w[1].t > w[0].t));
    }
}
