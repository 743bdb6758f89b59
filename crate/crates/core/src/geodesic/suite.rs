//! Seeded checks of the conservation laws and the projection theorem.

use rand::Rng;
use serde::Serialize;

use super::{
    coupling_comparison, integrate_base, integrate_lift, project, sup_distance, BaseState,
    CouplingComparison, LiftState, Method, Trajectory,
};
use crate::lift::{CheckResult, KAPPA_MIN};
use crate::sampling::{draw_point, rng};
use crate::surface::{gauss_curvature, ConformalSurface};
use crate::{Error, Result};

/// Parameters of the invariant suite; the defaults are the documented thresholds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SuiteConfig {
    pub states: usize,
    pub t_max: f64,
    pub step: f64,
    pub projection_t_max: f64,
    /// Coarsest step of the convergence-order measurement. At `step` the
    /// drift of a fourth-order method sits at the roundoff floor, so the order
    /// is measured where truncation error dominates: drifts at `h` and `h/2`,
    /// starting from this value and halving while either run fails to reach
    /// `t_max`.
    pub convergence_step: f64,
    pub convergence_halvings: usize,
    pub conservation_tol: f64,
    pub speed_tol: f64,
    pub horizontal_tol: f64,
    pub projection_tol: f64,
    pub min_order_ratio: f64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            states: 5,
            t_max: 10.0,
            step: 1e-3,
            projection_t_max: 5.0,
            convergence_step: 0.1,
            convergence_halvings: 4,
            conservation_tol: 1e-6,
            speed_tol: 1e-8,
            horizontal_tol: 1e-12,
            projection_tol: 1e-6,
            min_order_ratio: 8.0,
        }
    }
}

/// Drift reduction when the step is halved.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Convergence {
    pub state: usize,
    pub coarse_step: f64,
    /// `Q3_over_K`, or `speed` where the `Q³/K` drift is at the roundoff floor.
    pub quantity: &'static str,
    pub coarse_drift: f64,
    pub fine_drift: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HaltNote {
    pub state: usize,
    pub t: f64,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GeodesicReport {
    pub surface: String,
    pub seed: u64,
    pub config: SuiteConfig,
    pub initial_states: Vec<LiftState>,
    pub checks: Vec<CheckResult>,
    pub convergence: Vec<Convergence>,
    /// Printed versus derived coupling coefficients at the first state.
    pub coupling: CouplingComparison,
    pub halts: Vec<HaltNote>,
    pub passed: bool,
}

/// Below this the `Q³/K` drift is roundoff and carries no convergence information.
const DRIFT_FLOOR: f64 = 1e-12;

/// Seeded unit-speed initial states with a nonzero fiber component.
pub fn initial_states(
    surface: &ConformalSurface,
    count: usize,
    seed: u64,
) -> Result<Vec<LiftState>> {
    let mut rng = rng(seed);
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0;
    while out.len() < count {
        attempts += 1;
        if attempts > 100 * count + 1000 {
            return Err(Error::InvalidArgument(format!(
                "no nonsingular points found on `{}`",
                surface.name()
            )));
        }
        let x = draw_point(surface, &mut rng)?;
        let q = loop {
            let v: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-1.0..=1.0));
            let n = v.iter().map(|a| a * a).sum::<f64>().sqrt();
            if (0.1..=1.0).contains(&n) && v[2].abs() >= 0.1 * n {
                break v.map(|a| a / n);
            }
        };
        match gauss_curvature(surface, x) {
            Ok(g) if g.k.abs() >= KAPPA_MIN => out.push(LiftState::new(x.x1, x.x2, 0.0, q)),
            Ok(_) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// The same states with the fiber component removed and unit speed restored.
fn horizontal(s: &LiftState) -> LiftState {
    let n = s.q[0].hypot(s.q[1]);
    LiftState::new(s.x1, s.x2, s.phi, [s.q[0] / n, s.q[1] / n, 0.0])
}

struct Worst(f64);

impl Worst {
    fn add(&mut self, v: f64) {
        self.0 = if v.is_nan() || self.0.is_nan() {
            f64::NAN
        } else {
            self.0.max(v)
        };
    }
}

pub fn geodesic_suite(
    surface: &ConformalSurface,
    seed: u64,
    config: &SuiteConfig,
) -> Result<GeodesicReport> {
    let states = initial_states(surface, config.states, seed)?;
    let mut halts = Vec::new();
    let mut note = |i: usize, traj_halt: Option<&super::Halt>| {
        if let Some(h) = traj_halt {
            halts.push(HaltNote {
                state: i,
                t: h.t,
                message: h.error.to_string(),
            });
            true
        } else {
            false
        }
    };
    let (mut conservation, mut speed, mut flat, mut proj) =
        (Worst(0.0), Worst(0.0), Worst(0.0), Worst(0.0));
    let mut convergence = Vec::new();
    for (i, s0) in states.iter().enumerate() {
        let traj = integrate_lift(surface, *s0, config.t_max, config.step, Method::Rk4)?;
        if note(i, traj.halt.as_ref()) {
            conservation.add(f64::INFINITY);
        }
        conservation.add(traj.q3_over_k_drift());
        speed.add(traj.speed_drift());

        let h0 = horizontal(s0);
        let lifted = integrate_lift(surface, h0, config.t_max, config.step, Method::Rk4)?;
        if note(i, lifted.halt.as_ref()) {
            flat.add(f64::INFINITY);
        }
        for s in &lifted.samples {
            flat.add(s.state.q[2].abs());
        }

        let short = integrate_lift(
            surface,
            h0,
            config.projection_t_max,
            config.step,
            Method::Rk4,
        )?;
        let b0 = BaseState::new(h0.x1, h0.x2, [h0.q[0], h0.q[1]]);
        let base = integrate_base(
            surface,
            b0,
            config.projection_t_max,
            config.step,
            Method::Rk4,
        )?;
        if note(i, short.halt.as_ref()) || note(i, base.halt.as_ref()) {
            proj.add(f64::INFINITY);
        } else {
            proj.add(sup_distance(&project(&short), &base)?);
        }

        convergence.push(convergence_ratio(surface, s0, i, config)?);
    }
    // a NaN ratio (no step pair reached t_max) must fail the check
    let min_ratio = convergence
        .iter()
        .map(|c| c.ratio)
        .fold(
            f64::INFINITY,
            |a, r| if r.is_nan() { f64::NAN } else { a.min(r) },
        );
    let checks = vec![
        CheckResult::new(
            "q3_over_k_conservation",
            conservation.0,
            config.conservation_tol,
        ),
        CheckResult::new("speed_conservation", speed.0, config.speed_tol),
        CheckResult::new("horizontality", flat.0, config.horizontal_tol),
        CheckResult::new("projection_vs_base", proj.0, config.projection_tol),
        CheckResult {
            name: "convergence_order".into(),
            max_deviation: min_ratio,
            tolerance: config.min_order_ratio,
            passed: min_ratio >= config.min_order_ratio,
        },
    ];
    let coupling = coupling_comparison(surface, states[0].point())?;
    let passed = checks.iter().all(|c| c.passed);
    Ok(GeodesicReport {
        surface: surface.name().to_string(),
        seed,
        config: *config,
        initial_states: states,
        checks,
        convergence,
        coupling,
        halts,
        passed,
    })
}

fn convergence_ratio(
    surface: &ConformalSurface,
    s0: &LiftState,
    index: usize,
    config: &SuiteConfig,
) -> Result<Convergence> {
    let run = |h: f64| -> Result<Trajectory<LiftState>> {
        integrate_lift(surface, *s0, config.t_max, h, Method::Rk4)
    };
    let mut h = config.convergence_step;
    let (mut coarse, mut fine) = (run(h)?, run(h / 2.0)?);
    for _ in 0..config.convergence_halvings {
        if coarse.is_complete() && fine.is_complete() {
            break;
        }
        h /= 2.0;
        coarse = fine;
        fine = run(h / 2.0)?;
    }
    let (quantity, c, f) = if coarse.q3_over_k_drift() > DRIFT_FLOOR {
        (
            "Q3_over_K",
            coarse.q3_over_k_drift(),
            fine.q3_over_k_drift(),
        )
    } else {
        ("speed", coarse.speed_drift(), fine.speed_drift())
    };
    let ratio = if coarse.is_complete() && fine.is_complete() {
        c / f
    } else {
        f64::NAN
    };
    Ok(Convergence {
        state: index,
        coarse_step: h,
        quantity,
        coarse_drift: c,
        fine_drift: f,
        ratio,
    })
}
