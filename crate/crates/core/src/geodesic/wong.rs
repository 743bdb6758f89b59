//! Residual of the Wong equation along projected trajectories.
//!
//! For a lifted geodesic with `Q³ = C·K`, the projected curve satisfies
//!
//! ```text
//! ∇_γ̇ γ̇ = C·K·J(γ̇) - C²·K·grad K,   J(P¹, P²) = (-P², P¹),
//! ```
//!
//! in base-frame components, with `grad K = (e₁K, e₂K)`. The residual is
//! evaluated from the sampled velocities alone: `dP/dt` comes from centered
//! differences, not from the integrator's right-hand side.
//!
//! Trajectories of the [`Coupling::Derived`](super::Coupling) flow satisfy the
//! same equation with `C` replaced by `-C`.

use super::{BaseState, LiftState, Trajectory};
use crate::connection::{connection_from_structure, StructureTable};
use crate::surface::ConformalSurface;
use crate::{Error, Result};

/// Residual norms per sample; the two end samples have none.
///
/// `c` defaults to the `Q³/K` monitor of the first sample.
pub fn wong_residual(
    surface: &ConformalSurface,
    traj: &Trajectory<BaseState>,
    c: Option<f64>,
) -> Result<Vec<Option<f64>>> {
    let n = traj.len();
    if n < 3 {
        return Err(Error::TooShort(n));
    }
    let c = match c {
        Some(c) => c,
        None => traj.samples[0].monitors.q3_over_k.ok_or_else(|| {
            Error::InvalidArgument("trajectory carries no Q3/K monitor; supply C".into())
        })?,
    };
    let mut out = vec![None; n];
    for i in 1..n - 1 {
        let (prev, here, next) = (&traj.samples[i - 1], &traj.samples[i], &traj.samples[i + 1]);
        let (h1, h2) = (here.t - prev.t, next.t - here.t);
        let w = [
            -h2 / (h1 * (h1 + h2)),
            (h2 - h1) / (h1 * h2),
            h1 / (h2 * (h1 + h2)),
        ];
        let p = here.state.p;
        let dp: [f64; 2] =
            std::array::from_fn(|a| w[0] * prev.state.p[a] + w[1] * p[a] + w[2] * next.state.p[a]);
        let f = surface.fields(here.state.point(), 3)?;
        let k = f.curvature.value();
        let grad = [
            f.along(0, &f.curvature).value(),
            f.along(1, &f.curvature).value(),
        ];
        let mut table = StructureTable::zeros(2);
        table.set(0, 0, 1, f.c112.value());
        table.set(1, 0, 1, f.c212.value());
        let gamma = connection_from_structure(&table);
        let j = [-p[1], p[0]];
        let r: [f64; 2] = std::array::from_fn(|a| {
            let mut acc = dp[a];
            for b in 0..2 {
                for d in 0..2 {
                    acc += gamma.get(a, b, d) * p[b] * p[d];
                }
            }
            acc - c * k * j[a] + c * c * k * grad[a]
        });
        out[i] = Some(r[0].hypot(r[1]));
    }
    Ok(out)
}

/// `|∇_γ̇ γ̇|` per sample: the residual of the base geodesic equation.
pub fn base_geodesic_residual(
    surface: &ConformalSurface,
    traj: &Trajectory<BaseState>,
) -> Result<Vec<Option<f64>>> {
    wong_residual(surface, traj, Some(0.0))
}

/// Stores residuals computed on a projection back into the lifted trajectory.
pub fn attach_wong(traj: &mut Trajectory<LiftState>, residuals: &[Option<f64>]) {
    for (s, r) in traj.samples.iter_mut().zip(residuals) {
        s.monitors.wong_residual = *r;
    }
}
