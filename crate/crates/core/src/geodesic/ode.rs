//! Explicit Runge-Kutta steppers over fixed-size states.

use crate::{Error, Result};

/// Adaptive steps never shrink below this fraction of the current time scale.
const MIN_STEP: f64 = 1e-12;
const MAX_STEPS: usize = 10_000_000;

fn axpy<const N: usize>(y: &[f64; N], terms: &[(f64, &[f64; N])]) -> [f64; N] {
    std::array::from_fn(|i| y[i] + terms.iter().map(|(a, k)| a * k[i]).sum::<f64>())
}

/// Number of fixed steps covering `[0, t_max]`; the last one may be shorter.
fn step_count(t_max: f64, h: f64) -> usize {
    let n = t_max / h;
    // tolerate representation error so that 10 / 1e-3 gives 10000 steps
    let rounded = n.round();
    if (n - rounded).abs() <= 1e-9 * n.max(1.0) {
        rounded.max(1.0) as usize
    } else {
        n.ceil() as usize
    }
}

fn rk4_step<const N: usize, F>(f: &F, y: &[f64; N], dt: f64) -> Result<[f64; N]>
where
    F: Fn(&[f64; N]) -> Result<[f64; N]>,
{
    let k1 = f(y)?;
    let k2 = f(&axpy(y, &[(dt / 2.0, &k1)]))?;
    let k3 = f(&axpy(y, &[(dt / 2.0, &k2)]))?;
    let k4 = f(&axpy(y, &[(dt, &k3)]))?;
    Ok(axpy(
        y,
        &[
            (dt / 6.0, &k1),
            (dt / 3.0, &k2),
            (dt / 3.0, &k3),
            (dt / 6.0, &k4),
        ],
    ))
}

/// Fixed-step classical RK4 on `[0, t_max]`, handing every state to `record`.
///
/// A failure of `f` or `record` after the initial state stops the run and is
/// returned as `Ok(Some(error))`; failure at the initial state is an `Err`.
pub(crate) fn rk4<const N: usize, F, R>(
    f: F,
    y0: [f64; N],
    t_max: f64,
    h: f64,
    mut record: R,
) -> Result<Option<Error>>
where
    F: Fn(&[f64; N]) -> Result<[f64; N]>,
    R: FnMut(f64, &[f64; N]) -> Result<()>,
{
    f(&y0)?;
    record(0.0, &y0)?;
    let n = step_count(t_max, h);
    let mut y = y0;
    let mut t = 0.0;
    for i in 1..=n {
        let next = if i == n { t_max } else { i as f64 * h };
        let step = rk4_step(&f, &y, next - t).and_then(|y1| record(next, &y1).map(|()| y1));
        match step {
            Ok(y1) => y = y1,
            Err(e) => return Ok(Some(e)),
        }
        t = next;
    }
    Ok(None)
}

// Dormand-Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// One Dormand-Prince step: fifth-order solution and the error estimate.
fn dopri_step<const N: usize, F>(f: &F, y: &[f64; N], dt: f64) -> Result<([f64; N], f64)>
where
    F: Fn(&[f64; N]) -> Result<[f64; N]>,
{
    debug_assert_eq!(C[0], 0.0);
    let mut k = [[0.0; N]; 7];
    for s in 0..7 {
        let mut stage = *y;
        for (j, kj) in k.iter().enumerate().take(s) {
            for (v, kv) in stage.iter_mut().zip(kj) {
                *v += dt * A[s][j] * kv;
            }
        }
        k[s] = f(&stage)?;
    }
    let mut y5 = *y;
    let mut err = 0.0f64;
    for i in 0..N {
        let (mut hi, mut lo) = (0.0, 0.0);
        for s in 0..7 {
            hi += B5[s] * k[s][i];
            lo += B4[s] * k[s][i];
        }
        y5[i] += dt * hi;
        err = err.max((dt * (hi - lo)).abs());
    }
    Ok((y5, err))
}

/// Adaptive Dormand-Prince on `[0, t_max]` with absolute error tolerance
/// `atol`, starting from step `h` and recording every accepted step.
pub(crate) fn rk45<const N: usize, F, R>(
    f: F,
    y0: [f64; N],
    t_max: f64,
    h: f64,
    atol: f64,
    mut record: R,
) -> Result<Option<Error>>
where
    F: Fn(&[f64; N]) -> Result<[f64; N]>,
    R: FnMut(f64, &[f64; N]) -> Result<()>,
{
    f(&y0)?;
    record(0.0, &y0)?;
    let mut y = y0;
    let mut t = 0.0;
    let mut dt = h.min(t_max);
    for _ in 0..MAX_STEPS {
        if t >= t_max {
            return Ok(None);
        }
        let last = t + dt >= t_max;
        let step = if last { t_max - t } else { dt };
        if step < MIN_STEP * t.abs().max(1.0) {
            return Ok(Some(Error::StepFailure { t }));
        }
        let (y1, err) = match dopri_step(&f, &y, step) {
            Ok(r) => r,
            Err(e) => return Ok(Some(e)),
        };
        let ratio = err / atol;
        if !ratio.is_finite() {
            dt = step * 0.2;
            continue;
        }
        let factor = if ratio == 0.0 {
            5.0
        } else {
            (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0)
        };
        if ratio <= 1.0 {
            let next = if last { t_max } else { t + step };
            if let Err(e) = record(next, &y1) {
                return Ok(Some(e));
            }
            t = next;
            y = y1;
        }
        dt = step * factor;
    }
    Ok(Some(Error::StepFailure { t }))
}
