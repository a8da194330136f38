//! Dormand-Prince 5(4) embedded Runge-Kutta pair with adaptive step size.
//!
//! Small fixed-size systems only; the state is a `[f64; N]`. The driver
//! takes a `guard` closure that inspects every candidate step and can
//! reject it (forcing a smaller step), accept it, or accept it and stop.
//! The structure solvers use this to stop at a switching point without
//! stepping across the stellar surface.

use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// 5th-order weights minus embedded 4th-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Step-size control settings.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Control {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    /// Upper bound on |h|.
    pub max_step: f64,
}

/// Decision returned by the guard for a candidate step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Verdict {
    Accept,
    /// Retry with half the step.
    Reject,
    /// Accept the step and end the integration.
    Stop,
}

/// Final state of an integration.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Outcome<const N: usize> {
    pub t: f64,
    pub y: [f64; N],
    pub steps: usize,
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        *o += h * acc;
    }
    out
}

/// One trial step. Returns the new state, its derivative (FSAL) and the
/// scaled error norm.
fn trial<const N: usize, F>(
    f: &mut F,
    t: f64,
    y: &[f64; N],
    k1: &[f64; N],
    h: f64,
    ctl: &Control,
) -> ([f64; N], [f64; N], f64)
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    let k2 = f(t + C2 * h, &axpy(y, h, &[(A21, k1)]));
    let k3 = f(t + C3 * h, &axpy(y, h, &[(A31, k1), (A32, &k2)]));
    let k4 = f(t + C4 * h, &axpy(y, h, &[(A41, k1), (A42, &k2), (A43, &k3)]));
    let k5 = f(
        t + C5 * h,
        &axpy(y, h, &[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
    );
    let k6 = f(
        t + h,
        &axpy(y, h, &[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
    );
    let y_new = axpy(
        y,
        h,
        &[(A71, k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
    );
    let k7 = f(t + h, &y_new);

    let mut sum = 0.0;
    for i in 0..N {
        let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        let sc = ctl.atol + ctl.rtol * y[i].abs().max(y_new[i].abs()) + f64::MIN_POSITIVE;
        sum += (e / sc).powi(2);
    }
    let err = (sum / N as f64).sqrt();
    (y_new, k7, err)
}

/// Integrates from `t0` towards `t_end` (either direction), starting with
/// step `h0` whose sign must point at `t_end`. `record` sees every accepted
/// point, including the start.
pub(crate) fn integrate<const N: usize, F, G, R>(
    mut f: F,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    h0: f64,
    ctl: &Control,
    mut guard: G,
    mut record: R,
) -> Result<Outcome<N>>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
    G: FnMut(f64, &[f64; N]) -> Verdict,
    R: FnMut(f64, &[f64; N]),
{
    let dir = (t_end - t0).signum();
    if dir == 0.0 {
        record(t0, &y0);
        return Ok(Outcome { t: t0, y: y0, steps: 0 });
    }
    let mut t = t0;
    let mut y = y0;
    let mut h = dir * h0.abs().min(ctl.max_step).max(f64::MIN_POSITIVE);
    let mut k1 = f(t, &y);
    record(t, &y);

    let mut steps = 0usize;
    let mut attempts = 0usize;
    let mut last_rejected = false;
    loop {
        attempts += 1;
        if attempts > 4 * ctl.max_steps {
            return Err(Error::NonConvergence(format!(
                "exceeded {} step attempts at t = {t}",
                4 * ctl.max_steps
            )));
        }
        if steps >= ctl.max_steps {
            return Err(Error::NonConvergence(format!(
                "exceeded {} accepted steps at t = {t}",
                ctl.max_steps
            )));
        }

        let remaining = t_end - t;
        let mut finishing = false;
        if (h.abs()) >= remaining.abs() {
            h = remaining;
            finishing = true;
        }
        if h.abs() <= 1e-14 * t.abs().max(1e-300) {
            return Err(Error::NonConvergence(format!("step size underflow at t = {t}")));
        }

        let (y_new, k7, err) = trial(&mut f, t, &y, &k1, h, ctl);
        let finite = err.is_finite() && y_new.iter().all(|v| v.is_finite());
        if !finite {
            h *= 0.25;
            last_rejected = true;
            continue;
        }
        if err > 1.0 {
            let fac = (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
            h *= fac;
            last_rejected = true;
            continue;
        }

        let t_new = if finishing { t_end } else { t + h };
        match guard(t_new, &y_new) {
            Verdict::Reject => {
                h *= 0.5;
                last_rejected = true;
                continue;
            }
            verdict => {
                steps += 1;
                t = t_new;
                y = y_new;
                k1 = k7;
                record(t, &y);
                if verdict == Verdict::Stop || finishing {
                    return Ok(Outcome { t, y, steps });
                }
            }
        }

        let mut fac = if err == 0.0 { 5.0 } else { 0.9 * err.powf(-0.2) };
        fac = fac.clamp(0.2, 5.0);
        if last_rejected {
            fac = fac.min(1.0);
        }
        last_rejected = false;
        h = dir * (h.abs() * fac).min(ctl.max_step);
    }
}
