//! Adaptive Dormand–Prince 5(4) for small autonomous systems.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OdeOptions {
    pub atol: f64,
    pub rtol: f64,
    /// Cap on accepted + rejected steps for one call.
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            atol: 1e-9,
            rtol: 1e-9,
            max_steps: 1_000_000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OdeOutcome<const N: usize> {
    pub t: f64,
    pub y: [f64; N],
    pub accepted: usize,
    pub rejected: usize,
    /// The step callback asked to stop before `t1`.
    pub stopped: bool,
}

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
// 5th-order weights are the last row of A (FSAL); E = b5 - b4.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Integrates `y' = f(y)` from `t0` to `t1 > t0`, landing on `t1` exactly.
/// `on_step(t, y)` runs after every accepted step; returning `false` stops
/// the integration there.
pub fn integrate<const N: usize, F, S>(
    f: F,
    t0: f64,
    y0: [f64; N],
    t1: f64,
    opts: &OdeOptions,
    mut on_step: S,
) -> Result<OdeOutcome<N>>
where
    F: Fn(&[f64; N]) -> [f64; N],
    S: FnMut(f64, &[f64; N]) -> bool,
{
    let mut out = OdeOutcome {
        t: t0,
        y: y0,
        accepted: 0,
        rejected: 0,
        stopped: false,
    };
    if t1 <= t0 {
        return Ok(out);
    }
    let span = t1 - t0;
    let mut k = [[0.0; N]; 7];
    k[0] = f(&y0);
    let mut h = initial_step(&f, &y0, &k[0], opts).min(span);
    let mut t = t0;
    let mut y = y0;
    let mut steps = 0usize;
    while t < t1 {
        if steps >= opts.max_steps {
            return Err(Error::BudgetExceeded(format!(
                "ode: {} steps without reaching t = {t1}",
                opts.max_steps
            )));
        }
        steps += 1;
        let last = t + h >= t1 || t1 - (t + h) < 1e-12 * h;
        let h_eff = if last { t1 - t } else { h };
        let mut ys = y;
        for s in 1..7 {
            for i in 0..N {
                let mut acc = 0.0;
                for (j, kj) in k.iter().enumerate().take(s) {
                    acc += A[s][j] * kj[i];
                }
                ys[i] = y[i] + h_eff * acc;
            }
            k[s] = f(&ys);
        }
        let y_new = ys; // stage 7 input is the 5th-order solution
        let mut err = 0.0f64;
        for i in 0..N {
            let mut e = 0.0;
            for (s, ks) in k.iter().enumerate() {
                e += E[s] * ks[i];
            }
            let sc = opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs());
            err = err.max((h_eff * e / sc).abs());
        }
        if !err.is_finite() {
            out.rejected += 1;
            h = h_eff * 0.1;
            continue;
        }
        if err <= 1.0 {
            t = if last { t1 } else { t + h_eff };
            y = y_new;
            k[0] = k[6];
            out.accepted += 1;
            let grow = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            h = h_eff * grow;
            if !on_step(t, &y) {
                out.stopped = t < t1;
                break;
            }
        } else {
            out.rejected += 1;
            h = h_eff * (0.9 * err.powf(-0.2)).max(0.2);
        }
        if h < 1e-14 * t.abs().max(1.0) {
            return Err(Error::BudgetExceeded(format!(
                "ode: step size underflow at t = {t}"
            )));
        }
    }
    out.t = t;
    out.y = y;
    Ok(out)
}

fn initial_step<const N: usize, F>(f: &F, y0: &[f64; N], f0: &[f64; N], opts: &OdeOptions) -> f64
where
    F: Fn(&[f64; N]) -> [f64; N],
{
    // Hairer–Wanner starting heuristic
    let sc: Vec<f64> = y0.iter().map(|v| opts.atol + opts.rtol * v.abs()).collect();
    let norm = |v: &[f64]| -> f64 {
        (v.iter().zip(&sc).map(|(a, s)| (a / s).powi(2)).sum::<f64>() / N as f64).sqrt()
    };
    let d0 = norm(y0);
    let d1 = norm(f0);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    let mut y1 = *y0;
    for i in 0..N {
        y1[i] += h0 * f0[i];
    }
    let f1 = f(&y1);
    let diff: Vec<f64> = f1.iter().zip(f0).map(|(a, b)| a - b).collect();
    let d2 = norm(&diff) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let opts = OdeOptions::default();
        let out = integrate(|y: &[f64; 1]| [-y[0]], 0.0, [1.0], 5.0, &opts, |_, _| true).unwrap();
        assert_eq!(out.t, 5.0);
        assert!((out.y[0] - (-5.0f64).exp()).abs() < 1e-9);
    }

    #[test]
    fn harmonic_oscillator_period() {
        let opts = OdeOptions {
            atol: 1e-12,
            rtol: 1e-12,
            ..Default::default()
        };
        let tau = 2.0 * std::f64::consts::PI;
        let out = integrate(
            |y: &[f64; 2]| [y[1], -y[0]],
            0.0,
            [1.0, 0.0],
            tau,
            &opts,
            |_, _| true,
        )
        .unwrap();
        assert!((out.y[0] - 1.0).abs() < 1e-10);
        assert!(out.y[1].abs() < 1e-10);
    }

    #[test]
    fn callback_can_stop() {
        let opts = OdeOptions::default();
        let out = integrate(
            |y: &[f64; 1]| [-y[0]],
            0.0,
            [1.0],
            100.0,
            &opts,
            |t, _| t < 1.0,
        )
        .unwrap();
        assert!(out.stopped);
        assert!(out.t >= 1.0 && out.t < 100.0);
    }

    #[test]
    fn step_budget() {
        let opts = OdeOptions {
            max_steps: 3,
            ..Default::default()
        };
        let r = integrate(|y: &[f64; 1]| [-y[0]], 0.0, [1.0], 1e6, &opts, |_, _| true);
        assert!(matches!(r, Err(Error::BudgetExceeded(_))));
    }
}
