//! Adaptive Dormand-Prince 5(4) integrator on fixed-size real states.

use crate::error::{Error, Result};

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
const B: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

#[derive(Debug, Clone, Copy)]
pub struct Options {
    pub rtol: f64,
    pub atol: f64,
    pub h0: f64,
    pub max_steps: usize,
}

pub enum Control {
    Continue,
    Stop,
}

/// One Dormand-Prince step: (y(x + h), error estimate).
pub fn step<const N: usize, F>(f: &F, x: f64, y: &[f64; N], h: f64) -> ([f64; N], [f64; N])
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let mut k = [[0.0; N]; 7];
    k[0] = f(x, y);
    for s in 1..7 {
        let mut ys = *y;
        for (j, kj) in k.iter().enumerate().take(s) {
            let a = A[s][j];
            if a != 0.0 {
                for i in 0..N {
                    ys[i] += h * a * kj[i];
                }
            }
        }
        k[s] = f(x + C[s] * h, &ys);
    }
    let mut y5 = *y;
    let mut err = [0.0; N];
    for s in 0..7 {
        for i in 0..N {
            y5[i] += h * B[s] * k[s][i];
            err[i] += h * E[s] * k[s][i];
        }
    }
    (y5, err)
}

fn error_norm<const N: usize>(y0: &[f64; N], y1: &[f64; N], err: &[f64; N], o: &Options) -> f64 {
    let mut acc = 0.0;
    for i in 0..N {
        let sc = o.atol + o.rtol * y0[i].abs().max(y1[i].abs());
        acc += (err[i] / sc).powi(2);
    }
    (acc / N as f64).sqrt()
}

/// Integrates from x0 towards x1. `on_step(x_prev, y_prev, x, y)` is called
/// after every accepted step and may stop the integration early.
/// Returns the final (x, y).
pub fn integrate<const N: usize, F, G>(
    f: &F,
    x0: f64,
    y0: [f64; N],
    x1: f64,
    o: &Options,
    mut on_step: G,
) -> Result<(f64, [f64; N])>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
    G: FnMut(f64, &[f64; N], f64, &[f64; N]) -> Control,
{
    let dir = if x1 >= x0 { 1.0 } else { -1.0 };
    let span = (x1 - x0).abs();
    let mut x = x0;
    let mut y = y0;
    let mut h = o.h0.abs().min(span).max(f64::MIN_POSITIVE) * dir;
    let hmin = 1e-14 * (1.0 + x0.abs().max(x1.abs()));
    for _ in 0..o.max_steps {
        if (x1 - x) * dir <= 0.0 {
            return Ok((x, y));
        }
        if (x + h - x1) * dir > 0.0 {
            h = x1 - x;
        }
        let (y_new, err) = step(f, x, &y, h);
        let en = error_norm(&y, &y_new, &err, o);
        if !en.is_finite() {
            h *= 0.25;
            if h.abs() < hmin {
                return Err(Error::StepFailure(x));
            }
            continue;
        }
        if en <= 1.0 {
            let x_new = if (x + h - x1) * dir >= 0.0 { x1 } else { x + h };
            let stop = matches!(on_step(x, &y, x_new, &y_new), Control::Stop);
            x = x_new;
            y = y_new;
            if stop {
                return Ok((x, y));
            }
        }
        let fac = if en == 0.0 {
            5.0
        } else {
            (0.9 * en.powf(-0.2)).clamp(0.2, 5.0)
        };
        h *= fac;
        if h.abs() < hmin && (x1 - x).abs() > hmin {
            return Err(Error::StepFailure(x));
        }
    }
    Err(Error::NoConvergence(format!(
        "integrator exceeded {} steps",
        o.max_steps
    )))
}
