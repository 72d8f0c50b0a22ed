//! Adaptive Dormand–Prince 5(4) integration for small fixed-size systems.

use crate::error::{invalid, Result};
use crate::math::{abs, powf};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub rel: f64,
    pub abs: f64,
    pub max_steps: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rel: 1e-8,
            abs: 1e-10,
            max_steps: 100_000,
        }
    }
}

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

/// Integrates `x' = f(t, x)` from `t0` to `t1`. Errors from `f` abort the
/// integration and are returned unchanged.
pub fn integrate<const N: usize, F>(
    mut f: F,
    x0: [f64; N],
    t0: f64,
    t1: f64,
    tol: Tolerances,
) -> Result<[f64; N]>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
{
    if !(t1 >= t0) {
        return Err(invalid("integration interval must be nondecreasing"));
    }
    let span = t1 - t0;
    if span == 0.0 {
        return Ok(x0);
    }
    let mut t = t0;
    let mut x = x0;
    let mut h = span.min(0.1 * span.max(1e-3));
    let mut k = [[0.0; N]; 7];
    k[0] = f(t, &x)?;
    let mut steps = 0;
    while t < t1 {
        if steps >= tol.max_steps {
            return Err(invalid("integrator step limit reached"));
        }
        steps += 1;
        let last = t + h >= t1;
        if last {
            h = t1 - t;
        }
        for s in 1..7 {
            let mut xs = x;
            for (i, v) in xs.iter_mut().enumerate() {
                *v += h * (0..s).map(|r| A[s][r] * k[r][i]).sum::<f64>();
            }
            k[s] = f(t + C[s] * h, &xs)?;
        }
        let mut x5 = x;
        let mut err: f64 = 0.0;
        for i in 0..N {
            let mut d5 = 0.0;
            let mut d4 = 0.0;
            for s in 0..7 {
                d5 += B5[s] * k[s][i];
                d4 += B4[s] * k[s][i];
            }
            x5[i] += h * d5;
            let scale = tol.abs + tol.rel * abs(x[i]).max(abs(x5[i]));
            err = err.max(abs(h * (d5 - d4)) / scale);
        }
        if err <= 1.0 {
            t = if last { t1 } else { t + h };
            x = x5;
            // first-same-as-last
            k[0] = k[6];
        }
        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * powf(err, -0.2)).clamp(0.2, 5.0)
        };
        h *= factor;
        if h < 1e-14 * span {
            return Err(invalid("integrator step size underflow"));
        }
    }
    Ok(x)
}
