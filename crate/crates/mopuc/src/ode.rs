//! Adaptive Dormand-Prince 5(4) integrator for matrix-valued linear ODEs.

use crate::error::{Error, Result};
use crate::linalg::{c, fro, zeros, CMat};

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

const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;

// fifth-order minus embedded fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const MAX_STEPS: usize = 2_000_000;

/// `y + h * sum_i a_i k_i`.
fn combo(y: &CMat, h: f64, terms: &[(f64, &CMat)]) -> CMat {
    let mut out = y.clone();
    for (a, k) in terms {
        out += *k * c(a * h, 0.0);
    }
    out
}

/// Integration controls.
#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            rtol: 1e-10,
            atol: 1e-300,
        }
    }
}

/// Integrates `dy/dt = f(t, y)` from `t0` to `t1`.
pub fn integrate<F>(f: F, t0: f64, t1: f64, y0: &CMat, opts: OdeOptions) -> Result<CMat>
where
    F: Fn(f64, &CMat) -> CMat,
{
    let span = t1 - t0;
    if span == 0.0 {
        return Ok(y0.clone());
    }
    let dir = span.signum();
    let mut t = t0;
    let mut y = y0.clone();
    let mut h = span.abs() / 64.0;
    let mut k1 = f(t, &y);
    let mut last_err = 0.0;

    for _ in 0..MAX_STEPS {
        let remaining = (t1 - t).abs();
        if remaining <= 1e-15 * span.abs() {
            return Ok(y);
        }
        if h > remaining {
            h = remaining;
        }
        let hs = dir * h;
        let k2 = f(t + C2 * hs, &combo(&y, hs, &[(A21, &k1)]));
        let k3 = f(t + C3 * hs, &combo(&y, hs, &[(A31, &k1), (A32, &k2)]));
        let k4 = f(t + C4 * hs, &combo(&y, hs, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = f(
            t + C5 * hs,
            &combo(&y, hs, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        );
        let k6 = f(
            t + hs,
            &combo(&y, hs, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
        );
        let y_new = combo(&y, hs, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
        let k7 = f(t + hs, &y_new);
        let err_vec = combo(
            &zeros(y.nrows(), y.ncols()),
            hs,
            &[(E1, &k1), (E3, &k3), (E4, &k4), (E5, &k5), (E6, &k6), (E7, &k7)],
        );
        let scale = opts.atol + opts.rtol * fro(&y).max(fro(&y_new));
        let err = fro(&err_vec) / scale;
        if !err.is_finite() {
            return Err(Error::Integration {
                t,
                achieved: f64::INFINITY,
            });
        }
        last_err = err * opts.rtol;
        if err <= 1.0 {
            t += hs;
            y = y_new;
            k1 = k7;
        }
        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        h *= factor;
        if h < 1e-14 * span.abs() {
            return Err(Error::Integration { t, achieved: last_err });
        }
    }
    Err(Error::Integration { t, achieved: last_err })
}
