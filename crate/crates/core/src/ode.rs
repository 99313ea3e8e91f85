//! Dormand–Prince 5(4) integrator for complex-valued systems.
//!
//! Step control keeps the embedded error estimate below `tol` per unit step
//! (`max_i |err_i| <= tol * h`) with a PI controller. Requested output times
//! are hit exactly by shortening the step that would cross them.

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    /// Local error per unit step.
    pub tol: f64,
    pub initial_step: Option<f64>,
    pub max_step: f64,
    pub max_steps: usize,
}

impl OdeOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            initial_step: None,
            max_step: f64::INFINITY,
            max_steps: 50_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
}

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

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Integrates `y' = f(t, y)` from `(t0, y0)` and returns the state at each of
/// `t_out` (which must be non-decreasing and start at or after `t0`).
pub fn integrate<F>(
    mut rhs: F,
    t0: f64,
    y0: &[Complex64],
    t_out: &[f64],
    opts: &OdeOptions,
) -> Result<(Vec<Vec<Complex64>>, OdeStats)>
where
    F: FnMut(f64, &[Complex64], &mut [Complex64]) -> Result<()>,
{
    if !(opts.tol.is_finite() && opts.tol > 0.0) {
        return Err(invalid("tol", format!("must be finite and > 0, got {}", opts.tol)));
    }
    if t_out.windows(2).any(|w| w[1] < w[0]) || t_out.first().is_some_and(|&t| t < t0) {
        return Err(invalid("t_grid", "output times must be non-decreasing and >= t0"));
    }

    let n = y0.len();
    let mut stats = OdeStats::default();
    let mut y = y0.to_vec();
    let mut t = t0;
    let mut out = Vec::with_capacity(t_out.len());

    let zero = Complex64::new(0.0, 0.0);
    let mut k1 = vec![zero; n];
    let mut k2 = vec![zero; n];
    let mut k3 = vec![zero; n];
    let mut k4 = vec![zero; n];
    let mut k5 = vec![zero; n];
    let mut k6 = vec![zero; n];
    let mut k7 = vec![zero; n];
    let mut ytmp = vec![zero; n];
    let mut ynew = vec![zero; n];

    rhs(t, &y, &mut k1)?;
    stats.rhs_evals += 1;

    let span = t_out.last().map_or(0.0, |&tf| tf - t0);
    let mut h = opts.initial_step.unwrap_or_else(|| {
        let scale = k1.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1e-300);
        (0.01 * opts.tol.powf(0.25) / scale).min(span.max(1e-12))
    });
    h = h.min(opts.max_step).max(1e-300);
    let mut err_prev: f64 = 1.0;

    for &target in t_out {
        while t < target {
            if stats.accepted + stats.rejected >= opts.max_steps {
                return Err(Error::TooManySteps {
                    max_steps: opts.max_steps,
                    t,
                });
            }
            let remaining = target - t;
            let last = h >= remaining;
            let step = if last { remaining } else { h };
            if step <= 1e-14 * t.abs().max(1.0) && !last {
                return Err(Error::StepUnderflow { t });
            }

            for i in 0..n {
                ytmp[i] = y[i] + k1[i] * (step * A21);
            }
            rhs(t + C2 * step, &ytmp, &mut k2)?;
            for i in 0..n {
                ytmp[i] = y[i] + (k1[i] * A31 + k2[i] * A32) * step;
            }
            rhs(t + C3 * step, &ytmp, &mut k3)?;
            for i in 0..n {
                ytmp[i] = y[i] + (k1[i] * A41 + k2[i] * A42 + k3[i] * A43) * step;
            }
            rhs(t + C4 * step, &ytmp, &mut k4)?;
            for i in 0..n {
                ytmp[i] = y[i] + (k1[i] * A51 + k2[i] * A52 + k3[i] * A53 + k4[i] * A54) * step;
            }
            rhs(t + C5 * step, &ytmp, &mut k5)?;
            for i in 0..n {
                ytmp[i] = y[i]
                    + (k1[i] * A61 + k2[i] * A62 + k3[i] * A63 + k4[i] * A64 + k5[i] * A65)
                        * step;
            }
            rhs(t + step, &ytmp, &mut k6)?;
            for i in 0..n {
                ynew[i] = y[i]
                    + (k1[i] * A71 + k3[i] * A73 + k4[i] * A74 + k5[i] * A75 + k6[i] * A76)
                        * step;
            }
            rhs(t + step, &ynew, &mut k7)?;
            stats.rhs_evals += 6;

            let mut err = 0.0f64;
            for i in 0..n {
                let e = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7)
                    * step;
                err = err.max(e.norm());
            }
            // error per unit step, normalized by the tolerance
            let ratio = err / (opts.tol * step);

            if ratio <= 1.0 {
                stats.accepted += 1;
                t = if last { target } else { t + step };
                std::mem::swap(&mut y, &mut ynew);
                std::mem::swap(&mut k1, &mut k7);
                let r = ratio.max(1e-10);
                let fac = 0.9 * r.powf(-0.7 / 4.0) * err_prev.powf(0.4 / 4.0);
                // a truncated final step says nothing about the natural step size
                if !last || step >= 0.5 * h {
                    h = step * fac.clamp(0.2, 5.0);
                }
                h = h.min(opts.max_step);
                err_prev = r;
            } else {
                stats.rejected += 1;
                let fac = if ratio.is_finite() {
                    (0.9 * ratio.powf(-0.25)).clamp(0.1, 0.9)
                } else {
                    0.1
                };
                h = step * fac;
                if h <= 1e-14 * t.abs().max(1.0) {
                    return Err(Error::StepUnderflow { t });
                }
            }
        }
        out.push(y.clone());
    }
    Ok((out, stats))
}
