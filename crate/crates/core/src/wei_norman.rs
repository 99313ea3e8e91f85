//! Wei–Norman coefficient functions `A+(t)`, `A-(t)`, `A0(t)`.
//!
//! For the harmonic pump the three closed-form branches (`k^2 < 1`, `k^2 = 1`,
//! `k^2 > 1`) are evaluated through the per-regime pair
//!
//! ```text
//! C = cosh(eps gt), S = sinh(eps gt)/eps     eps = sqrt(1-k^2)   (sub)
//! C = 1,            S = gt                                      (critical)
//! C = cos(eps gt),  S = sin(eps gt)/eps      eps = sqrt(k^2-1)   (super)
//! ```
//!
//! in terms of which `A- = S/(C - ikS)`, `e^{A0} = e^{-ikgt}/(C - ikS)`,
//! `A+ = -e^{-i Omega t} A-`, `x = 1 + S^2` and `n0 = S^2`. This is the same
//! solution written without the `tanh(z - i gamma)` / `cot(z + i delta)`
//! cancellations, and it keeps `arg(C - ikS)` continuous in `t`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::model::{ModelParams, PumpProfile, Regime, RegimeKind};
use crate::ode::{self, OdeOptions, OdeStats};

/// Above this value of `eps*gt` (sub regime) the scalars are assembled in the log domain.
pub const LOG_DOMAIN_THRESHOLD: f64 = 30.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeiNormanCoefficients {
    pub t: f64,
    pub a_plus: Complex64,
    pub a_minus: Complex64,
    /// Imaginary part is continuous in `t` (no `2 pi` jumps).
    pub a_zero: Complex64,
    pub regime: Regime,
    /// `ln(1 - |A-|^2)`, kept separately because `|A-|^2 -> 1` when photon
    /// numbers are large and the difference is lost in `a_minus` itself.
    pub ln_defect: f64,
}

impl WeiNormanCoefficients {
    pub fn identity(t: f64, regime: Regime) -> Self {
        let zero = Complex64::new(0.0, 0.0);
        Self {
            t,
            a_plus: zero,
            a_minus: zero,
            a_zero: zero,
            regime,
            ln_defect: 0.0,
        }
    }

    pub fn exp_a_zero(&self) -> Complex64 {
        self.a_zero.exp()
    }

    /// Real scalars `(x, y, n0)` read off the coefficients.
    pub fn derived(&self) -> DerivedScalars {
        let ln_x = -2.0 * self.a_zero.re;
        let y = self.a_minus.norm_sqr();
        DerivedScalars::from_log_x_and_y(ln_x, y)
    }
}

/// `gamma` (sub regime, `tan gamma = k/sqrt(1-k^2)`) and `delta`
/// (super regime, `coth delta = k/sqrt(k^2-1)`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeAngles {
    pub gamma: Option<f64>,
    pub delta: Option<f64>,
}

pub fn regime_angles(params: &ModelParams) -> RegimeAngles {
    let k = params.k();
    let k2 = k * k;
    match params.regime().kind {
        RegimeKind::Sub => RegimeAngles {
            gamma: Some(k.atan2((1.0 - k2).sqrt())),
            delta: None,
        },
        RegimeKind::Super => RegimeAngles {
            gamma: None,
            // sinh(delta) = sign(k) sqrt(k^2-1), cosh(delta) = |k|
            delta: Some(((k2 - 1.0).sqrt()).asinh().copysign(k)),
        },
        RegimeKind::Critical => RegimeAngles {
            gamma: None,
            delta: None,
        },
    }
}

/// `x = e^{-A0-A0*}`, `y = |A-|^2`, `n0 = -A- A+ e^{-2A0}` (mean photon number
/// of either mode starting from vacuum).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedScalars {
    pub x: f64,
    pub y: f64,
    pub n0: f64,
    pub ln_x: f64,
    pub ln_y: f64,
}

impl DerivedScalars {
    pub fn vacuum() -> Self {
        Self {
            x: 1.0,
            y: 0.0,
            n0: 0.0,
            ln_x: 0.0,
            ln_y: f64::NEG_INFINITY,
        }
    }

    fn from_log_x_and_y(ln_x: f64, y: f64) -> Self {
        let x = ln_x.exp();
        Self {
            x,
            y,
            n0: x * y,
            ln_x,
            ln_y: y.ln(),
        }
    }

    /// From `S^2 = n0`, given as `ln S` to survive very large `gt`.
    fn from_ln_s(ln_s: f64) -> Self {
        if ln_s == f64::NEG_INFINITY {
            return Self::vacuum();
        }
        let ln_n0 = 2.0 * ln_s;
        // ln x = ln(1 + n0)
        let ln_x = if ln_n0 > 0.0 {
            ln_n0 + (-ln_n0).exp().ln_1p()
        } else {
            ln_n0.exp().ln_1p()
        };
        let ln_y = ln_n0 - ln_x;
        let n0 = ln_n0.exp();
        Self {
            x: 1.0 + n0,
            y: ln_y.exp(),
            n0,
            ln_x,
            ln_y,
        }
    }

    /// `1 - y = 1/x`, computed without cancellation.
    pub fn one_minus_y(&self) -> f64 {
        (-self.ln_x).exp()
    }
}

/// Closed-form ingredients for one `(k, gt)` point.
#[derive(Debug, Clone, Copy)]
struct Branch {
    /// `ln |S|` (`-inf` when `S = 0`).
    ln_s: f64,
    /// `C/S`, finite unless `S = 0`.
    c_over_s: f64,
    /// Continuous `arg(C - ikS)`.
    phase: f64,
}

fn branch(k: f64, gt: f64, regime: RegimeKind) -> Branch {
    let k2 = k * k;
    match regime {
        RegimeKind::Sub => {
            let eps = (1.0 - k2).sqrt();
            let a = eps * gt;
            let ln_s = if a == 0.0 {
                f64::NEG_INFINITY
            } else if a.abs() > LOG_DOMAIN_THRESHOLD {
                // sinh|a| = e^{|a|}(1 - e^{-2|a|})/2
                a.abs() - std::f64::consts::LN_2 + (-(2.0 * a.abs())).exp().ln_1p() - eps.ln()
            } else {
                (a.sinh().abs() / eps).ln()
            };
            Branch {
                ln_s,
                c_over_s: eps / a.tanh(),
                phase: -(k * a.tanh() / eps).atan(),
            }
        }
        RegimeKind::Critical => Branch {
            ln_s: gt.abs().ln(),
            c_over_s: 1.0 / gt,
            phase: -(k * gt).atan(),
        },
        RegimeKind::Super => {
            let eps = (k2 - 1.0).sqrt();
            let theta = eps * gt;
            let m = (theta / PI).round();
            let reduced = theta - m * PI;
            let c = k / eps;
            Branch {
                ln_s: (theta.sin().abs() / eps).ln(),
                c_over_s: eps / theta.tan(),
                phase: -(c * reduced.tan()).atan() - c.signum() * m * PI,
            }
        }
    }
}

fn coefficients_from_branch(t: f64, k: f64, gt: f64, regime: Regime, b: Branch) -> WeiNormanCoefficients {
    let ds = DerivedScalars::from_ln_s(b.ln_s);
    let a_minus = if b.ln_s == f64::NEG_INFINITY {
        Complex64::new(0.0, 0.0)
    } else {
        Complex64::new(1.0, 0.0) / Complex64::new(b.c_over_s, -k)
    };
    let kgt = k * gt;
    let a_zero = Complex64::new(-0.5 * ds.ln_x, -b.phase - kgt);
    let a_plus = -Complex64::from_polar(1.0, -2.0 * kgt) * a_minus;
    WeiNormanCoefficients {
        t,
        a_plus,
        a_minus,
        a_zero,
        regime,
        ln_defect: -ds.ln_x,
    }
}

/// Closed-form coefficients for the harmonic pump described by `params`.
/// Negative `t` is allowed and gives the time-reversed evolution.
pub fn solve_analytic(params: &ModelParams, t: f64) -> WeiNormanCoefficients {
    let regime = params.regime();
    let k = params.k();
    let gt = params.g() * t;
    if gt == 0.0 {
        return WeiNormanCoefficients::identity(t, regime);
    }
    coefficients_from_branch(t, k, gt, regime, branch(k, gt, regime.kind))
}

/// `(x, y, n0)` at time `t` for the harmonic pump.
pub fn derived_scalars(params: &ModelParams, t: f64) -> DerivedScalars {
    let gt = params.g() * t;
    if gt == 0.0 {
        return DerivedScalars::vacuum();
    }
    let regime = params.regime();
    DerivedScalars::from_ln_s(branch(params.k(), gt, regime.kind).ln_s)
}

/// Same as [`derived_scalars`] but parameterized directly by `(k, gt)`.
pub fn derived_scalars_kgt(k: f64, gt: f64) -> DerivedScalars {
    if gt == 0.0 {
        return DerivedScalars::vacuum();
    }
    let regime = crate::model::classify_k_squared(k * k, crate::model::DEFAULT_REGIME_EPSILON);
    DerivedScalars::from_ln_s(branch(k, gt, regime.kind).ln_s)
}

/// The pair `(C, S)` from the module docs at dimensionless time `gt`.
/// Overflows to infinity in the sub regime beyond `eps*gt ~ 710`.
pub fn regime_cs(k: f64, gt: f64) -> (f64, f64) {
    let k2 = k * k;
    match crate::model::classify_k_squared(k2, crate::model::DEFAULT_REGIME_EPSILON).kind {
        RegimeKind::Sub => {
            let eps = (1.0 - k2).sqrt();
            let a = eps * gt;
            (a.cosh(), a.sinh() / eps)
        }
        RegimeKind::Critical => (1.0, gt),
        RegimeKind::Super => {
            let eps = (k2 - 1.0).sqrt();
            let a = eps * gt;
            (a.cos(), a.sin() / eps)
        }
    }
}

/// Unitarity residuals `(r1, r2, r3)`:
/// `r1 = |A+* + A-/(e^{2A0} - A-A+)|`, `r2 = |A-* + A+/(e^{2A0} - A-A+)|`,
/// `r3 = |e^{-A0-A0*}(1 - |A-|^2) - 1|`.
pub fn unitarity_residuals(c: &WeiNormanCoefficients) -> (f64, f64, f64) {
    let denom = (2.0 * c.a_zero).exp() - c.a_minus * c.a_plus;
    let (r1, r2) = if denom == Complex64::new(0.0, 0.0) {
        (f64::INFINITY, f64::INFINITY)
    } else {
        (
            (c.a_plus.conj() + c.a_minus / denom).norm(),
            (c.a_minus.conj() + c.a_plus / denom).norm(),
        )
    };
    let r3 = ((-2.0 * c.a_zero.re + c.ln_defect).exp() - 1.0).abs();
    (r1, r2, r3)
}

/// `1 - |z|^2` with the products evaluated exactly via fused multiply-add.
pub fn one_minus_norm_sqr(z: Complex64) -> f64 {
    let p = z.re * z.re;
    let ep = z.re.mul_add(z.re, -p);
    let q = z.im * z.im;
    let eq = z.im.mul_add(z.im, -q);
    ((1.0 - p) - q) - ep - eq
}

/// Integrates the coefficient equations
///
/// ```text
/// A+' = g~ A+^2 - g~*,   A0' = g~ A+,   A-' = g~ e^{2 A0}
/// ```
///
/// with `g~(t) = g(t) e^{-i(omega_a + omega_b) t}` from `A(0) = 0`, reporting
/// the coefficients at every node of `t_grid` (which must start at 0).
pub fn solve_ode(
    pump: &PumpProfile,
    params: &ModelParams,
    t_grid: &[f64],
    tol: f64,
) -> Result<Vec<WeiNormanCoefficients>> {
    solve_ode_with_stats(pump, params, t_grid, tol).map(|(c, _)| c)
}

pub fn solve_ode_with_stats(
    pump: &PumpProfile,
    params: &ModelParams,
    t_grid: &[f64],
    tol: f64,
) -> Result<(Vec<WeiNormanCoefficients>, OdeStats)> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(invalid("tol", format!("must be finite and > 0, got {tol}")));
    }
    match t_grid.first() {
        Some(&t0) if t0 == 0.0 => {}
        _ => return Err(invalid("t_grid", "time grid must start at t = 0")),
    }
    let sum_freq = params.omega_a() + params.omega_b();
    let rhs = |t: f64, y: &[Complex64], dy: &mut [Complex64]| -> Result<()> {
        let gt = pump.eval(t)? * Complex64::from_polar(1.0, -sum_freq * t);
        dy[0] = gt * y[0] * y[0] - gt.conj();
        dy[1] = gt * y[0];
        dy[2] = gt * (2.0 * y[1]).exp();
        Ok(())
    };
    let zero = Complex64::new(0.0, 0.0);
    let (states, stats) = ode::integrate(rhs, 0.0, &[zero; 3], t_grid, &OdeOptions::with_tol(tol))?;
    let regime = params.regime();
    let coeffs = t_grid
        .iter()
        .zip(states)
        .map(|(&t, y)| WeiNormanCoefficients {
            t,
            a_plus: y[0],
            a_zero: y[1],
            a_minus: y[2],
            regime,
            ln_defect: one_minus_norm_sqr(y[2]).ln(),
        })
        .collect();
    Ok((coeffs, stats))
}

/// Coefficients on `t_grid` for an arbitrary pump: the closed form for a
/// harmonic pump with `g > 0`, the integrator otherwise.
pub fn coefficients_for(
    pump: &PumpProfile,
    params: &ModelParams,
    t_grid: &[f64],
    tol: f64,
) -> Result<Vec<WeiNormanCoefficients>> {
    match pump {
        PumpProfile::Harmonic { g, omega } if *g > 0.0 => {
            let p = ModelParams::new(params.omega_a(), params.omega_b(), *g, *omega)?;
            Ok(t_grid.iter().map(|&t| solve_analytic(&p, t)).collect())
        }
        _ => solve_ode(pump, params, t_grid, tol),
    }
}
