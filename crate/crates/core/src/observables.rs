//! Heisenberg operators, photon statistics, cross-mode correlations,
//! quadrature squeezing and signal-to-noise ratios.

use std::fmt;

use num_complex::Complex64;

use crate::amplitudes::{coherent_mean_numbers, CoherentPair, FockPair};
use crate::error::{Error, Result};
use crate::model::{ModelParams, RegimeKind};
use crate::moments::{MomentTable, ProductState};
use crate::special::{golden_min, local_extrema, ExtremumKind};
use crate::wei_norman::{derived_scalars, regime_cs, solve_analytic, DerivedScalars, WeiNormanCoefficients};

/// `a(t) = u a + v b†`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BogoliubovCoefficients {
    pub t: f64,
    pub u: Complex64,
    pub v: Complex64,
}

impl BogoliubovCoefficients {
    /// `|u|^2 - |v|^2`, which the canonical commutator pins to 1.
    pub fn commutator(&self) -> f64 {
        self.u.norm_sqr() - self.v.norm_sqr()
    }
}

fn bogoliubov(c: &WeiNormanCoefficients, omega: f64) -> BogoliubovCoefficients {
    let u = (-c.a_zero.conj() - Complex64::new(0.0, omega * c.t)).exp();
    BogoliubovCoefficients {
        t: c.t,
        u,
        v: -u * c.a_minus.conj(),
    }
}

/// Heisenberg-picture `a(t)` for the harmonic pump.
pub fn heisenberg_a(params: &ModelParams, t: f64) -> BogoliubovCoefficients {
    bogoliubov(&solve_analytic(params, t), params.omega_a())
}

/// `b(t) = u b + v a†`, the mirror image of [`heisenberg_a`].
pub fn heisenberg_b(params: &ModelParams, t: f64) -> BogoliubovCoefficients {
    bogoliubov(&solve_analytic(params, t), params.omega_b())
}

/// `(<n_a(t)>, <n_b(t)>)` for the Fock input `|r, s>`.
pub fn mean_photon_fock(d: &DerivedScalars, f: FockPair) -> (f64, f64) {
    let pairs = d.n0 * (f.r + f.s + 1) as f64;
    (f.r as f64 + pairs, f.s as f64 + pairs)
}

/// Mandel `Q_a` for the Fock input. For `r = 0` it reduces to `n0`
/// (which also fixes the `0/0` at `t = 0`).
pub fn mandel_q_fock(d: &DerivedScalars, f: FockPair) -> f64 {
    let (r, s) = (f.r as f64, f.s as f64);
    if f.r == 0 {
        return d.n0;
    }
    let n0 = d.n0;
    (n0 * 2.0 * r * s + n0 * n0 * (2.0 * r * s + r + s + 1.0) - r) / (r + n0 * (r + s + 1.0))
}

/// Mandel `Q_a` from a moment table.
pub fn mandel_q_coherent(moments: &MomentTable) -> Result<f64> {
    let mean = moments.mean_a();
    if mean <= 0.0 {
        return Err(Error::Domain("Mandel Q is undefined for zero mean photon number".into()));
    }
    Ok((moments.get(2, 2, 0, 0).re - mean * mean) / mean)
}

/// `f(t)` and its normalized form `F = f / sqrt(<n_a><n_b>)` (`None` when a mean vanishes).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossCorrelation {
    pub f: f64,
    pub big_f: Option<f64>,
}

impl CrossCorrelation {
    fn new(f: f64, mean_a: f64, mean_b: f64) -> Self {
        let big_f = (mean_a > 0.0 && mean_b > 0.0).then(|| f / (mean_a.sqrt() * mean_b.sqrt()));
        Self { f, big_f }
    }

    /// `f >= 0` is compatible with a positive Glauber–Sudarshan function.
    pub fn admits_classical(&self) -> bool {
        self.f >= 0.0
    }
}

fn poly_mul(a: &[i128; 3], b: &[i128; 3]) -> [i128; 5] {
    let mut out = [0i128; 5];
    for i in 0..3 {
        for j in 0..3 {
            out[i + j] += a[i] * b[j];
        }
    }
    out
}

/// `f(t)` for the Fock input `|r, s>`.
///
/// Writing the closed form as `sqrt(P_r) sqrt(P_s) - Q` with quadratics in
/// `n0`, the value is evaluated as `(P_r P_s - Q^2)/(sqrt(P_r P_s) + Q)`. The
/// quartic numerator's leading coefficient cancels exactly in integer
/// arithmetic, which removes the `O(x^2)` cancellation that otherwise leaves
/// `F = -1` (for `r = s`) only good to about `x * 1e-16`.
pub fn cross_correlation_fock(d: &DerivedScalars, f: FockPair) -> CrossCorrelation {
    let (r, s) = (f.r as i128, f.s as i128);
    // x^2 (..) rewritten through x = 1 + n0, y = n0/x: coefficients of 1, n0, n0^2
    let pa = |r: i128, s: i128| -> [i128; 3] {
        [
            r * (r - 1),
            2 * r * (r - 1) + 4 * r * (s + 1),
            r * (r - 1) + 4 * r * (s + 1) + (s + 1) * (s + 2),
        ]
    };
    let m = r * s + r * (r + 1) + s * (s + 1) + (r + 1) * (s + 1);
    let q = [r * s, 2 * r * s + m, r * s + (r + 1) * (s + 1) + m];
    let pr = pa(r, s);
    let ps = pa(s, r);
    let prod = poly_mul(&pr, &ps);
    let qq = poly_mul(&q, &q);
    let num: Vec<f64> = (0..5).map(|i| (prod[i] - qq[i]) as f64).collect();
    let eval = |c: &[f64]| c.iter().rev().fold(0.0, |acc, ci| acc * d.n0 + ci);

    let p_r = eval(&pr.map(|v| v as f64));
    let p_s = eval(&ps.map(|v| v as f64));
    let q_v = eval(&q.map(|v| v as f64));
    let denom = (p_r * p_s).sqrt() + q_v;
    let value = if denom == 0.0 { 0.0 } else { eval(&num) / denom };
    let (ma, mb) = mean_photon_fock(d, f);
    CrossCorrelation::new(value, ma, mb)
}

/// `f(t)` from normal-ordered moments (any product input).
pub fn cross_correlation_general(moments: &MomentTable) -> CrossCorrelation {
    let f = moments.get(2, 2, 0, 0).re.max(0.0).sqrt() * moments.get(0, 0, 2, 2).re.max(0.0).sqrt()
        - moments.get(1, 1, 1, 1).re;
    CrossCorrelation::new(f, moments.mean_a(), moments.mean_b())
}

/// `|T_theta(t)|^2 = x [1 + y - 2(cos(Omega t - 2 theta) G + sin(Omega t - 2 theta) H)]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezingKernel {
    pub theta: f64,
    pub t: f64,
    pub t_sq: f64,
    pub g_kernel: f64,
    pub h_kernel: f64,
}

/// `C - S` from [`regime_cs`], exact at `k = 0` where it equals `e^{-gt}`.
fn c_minus_s(k: f64, gt: f64) -> f64 {
    let k2 = k * k;
    match crate::model::classify_k_squared(k2, crate::model::DEFAULT_REGIME_EPSILON).kind {
        RegimeKind::Sub => {
            let eps = (1.0 - k2).sqrt();
            let a = eps * gt;
            // (eps cosh a - sinh a)/eps with eps - 1 = -k^2/(1 + eps)
            let eps_m1 = -k2 / (1.0 + eps);
            (eps_m1 * a.exp() + (eps + 1.0) * (-a).exp()) / (2.0 * eps)
        }
        _ => {
            let (c, s) = regime_cs(k, gt);
            c - s
        }
    }
}

/// Quadrature kernel for `X_theta = (e^{i theta}(a~ + b~) + h.c.)/sqrt(2)`.
///
/// `G = S C / x` and `H = k S^2 / x`, which are the tan/tanh expressions of
/// the two regimes with the removable singularities divided out. `t_sq` is
/// evaluated as `(C - S cos phi)^2 + S^2 (k - sin phi)^2`, a sum of squares
/// that stays accurate when the quadrature is strongly squeezed.
pub fn squeezing_kernel(params: &ModelParams, theta: f64, t: f64) -> SqueezingKernel {
    let k = params.k();
    let gt = params.g() * t;
    let (c, s) = regime_cs(k, gt);
    let x = 1.0 + s * s;
    let phi = 2.0 * k * gt - 2.0 * theta;
    // C - S cos(phi) = (C - S) + 2 S sin^2(phi/2), with C - S free of the
    // cosh - sinh cancellation near resonance
    let half = (0.5 * phi).sin();
    let real = c_minus_s(k, gt) + 2.0 * s * half * half;
    let t_sq = real * real + (s * (k - phi.sin())).powi(2);
    SqueezingKernel {
        theta,
        t,
        t_sq,
        g_kernel: s * c / x,
        h_kernel: k * s * s / x,
    }
}

/// `Var[X_theta(t)]`: `t_sq (r + s + 1)` for Fock inputs and `t_sq` for any
/// coherent input.
pub fn quadrature_variance(kernel: &SqueezingKernel, state: impl Into<ProductState>) -> f64 {
    match state.into() {
        ProductState::Fock(f) => kernel.t_sq * (f.r + f.s + 1) as f64,
        ProductState::Coherent(_) => kernel.t_sq,
    }
}

/// `Var[X_theta]` computed directly from a moment table.
pub fn quadrature_variance_moments(moments: &MomentTable, theta: f64) -> f64 {
    let rot = Complex64::from_polar(1.0, theta);
    let first = moments.get(0, 1, 0, 0) + moments.get(0, 0, 0, 1);
    let mean = 2f64.sqrt() * (rot * first).re;
    let sq = moments.get(0, 2, 0, 0) + moments.get(0, 0, 0, 2) + 2.0 * moments.get(0, 1, 0, 1);
    let second = (rot * rot * sq).re + moments.mean_a() + moments.mean_b() + 1.0 + 2.0 * moments.get(1, 0, 0, 1).re;
    second - mean * mean
}

/// `Delta X_0 * Delta X_{pi/2}` for the vacuum (and every coherent) input.
pub fn uncertainty_product(params: &ModelParams, t: f64) -> f64 {
    let a = squeezing_kernel(params, 0.0, t).t_sq;
    let b = squeezing_kernel(params, std::f64::consts::FRAC_PI_2, t).t_sq;
    (a * b).sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SqueezingExtrema {
    /// `(t, t_sq)` at each interior local minimum.
    pub minima: Vec<(f64, f64)>,
    /// Mean spacing of the last (up to four) consecutive minima.
    pub spacing: Option<f64>,
}

/// Local minima of `t_sq(theta, t)` on `[t_start, t_end]`.
pub fn squeezing_extrema(params: &ModelParams, theta: f64, t_start: f64, t_end: f64) -> SqueezingExtrema {
    let span_gt = params.g() * (t_end - t_start).abs();
    let points = ((400.0 * span_gt) as usize).clamp(2_000, 400_000);
    let minima = local_extrema(
        |t| squeezing_kernel(params, theta, t).t_sq,
        t_start,
        t_end,
        points,
        ExtremumKind::Min,
        1e-11 * (1.0 + t_end.abs()),
    );
    let spacing = (minima.len() >= 2).then(|| {
        let tail = &minima[minima.len().saturating_sub(5)..];
        (tail[tail.len() - 1].0 - tail[0].0) / (tail.len() - 1) as f64
    });
    SqueezingExtrema { minima, spacing }
}

/// A signal-to-noise ratio that may be infinite (a Fock state has no variance).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Snr {
    Finite(f64),
    Infinite,
}

impl Snr {
    pub fn value(&self) -> f64 {
        match self {
            Snr::Finite(v) => *v,
            Snr::Infinite => f64::INFINITY,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Snr::Infinite)
    }
}

impl fmt::Display for Snr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Snr::Finite(v) => write!(f, "{v}"),
            Snr::Infinite => f.write_str("inf"),
        }
    }
}

/// `rho_a = <n_a> / Delta n_a` for the Fock input.
pub fn snr_rho_fock(d: &DerivedScalars, f: FockPair) -> Snr {
    let (r, s) = (f.r as f64, f.s as f64);
    if d.n0 == 0.0 {
        return if f.r > 0 { Snr::Infinite } else { Snr::Finite(0.0) };
    }
    let spread = (2.0 * r * s + r + s + 1.0).sqrt();
    // sqrt(n0 + n0^2) = sqrt(n0) sqrt(x)
    Snr::Finite((r + d.n0 * (r + s + 1.0)) / (d.n0.sqrt() * d.x.sqrt() * spread))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RhoExtremumKind {
    LocalMax,
    GlobalMin,
    GlobalMax,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RhoExtremum {
    pub t: f64,
    pub value: f64,
    pub kind: RhoExtremumKind,
}

/// `(r k^2 + s + 1) / sqrt(k^2 (2rs + r + s + 1))`, the value at `gt sqrt(k^2-1) = pi/2`.
pub fn rho_half_period_value(k_squared: f64, f: FockPair) -> f64 {
    let (r, s) = (f.r as f64, f.s as f64);
    (r * k_squared + s + 1.0) / (k_squared * (2.0 * r * s + r + s + 1.0)).sqrt()
}

/// `2 sqrt(r (s+1) / (2rs + r + s + 1))`, the detuning-independent minimum.
pub fn rho_global_min_value(f: FockPair) -> f64 {
    let (r, s) = (f.r as f64, f.s as f64);
    2.0 * (r * (s + 1.0) / (2.0 * r * s + r + s + 1.0)).sqrt()
}

/// Whether `0 < r/(s - r + 1) < 1/(k^2 - 1)`; a non-positive denominator counts as violated.
pub fn rho_has_split_minima(k_squared: f64, f: FockPair) -> bool {
    let denom = f.s as f64 - f.r as f64 + 1.0;
    if denom <= 0.0 || f.r == 0 {
        return false;
    }
    f.r as f64 / denom < 1.0 / (k_squared - 1.0)
}

/// Extrema of `rho_a(t)` in the first revival period `(0, t_rev)` of the
/// super regime, ordered in time. The pattern repeats with period `t_rev`.
pub fn snr_rho_extrema(params: &ModelParams, f: FockPair) -> Result<Vec<RhoExtremum>> {
    let k2 = params.k_squared();
    if params.regime().kind != RegimeKind::Super {
        return Err(Error::Regime {
            required: "super (k^2 > 1)",
            k_squared: k2,
        });
    }
    let eps = (k2 - 1.0).sqrt();
    let to_t = |phase: f64| phase / (eps * params.g());
    let half = RhoExtremum {
        t: to_t(std::f64::consts::FRAC_PI_2),
        value: rho_half_period_value(k2, f),
        kind: RhoExtremumKind::GlobalMin,
    };
    if rho_has_split_minima(k2, f) {
        let ratio = f.r as f64 / (f.s as f64 - f.r as f64 + 1.0);
        let phase = ((k2 - 1.0) * ratio).sqrt().asin();
        let min = rho_global_min_value(f);
        Ok(vec![
            RhoExtremum {
                t: to_t(phase),
                value: min,
                kind: RhoExtremumKind::GlobalMin,
            },
            RhoExtremum {
                kind: RhoExtremumKind::LocalMax,
                ..half
            },
            RhoExtremum {
                t: to_t(std::f64::consts::PI - phase),
                value: min,
                kind: RhoExtremumKind::GlobalMin,
            },
        ])
    } else if f.r == 0 {
        Ok(vec![RhoExtremum {
            kind: RhoExtremumKind::GlobalMax,
            ..half
        }])
    } else {
        Ok(vec![half])
    }
}

/// Grid search for the interior extrema of `rho_a` on `(0, t_rev)`, as an
/// independent check of [`snr_rho_extrema`]. Returns `(t, value, kind)`.
pub fn snr_rho_extrema_numeric(params: &ModelParams, f: FockPair, points: usize) -> Vec<(f64, f64, ExtremumKind)> {
    let eps = (params.k_squared() - 1.0).sqrt();
    let t_rev = std::f64::consts::PI / (eps * params.g());
    let rho = |t: f64| snr_rho_fock(&derived_scalars(params, t), f).value();
    let lo = t_rev * 1e-6;
    let hi = t_rev * (1.0 - 1e-6);
    let mut out: Vec<(f64, f64, ExtremumKind)> = local_extrema(rho, lo, hi, points, ExtremumKind::Min, 1e-12 * t_rev)
        .into_iter()
        .map(|(t, v)| (t, v, ExtremumKind::Min))
        .chain(
            local_extrema(rho, lo, hi, points, ExtremumKind::Max, 1e-12 * t_rev)
                .into_iter()
                .map(|(t, v)| (t, v, ExtremumKind::Max)),
        )
        .collect();
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

/// Quadrature signal-to-noise ratio `eta_a` and the Yuen bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrReport {
    pub eta: f64,
    pub yuen_bound: f64,
    pub mean_a: f64,
}

/// `eta_a = <X_a>^2 / Var[X_a]` for a coherent input (`eta_a = 0` for every Fock input).
///
/// With `w = e^{-A0*}(alpha - beta* A-*)` one has `<X_a> = sqrt(2) Re w` and
/// `Var[X_a] = n0 + 1/2`, so the numerator `K + x(...)` is `2 (Re w)^2`.
pub fn snr_eta_coherent(c: &WeiNormanCoefficients, d: &DerivedScalars, pair: CoherentPair) -> SnrReport {
    let w = (-c.a_zero.conj()).exp() * (pair.alpha - pair.beta.conj() * c.a_minus.conj());
    let eta = 2.0 * w.re * w.re / (d.n0 + 0.5);
    let (mean_a, _) = coherent_mean_numbers(c, d, pair);
    SnrReport {
        eta,
        yuen_bound: 4.0 * mean_a * (mean_a + 1.0),
        mean_a,
    }
}

/// `eta_a` from a moment table; `None` when the variance vanishes.
pub fn snr_eta_moments(moments: &MomentTable) -> Option<f64> {
    let mean = 2f64.sqrt() * moments.get(0, 1, 0, 0).re;
    let var = moments.get(0, 2, 0, 0).re + moments.mean_a() + 0.5 - mean * mean;
    (var > 0.0).then(|| mean * mean / var)
}

/// Instantaneous normal-mode decomposition of the full Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagonalizationResult {
    pub omega_plus: f64,
    pub omega_minus: f64,
    /// `(Omega_A, Omega_B, Omega_0)`; `None` when unstable.
    pub frequencies: Option<(f64, f64, f64)>,
    pub squeeze_r: Option<f64>,
    /// Constant part of the squeeze phase; the full phase is `squeeze_phi - omega t`.
    pub squeeze_phi: f64,
    pub stable: bool,
}

impl DiagonalizationResult {
    pub fn squeeze_phase_at(&self, pump_frequency: f64, t: f64) -> f64 {
        self.squeeze_phi - pump_frequency * t
    }
}

pub fn instantaneous_diagonalization(params: &ModelParams) -> DiagonalizationResult {
    let wp = 0.5 * (params.omega_a() + params.omega_b());
    let wm = 0.5 * (params.omega_a() - params.omega_b());
    let ratio = (params.g() / wp).powi(2);
    let stable = ratio < 1.0;
    let (frequencies, squeeze_r) = if stable {
        let root = (1.0 - ratio).sqrt();
        let o0 = wp * root;
        // cosh 2r = 1/root, so tanh 2r = g/omega_+
        (Some((wm + o0, -wm + o0, o0)), Some(0.5 * (params.g() / wp).atanh()))
    } else {
        (None, None)
    };
    DiagonalizationResult {
        omega_plus: wp,
        omega_minus: wm,
        frequencies,
        squeeze_r,
        squeeze_phi: std::f64::consts::FRAC_PI_2,
        stable,
    }
}

/// Locates the maximum of `f` on `[a, b]` by grid bracketing and golden-section refinement.
pub fn grid_max(f: impl Fn(f64) -> f64, a: f64, b: f64, points: usize) -> (f64, f64) {
    let n = points.max(3);
    let h = (b - a) / (n - 1) as f64;
    let (mut best_i, mut best_v) = (0usize, f64::NEG_INFINITY);
    for i in 0..n {
        let v = f(a + h * i as f64);
        if v > best_v {
            best_v = v;
            best_i = i;
        }
    }
    let lo = a + h * best_i.saturating_sub(1) as f64;
    let hi = (a + h * (best_i + 1) as f64).min(b);
    let (t, v) = golden_min(|t| -f(t), lo, hi, 1e-12 * (1.0 + b.abs()));
    if -v >= best_v {
        (t, -v)
    } else {
        (a + h * best_i as f64, best_v)
    }
}
