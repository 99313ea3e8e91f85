//! Transition amplitudes and probabilities for Fock, coherent and
//! `|psi>_a |0>_b` initial states.
//!
//! Outcomes are labelled `(m, n)` with `m` photons in mode b and `n` in mode a.
//! Everything that involves factorials or powers of `x`, `y` is assembled in
//! the log domain so that photon numbers in the thousands and `x ~ 1e100`
//! are harmless.

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::special::{ln_binomial, ln_factorial, sum_certified, SeriesSum};
use crate::wei_norman::{DerivedScalars, WeiNormanCoefficients};

/// Tail target used by the normalization helpers.
pub const DEFAULT_TAIL_TARGET: f64 = 1e-12;
const MAX_SERIES_TERMS: usize = 50_000_000;

/// Initial Fock state `|r>_a |s>_b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FockPair {
    pub r: u64,
    pub s: u64,
}

impl FockPair {
    pub fn new(r: u64, s: u64) -> Self {
        Self { r, s }
    }
}

/// Final Fock state with `m` photons in mode b and `n` in mode a.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FockOutcome {
    pub m: u64,
    pub n: u64,
}

impl FockOutcome {
    pub fn new(m: u64, n: u64) -> Self {
        Self { m, n }
    }

    /// `n_a - n_b` is conserved, so only `m = s - r + n` can be reached from `initial`.
    pub fn reachable_from(&self, initial: FockPair) -> bool {
        self.m as i128 == initial.s as i128 - initial.r as i128 + self.n as i128
    }
}

/// Coherent state `|alpha>_a |beta>_b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherentPair {
    pub alpha: Complex64,
    pub beta: Complex64,
}

impl CoherentPair {
    pub fn new(alpha: Complex64, beta: Complex64) -> Self {
        Self { alpha, beta }
    }

    pub fn real(alpha: f64, beta: f64) -> Self {
        Self::new(Complex64::new(alpha, 0.0), Complex64::new(beta, 0.0))
    }
}

/// Pure a-mode state `sum_s sqrt(P_s) e^{i phi_s} |s>`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureAModeState {
    probs: Vec<f64>,
    phases: Vec<f64>,
}

impl PureAModeState {
    pub fn new(probs: Vec<f64>, phases: Vec<f64>) -> Result<Self> {
        if probs.len() != phases.len() {
            return Err(invalid("phases", "must have the same length as probs"));
        }
        if probs.is_empty() {
            return Err(invalid("probs", "must not be empty"));
        }
        if probs.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(invalid("probs", "entries must be finite and non-negative"));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(invalid("probs", format!("must sum to 1, got {total}")));
        }
        Ok(Self { probs, phases })
    }

    pub fn fock(s: usize) -> Self {
        let mut probs = vec![0.0; s + 1];
        probs[s] = 1.0;
        Self {
            phases: vec![0.0; s + 1],
            probs,
        }
    }

    /// Coherent a-mode state truncated where the remaining Poisson weight is below 1e-17.
    pub fn poisson(alpha: Complex64) -> Self {
        let mean = alpha.norm_sqr();
        let arg = alpha.arg();
        let mut probs = Vec::new();
        let mut phases = Vec::new();
        let mut cumulative = 0.0;
        let mut s = 0u64;
        loop {
            let p = if mean == 0.0 {
                if s == 0 {
                    1.0
                } else {
                    0.0
                }
            } else {
                (s as f64 * mean.ln() - mean - ln_factorial(s)).exp()
            };
            probs.push(p);
            phases.push(arg * s as f64);
            cumulative += p;
            // past the mode the tail is below p / (1 - mean/(s+1))
            let past_mode = (s as f64 + 2.0) > mean;
            if past_mode && 1.0 - cumulative < 1e-17 {
                break;
            }
            if past_mode && (s as f64 + 2.0) > 2.0 * mean && p < 1e-18 {
                break;
            }
            s += 1;
        }
        let total: f64 = probs.iter().sum();
        for p in &mut probs {
            *p /= total;
        }
        Self { probs, phases }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn with_phases(&self, phases: Vec<f64>) -> Result<Self> {
        Self::new(self.probs.clone(), phases)
    }

    pub fn prob(&self, s: u64) -> f64 {
        self.probs.get(s as usize).copied().unwrap_or(0.0)
    }

    pub fn max_photons(&self) -> u64 {
        self.probs.len() as u64 - 1
    }

    pub fn mean(&self) -> f64 {
        self.probs.iter().enumerate().map(|(s, p)| s as f64 * p).sum()
    }

    /// Probability amplitudes `sqrt(P_s) e^{i phi_s}`.
    pub fn amplitudes(&self) -> Vec<Complex64> {
        self.probs
            .iter()
            .zip(&self.phases)
            .map(|(p, phi)| Complex64::from_polar(p.sqrt(), *phi))
            .collect()
    }
}

/// `e * ln_base`, with `0 * (-inf) = 0` so that `y^0 = 1` even at `y = 0`.
fn ln_pow(ln_base: f64, e: f64) -> f64 {
    if e == 0.0 {
        0.0
    } else {
        e * ln_base
    }
}

fn ln_n0(d: &DerivedScalars) -> f64 {
    d.ln_x + d.ln_y
}

/// `ln |P_n^{(alpha, beta)}(1 - 2y)|` and its sign, by forward recurrence in
/// the degree with running rescaling. `y` and `1 - y` are passed separately so
/// that the argument keeps full precision near both ends of `[-1, 1]`.
fn ln_jacobi(n: u64, alpha: f64, beta: f64, y: f64, one_minus_y: f64) -> (f64, f64) {
    let (mut prev, mut cur) = (1.0f64, (alpha + 1.0) - (alpha + beta + 2.0) * y);
    if n == 0 {
        return (0.0, 1.0);
    }
    let mut ln_scale = 0.0;
    let near_minus_one = y > 0.5;
    for k in 2..=n {
        let kf = k as f64;
        let s = 2.0 * kf + alpha + beta;
        let c = s * (s - 2.0);
        // c u + alpha^2 - beta^2 with u = 1 - 2y or u = -1 + 2(1 - y)
        let lin = if near_minus_one {
            (alpha * alpha - beta * beta - c) + 2.0 * c * one_minus_y
        } else {
            (alpha * alpha - beta * beta + c) - 2.0 * c * y
        };
        let next = ((s - 1.0) * lin * cur - 2.0 * (kf + alpha - 1.0) * (kf + beta - 1.0) * s * prev)
            / (2.0 * kf * (kf + alpha + beta) * (s - 2.0));
        prev = cur;
        cur = next;
        let m = cur.abs().max(prev.abs());
        if m > 1e150 || (m < 1e-150 && m > 0.0) {
            prev /= m;
            cur /= m;
            ln_scale += m.ln();
        }
    }
    (cur.abs().ln() + ln_scale, cur.signum())
}

/// `<m, n| U_I(t) |r, s>` (b-mode label first in the bra).
///
/// Within the sector `q = r - s` the matrix element is a Jacobi polynomial
/// `P_J^{(|D|, |q|)}(1 - 2y)` in the smaller photon number `J` of the two
/// states (`D` is the change in that number). The direct sum over pair
/// annihilations alternates with ratio `-n0` and cancels catastrophically
/// once photon numbers reach the hundreds.
pub fn fock_amplitude(c: &WeiNormanCoefficients, initial: FockPair, outcome: FockOutcome) -> Complex64 {
    if !outcome.reachable_from(initial) {
        return Complex64::new(0.0, 0.0);
    }
    let FockPair { r, s } = initial;
    let FockOutcome { m, n } = outcome;
    let q = r.abs_diff(s);
    let (j0, j1) = (r.min(s), n.min(m));
    let (j_lo, j_hi) = (j0.min(j1), j0.max(j1));
    let delta = j_hi - j_lo;
    // raising moves through A_+, lowering through A_-
    let a_step = if j1 >= j0 { c.a_plus } else { c.a_minus };
    if delta > 0 && a_step == Complex64::new(0.0, 0.0) {
        return Complex64::new(0.0, 0.0);
    }

    let ln_x = -c.ln_defect;
    let one_minus_y = c.ln_defect.exp();
    let y = -c.ln_defect.exp_m1();
    let (ln_p, sign) = ln_jacobi(j_lo, delta as f64, q as f64, y, one_minus_y);
    if ln_p == f64::NEG_INFINITY {
        return Complex64::new(0.0, 0.0);
    }
    let weight = 0.5 * (q as f64 + 1.0) + j_lo as f64;
    let ln_step = if delta == 0 { 0.0 } else { delta as f64 * a_step.norm().ln() };
    let ln_mag = 2.0 * c.a_zero.re * weight
        + ln_step
        + j_lo as f64 * ln_x
        + ln_p
        + 0.5 * (ln_factorial(j_lo) + ln_factorial(q + j_hi) - ln_factorial(j_hi) - ln_factorial(q + j_lo));
    let phase = 2.0 * c.a_zero.im * weight
        + if delta == 0 { 0.0 } else { delta as f64 * a_step.arg() }
        + if sign < 0.0 { std::f64::consts::PI } else { 0.0 };
    Complex64::from_polar(ln_mag.exp(), phase)
}

pub fn fock_prob(c: &WeiNormanCoefficients, initial: FockPair, outcome: FockOutcome) -> f64 {
    fock_amplitude(c, initial, outcome).norm_sqr()
}

/// `p_nn = y^n / x` for the vacuum input.
pub fn vacuum_prob(d: &DerivedScalars, n: u64) -> f64 {
    (ln_pow(d.ln_y, n as f64) - d.ln_x).exp()
}

/// `p_nn = (n - n0)^2 y^{n-1} / x^3` for the `|1,1>` input (`y/x` at `n = 0`).
pub fn fock11_prob(d: &DerivedScalars, n: u64) -> f64 {
    if n == 0 {
        return (d.ln_y - d.ln_x).exp();
    }
    let nf = n as f64;
    // ln |n - n0| without forming n0 when it is enormous
    let ln_diff = if d.n0.is_finite() {
        (nf - d.n0).abs().ln()
    } else {
        ln_n0(d)
    };
    (2.0 * ln_diff + ln_pow(d.ln_y, nf - 1.0) - 3.0 * d.ln_x).exp()
}

/// Mean a-mode photon number for the `|1,1>` input, `r + n0 (r + s + 1)` at `r = s = 1`.
pub fn fock11_mean_a(d: &DerivedScalars) -> f64 {
    1.0 + 3.0 * d.n0
}

/// `p_mn` for the input `|psi>_a |0>_b`. Only `P_{n-m}` enters; the phases
/// of `psi` drop out.
pub fn amode_prob(d: &DerivedScalars, psi: &PureAModeState, outcome: FockOutcome) -> Result<f64> {
    let FockOutcome { m, n } = outcome;
    if n < m {
        return Err(Error::Domain(format!(
            "outcome requires n >= m (n_a - n_b = s >= 0), got m = {m}, n = {n}"
        )));
    }
    let l = n - m;
    let p = psi.prob(l);
    if p == 0.0 {
        return Ok(0.0);
    }
    Ok((p.ln() + ln_binomial(n, m) + ln_pow(d.ln_y, m as f64) - (l + 1) as f64 * d.ln_x).exp())
}

/// b-mode photon-number distribution `p_m(b)` for the input `|psi>_a |0>_b`.
pub fn reduced_density_b(d: &DerivedScalars, psi: &PureAModeState, m: u64) -> f64 {
    psi.probs()
        .iter()
        .enumerate()
        .filter(|(_, p)| **p > 0.0)
        .map(|(l, p)| {
            let l = l as u64;
            (p.ln() + ln_binomial(l + m, m) + ln_pow(d.ln_y, m as f64) - (l + 1) as f64 * d.ln_x).exp()
        })
        .sum()
}

/// a-mode photon-number distribution `p_n(a)` for the input `|psi>_a |0>_b`.
pub fn reduced_density_a(d: &DerivedScalars, psi: &PureAModeState, n: u64) -> f64 {
    let ln_n0 = ln_n0(d);
    (0..=n)
        .filter_map(|m| {
            let p = psi.prob(n - m);
            (p > 0.0).then(|| (p.ln() + ln_binomial(n, m) + ln_pow(ln_n0, m as f64) - (n + 1) as f64 * d.ln_x).exp())
        })
        .sum()
}

/// Temperature `T` with `exp(-omega/T) = y`. `y = 0` is the zero-temperature limit.
pub fn effective_temperature(y: f64, omega: f64) -> Result<f64> {
    if !(omega.is_finite() && omega > 0.0) {
        return Err(invalid("omega", "must be finite and > 0"));
    }
    if y == 0.0 {
        return Ok(0.0);
    }
    if !(y > 0.0 && y < 1.0) {
        return Err(Error::Domain(format!("effective temperature needs 0 <= y < 1, got {y}")));
    }
    Ok(omega / -y.ln())
}

/// Same, from the log-domain scalars (keeps resolution when `y` rounds to 1).
pub fn effective_temperature_from(d: &DerivedScalars, omega: f64) -> Result<f64> {
    if d.ln_y == f64::NEG_INFINITY {
        return effective_temperature(0.0, omega);
    }
    if !(omega.is_finite() && omega > 0.0) {
        return Err(invalid("omega", "must be finite and > 0"));
    }
    // -ln y = ln(x/n0) = ln(1 + 1/n0)
    let minus_ln_y = (-ln_n0(d)).exp().ln_1p();
    Ok(omega / minus_ln_y)
}

/// `ln <z, w| U_I |alpha, beta>`, where `final_state.alpha = w` (mode a) and
/// `final_state.beta = z` (mode b).
pub fn coherent_ln_amplitude(
    c: &WeiNormanCoefficients,
    initial: CoherentPair,
    final_state: CoherentPair,
) -> Complex64 {
    let (a, b) = (initial.alpha, initial.beta);
    let (w, z) = (final_state.alpha, final_state.beta);
    let ea0 = c.a_zero.exp();
    let gauss = -0.5 * (a.norm_sqr() + b.norm_sqr() + w.norm_sqr() + z.norm_sqr());
    gauss + c.a_zero + c.a_plus * w.conj() * z.conj() + c.a_minus * a * b + ea0 * (w.conj() * a + z.conj() * b)
}

pub fn coherent_transition_prob(
    c: &WeiNormanCoefficients,
    initial: CoherentPair,
    final_state: CoherentPair,
) -> f64 {
    (2.0 * coherent_ln_amplitude(c, initial, final_state).re).exp()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RevivalProbability {
    pub p: f64,
    /// `|2 - e^{A0} - e^{A0*}|`; its near-zeros are where the Gaussian factor does not suppress `p`.
    pub diagnostic: f64,
}

/// Return probability `p_{beta alpha}(t)` to the initial coherent state.
pub fn coherent_revival_prob(c: &WeiNormanCoefficients, pair: CoherentPair) -> RevivalProbability {
    let total = pair.alpha.norm_sqr() + pair.beta.norm_sqr();
    let gap = 2.0 - 2.0 * c.a_zero.exp().re;
    let ab = pair.alpha * pair.beta;
    let ln_p = -total * gap + 2.0 * (ab * (c.a_minus + c.a_plus.conj())).re + 2.0 * c.a_zero.re;
    RevivalProbability {
        p: ln_p.exp(),
        diagnostic: gap.abs(),
    }
}

/// `(<n_a(t)>, <n_b(t)>)` for a coherent input.
pub fn coherent_mean_numbers(c: &WeiNormanCoefficients, d: &DerivedScalars, pair: CoherentPair) -> (f64, f64) {
    let na = pair.alpha.norm_sqr();
    let nb = pair.beta.norm_sqr();
    let mean_a = na + d.n0 * (na + nb + 1.0) - 2.0 * (pair.alpha * pair.beta * c.a_minus).re * (1.0 + d.n0);
    (mean_a, mean_a + nb - na)
}

/// `sum_n p_nn` for the vacuum input, with certified tail.
pub fn vacuum_normalization(d: &DerivedScalars, target: f64) -> SeriesSum {
    let y = d.y;
    sum_certified(|n| vacuum_prob(d, n as u64), |_| y, target, MAX_SERIES_TERMS)
}

/// `sum_n p_nn` for the `|1,1>` input, with certified tail.
pub fn fock11_normalization(d: &DerivedScalars, target: f64) -> SeriesSum {
    let (y, n0) = (d.y, d.n0);
    sum_certified(
        |n| fock11_prob(d, n as u64),
        |n| {
            // term(m+1)/term(m) = ((m+1-n0)/(m-n0))^2 y, decreasing once m > n0 + 1
            let nf = n as f64;
            if nf > n0 + 1.0 {
                ((nf + 1.0 - n0) / (nf - n0)).powi(2) * y
            } else {
                f64::INFINITY
            }
        },
        target,
        MAX_SERIES_TERMS,
    )
}

/// `sum_{m,n} p_mn` for `|psi>_a |0>_b`, summed over the b-mode marginal.
pub fn amode_normalization(d: &DerivedScalars, psi: &PureAModeState, target: f64) -> SeriesSum {
    let y = d.y;
    let l_max = psi.max_photons() as f64;
    sum_certified(
        |m| reduced_density_b(d, psi, m as u64),
        // each component ratio is y (l + m + 1)/(m + 1) <= y (L + m + 1)/(m + 1)
        |m| y * (l_max + m as f64 + 1.0) / (m as f64 + 1.0),
        target,
        MAX_SERIES_TERMS,
    )
}
