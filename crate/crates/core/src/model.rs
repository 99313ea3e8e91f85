//! Model parameters, dynamical regimes, pump profiles and revival bookkeeping.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

/// Default half-width of the band around `k^2 = 1` treated as critical.
pub const DEFAULT_REGIME_EPSILON: f64 = 1e-8;

/// Mode frequencies and harmonic pump `g(t) = g e^{i omega t}`.
///
/// The detuning `Omega = omega - omega_a - omega_b` and `k = Omega / 2g` are
/// always derived from the four primitive fields.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    omega_a: f64,
    omega_b: f64,
    g: f64,
    omega: f64,
}

impl ModelParams {
    pub fn new(omega_a: f64, omega_b: f64, g: f64, omega: f64) -> Result<Self> {
        if !(omega_a.is_finite() && omega_a > 0.0) {
            return Err(invalid("omega_a", format!("must be finite and > 0, got {omega_a}")));
        }
        if !(omega_b.is_finite() && omega_b > 0.0) {
            return Err(invalid("omega_b", format!("must be finite and > 0, got {omega_b}")));
        }
        if !(g.is_finite() && g > 0.0) {
            return Err(invalid("g", format!("pump amplitude must be real and > 0, got {g}")));
        }
        if !omega.is_finite() {
            return Err(invalid("omega", "must be finite"));
        }
        Ok(Self {
            omega_a,
            omega_b,
            g,
            omega,
        })
    }

    /// Builds parameters with a prescribed dimensionless detuning `k`
    /// (the pump frequency is solved for).
    pub fn from_k(k: f64, g: f64, omega_a: f64, omega_b: f64) -> Result<Self> {
        if !k.is_finite() {
            return Err(invalid("k", "must be finite"));
        }
        Self::new(omega_a, omega_b, g, omega_a + omega_b + 2.0 * g * k)
    }

    /// Same as [`ModelParams::from_k`] with `k = +sqrt(k^2)`.
    pub fn from_k_squared(k_squared: f64, g: f64, omega_a: f64, omega_b: f64) -> Result<Self> {
        if !(k_squared.is_finite() && k_squared >= 0.0) {
            return Err(invalid("k2", format!("must be finite and >= 0, got {k_squared}")));
        }
        Self::from_k(k_squared.sqrt(), g, omega_a, omega_b)
    }

    pub fn omega_a(&self) -> f64 {
        self.omega_a
    }

    pub fn omega_b(&self) -> f64 {
        self.omega_b
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn pump_frequency(&self) -> f64 {
        self.omega
    }

    /// `Omega = omega - omega_a - omega_b`.
    pub fn detuning(&self) -> f64 {
        self.omega - self.omega_a - self.omega_b
    }

    pub fn k(&self) -> f64 {
        self.detuning() / (2.0 * self.g)
    }

    pub fn k_squared(&self) -> f64 {
        let k = self.k();
        k * k
    }

    pub fn regime(&self) -> Regime {
        classify_regime(self, DEFAULT_REGIME_EPSILON)
    }

    pub fn harmonic_pump(&self) -> PumpProfile {
        PumpProfile::Harmonic {
            g: self.g,
            omega: self.omega,
        }
    }
}

impl Default for ModelParams {
    /// `g = 1`, `omega_a = omega_b = 1`, resonant pump (`k = 0`).
    fn default() -> Self {
        Self {
            omega_a: 1.0,
            omega_b: 1.0,
            g: 1.0,
            omega: 2.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegimeKind {
    /// `k^2 < 1`: exponential photon production.
    Sub,
    /// `k^2 = 1`: algebraic growth.
    Critical,
    /// `k^2 > 1`: bounded, periodic photon numbers.
    Super,
}

impl fmt::Display for RegimeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RegimeKind::Sub => "sub",
            RegimeKind::Critical => "critical",
            RegimeKind::Super => "super",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Regime {
    pub kind: RegimeKind,
    pub epsilon: f64,
}

pub fn classify_k_squared(k_squared: f64, epsilon: f64) -> Regime {
    let kind = if k_squared < 1.0 - epsilon {
        RegimeKind::Sub
    } else if k_squared > 1.0 + epsilon {
        RegimeKind::Super
    } else {
        RegimeKind::Critical
    };
    Regime { kind, epsilon }
}

/// Classifies the regime of `params`; `epsilon` must be positive
/// (non-positive or non-finite values fall back to the default band).
pub fn classify_regime(params: &ModelParams, epsilon: f64) -> Regime {
    let epsilon = if epsilon.is_finite() && epsilon > 0.0 {
        epsilon
    } else {
        DEFAULT_REGIME_EPSILON
    };
    classify_k_squared(params.k_squared(), epsilon)
}

/// Which part of the revival structure a `(n, p)` pair controls.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RevivalKind {
    /// Fock-state revival (any `k^2 > 1`).
    Fock,
    /// `n`, `p` of equal parity: the coherent-state probability returns to one.
    Full,
    /// Mixed parity: only the `A+`/`A-` dependent factor (and the quadrature
    /// kernel) is periodic; `e^{A0}` flips sign so coherent states do not revive.
    SecondFactorOnly,
    /// `p = 0` lands on `k^2 = 1`, where nothing is periodic.
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RevivalSpec {
    pub n: u32,
    /// Only meaningful for the coherent case; zero for Fock revivals.
    pub p: u32,
    pub t_rev: f64,
    pub kind: RevivalKind,
}

/// Fock-state revival times `t_rev = n pi / (g sqrt(k^2 - 1))`, `n = 1..=n_max`.
pub fn fock_revival_times(params: &ModelParams, n_max: u32) -> Result<Vec<RevivalSpec>> {
    let regime = params.regime();
    if regime.kind != RegimeKind::Super {
        return Err(Error::Regime {
            required: "super (k^2 > 1)",
            k_squared: params.k_squared(),
        });
    }
    let rate = params.g() * (params.k_squared() - 1.0).sqrt();
    Ok((1..=n_max)
        .map(|n| RevivalSpec {
            n,
            p: 0,
            t_rev: n as f64 * PI / rate,
            kind: RevivalKind::Fock,
        })
        .collect())
}

/// Rational detuning producing coherent-state periodicity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherentRevival {
    pub k_squared: f64,
    /// `g t_rev = pi sqrt(n^2 - p^2)`.
    pub gt_rev: f64,
    pub spec: RevivalSpec,
}

/// `k^2 = 1/(1 - (p/n)^2)` and `g t_rev = pi sqrt(n^2 - p^2)`.
///
/// Mixed parity pairs are returned flagged [`RevivalKind::SecondFactorOnly`];
/// use [`full_coherent_revival`] to reject them.
pub fn coherent_revival_params(n: u32, p: u32) -> Result<CoherentRevival> {
    if n == 0 {
        return Err(Error::Domain("revival index n must be positive".into()));
    }
    if p >= n {
        return Err(Error::Domain(format!("need p < n, got n = {n}, p = {p}")));
    }
    let (nf, pf) = (n as f64, p as f64);
    let k_squared = nf * nf / ((nf - pf) * (nf + pf));
    let gt_rev = PI * ((nf - pf) * (nf + pf)).sqrt();
    let kind = if p == 0 {
        RevivalKind::Degenerate
    } else if n % 2 == p % 2 {
        RevivalKind::Full
    } else {
        RevivalKind::SecondFactorOnly
    };
    Ok(CoherentRevival {
        k_squared,
        gt_rev,
        spec: RevivalSpec {
            n,
            p,
            t_rev: gt_rev,
            kind,
        },
    })
}

/// Strict variant of [`coherent_revival_params`]: parity mismatch is an error.
pub fn full_coherent_revival(n: u32, p: u32) -> Result<CoherentRevival> {
    let rev = coherent_revival_params(n, p)?;
    match rev.spec.kind {
        RevivalKind::Full => Ok(rev),
        RevivalKind::SecondFactorOnly => Err(Error::Parity { n, p }),
        _ => Err(Error::Regime {
            required: "super (k^2 > 1)",
            k_squared: rev.k_squared,
        }),
    }
}

/// Linear interpolation of complex pump samples.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedPump {
    times: Vec<f64>,
    values: Vec<Complex64>,
}

impl TabulatedPump {
    pub fn new(samples: Vec<(f64, Complex64)>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(invalid("samples", "need at least two samples"));
        }
        if samples.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return Err(invalid("samples", "sample times must be strictly increasing"));
        }
        let (times, values) = samples.into_iter().unzip();
        Ok(Self { times, values })
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.times[0], *self.times.last().unwrap())
    }

    pub fn eval(&self, t: f64) -> Option<Complex64> {
        let (t0, t1) = self.domain();
        if !(t >= t0 && t <= t1) {
            return None;
        }
        let i = match self.times.partition_point(|&s| s <= t) {
            0 => 0,
            i if i >= self.times.len() => self.times.len() - 2,
            i => i - 1,
        };
        let (ta, tb) = (self.times[i], self.times[i + 1]);
        let w = (t - ta) / (tb - ta);
        Some(self.values[i] * (1.0 - w) + self.values[i + 1] * w)
    }
}

pub type PumpFn = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

/// Classical pump `g(t)` entering `H_int = i[g(t) ab - g*(t) a†b†]`.
#[derive(Clone)]
pub enum PumpProfile {
    Harmonic { g: f64, omega: f64 },
    Tabulated(TabulatedPump),
    Custom(PumpFn),
}

impl PumpProfile {
    pub fn zero() -> Self {
        PumpProfile::Harmonic { g: 0.0, omega: 0.0 }
    }

    pub fn custom(f: impl Fn(f64) -> Complex64 + Send + Sync + 'static) -> Self {
        PumpProfile::Custom(Arc::new(f))
    }

    /// Samples `profile` at `times` into a tabulated pump.
    pub fn tabulate(&self, times: &[f64]) -> Result<Self> {
        let samples = times
            .iter()
            .map(|&t| self.eval(t).map(|v| (t, v)))
            .collect::<Result<Vec<_>>>()?;
        Ok(PumpProfile::Tabulated(TabulatedPump::new(samples)?))
    }

    pub fn eval(&self, t: f64) -> Result<Complex64> {
        match self {
            PumpProfile::Harmonic { g, omega } => Ok(Complex64::from_polar(*g, omega * t)),
            PumpProfile::Tabulated(tab) => tab.eval(t).ok_or(Error::PumpDomain { t }),
            PumpProfile::Custom(f) => Ok(f(t)),
        }
    }

    pub fn is_harmonic(&self) -> bool {
        matches!(self, PumpProfile::Harmonic { .. })
    }
}

impl fmt::Debug for PumpProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PumpProfile::Harmonic { g, omega } => f
                .debug_struct("Harmonic")
                .field("g", g)
                .field("omega", omega)
                .finish(),
            PumpProfile::Tabulated(t) => f.debug_tuple("Tabulated").field(&t.times.len()).finish(),
            PumpProfile::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}
