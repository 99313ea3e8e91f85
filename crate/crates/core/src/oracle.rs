//! Brute-force propagation on a truncated two-mode Fock space.
//!
//! `H_I = i(g~ K- - g~* K+)` conserves `q = n_a - n_b`, so the state splits
//! into independent blocks. Block `q` holds the states `(n_a, n_b)` with
//! `n_a - n_b = q` and `n_a, n_b <= cutoff`, indexed by `j = min(n_a, n_b)`.
//! Each block is propagated on its own (in parallel). For the harmonic pump
//! the block generator is constant in the frame rotating with `Omega K0`, so
//! the propagator is applied as a Chebyshev series in that frame. Other pumps
//! go through the Dormand–Prince integrator used for the coefficient
//! equations. Nothing here uses the closed forms; this module exists to
//! check them.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::amplitudes::{CoherentPair, FockOutcome};
use crate::error::{invalid, Error, Result};
use crate::model::{ModelParams, PumpProfile};
use crate::ode::{self, OdeOptions};
use crate::special::{linspace, ln_factorial};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    pub cutoff: usize,
    pub tol: f64,
    pub tail_limit: f64,
}

impl OracleConfig {
    pub fn new(cutoff: usize, tol: f64, tail_limit: f64) -> Result<Self> {
        if cutoff < 4 {
            return Err(invalid("cutoff", "must be at least 4"));
        }
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(invalid("tol", "must be finite and > 0"));
        }
        if !(tail_limit > 0.0 && tail_limit.is_finite()) {
            return Err(invalid("tail_limit", "must be finite and > 0"));
        }
        Ok(Self {
            cutoff,
            tol,
            tail_limit,
        })
    }
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            cutoff: 40,
            tol: 1e-12,
            tail_limit: 1e-10,
        }
    }
}

fn block_dim(cutoff: usize, q: i64) -> usize {
    cutoff + 1 - q.unsigned_abs() as usize
}

/// `(n_a, n_b)` of basis index `j` in block `q`.
fn occupation(q: i64, j: usize) -> (usize, usize) {
    if q >= 0 {
        (j + q as usize, j)
    } else {
        (j, j + q.unsigned_abs() as usize)
    }
}

/// Block `q` and index `j` of `(n_a, n_b)`.
fn locate(n_a: usize, n_b: usize) -> (i64, usize) {
    (n_a as i64 - n_b as i64, n_a.min(n_b))
}

/// `K+`, `K-`, `K0` restricted to one block.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockGenerators {
    pub q: i64,
    pub dim: usize,
    /// `raise[j] = <j+1| K+ |j> = sqrt((n_a+1)(n_b+1))`; `K-` is the transpose.
    pub raise: Vec<f64>,
    /// `<j| K0 |j> = (n_a + n_b + 1)/2`.
    pub k0: Vec<f64>,
}

impl BlockGenerators {
    /// Dense `(K+, K-, K0)` for small blocks.
    pub fn to_dense(&self) -> (Vec<Vec<f64>>, Vec<Vec<f64>>, Vec<Vec<f64>>) {
        let n = self.dim;
        let mut kp = vec![vec![0.0; n]; n];
        let mut km = vec![vec![0.0; n]; n];
        let mut k0 = vec![vec![0.0; n]; n];
        for j in 0..n {
            k0[j][j] = self.k0[j];
            if j + 1 < n {
                kp[j + 1][j] = self.raise[j];
                km[j][j + 1] = self.raise[j];
            }
        }
        (kp, km, k0)
    }
}

pub fn build_generators(cutoff: usize, q: i64) -> Result<BlockGenerators> {
    if q.unsigned_abs() as usize > cutoff {
        return Err(invalid("q", format!("|q| must not exceed the cutoff {cutoff}")));
    }
    let dim = block_dim(cutoff, q);
    let raise = (0..dim.saturating_sub(1))
        .map(|j| {
            let (na, nb) = occupation(q, j);
            (((na + 1) * (nb + 1)) as f64).sqrt()
        })
        .collect();
    let k0 = (0..dim)
        .map(|j| {
            let (na, nb) = occupation(q, j);
            0.5 * (na + nb + 1) as f64
        })
        .collect();
    Ok(BlockGenerators { q, dim, raise, k0 })
}

const NEGLIGIBLE: f64 = 1e-36;

/// Amplitudes over the truncated basis, grouped by `q = n_a - n_b`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedState {
    cutoff: usize,
    blocks: BTreeMap<i64, Vec<Complex64>>,
    /// Upper estimate of the probability that is not represented.
    pub norm_deficit: f64,
}

impl TruncatedState {
    /// Product state from single-mode amplitude lists. Entries beyond the
    /// cutoff, and products with `|v|^2 < 1e-36`, are dropped and counted in
    /// `norm_deficit`.
    pub fn product(cutoff: usize, amp_a: &[Complex64], amp_b: &[Complex64]) -> Self {
        let mut blocks: BTreeMap<i64, Vec<Complex64>> = BTreeMap::new();
        let zero = Complex64::new(0.0, 0.0);
        let mut total = 0.0;
        for (na, a) in amp_a.iter().enumerate().take(cutoff + 1) {
            for (nb, b) in amp_b.iter().enumerate().take(cutoff + 1) {
                let v = a * b;
                if v.norm_sqr() < NEGLIGIBLE {
                    continue;
                }
                let (q, j) = locate(na, nb);
                let block = blocks.entry(q).or_insert_with(|| vec![zero; block_dim(cutoff, q)]);
                block[j] = v;
                total += v.norm_sqr();
            }
        }
        Self {
            cutoff,
            blocks,
            norm_deficit: (1.0 - total).max(0.0),
        }
    }

    pub fn fock(cutoff: usize, r: usize, s: usize) -> Result<Self> {
        if r > cutoff || s > cutoff {
            return Err(invalid("cutoff", "Fock occupation exceeds the cutoff"));
        }
        let mut a = vec![Complex64::new(0.0, 0.0); r + 1];
        let mut b = vec![Complex64::new(0.0, 0.0); s + 1];
        a[r] = Complex64::new(1.0, 0.0);
        b[s] = Complex64::new(1.0, 0.0);
        Ok(Self::product(cutoff, &a, &b))
    }

    pub fn coherent(cutoff: usize, pair: CoherentPair) -> Self {
        Self::product(
            cutoff,
            &coherent_amplitudes(pair.alpha, cutoff),
            &coherent_amplitudes(pair.beta, cutoff),
        )
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn charges(&self) -> impl Iterator<Item = i64> + '_ {
        self.blocks.keys().copied()
    }

    pub fn block(&self, q: i64) -> Option<&[Complex64]> {
        self.blocks.get(&q).map(|v| v.as_slice())
    }

    /// `<n_a, n_b | psi>` (zero outside the truncated space).
    pub fn amplitude(&self, n_a: usize, n_b: usize) -> Complex64 {
        let (q, j) = locate(n_a, n_b);
        self.blocks
            .get(&q)
            .and_then(|b| b.get(j))
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.blocks.values().flatten().map(|z| z.norm_sqr()).sum()
    }

    fn entries(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        self.blocks.iter().flat_map(|(&q, amps)| {
            amps.iter().enumerate().map(move |(j, z)| {
                let (na, nb) = occupation(q, j);
                (na, nb, *z)
            })
        })
    }
}

/// `<n|alpha>` for `n = 0..=cutoff`.
pub fn coherent_amplitudes(alpha: Complex64, cutoff: usize) -> Vec<Complex64> {
    let mag2 = alpha.norm_sqr();
    (0..=cutoff)
        .map(|n| {
            if mag2 == 0.0 {
                return Complex64::new(if n == 0 { 1.0 } else { 0.0 }, 0.0);
            }
            let ln = -0.5 * mag2 + 0.5 * n as f64 * mag2.ln() - 0.5 * ln_factorial(n as u64);
            Complex64::from_polar(ln.exp(), alpha.arg() * n as f64)
        })
        .collect()
}

/// Number of top levels watched for leakage into the cutoff edge.
fn edge_window(dim: usize) -> usize {
    (dim / 8).max(4).min(dim)
}

/// Output samples used to track the edge population during a run.
const EDGE_SAMPLES: usize = 33;

/// `J_0(tau), J_1(tau), ...` up to the order where the terms drop below
/// `1e-18`, by Miller's backward recurrence normalized with
/// `J_0 + 2 sum J_{2k} = 1`.
fn bessel_j_orders(tau: f64) -> Vec<f64> {
    if tau == 0.0 {
        return vec![1.0];
    }
    if tau < 1e-12 {
        // J_2 ~ tau^2/8 is below 1e-25; the recurrence would overflow here
        return vec![1.0, 0.5 * tau];
    }
    let start = (tau + 12.0 * tau.cbrt() + 60.0).ceil() as usize;
    let mut j = vec![0.0f64; start + 2];
    j[start] = 1e-300;
    for k in (1..=start).rev() {
        j[k - 1] = 2.0 * k as f64 / tau * j[k] - j[k + 1];
        if j[k - 1].abs() > 1e250 {
            for v in &mut j[k - 1..] {
                *v *= 1e-250;
            }
        }
    }
    let norm = j[0] + 2.0 * j.iter().skip(2).step_by(2).sum::<f64>();
    for v in &mut j {
        *v /= norm;
    }
    let last = j
        .iter()
        .rposition(|v| v.abs() > 1e-18)
        .unwrap_or(0)
        .max(tau.ceil() as usize);
    j.truncate((last + 1).min(start));
    j
}

/// States of one block at `grid` for the harmonic pump.
///
/// With `psi = e^{-i Omega t K0} phi`, `i phi' = H phi` where
/// `H = i g (K- - K+) - Omega K0` is a constant Hermitian tridiagonal matrix.
/// `e^{-i H dt}` is expanded in Chebyshev polynomials of `H` rescaled to its
/// Gershgorin interval.
fn chebyshev_path(
    gens: &BlockGenerators,
    g: f64,
    detuning: f64,
    initial: &[Complex64],
    grid: &[f64],
) -> Vec<Vec<Complex64>> {
    if g == 0.0 {
        return vec![initial.to_vec(); grid.len()];
    }
    let dim = gens.dim;
    let diag: Vec<f64> = gens.k0.iter().map(|k| -detuning * k).collect();
    let off = |j: usize| if j + 1 < dim { g * gens.raise[j] } else { 0.0 };
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for j in 0..dim {
        let rad = off(j) + if j > 0 { off(j - 1) } else { 0.0 };
        lo = lo.min(diag[j] - rad);
        hi = hi.max(diag[j] + rad);
    }
    let center = 0.5 * (lo + hi);
    // any half-width covering the spectrum works; g keeps one-level blocks away from tau = 0
    let half = (0.5 * (hi - lo) * (1.0 + 1e-12)).max(g.abs());
    let i = Complex64::new(0.0, 1.0);
    // (H - center)/half applied to v
    let apply = |v: &[Complex64], out: &mut [Complex64]| {
        for j in 0..dim {
            let mut acc = (diag[j] - center) * v[j];
            if j + 1 < dim {
                acc += i * off(j) * v[j + 1];
            }
            if j > 0 {
                acc -= i * off(j - 1) * v[j - 1];
            }
            out[j] = acc / half;
        }
    };

    let mut phi = initial.to_vec();
    let mut t_prev = 0.0;
    let mut out = Vec::with_capacity(grid.len());
    let zero = Complex64::new(0.0, 0.0);
    let (mut t0, mut t1, mut t2) = (vec![zero; dim], vec![zero; dim], vec![zero; dim]);
    for &t in grid {
        let dt = t - t_prev;
        if dt > 0.0 {
            let bessel = bessel_j_orders(half * dt);
            let mut acc: Vec<Complex64> = phi.iter().map(|v| v * bessel[0]).collect();
            if bessel.len() > 1 {
                t0.copy_from_slice(&phi);
                apply(&t0, &mut t1);
                let mut coef = -i;
                for (k, &jk) in bessel.iter().enumerate().skip(1) {
                    if k > 1 {
                        // T_k = 2 H~ T_{k-1} - T_{k-2}
                        apply(&t1, &mut t2);
                        for (a, b) in t2.iter_mut().zip(&t0) {
                            *a = 2.0 * *a - b;
                        }
                        std::mem::swap(&mut t0, &mut t1);
                        std::mem::swap(&mut t1, &mut t2);
                    }
                    let w = 2.0 * jk * coef;
                    for (a, v) in acc.iter_mut().zip(&t1) {
                        *a += w * v;
                    }
                    coef *= -i;
                }
            }
            let phase = Complex64::from_polar(1.0, -center * dt);
            phi = acc.into_iter().map(|v| v * phase).collect();
            t_prev = t;
        }
        out.push(
            phi.iter()
                .zip(&gens.k0)
                .map(|(v, k)| v * Complex64::from_polar(1.0, -detuning * t * k))
                .collect(),
        );
    }
    out
}

/// Evolves `initial` to time `t` with `i d psi/dt = H_I(t) psi`.
///
/// `norm_deficit` of the result is the initial deficit plus the largest
/// population seen in the top levels of any block, which bounds what leaked
/// through the edge; exceeding `cfg.tail_limit` is a [`Error::Truncation`].
pub fn evolve_truncated(
    pump: &PumpProfile,
    params: &ModelParams,
    initial: &TruncatedState,
    t: f64,
    cfg: &OracleConfig,
) -> Result<TruncatedState> {
    let mut out = evolve_truncated_grid(pump, params, initial, &[t], cfg)?;
    Ok(out.pop().expect("one output time"))
}

/// Same as [`evolve_truncated`] for a non-decreasing list of times `>= 0`.
pub fn evolve_truncated_grid(
    pump: &PumpProfile,
    params: &ModelParams,
    initial: &TruncatedState,
    times: &[f64],
    cfg: &OracleConfig,
) -> Result<Vec<TruncatedState>> {
    if initial.cutoff != cfg.cutoff {
        return Err(invalid("cutoff", "state cutoff differs from the oracle configuration"));
    }
    if initial.norm_deficit > cfg.tail_limit {
        return Err(Error::Truncation {
            deficit: initial.norm_deficit,
            limit: cfg.tail_limit,
        });
    }
    let Some(&t_end) = times.last() else {
        return Ok(Vec::new());
    };
    if times.iter().any(|&t| t < 0.0) {
        return Err(invalid("t", "oracle times must be >= 0"));
    }
    // dense sampling for the leakage estimate, merged with the requested times
    let mut grid: Vec<f64> = linspace(0.0, t_end, EDGE_SAMPLES);
    grid.extend_from_slice(times);
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let requested: Vec<usize> = times
        .iter()
        .map(|t| grid.iter().position(|g| g == t).expect("merged grid"))
        .collect();

    let sum_freq = params.omega_a() + params.omega_b();
    let opts = OdeOptions::with_tol(cfg.tol);
    let cutoff = cfg.cutoff;

    struct BlockRun {
        q: i64,
        states: Vec<Vec<Complex64>>,
        edge: Vec<f64>,
    }

    let runs: Vec<BlockRun> = initial
        .blocks
        .par_iter()
        .map(|(&q, amps)| -> Result<BlockRun> {
            let gens = build_generators(cutoff, q)?;
            let dim = gens.dim;
            let states = match pump {
                PumpProfile::Harmonic { g, omega } => {
                    chebyshev_path(&gens, *g, omega - sum_freq, amps, &grid)
                }
                _ => {
                    let rhs = |t: f64, y: &[Complex64], dy: &mut [Complex64]| -> Result<()> {
                        let gt = pump.eval(t)? * Complex64::from_polar(1.0, -sum_freq * t);
                        let gc = gt.conj();
                        // dy = g~ K- y - g~* K+ y
                        for j in 0..dim {
                            let mut v = Complex64::new(0.0, 0.0);
                            if j + 1 < dim {
                                v += gt * gens.raise[j] * y[j + 1];
                            }
                            if j > 0 {
                                v -= gc * gens.raise[j - 1] * y[j - 1];
                            }
                            dy[j] = v;
                        }
                        Ok(())
                    };
                    ode::integrate(rhs, 0.0, amps, &grid, &opts)?.0
                }
            };
            if states.iter().flatten().any(|z| !z.is_finite()) {
                return Err(Error::Domain(format!("non-finite amplitude in block q = {q}")));
            }
            let w = edge_window(dim);
            let edge = states
                .iter()
                .map(|s| s[dim - w..].iter().map(|z| z.norm_sqr()).sum())
                .collect();
            Ok(BlockRun { q, states, edge })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut leaked = vec![0.0f64; grid.len()];
    for run in &runs {
        for (i, e) in run.edge.iter().enumerate() {
            leaked[i] += e;
        }
    }
    // running maximum keeps the deficit monotone in t
    let mut running = 0.0f64;
    for l in leaked.iter_mut() {
        running = running.max(*l);
        *l = running;
    }

    let mut out = Vec::with_capacity(times.len());
    for &idx in &requested {
        let deficit = initial.norm_deficit + leaked[idx];
        if deficit > cfg.tail_limit {
            return Err(Error::Truncation {
                deficit,
                limit: cfg.tail_limit,
            });
        }
        let blocks = runs.iter().map(|r| (r.q, r.states[idx].clone())).collect();
        out.push(TruncatedState {
            cutoff,
            blocks,
            norm_deficit: deficit,
        });
    }
    Ok(out)
}

/// `|<n_a = n, n_b = m| psi>|^2`.
pub fn oracle_probability(state: &TruncatedState, outcome: FockOutcome) -> f64 {
    state.amplitude(outcome.n as usize, outcome.m as usize).norm_sqr()
}

/// `<psi| a†^i a^j b†^k b^l |psi>` in the truncated basis.
pub fn oracle_moment(state: &TruncatedState, pattern: (u32, u32, u32, u32)) -> Complex64 {
    let (i, j, k, l) = pattern;
    // a†^i a^j |n> = sqrt(n!/(n-j)!) sqrt((n-j+i)!/(n-j)!) |n-j+i>
    let ladder = |n: usize, create: u32, annihilate: u32| -> Option<(usize, f64)> {
        let (c, a) = (create as usize, annihilate as usize);
        if n < a {
            return None;
        }
        let mid = n - a;
        let down: f64 = (0..a).map(|t| (n - t) as f64).product();
        let up: f64 = (1..=c).map(|t| (mid + t) as f64).product();
        Some((mid + c, (down * up).sqrt()))
    };
    let mut total = Complex64::new(0.0, 0.0);
    for (na, nb, z) in state.entries() {
        if z == Complex64::new(0.0, 0.0) {
            continue;
        }
        let (Some((na2, ca)), Some((nb2, cb))) = (ladder(na, i, j), ladder(nb, k, l)) else {
            continue;
        };
        total += state.amplitude(na2, nb2).conj() * z * (ca * cb);
    }
    total
}

/// `<w, z | psi>` with `w = final_state.alpha` (mode a) and `z = final_state.beta` (mode b).
pub fn oracle_coherent_overlap(state: &TruncatedState, final_state: CoherentPair) -> Complex64 {
    let wa = coherent_amplitudes(final_state.alpha, state.cutoff);
    let zb = coherent_amplitudes(final_state.beta, state.cutoff);
    state
        .entries()
        .map(|(na, nb, z)| wa[na].conj() * zb[nb].conj() * z)
        .sum()
}

/// Photon-number distribution of mode a, `p_n(a)` for `n = 0..=cutoff`.
pub fn oracle_marginal_a(state: &TruncatedState) -> Vec<f64> {
    let mut out = vec![0.0; state.cutoff + 1];
    for (na, _, z) in state.entries() {
        out[na] += z.norm_sqr();
    }
    out
}

pub fn oracle_marginal_b(state: &TruncatedState) -> Vec<f64> {
    let mut out = vec![0.0; state.cutoff + 1];
    for (_, nb, z) in state.entries() {
        out[nb] += z.norm_sqr();
    }
    out
}

/// Result of [`auto_cutoff`].
#[derive(Debug, Clone, PartialEq)]
pub struct Converged {
    pub cutoff: usize,
    pub values: Vec<f64>,
    /// Largest change seen between the last two cutoffs.
    pub change: f64,
}

/// Initial cutoff for a state with the given expected mean photon number.
pub fn initial_cutoff(expected_mean: f64) -> usize {
    (4.0 * expected_mean).ceil().max(16.0) as usize
}

/// Doubles the cutoff from `start` until every value returned by `run`
/// changes by less than `threshold`. Truncation errors at a cutoff count as
/// "not converged yet".
pub fn auto_cutoff(
    start: usize,
    max_cutoff: usize,
    threshold: f64,
    mut run: impl FnMut(usize) -> Result<Vec<f64>>,
) -> Result<Converged> {
    let mut cutoff = start.max(4);
    let mut prev: Option<Vec<f64>> = None;
    let mut last_err = None;
    while cutoff <= max_cutoff {
        match run(cutoff) {
            Ok(values) => {
                if let Some(p) = &prev {
                    let change = p
                        .iter()
                        .zip(&values)
                        .map(|(a, b)| (a - b).abs())
                        .fold(0.0, f64::max);
                    if change < threshold {
                        return Ok(Converged {
                            cutoff,
                            values,
                            change,
                        });
                    }
                }
                prev = Some(values);
            }
            Err(e @ Error::Truncation { .. }) => {
                prev = None;
                last_err = Some(e);
            }
            Err(e) => return Err(e),
        }
        cutoff *= 2;
    }
    Err(last_err.unwrap_or(Error::Truncation {
        deficit: f64::NAN,
        limit: threshold,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn params(k2: f64) -> ModelParams {
        ModelParams::from_k_squared(k2, 1.0, 1.0, 1.0).unwrap()
    }

    fn matmul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let n = a.len();
        let mut c = vec![vec![0.0; n]; n];
        for i in 0..n {
            for k in 0..n {
                for j in 0..n {
                    c[i][j] += a[i][k] * b[k][j];
                }
            }
        }
        c
    }

    #[test]
    fn generator_entries() {
        let g = build_generators(2, 0).unwrap();
        assert_eq!(g.raise, vec![1.0, 2.0]);
        let g = build_generators(5, 1).unwrap();
        assert_eq!(g.dim, 5);
        for (j, v) in g.raise.iter().enumerate() {
            // (n_a, n_b) = (j+1, j)
            assert_eq!(*v, (((j + 2) * (j + 1)) as f64).sqrt());
        }
        assert!(build_generators(3, 4).is_err());
    }

    #[test]
    fn commutator_and_casimir_on_interior() {
        for q in [-2i64, 0, 3] {
            let g = build_generators(12, q).unwrap();
            let (kp, km, k0) = g.to_dense();
            let a = matmul(&kp, &km);
            let b = matmul(&km, &kp);
            let n = g.dim;
            for i in 0..n - 1 {
                for j in 0..n - 1 {
                    let comm = a[i][j] - b[i][j];
                    assert!((comm + 2.0 * k0[i][j]).abs() < 1e-12, "q={q} ({i},{j})");
                }
            }
            // the edge row deviates
            assert!((a[n - 1][n - 1] - b[n - 1][n - 1] + 2.0 * k0[n - 1][n - 1]).abs() > 1.0);
            // Casimir K0^2 - (K+K- + K-K+)/2 = Phi(Phi+1) with Phi = (|q|-1)/2
            let phi = (q.abs() as f64 - 1.0) / 2.0;
            for i in 0..n - 1 {
                let c = k0[i][i] * k0[i][i] - 0.5 * (a[i][i] + b[i][i]);
                assert!((c - phi * (phi + 1.0)).abs() < 1e-10, "q={q} i={i} c={c}");
            }
        }
    }

    #[test]
    fn zero_pump_leaves_state_unchanged() {
        let cfg = OracleConfig::new(20, 1e-12, 1e-10).unwrap();
        let s0 = TruncatedState::fock(20, 2, 1).unwrap();
        let s = evolve_truncated(&PumpProfile::zero(), &params(1.5), &s0, 3.0, &cfg).unwrap();
        assert_eq!(s.block(1), s0.block(1));
    }

    #[test]
    fn vacuum_revival() {
        // mid-period the vacuum spreads to n0 = 2, p_nn ~ (2/3)^n
        let cfg = OracleConfig::new(90, 1e-12, 1e-10).unwrap();
        let p = params(1.5);
        let s0 = TruncatedState::fock(90, 0, 0).unwrap();
        let s = evolve_truncated(&p.harmonic_pump(), &p, &s0, PI * 2f64.sqrt(), &cfg).unwrap();
        assert!((oracle_probability(&s, FockOutcome::new(0, 0)) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn completeness_and_block_conservation() {
        let cfg = OracleConfig::new(64, 1e-12, 1e-6).unwrap();
        let p = params(1.5);
        let s0 = TruncatedState::coherent(64, CoherentPair::real(1.0, 0.5));
        let s = evolve_truncated(&p.harmonic_pump(), &p, &s0, 2.0, &cfg).unwrap();
        assert_eq!(s.charges().collect::<Vec<_>>(), s0.charges().collect::<Vec<_>>());
        assert!((s.norm_sqr() - (1.0 - s0.norm_deficit)).abs() <= s.norm_deficit + 1e-10);
        let total: f64 = oracle_marginal_a(&s).iter().sum();
        assert!((total - s.norm_sqr()).abs() < 1e-12);
    }

    #[test]
    fn moments_at_zero_time() {
        let s = TruncatedState::fock(10, 3, 2).unwrap();
        assert!((oracle_moment(&s, (2, 2, 0, 0)).re - 6.0).abs() < 1e-12);
        assert!((oracle_moment(&s, (1, 1, 1, 1)).re - 6.0).abs() < 1e-12);
        assert_eq!(oracle_moment(&s, (0, 1, 0, 1)), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn truncation_is_reported() {
        let cfg = OracleConfig::new(8, 1e-10, 1e-10).unwrap();
        let p = params(0.5);
        let s0 = TruncatedState::fock(8, 0, 0).unwrap();
        let r = evolve_truncated(&p.harmonic_pump(), &p, &s0, 4.0, &cfg);
        assert!(matches!(r, Err(Error::Truncation { .. })));
    }

    #[test]
    fn auto_cutoff_doubles_until_converged() {
        let p = params(1.0);
        let out = auto_cutoff(initial_cutoff(1.0), 512, 1e-9, |n| {
            let cfg = OracleConfig::new(n, 1e-12, 1e-6)?;
            let s = evolve_truncated(&p.harmonic_pump(), &p, &TruncatedState::fock(n, 0, 0)?, 2.0, &cfg)?;
            Ok((0..4).map(|k| oracle_probability(&s, FockOutcome::new(k, k))).collect())
        })
        .unwrap();
        assert!(out.cutoff >= 32);
        assert!(out.change < 1e-9);
    }

    #[test]
    fn bessel_orders() {
        let j = bessel_j_orders(1.0);
        assert!((j[0] - 0.765_197_686_557_966_6).abs() < 1e-15);
        let j = bessel_j_orders(10.0);
        assert!((j[5] + 0.234_061_528_186_793_6).abs() < 1e-14);
        let j = bessel_j_orders(900.0);
        assert!(j.len() > 900 && j.last().unwrap().abs() < 1e-17);
        for tau in [1e-300, 1e-40, 1e-13] {
            let j = bessel_j_orders(tau);
            assert!(j.iter().all(|v| v.is_finite()) && j[0] == 1.0);
        }
    }

    #[test]
    fn one_level_blocks_stay_finite() {
        // |a = cutoff, b = 0> sits alone in block q = cutoff, where K+ and K- vanish
        let cutoff = 12;
        let mut a = vec![Complex64::new(0.0, 0.0); cutoff + 1];
        a[cutoff] = Complex64::new(0.6, 0.0);
        a[0] = Complex64::new(0.8, 0.0);
        let s0 = TruncatedState::product(cutoff, &a, &[Complex64::new(1.0, 0.0)]);
        let cfg = OracleConfig::new(cutoff, 1e-12, 1.0).unwrap();
        let s = evolve_truncated(&params(2.0).harmonic_pump(), &params(2.0), &s0, 3.0, &cfg).unwrap();
        assert!((s.amplitude(cutoff, 0).norm() - 0.6).abs() < 1e-14);
        assert!(s.norm_deficit.is_finite() && s.norm_sqr().is_finite());
    }

    #[test]
    fn chebyshev_leakage_matches_integrator() {
        // a cutoff this low leaks; both propagators must see the same leak
        let cfg = OracleConfig::new(48, 1e-12, 1.0).unwrap();
        let p = params(2.0);
        let (g, w) = (p.g(), p.pump_frequency());
        let generic = PumpProfile::custom(move |t| Complex64::from_polar(g, w * t));
        let s0 = TruncatedState::coherent(48, CoherentPair::real(2.0, -2.0));
        let a = evolve_truncated(&p.harmonic_pump(), &p, &s0, 3.0, &cfg).unwrap();
        let b = evolve_truncated(&generic, &p, &s0, 3.0, &cfg).unwrap();
        assert!(a.norm_deficit > 1e-5);
        assert!((a.norm_deficit - b.norm_deficit).abs() < 1e-9 * a.norm_deficit.max(1e-6));
    }

    #[test]
    fn chebyshev_matches_integrator() {
        // only the two propagators are compared, so leakage does not matter
        let cfg = OracleConfig::new(48, 1e-12, 1.0).unwrap();
        let p = params(0.7);
        let (g, w) = (p.g(), p.pump_frequency());
        let generic = PumpProfile::custom(move |t| Complex64::from_polar(g, w * t));
        let s0 = TruncatedState::coherent(48, CoherentPair::new(Complex64::new(0.4, 0.3), Complex64::new(-0.2, 0.5)));
        let a = evolve_truncated(&p.harmonic_pump(), &p, &s0, 1.7, &cfg).unwrap();
        let b = evolve_truncated(&generic, &p, &s0, 1.7, &cfg).unwrap();
        for q in a.charges() {
            for (x, y) in a.block(q).unwrap().iter().zip(b.block(q).unwrap()) {
                assert!((x - y).norm() < 1e-10);
            }
        }
    }
}
