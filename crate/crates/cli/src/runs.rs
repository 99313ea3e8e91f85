//! The coefficient dump and the closed-form vs truncated-space comparison.

use anyhow::{bail, Result};

use paramp_core::amplitudes::{coherent_transition_prob, fock_prob, CoherentPair, FockOutcome};
use paramp_core::moments::second_moments;
use paramp_core::oracle::{evolve_truncated_grid, oracle_coherent_overlap, oracle_moment, oracle_probability, OracleConfig, TruncatedState};
use paramp_core::wei_norman::{derived_scalars, solve_analytic, solve_ode, unitarity_residuals};
use paramp_core::{ModelParams, WeiNormanCoefficients};

use crate::scenario::{Grid, InitialState};
use crate::table::Table;

/// `A+`, `A0`, `A-`, `n0` and the largest unitarity residual on the grid.
///
/// With `tol` the coefficients come from the integrator instead of the closed form.
pub fn evolve(params: &ModelParams, grid: &Grid, tol: Option<f64>) -> Result<Table> {
    let gts = grid.points();
    let times: Vec<f64> = gts.iter().map(|gt| gt / params.g()).collect();
    let coeffs: Vec<WeiNormanCoefficients> = match tol {
        None => times.iter().map(|&t| solve_analytic(params, t)).collect(),
        Some(tol) => {
            // the integrator starts at t = 0
            let skip = usize::from(times[0] != 0.0);
            let mut nodes = Vec::with_capacity(times.len() + 1);
            if skip == 1 {
                nodes.push(0.0);
            }
            nodes.extend_from_slice(&times);
            solve_ode(&params.harmonic_pump(), params, &nodes, tol)?.split_off(skip)
        }
    };
    let mut table = Table::with_abscissa(gts);
    let col = |f: &dyn Fn(&WeiNormanCoefficients) -> f64| coeffs.iter().map(f).collect::<Vec<_>>();
    table.push("re_a_plus", col(&|c| c.a_plus.re));
    table.push("im_a_plus", col(&|c| c.a_plus.im));
    table.push("re_a_zero", col(&|c| c.a_zero.re));
    table.push("im_a_zero", col(&|c| c.a_zero.im));
    table.push("re_a_minus", col(&|c| c.a_minus.re));
    table.push("im_a_minus", col(&|c| c.a_minus.im));
    table.push("n0", times.iter().map(|&t| derived_scalars(params, t).n0).collect());
    table.push(
        "residual",
        col(&|c| {
            let (a, b, d) = unitarity_residuals(c);
            a.max(b).max(d)
        }),
    );
    Ok(table)
}

/// Largest cutoff [`default_cutoff`] will pick.
pub const MAX_AUTO_CUTOFF: usize = 8192;

/// Cutoff at which the geometric vacuum tail, weighted by the `N^4` of a
/// degree-four moment, is below `1e-12` at every grid time; the photons
/// already present in the input shift the tail up.
pub fn default_cutoff(params: &ModelParams, state: &InitialState, grid: &Grid) -> Result<usize> {
    let y = grid
        .points()
        .iter()
        .map(|gt| derived_scalars(params, gt / params.g()).y)
        .fold(0.0f64, f64::max);
    let shift = match *state {
        InitialState::Fock(f) => (f.r + f.s) as f64,
        _ => {
            let p = state.coherent_pair().expect("coherent");
            let amp = p.alpha.norm() + p.beta.norm();
            amp * amp + 8.0 * amp
        }
    };
    let mut n = 32usize;
    while n <= MAX_AUTO_CUTOFF {
        let tail = n as f64 - shift;
        if tail > 0.0 && 4.0 * (n as f64).ln() + tail * y.ln() <= -12.0 * std::f64::consts::LN_10 {
            return Ok(n);
        }
        n += 16;
    }
    bail!("no cutoff up to {MAX_AUTO_CUTOFF} resolves this run; pass --cutoff explicitly")
}

/// Leakage below which [`oracle_check_auto`] stops doubling the cutoff.
pub const AUTO_DEFICIT: f64 = 1e-12;

/// [`oracle_check`] starting from [`default_cutoff`] and doubling the cutoff
/// until the tracked leakage is below [`AUTO_DEFICIT`].
pub fn oracle_check_auto(params: &ModelParams, state: &InitialState, grid: &Grid, tol: f64) -> Result<OracleReport> {
    let mut cutoff = default_cutoff(params, state, grid)?;
    loop {
        let run = oracle_check(params, state, grid, cutoff, tol, 1e-6);
        let resolved = match &run {
            Ok(r) => r.table.column("norm_deficit").expect("column").iter().all(|&d| d <= AUTO_DEFICIT),
            Err(e) if matches!(e.downcast_ref::<paramp_core::Error>(), Some(paramp_core::Error::Truncation { .. })) => false,
            Err(_) => return run,
        };
        if resolved || 2 * cutoff > MAX_AUTO_CUTOFF {
            return run;
        }
        cutoff *= 2;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub cutoff: usize,
    pub table: Table,
    /// Largest `error / (1e-8 + norm_deficit)`; at most 1 when everything agrees.
    pub worst_ratio: f64,
}

/// Compares closed-form probabilities and moments with the truncated-space
/// propagator at every grid time.
///
/// Fock inputs check every reachable `p_mn` inside the cutoff; coherent inputs
/// check the overlaps with the initial pair and with the vacuum. Moments of
/// degree up to four are compared relative to `max(1, |value|)`.
pub fn oracle_check(params: &ModelParams, state: &InitialState, grid: &Grid, cutoff: usize, tol: f64, tail_limit: f64) -> Result<OracleReport> {
    let cfg = OracleConfig::new(cutoff, tol, tail_limit)?;
    let init = match *state {
        InitialState::Fock(f) => TruncatedState::fock(cutoff, f.r as usize, f.s as usize)?,
        _ => TruncatedState::coherent(cutoff, state.coherent_pair().expect("coherent")),
    };
    let gts = grid.points();
    let times: Vec<f64> = gts.iter().map(|gt| gt / params.g()).collect();
    let states = evolve_truncated_grid(&params.harmonic_pump(), params, &init, &times, &cfg)?;

    let (mut deficits, mut prob_errs, mut moment_errs) = (Vec::new(), Vec::new(), Vec::new());
    let mut worst_ratio = 0.0f64;
    for (st, &t) in states.iter().zip(&times) {
        let c = solve_analytic(params, t);
        let mut prob_err = 0.0f64;
        match *state {
            InitialState::Fock(f) => {
                for n in 0..=cutoff as u64 {
                    let Some(m) = (n + f.s).checked_sub(f.r) else { continue };
                    if m > cutoff as u64 {
                        break;
                    }
                    let o = FockOutcome::new(m, n);
                    prob_err = prob_err.max((fock_prob(&c, f, o) - oracle_probability(st, o)).abs());
                }
            }
            _ => {
                let pair = state.coherent_pair().expect("coherent");
                for fin in [pair, CoherentPair::real(0.0, 0.0)] {
                    let o = oracle_coherent_overlap(st, fin).norm_sqr();
                    prob_err = prob_err.max((coherent_transition_prob(&c, pair, fin) - o).abs());
                }
            }
        }
        let mut moment_err = 0.0f64;
        for (pat, v) in second_moments(state.product(), &c).patterns() {
            moment_err = moment_err.max((v - oracle_moment(st, pat)).norm() / v.norm().max(1.0));
        }
        let allowed = 1e-8 + st.norm_deficit;
        worst_ratio = worst_ratio.max(prob_err.max(moment_err) / allowed);
        deficits.push(st.norm_deficit);
        prob_errs.push(prob_err);
        moment_errs.push(moment_err);
    }
    if !worst_ratio.is_finite() {
        bail!("non-finite comparison; the state is not resolved at cutoff {cutoff}");
    }
    let mut table = Table::with_abscissa(gts);
    table.push("norm_deficit", deficits);
    table.push("max_prob_err", prob_errs);
    table.push("max_moment_err", moment_errs);
    Ok(OracleReport { cutoff, table, worst_ratio })
}
