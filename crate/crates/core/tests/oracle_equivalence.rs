//! Closed forms against brute-force propagation on a truncated Fock space.

use num_complex::Complex64;

use paramp_core::amplitudes::{coherent_transition_prob, fock11_mean_a, fock11_prob, fock_prob, CoherentPair, FockOutcome, FockPair};
use paramp_core::model::{ModelParams, PumpProfile};
use paramp_core::moments::second_moments;
use paramp_core::oracle::{
    auto_cutoff, evolve_truncated, evolve_truncated_grid, initial_cutoff, oracle_coherent_overlap, oracle_marginal_a,
    oracle_moment, oracle_probability, OracleConfig, TruncatedState,
};
use paramp_core::wei_norman::{derived_scalars, solve_analytic, solve_ode};

fn params(k2: f64) -> ModelParams {
    ModelParams::from_k_squared(k2, 1.0, 1.0, 1.0).unwrap()
}

#[test]
fn fock11_mean_is_one_plus_three_n0() {
    for k2 in [0.6, 1.0, 2.5] {
        let p = params(k2);
        let cfg = OracleConfig::new(512, 1e-12, 1e-9).unwrap();
        let init = TruncatedState::fock(512, 1, 1).unwrap();
        let times = [0.7, 1.9];
        let states = evolve_truncated_grid(&p.harmonic_pump(), &p, &init, &times, &cfg).unwrap();
        for (st, &t) in states.iter().zip(&times) {
            let d = derived_scalars(&p, t);
            let oracle_mean: f64 = oracle_marginal_a(st).iter().enumerate().map(|(n, q)| n as f64 * q).sum();
            assert!((oracle_mean - (1.0 + 3.0 * d.n0)).abs() < 1e-8 * oracle_mean, "k2={k2} t={t}");
            assert!((fock11_mean_a(&d) - oracle_mean).abs() < 1e-8 * oracle_mean);
            for n in 0..40u64 {
                let o = oracle_probability(st, FockOutcome::new(n, n));
                assert!((fock11_prob(&d, n) - o).abs() < 1e-10 + st.norm_deficit, "k2={k2} t={t} n={n}");
            }
        }
    }
}

#[test]
fn super_regime_fock_and_coherent() {
    let p = params(1.7);
    let cfg = OracleConfig::new(160, 1e-12, 1e-9).unwrap();
    let t = 2.3;
    let c = solve_analytic(&p, t);
    for (r, s) in [(0usize, 2usize), (3, 1), (2, 2)] {
        let st = evolve_truncated(&p.harmonic_pump(), &p, &TruncatedState::fock(160, r, s).unwrap(), t, &cfg).unwrap();
        let f = FockPair::new(r as u64, s as u64);
        for n in 0..60u64 {
            let Some(m) = (n + s as u64).checked_sub(r as u64) else { continue };
            let o = FockOutcome::new(m, n);
            assert!((fock_prob(&c, f, o) - oracle_probability(&st, o)).abs() < 1e-10);
        }
    }
    let pair = CoherentPair::new(Complex64::new(0.8, -0.4), Complex64::new(-1.1, 0.6));
    let st = evolve_truncated(&p.harmonic_pump(), &p, &TruncatedState::coherent(160, pair), t, &cfg).unwrap();
    for fin in [pair, CoherentPair::real(0.3, 0.0), CoherentPair::new(Complex64::new(0.0, 1.0), Complex64::new(0.5, 0.5))] {
        let o = oracle_coherent_overlap(&st, fin).norm_sqr();
        assert!((coherent_transition_prob(&c, pair, fin) - o).abs() < 1e-10);
    }
    let m = second_moments(pair, &c);
    for (pat, v) in m.patterns() {
        assert!((v - oracle_moment(&st, pat)).norm() < 1e-9 * v.norm().max(1.0), "{pat:?}");
    }
}

#[test]
fn non_harmonic_pump_agrees_through_the_ode() {
    // chirped pump: no closed form, so both sides integrate numerically
    let p = params(0.8);
    let (g, w) = (p.g(), p.pump_frequency());
    let pump = PumpProfile::custom(move |t| Complex64::from_polar(g * (1.0 - 0.3 * (0.5 * t).sin()), w * t + 0.2 * t * t));
    let times = [0.5, 1.5];
    let coeffs = solve_ode(&pump, &p, &[0.0, 0.5, 1.5], 1e-12).unwrap();
    let cfg = OracleConfig::new(96, 1e-12, 1e-9).unwrap();
    let f = FockPair::new(2, 1);
    let states = evolve_truncated_grid(&pump, &p, &TruncatedState::fock(96, 2, 1).unwrap(), &times, &cfg).unwrap();
    for (st, c) in states.iter().zip(&coeffs[1..]) {
        for n in 1..30u64 {
            let o = FockOutcome::new(n - 1, n);
            assert!((fock_prob(c, f, o) - oracle_probability(st, o)).abs() < 1e-9, "t={} n={n}", c.t);
        }
        let m = second_moments(f, c);
        for (pat, v) in m.patterns() {
            assert!((v - oracle_moment(st, pat)).norm() < 1e-8 * v.norm().max(1.0), "{pat:?}");
        }
    }
}

#[test]
fn automatic_cutoff_converges_on_vacuum_population() {
    let p = params(0.5);
    let t = 2.0;
    let d = derived_scalars(&p, t);
    let conv = auto_cutoff(initial_cutoff(d.n0), 4096, 1e-9, |cutoff| {
        let cfg = OracleConfig::new(cutoff, 1e-12, 1e-3)?;
        let st = evolve_truncated(&p.harmonic_pump(), &p, &TruncatedState::fock(cutoff, 0, 0)?, t, &cfg)?;
        Ok((0..5).map(|n| oracle_probability(&st, FockOutcome::new(n, n))).collect())
    })
    .unwrap();
    for (n, v) in conv.values.iter().enumerate() {
        let exact = d.y.powi(n as i32) / d.x;
        assert!((v - exact).abs() < 1e-9, "cutoff {} n={n}", conv.cutoff);
    }
}
