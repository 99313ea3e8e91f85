//! Property tests for the model, coefficient, amplitude and observable invariants.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use proptest::prelude::*;

use paramp_core::amplitudes::{
    amode_prob, coherent_mean_numbers, fock_prob, CoherentPair, FockOutcome, FockPair, PureAModeState,
};
use paramp_core::model::{
    classify_k_squared, classify_regime, coherent_revival_params, fock_revival_times, ModelParams, PumpProfile,
    RegimeKind, TabulatedPump, DEFAULT_REGIME_EPSILON,
};
use paramp_core::moments::second_moments;
use paramp_core::observables::{
    cross_correlation_fock, cross_correlation_general, heisenberg_a, heisenberg_b, instantaneous_diagonalization,
    mean_photon_fock, quadrature_variance_moments, snr_eta_coherent, squeezing_kernel, uncertainty_product,
};
use paramp_core::wei_norman::{derived_scalars, solve_analytic};

fn params(k2: f64) -> ModelParams {
    ModelParams::from_k_squared(k2, 1.0, 1.0, 1.0).unwrap()
}

fn complex(max: f64) -> impl Strategy<Value = Complex64> {
    (0.0..=max, 0.0..2.0 * PI).prop_map(|(r, phi)| Complex64::from_polar(r, phi))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn detuning_is_exact(wa in 0.01f64..10.0, wb in 0.01f64..10.0, g in 0.01f64..5.0, w in -30.0f64..30.0) {
        let p = ModelParams::new(wa, wb, g, w).unwrap();
        prop_assert_eq!(p.detuning(), w - wa - wb);
    }

    #[test]
    fn regime_bands(k2 in 0.0f64..4.0, eps in 1e-10f64..1e-2) {
        let kind = classify_k_squared(k2, eps).kind;
        prop_assert_eq!(kind == RegimeKind::Sub, k2 < 1.0 - eps);
        prop_assert_eq!(kind == RegimeKind::Super, k2 > 1.0 + eps);
        prop_assert_eq!(kind == RegimeKind::Critical, (1.0 - eps..=1.0 + eps).contains(&k2));
        prop_assert_eq!(classify_regime(&params(k2), DEFAULT_REGIME_EPSILON).kind, classify_k_squared(params(k2).k_squared(), DEFAULT_REGIME_EPSILON).kind);
    }

    #[test]
    fn harmonic_pump_is_exact(g in 0.01f64..5.0, w in -10.0f64..10.0, t in 0.0f64..100.0) {
        let pump = PumpProfile::Harmonic { g, omega: w };
        prop_assert_eq!(pump.eval(t).unwrap(), Complex64::from_polar(g, w * t));
    }

    #[test]
    fn tabulated_times_must_increase(t0 in 0.0f64..1.0, dt in -1.0f64..1.0) {
        let samples = vec![(t0, Complex64::new(1.0, 0.0)), (t0 + dt, Complex64::new(0.0, 1.0))];
        prop_assert_eq!(TabulatedPump::new(samples).is_ok(), dt > 0.0);
    }

    #[test]
    fn fock_revivals_are_linear(k2 in 1.01f64..10.0, g in 0.1f64..3.0, n_max in 1u32..20) {
        let p = ModelParams::from_k_squared(k2, g, 1.0, 1.0).unwrap();
        let revs = fock_revival_times(&p, n_max).unwrap();
        prop_assert_eq!(revs.len(), n_max as usize);
        let first = revs[0].t_rev;
        for (i, r) in revs.iter().enumerate() {
            prop_assert!((r.t_rev - first * (i + 1) as f64).abs() <= 1e-12 * r.t_rev);
            if i > 0 {
                prop_assert!(r.t_rev > revs[i - 1].t_rev);
            }
        }
    }

    #[test]
    fn coherent_revival_pairs_are_super(n in 2u32..60, p_frac in 0.0f64..1.0) {
        let p = 1 + ((n - 2) as f64 * p_frac) as u32;
        let rev = coherent_revival_params(n, p).unwrap();
        prop_assert_eq!(classify_k_squared(rev.k_squared, DEFAULT_REGIME_EPSILON).kind, RegimeKind::Super);
    }

    #[test]
    fn derived_scalars_are_consistent(k2 in 0.0f64..4.0, gt in 0.0f64..10.0) {
        let d = derived_scalars(&params(k2), gt);
        prop_assert!((d.x - (1.0 + d.n0)).abs() <= 1e-15 * d.x);
        prop_assert!((d.x * d.y - d.n0).abs() <= 1e-14 * d.n0.max(1e-300));
    }

    #[test]
    fn phase_relation(k2 in 0.0f64..4.0, gt in 0.0f64..10.0) {
        let p = params(k2);
        let c = solve_analytic(&p, gt);
        let rot = Complex64::from_polar(1.0, -p.detuning() * gt);
        prop_assert!((c.a_plus + rot * c.a_minus).norm() <= 1e-12);
        prop_assert!(c.a_minus.norm() < 1.0);
    }

    #[test]
    fn super_regime_is_periodic(k2 in 1.05f64..6.0, gt in 0.0f64..10.0) {
        let p = params(k2);
        let t_rev = fock_revival_times(&p, 1).unwrap()[0].t_rev;
        let a = solve_analytic(&p, gt);
        let b = solve_analytic(&p, gt + t_rev);
        prop_assert!((a.a_minus - b.a_minus).norm() <= 1e-10);
        prop_assert!((a.a_zero.re - b.a_zero.re).abs() <= 1e-10);
    }

    #[test]
    fn fock_distribution_normalized_and_conserving(
        k2 in 0.5f64..4.0, gt in 0.0f64..4.0, r in 0u64..6, s in 0u64..6, stray in 1u64..4
    ) {
        let c = solve_analytic(&params(k2), gt);
        let f = FockPair::new(r, s);
        let mut total = 0.0;
        let mut n = r;
        loop {
            let m = n + s - r;
            let p = fock_prob(&c, f, FockOutcome::new(m, n));
            total += p;
            prop_assert_eq!(fock_prob(&c, f, FockOutcome::new(m + stray, n)), 0.0);
            if n > r + 100 && p < 1e-18 {
                break;
            }
            n += 1;
        }
        // outcomes with fewer photons than the input
        for k in 1..=r.min(s) {
            total += fock_prob(&c, f, FockOutcome::new(s - k, r - k));
        }
        prop_assert!((total - 1.0).abs() <= 1e-8, "total {}", total);
    }

    #[test]
    fn amode_phase_independence(k2 in 0.0f64..3.0, gt in 0.0f64..5.0, alpha in complex(1.5), seed in 0u64..1000) {
        let psi = PureAModeState::poisson(alpha);
        let phases = (0..psi.probs().len()).map(|i| ((i as u64 * 7919 + seed) % 1000) as f64 * 0.0123).collect();
        let other = psi.with_phases(phases).unwrap();
        let d = derived_scalars(&params(k2), gt);
        for m in 0..3u64 {
            for n in m..m + 5 {
                let o = FockOutcome::new(m, n);
                prop_assert_eq!(amode_prob(&d, &psi, o).unwrap(), amode_prob(&d, &other, o).unwrap());
            }
        }
    }

    #[test]
    fn mean_difference_is_conserved(k2 in 0.0f64..4.0, gt in 0.0f64..6.0, r in 0u64..6, s in 0u64..6,
                                    alpha in complex(2.0), beta in complex(2.0)) {
        let p = params(k2);
        let c = solve_analytic(&p, gt);
        let d = derived_scalars(&p, gt);
        let (na, nb) = mean_photon_fock(&d, FockPair::new(r, s));
        prop_assert!((na - nb - (r as f64 - s as f64)).abs() <= 1e-12 * na.max(1.0));
        let m = second_moments(FockPair::new(r, s), &c);
        prop_assert!((m.mean_a() - m.mean_b() - (r as f64 - s as f64)).abs() <= 1e-10 * m.mean_a().max(1.0));
        let pair = CoherentPair::new(alpha, beta);
        let m = second_moments(pair, &c);
        let diff = alpha.norm_sqr() - beta.norm_sqr();
        prop_assert!((m.mean_a() - m.mean_b() - diff).abs() <= 1e-10 * m.mean_a().max(1.0));
        let (ca, _) = coherent_mean_numbers(&c, &d, pair);
        prop_assert!((ca - m.mean_a()).abs() <= 1e-10 * ca.max(1.0));
    }

    #[test]
    fn canonical_commutator(k2 in 0.0f64..4.0, gt in 0.0f64..4.0) {
        let p = params(k2);
        prop_assert!((heisenberg_a(&p, gt).commutator() - 1.0).abs() <= 1e-10);
        prop_assert!((heisenberg_b(&p, gt).commutator() - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn uncertainty_bound(k2 in 0.0f64..4.0, gt in 0.0f64..10.0) {
        prop_assert!(uncertainty_product(&params(k2), gt) >= 1.0 - 1e-10);
    }

    #[test]
    fn coherent_variance_is_vacuum_variance(k2 in 0.0f64..3.0, gt in 0.0f64..4.0, theta in 0.0f64..PI,
                                            alpha in complex(2.0), beta in complex(2.0)) {
        let p = params(k2);
        let m = second_moments(CoherentPair::new(alpha, beta), &solve_analytic(&p, gt));
        let k = squeezing_kernel(&p, theta, gt);
        prop_assert!((quadrature_variance_moments(&m, theta) - k.t_sq).abs() <= 1e-10 * k.t_sq.max(1.0));
    }

    #[test]
    fn eta_respects_yuen(k2 in 0.0f64..12.0, gt in 0.0f64..6.0, alpha in complex(3.0), beta in complex(3.0)) {
        let p = params(k2);
        let r = snr_eta_coherent(&solve_analytic(&p, gt), &derived_scalars(&p, gt), CoherentPair::new(alpha, beta));
        prop_assert!(r.eta <= r.yuen_bound + 1e-9, "eta {} bound {}", r.eta, r.yuen_bound);
    }

    #[test]
    fn fock_correlation_matches_moments(k2 in 0.0f64..4.0, gt in 0.0f64..4.0, r in 0u64..6, s in 0u64..6) {
        let p = params(k2);
        let closed = cross_correlation_fock(&derived_scalars(&p, gt), FockPair::new(r, s)).f;
        let general = cross_correlation_general(&second_moments(FockPair::new(r, s), &solve_analytic(&p, gt))).f;
        let scale = second_moments(FockPair::new(r, s), &solve_analytic(&p, gt)).get(1, 1, 1, 1).re.abs().max(1.0);
        prop_assert!((closed - general).abs() <= 1e-9 * scale, "{} vs {}", closed, general);
    }

    #[test]
    fn diagonalization_stability(wa in 0.1f64..5.0, wb in 0.1f64..5.0, g in 0.01f64..6.0) {
        let p = ModelParams::new(wa, wb, g, wa + wb).unwrap();
        let d = instantaneous_diagonalization(&p);
        let wp = 0.5 * (wa + wb);
        prop_assert_eq!(d.stable, g * g < wp * wp);
        if let Some(r) = d.squeeze_r {
            let expected = 1.0 / (1.0 - (g / wp).powi(2)).sqrt();
            prop_assert!(((2.0 * r).cosh() - expected).abs() <= 1e-9 * expected);
            prop_assert!((2.0 * r).cosh() >= 1.0);
        }
        prop_assert_eq!(d.squeeze_phi, FRAC_PI_2);
    }
}
