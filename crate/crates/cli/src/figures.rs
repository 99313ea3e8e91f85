//! Built-in figure presets.

use std::f64::consts::{FRAC_PI_2, PI};

use anyhow::{anyhow, Result};
use num_complex::Complex64;

use paramp_core::amplitudes::{CoherentPair, FockOutcome, FockPair};
use paramp_core::ModelParams;

use crate::scenario::{Grid, InitialState, Observable, Series};
use crate::table::Table;

#[derive(Debug, Clone)]
pub struct Figure {
    pub name: &'static str,
    pub description: &'static str,
    pub grid: Grid,
    pub series: Vec<Series>,
}

impl Figure {
    pub fn run(&self) -> Table {
        let mut table = Table::new(&self.grid);
        for s in &self.series {
            table.push(&s.label, s.column(&self.grid));
        }
        table
    }
}

pub const PRESETS: &[(&str, &str)] = &[
    ("fig1", "p11 and p33 for the Fock input (1,1), k2 = 1.5"),
    ("fig2", "p11 and p33 for the Fock input (1,1), k2 = 0.5"),
    ("fig3", "p_mn with m = 1, n = 2 for Poisson a-photons (alpha = 0.85), k2 = 1.5 and 0.5"),
    ("fig4", "F for the Fock inputs (50,10), (50,0) and r = s, k2 = 1.5"),
    ("fig5", "coherent return probability: k2 = 9/5 with alpha = beta = 1, k2 = pi with alpha = beta = 5"),
    ("fig6", "F and Q_a for the Fock inputs (50,10) and (50,0), k2 = 0.5"),
    ("fig7", "vacuum Delta X_0, Delta X_pi/2 and their product, k2 = 9/5"),
    ("fig7log", "vacuum Delta X_0, Delta X_pi/2 and their product, k2 = 0.5 (log-scale plot)"),
    ("fig8", "eta_a and the Yuen bound, k2 = 10, alpha = 0, beta = 3"),
    ("fig9", "rho_a for (100,1) and (1,100) at k2 = 1.5 and 0.5"),
    ("mandel", "Q_a for (1,0) and (0,1) and F, k2 = 1.5"),
    ("fcoh", "F for coherent inputs alpha = sqrt(50), beta = sqrt(10) and beta = 0, k2 = 1.5"),
    ("rho", "rho_a for (1,1) and (0,10) at k2 = 1.5 and 0.5"),
];

pub const DEFAULT_FIGURE_STEPS: usize = 601;

fn k2(v: f64) -> ModelParams {
    ModelParams::from_k_squared(v, 1.0, 1.0, 1.0).expect("preset parameters are valid")
}

fn fock(r: u64, s: u64) -> InitialState {
    InitialState::Fock(FockPair::new(r, s))
}

fn coherent(alpha: f64, beta: f64) -> InitialState {
    InitialState::Coherent(CoherentPair::real(alpha, beta))
}

fn series(k: f64, state: InitialState, obs: Observable, label: &str) -> Series {
    Series::new(k2(k), state, obs)
        .expect("preset selectors match their states")
        .labelled(label)
}

fn prob(m: u64, n: u64) -> Observable {
    Observable::Prob(FockOutcome::new(m, n))
}

/// Preset `name` on its own grid, or with `steps` / `t_end` overrides.
pub fn preset(name: &str, t_end: Option<f64>, steps: Option<usize>) -> Result<Figure> {
    let (end, series): (f64, Vec<Series>) = match name {
        "fig1" | "fig2" => {
            let k = if name == "fig1" { 1.5 } else { 0.5 };
            (12.0, vec![series(k, fock(1, 1), prob(1, 1), "p11"), series(k, fock(1, 1), prob(3, 3), "p33")])
        }
        "fig3" => {
            let psi = InitialState::Poisson(Complex64::new(0.85, 0.0));
            (20.0, vec![series(1.5, psi, prob(1, 2), "p12_k2=1.5"), series(0.5, psi, prob(1, 2), "p12_k2=0.5")])
        }
        "fig4" => (
            10.0,
            vec![
                series(1.5, fock(50, 10), Observable::BigF, "F_50_10"),
                series(1.5, fock(50, 0), Observable::BigF, "F_50_0"),
                series(1.5, fock(5, 5), Observable::BigF, "F_r=s"),
            ],
        ),
        "fig5" => (
            50.0,
            vec![
                series(9.0 / 5.0, coherent(1.0, 1.0), Observable::CoherentProb(None), "p_ba_k2=1.8"),
                series(PI, coherent(5.0, 5.0), Observable::CoherentProb(None), "p_ba_k2=pi"),
            ],
        ),
        "fig6" => (
            4.0,
            vec![
                series(0.5, fock(50, 10), Observable::BigF, "F_50_10"),
                series(0.5, fock(50, 10), Observable::MandelQ, "Q_a_50_10"),
                series(0.5, fock(50, 0), Observable::BigF, "F_50_0"),
                series(0.5, fock(50, 0), Observable::MandelQ, "Q_a_50_0"),
            ],
        ),
        "fig7" | "fig7log" => {
            let (k, end) = if name == "fig7" { (9.0 / 5.0, 15.0) } else { (0.5, 14.0) };
            (
                end,
                vec![
                    series(k, fock(0, 0), Observable::DeltaX(0.0), "dX0"),
                    series(k, fock(0, 0), Observable::DeltaX(FRAC_PI_2), "dX90"),
                    series(k, fock(0, 0), Observable::Uncertainty, "dX0_dX90"),
                ],
            )
        }
        "fig8" => (
            3.0,
            vec![
                series(10.0, coherent(0.0, 3.0), Observable::Eta, "eta_a"),
                series(10.0, coherent(0.0, 3.0), Observable::Yuen, "yuen"),
            ],
        ),
        "fig9" => (
            10.0,
            vec![
                series(1.5, fock(100, 1), Observable::Rho, "rho_100_1_k2=1.5"),
                series(0.5, fock(100, 1), Observable::Rho, "rho_100_1_k2=0.5"),
                series(1.5, fock(1, 100), Observable::Rho, "rho_1_100_k2=1.5"),
                series(0.5, fock(1, 100), Observable::Rho, "rho_1_100_k2=0.5"),
            ],
        ),
        "mandel" => (
            10.0,
            vec![
                series(1.5, fock(1, 0), Observable::MandelQ, "Q_a_1_0"),
                series(1.5, fock(0, 1), Observable::MandelQ, "Q_a_0_1"),
                series(1.5, fock(1, 0), Observable::BigF, "F_1_0"),
            ],
        ),
        "fcoh" => {
            let (a, b) = (50f64.sqrt(), 10f64.sqrt());
            (
                10.0,
                vec![
                    series(1.5, coherent(a, b), Observable::BigF, "F_coh_50_10"),
                    series(1.5, coherent(a, 0.0), Observable::BigF, "F_coh_50_0"),
                ],
            )
        }
        "rho" => (
            10.0,
            vec![
                series(1.5, fock(1, 1), Observable::Rho, "rho_1_1_k2=1.5"),
                series(0.5, fock(1, 1), Observable::Rho, "rho_1_1_k2=0.5"),
                series(1.5, fock(0, 10), Observable::Rho, "rho_0_10_k2=1.5"),
                series(0.5, fock(0, 10), Observable::Rho, "rho_0_10_k2=0.5"),
            ],
        ),
        other => {
            return Err(anyhow!(
                "unknown figure `{other}` (available: {})",
                PRESETS.iter().map(|(n, _)| *n).collect::<Vec<_>>().join(", ")
            ))
        }
    };
    let (name, description) = PRESETS.iter().copied().find(|(n, _)| *n == name).expect("listed preset");
    Ok(Figure {
        name,
        description,
        grid: Grid::new(0.0, t_end.unwrap_or(end), steps.unwrap_or(DEFAULT_FIGURE_STEPS))?,
        series,
    })
}
