//! Scenarios: a model, an initial state, an observable and a `gt` grid.
//!
//! A scenario file is flat `key = value` text:
//!
//! ```text
//! k2 = 1.5              # or `omega = ...`; g, omega_a, omega_b default to 1
//! fock = 1,1            # or `alpha`/`beta` (coherent), or `poisson` (a-mode, b in vacuum)
//! observable = prob
//! outcome = 1,1         # m (b photons), n (a photons)
//! t_end = 12
//! steps = 241
//! ```

use std::f64::consts::FRAC_PI_2;
use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use num_complex::Complex64;

use paramp_core::amplitudes::{
    amode_prob, coherent_mean_numbers, coherent_revival_prob, coherent_transition_prob, fock_prob,
    reduced_density_a, reduced_density_b, CoherentPair, FockOutcome, FockPair, PureAModeState,
};
use paramp_core::config::KeyValues;
use paramp_core::moments::{second_moments, ProductState};
use paramp_core::observables::{
    cross_correlation_fock, cross_correlation_general, mandel_q_coherent, mandel_q_fock, mean_photon_fock,
    quadrature_variance, snr_eta_coherent, snr_rho_fock, squeezing_kernel,
};
use paramp_core::wei_norman::{derived_scalars, solve_analytic};
use paramp_core::ModelParams;

use crate::table::Table;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialState {
    Fock(FockPair),
    Coherent(CoherentPair),
    /// Poisson-distributed a-photons with amplitude `alpha`, b in vacuum.
    Poisson(Complex64),
}

impl InitialState {
    /// The coherent pair, when the state is one.
    pub fn coherent_pair(&self) -> Option<CoherentPair> {
        match *self {
            InitialState::Fock(_) => None,
            InitialState::Coherent(p) => Some(p),
            InitialState::Poisson(a) => Some(CoherentPair::new(a, Complex64::new(0.0, 0.0))),
        }
    }

    /// The a-mode state when mode b starts in vacuum.
    pub fn amode(&self) -> Option<PureAModeState> {
        match *self {
            InitialState::Fock(f) if f.s == 0 => Some(PureAModeState::fock(f.r as usize)),
            InitialState::Fock(_) => None,
            InitialState::Coherent(p) if p.beta.norm_sqr() == 0.0 => Some(PureAModeState::poisson(p.alpha)),
            InitialState::Coherent(_) => None,
            InitialState::Poisson(a) => Some(PureAModeState::poisson(a)),
        }
    }

    pub fn product(&self) -> ProductState {
        match *self {
            InitialState::Fock(f) => f.into(),
            _ => self.coherent_pair().expect("non-Fock states are coherent").into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Observable {
    /// `p_mn`: `m` b-photons and `n` a-photons.
    Prob(FockOutcome),
    /// `|<final|U|initial>|^2`; `None` is the return probability `p_{beta alpha}`.
    CoherentProb(Option<CoherentPair>),
    MandelQ,
    SmallF,
    BigF,
    Variance(f64),
    DeltaX(f64),
    /// `Delta X_0 Delta X_{pi/2}`.
    Uncertainty,
    Rho,
    Eta,
    Yuen,
    MeanA,
    MeanB,
    ReducedA(u64),
    ReducedB(u64),
}

pub const OBSERVABLE_NAMES: &[&str] = &[
    "prob",
    "coherent_prob",
    "mandel_q",
    "f",
    "big_f",
    "variance",
    "delta_x",
    "uncertainty",
    "rho",
    "eta",
    "yuen",
    "mean_a",
    "mean_b",
    "reduced_a",
    "reduced_b",
];

impl Observable {
    /// Selector `name` with its arguments (`outcome`, `theta`, ...) read from `kv`.
    pub fn from_kv(name: &str, kv: &KeyValues) -> Result<Self> {
        let theta = || -> Result<f64> { Ok(kv.get::<f64>("theta")?.unwrap_or(0.0)) };
        Ok(match name {
            "prob" => {
                let (m, n) = pair_u64(kv.get_str("outcome").ok_or_else(|| anyhow!("`prob` needs an outcome m,n"))?)
                    .context("outcome")?;
                Observable::Prob(FockOutcome::new(m, n))
            }
            "coherent_prob" => {
                let fin = match (kv.get_str("final_alpha"), kv.get_str("final_beta")) {
                    (None, None) => None,
                    (a, b) => Some(CoherentPair::new(complex(a.unwrap_or("0"))?, complex(b.unwrap_or("0"))?)),
                };
                Observable::CoherentProb(fin)
            }
            "mandel_q" => Observable::MandelQ,
            "f" => Observable::SmallF,
            "big_f" => Observable::BigF,
            "variance" => Observable::Variance(theta()?),
            "delta_x" => Observable::DeltaX(theta()?),
            "uncertainty" => Observable::Uncertainty,
            "rho" => Observable::Rho,
            "eta" => Observable::Eta,
            "yuen" => Observable::Yuen,
            "mean_a" => Observable::MeanA,
            "mean_b" => Observable::MeanB,
            "reduced_a" | "reduced_b" => {
                let k: u64 = kv.get("photons")?.ok_or_else(|| anyhow!("`{name}` needs `photons`"))?;
                if name == "reduced_a" {
                    Observable::ReducedA(k)
                } else {
                    Observable::ReducedB(k)
                }
            }
            other => bail!("unknown observable `{other}` (expected one of {})", OBSERVABLE_NAMES.join(", ")),
        })
    }

    pub fn default_label(&self) -> String {
        match *self {
            Observable::Prob(o) if o.m < 10 && o.n < 10 => format!("p{}{}", o.m, o.n),
            Observable::Prob(o) => format!("p{}_{}", o.m, o.n),
            Observable::CoherentProb(_) => "p_ba".into(),
            Observable::MandelQ => "Q_a".into(),
            Observable::SmallF => "f".into(),
            Observable::BigF => "F".into(),
            Observable::Variance(th) => format!("var_X{}", theta_tag(th)),
            Observable::DeltaX(th) => format!("dX{}", theta_tag(th)),
            Observable::Uncertainty => "dX0_dX90".into(),
            Observable::Rho => "rho_a".into(),
            Observable::Eta => "eta_a".into(),
            Observable::Yuen => "yuen".into(),
            Observable::MeanA => "n_a".into(),
            Observable::MeanB => "n_b".into(),
            Observable::ReducedA(n) => format!("rho_a_{n}"),
            Observable::ReducedB(m) => format!("rho_b_{m}"),
        }
    }

    /// Rejects selectors that are not defined for `state`.
    pub fn check(&self, state: &InitialState) -> Result<()> {
        let ok = match self {
            Observable::Prob(_) => matches!(state, InitialState::Fock(_)) || state.amode().is_some(),
            Observable::CoherentProb(_) => state.coherent_pair().is_some(),
            Observable::ReducedA(_) | Observable::ReducedB(_) => state.amode().is_some(),
            _ => true,
        };
        if ok {
            Ok(())
        } else {
            bail!("observable `{}` is not defined for the initial state {state:?}", self.default_label())
        }
    }
}

fn theta_tag(theta: f64) -> String {
    if theta == 0.0 {
        "0".into()
    } else if theta == FRAC_PI_2 {
        "90".into()
    } else {
        format!("({theta})")
    }
}

/// One output column.
#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub params: ModelParams,
    pub state: InitialState,
    pub observable: Observable,
}

impl Series {
    pub fn new(params: ModelParams, state: InitialState, observable: Observable) -> Result<Self> {
        observable.check(&state)?;
        Ok(Self {
            label: observable.default_label(),
            params,
            state,
            observable,
        })
    }

    pub fn labelled(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Observable at dimensionless time `gt`. Undefined values are NaN.
    pub fn value(&self, gt: f64) -> f64 {
        let p = &self.params;
        let t = gt / p.g();
        let c = solve_analytic(p, t);
        let d = derived_scalars(p, t);
        let moments = || second_moments(self.state.product(), &c);
        match (self.observable, self.state) {
            (Observable::Prob(o), InitialState::Fock(f)) => fock_prob(&c, f, o),
            (Observable::Prob(o), _) => {
                let psi = self.state.amode().expect("checked on construction");
                amode_prob(&d, &psi, o).unwrap_or(f64::NAN)
            }
            (Observable::CoherentProb(fin), _) => {
                let pair = self.state.coherent_pair().expect("checked on construction");
                match fin {
                    None => coherent_revival_prob(&c, pair).p,
                    Some(f) => coherent_transition_prob(&c, pair, f),
                }
            }
            (Observable::MandelQ, InitialState::Fock(f)) => mandel_q_fock(&d, f),
            (Observable::MandelQ, _) => mandel_q_coherent(&moments()).unwrap_or(f64::NAN),
            (Observable::SmallF, InitialState::Fock(f)) => cross_correlation_fock(&d, f).f,
            (Observable::SmallF, _) => cross_correlation_general(&moments()).f,
            (Observable::BigF, InitialState::Fock(f)) => cross_correlation_fock(&d, f).big_f.unwrap_or(f64::NAN),
            (Observable::BigF, _) => cross_correlation_general(&moments()).big_f.unwrap_or(f64::NAN),
            (Observable::Variance(th), _) => quadrature_variance(&squeezing_kernel(p, th, t), self.state.product()),
            (Observable::DeltaX(th), _) => quadrature_variance(&squeezing_kernel(p, th, t), self.state.product()).sqrt(),
            (Observable::Uncertainty, _) => {
                let v0 = quadrature_variance(&squeezing_kernel(p, 0.0, t), self.state.product());
                let v90 = quadrature_variance(&squeezing_kernel(p, FRAC_PI_2, t), self.state.product());
                (v0 * v90).sqrt()
            }
            (Observable::Rho, InitialState::Fock(f)) => snr_rho_fock(&d, f).value(),
            (Observable::Rho, _) => {
                let m = moments();
                let var = m.variance_a();
                if var > 0.0 {
                    m.mean_a() / var.sqrt()
                } else {
                    f64::INFINITY
                }
            }
            (Observable::Eta, InitialState::Fock(_)) => 0.0,
            (Observable::Eta, _) => snr_eta_coherent(&c, &d, self.state.coherent_pair().unwrap()).eta,
            (Observable::Yuen, _) => {
                let n = self.means(&c, &d).0;
                4.0 * n * (n + 1.0)
            }
            (Observable::MeanA, _) => self.means(&c, &d).0,
            (Observable::MeanB, _) => self.means(&c, &d).1,
            (Observable::ReducedA(n), _) => reduced_density_a(&d, &self.state.amode().unwrap(), n),
            (Observable::ReducedB(m), _) => reduced_density_b(&d, &self.state.amode().unwrap(), m),
        }
    }

    fn means(&self, c: &paramp_core::WeiNormanCoefficients, d: &paramp_core::DerivedScalars) -> (f64, f64) {
        match self.state {
            InitialState::Fock(f) => mean_photon_fock(d, f),
            _ => coherent_mean_numbers(c, d, self.state.coherent_pair().unwrap()),
        }
    }

    pub fn column(&self, grid: &Grid) -> Vec<f64> {
        grid.points().into_iter().map(|gt| self.value(gt)).collect()
    }
}

/// Uniform grid in `gt`, both ends included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub end: f64,
    pub steps: usize,
}

impl Grid {
    pub fn new(start: f64, end: f64, steps: usize) -> Result<Self> {
        if steps < 2 {
            bail!("grid needs at least 2 steps, got {steps}");
        }
        if !(start.is_finite() && end.is_finite()) {
            bail!("grid ends must be finite");
        }
        if start < 0.0 {
            bail!("grid must start at gt >= 0, got {start}");
        }
        if end <= start {
            bail!("empty grid: t_end ({end}) must exceed t_start ({start})");
        }
        Ok(Self { start, end, steps })
    }

    pub fn points(&self) -> Vec<f64> {
        let n = self.steps - 1;
        let h = (self.end - self.start) / n as f64;
        (0..=n)
            .map(|i| if i == n { self.end } else { self.start + i as f64 * h })
            .collect()
    }

    pub fn from_kv(kv: &KeyValues) -> Result<Self> {
        let end = match (kv.get::<f64>("t_end")?, kv.get::<f64>("tmax")?) {
            (Some(_), Some(_)) => bail!("give either `t_end` or `tmax`, not both"),
            (Some(v), None) | (None, Some(v)) => v,
            (None, None) => bail!("missing grid end `t_end`"),
        };
        Grid::new(
            kv.get("t_start")?.unwrap_or(0.0),
            end,
            kv.get("steps")?.unwrap_or(DEFAULT_STEPS),
        )
    }
}

pub const DEFAULT_STEPS: usize = 201;

/// A single-column run.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub series: Series,
    pub grid: Grid,
    pub out: Option<PathBuf>,
}

impl Scenario {
    pub fn from_kv(kv: &KeyValues) -> Result<Self> {
        let params = params_from_kv(kv)?;
        let state = state_from_kv(kv)?;
        let name = kv.get_str("observable").unwrap_or("prob");
        let observable = Observable::from_kv(name, kv)?;
        let mut series = Series::new(params, state, observable)?;
        if let Some(label) = kv.get_str("label") {
            series = series.labelled(label);
        }
        Ok(Self {
            series,
            grid: Grid::from_kv(kv)?,
            out: kv.get_str("out").map(PathBuf::from),
        })
    }

    pub fn run(&self) -> Table {
        let mut table = Table::new(&self.grid);
        table.push(&self.series.label, self.series.column(&self.grid));
        table
    }
}

/// One column per value of `param`, every other key taken from `base`.
pub fn sweep(base: &KeyValues, param: &str, values: &[String]) -> Result<Table> {
    if values.is_empty() {
        bail!("sweep needs at least one value");
    }
    let grid = Grid::from_kv(base)?;
    let mut table = Table::new(&grid);
    for v in values {
        let mut kv = base.clone();
        kv.insert(param, v);
        let s = Scenario::from_kv(&kv).with_context(|| format!("{param} = {v}"))?;
        if s.grid != grid {
            bail!("the swept parameter `{param}` changes the time grid");
        }
        let label = format!("{}@{param}={}", s.series.label, v.replace(',', ":"));
        table.push(&label, s.series.column(&grid));
    }
    Ok(table)
}

/// `k2` or `omega` (exactly one), with `g`, `omega_a`, `omega_b` defaulting to 1.
pub fn params_from_kv(kv: &KeyValues) -> Result<ModelParams> {
    let g = kv.get("g")?.unwrap_or(1.0);
    let wa = kv.get("omega_a")?.unwrap_or(1.0);
    let wb = kv.get("omega_b")?.unwrap_or(1.0);
    let p = match (kv.get::<f64>("k2")?, kv.get::<f64>("omega")?) {
        (Some(_), Some(_)) => bail!("give either `k2` or `omega`, not both"),
        (Some(k2), None) => ModelParams::from_k_squared(k2, g, wa, wb)?,
        (None, Some(w)) => ModelParams::new(wa, wb, g, w)?,
        (None, None) => bail!("missing `k2` (or pump frequency `omega`)"),
    };
    if p.g() <= 0.0 {
        bail!("g must be > 0 so that gt is a time axis");
    }
    Ok(p)
}

pub fn state_from_kv(kv: &KeyValues) -> Result<InitialState> {
    let fock = kv.get_str("fock");
    let coherent = kv.contains("alpha") || kv.contains("beta");
    let poisson = kv.get_str("poisson");
    match (fock, coherent, poisson) {
        (Some(f), false, None) => {
            let (r, s) = pair_u64(f).context("fock")?;
            Ok(InitialState::Fock(FockPair::new(r, s)))
        }
        (None, true, None) => Ok(InitialState::Coherent(CoherentPair::new(
            complex(kv.get_str("alpha").unwrap_or("0"))?,
            complex(kv.get_str("beta").unwrap_or("0"))?,
        ))),
        (None, false, Some(a)) => Ok(InitialState::Poisson(complex(a)?)),
        (None, false, None) => bail!("missing initial state: give `fock`, `alpha`/`beta` or `poisson`"),
        _ => bail!("give exactly one initial state: `fock`, `alpha`/`beta` or `poisson`"),
    }
}

/// `"r,s"` or `"r:s"`.
pub fn pair_u64(text: &str) -> Result<(u64, u64)> {
    let (a, b) = text
        .split_once([',', ':'])
        .ok_or_else(|| anyhow!("expected a pair `a,b`, got `{text}`"))?;
    Ok((a.trim().parse()?, b.trim().parse()?))
}

/// `1.5`, `-0.3+0.8i`, `2i`.
pub fn complex(text: &str) -> Result<Complex64> {
    Complex64::from_str(text.trim()).map_err(|e| anyhow!("bad complex number `{text}`: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kv(text: &str) -> KeyValues {
        KeyValues::parse(text).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(Grid::new(0.0, 0.0, 2).is_err());
        assert!(Grid::new(1.0, 1.0, 10).is_err());
        assert!(Grid::new(0.0, 1.0, 1).is_err());
        assert!(Grid::new(-1.0, 1.0, 3).is_err());
        let g = Grid::new(0.0, 12.0, 5).unwrap();
        assert_eq!(g.points(), vec![0.0, 3.0, 6.0, 9.0, 12.0]);
    }

    #[test]
    fn selector_state_mismatch() {
        let base = "k2 = 1.5\nt_end = 1\n";
        assert!(Scenario::from_kv(&kv(&format!("{base}alpha = 1\nbeta = 1\nobservable = prob\noutcome = 1,1"))).is_err());
        assert!(Scenario::from_kv(&kv(&format!("{base}fock = 1,1\nobservable = coherent_prob"))).is_err());
        assert!(Scenario::from_kv(&kv(&format!("{base}fock = 1,1\nobservable = reduced_b\nphotons = 2"))).is_err());
        assert!(Scenario::from_kv(&kv(&format!("{base}fock = 1,1\npoisson = 1"))).is_err());
        // a coherent a-mode with b in vacuum has a distribution
        assert!(Scenario::from_kv(&kv(&format!("{base}alpha = 0.85\nobservable = prob\noutcome = 1,2"))).is_ok());
    }

    #[test]
    fn parses_pairs_and_complex() {
        assert_eq!(pair_u64("50,10").unwrap(), (50, 10));
        assert_eq!(pair_u64("50:0").unwrap(), (50, 0));
        assert!(pair_u64("5").is_err());
        assert_eq!(complex("-0.3+0.8i").unwrap(), Complex64::new(-0.3, 0.8));
        assert_eq!(complex("2").unwrap(), Complex64::new(2.0, 0.0));
    }

    #[test]
    fn poisson_and_coherent_vacuum_b_agree() {
        let base = "k2 = 0.5\nobservable = prob\noutcome = 1,2\nt_end = 3\n";
        let a = Scenario::from_kv(&kv(&format!("{base}poisson = 0.85"))).unwrap().run();
        let b = Scenario::from_kv(&kv(&format!("{base}alpha = 0.85"))).unwrap().run();
        assert_eq!(a.columns(), b.columns());
    }

    #[test]
    fn fock_revival_through_scenario() {
        let s = Scenario::from_kv(&kv("k2 = 1.5\nfock = 1,1\noutcome = 1,1\nt_start = 4.442882938158366\nt_end = 5\nsteps = 2")).unwrap();
        assert!((s.series.value(std::f64::consts::PI * 2f64.sqrt()) - 1.0).abs() < 1e-12);
        assert_eq!(s.series.label, "p11");
    }

    #[test]
    fn vacuum_uncertainty_starts_at_one() {
        let s = Scenario::from_kv(&kv("k2 = 1.8\nfock = 0,0\nobservable = uncertainty\nt_end = 1")).unwrap();
        assert!((s.series.value(0.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sweep_labels_columns() {
        let base = kv("fock = 1,1\noutcome = 1,1\nt_end = 2\nsteps = 3");
        let vals = ["0.5".to_string(), "1".to_string(), "1.5".to_string()];
        let t = sweep(&base, "k2", &vals).unwrap();
        assert_eq!(t.header(), vec!["gt", "p11@k2=0.5", "p11@k2=1", "p11@k2=1.5"]);
        assert!(sweep(&base, "t_end", &["3".to_string()]).is_err());
    }
}
