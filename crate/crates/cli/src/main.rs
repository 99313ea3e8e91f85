use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use paramp::figures::{preset, PRESETS};
use paramp::runs::{evolve, oracle_check, oracle_check_auto};
use paramp::scenario::{params_from_kv, state_from_kv, Grid, Scenario, OBSERVABLE_NAMES};
use paramp::Table;
use paramp_core::config::KeyValues;

/// Exact dynamics of the non-degenerate parametric amplifier, as CSV against gt.
#[derive(Parser)]
#[command(name = "paramp", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Disentangling coefficients A+, A0, A- (closed form, or integrated with --tol)
    Evolve(RunArgs),
    /// p_mn for Fock or Poisson inputs (needs --outcome), p_ba for coherent inputs
    Prob(RunArgs),
    /// A named observable: prob, coherent_prob, mandel_q, f, big_f, variance, delta_x,
    /// uncertainty, rho, eta, yuen, mean_a, mean_b, reduced_a, reduced_b
    Observable {
        name: String,
        #[command(flatten)]
        run: RunArgs,
    },
    /// A built-in figure preset, or `list`
    Figure {
        name: String,
        #[arg(long)]
        tmax: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// One column per value of a scenario key (k2, g, theta, fock, alpha, beta, poisson, outcome, ...)
    Sweep {
        #[arg(long)]
        param: String,
        #[arg(long, num_args = 1.., required = true)]
        values: Vec<String>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Closed forms against the truncated Fock-space propagator; fails when they disagree
    OracleCheck(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Flat key = value scenario file; command-line flags override its entries
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Squared dimensionless detuning k^2 = (Omega / 2g)^2
    #[arg(long)]
    k2: Option<f64>,
    #[arg(long)]
    g: Option<f64>,
    #[arg(long)]
    omega_a: Option<f64>,
    #[arg(long)]
    omega_b: Option<f64>,
    /// Pump frequency (instead of --k2)
    #[arg(long, allow_hyphen_values = true)]
    omega: Option<f64>,
    /// Fock input r,s (r a-photons, s b-photons)
    #[arg(long)]
    fock: Option<String>,
    /// Coherent amplitude of mode a, e.g. 1.5 or 0.3-0.2i
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    /// Coherent amplitude of mode b
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<String>,
    /// Poisson a-photons with this amplitude, b in vacuum
    #[arg(long, allow_hyphen_values = true)]
    poisson: Option<String>,
    #[arg(long)]
    observable: Option<String>,
    /// Outcome m,n (m b-photons, n a-photons)
    #[arg(long)]
    outcome: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    final_alpha: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    final_beta: Option<String>,
    /// Photon number for reduced_a / reduced_b
    #[arg(long)]
    photons: Option<u64>,
    #[arg(long)]
    label: Option<String>,
    #[arg(long)]
    t_start: Option<f64>,
    /// Grid end in gt
    #[arg(long)]
    tmax: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Truncated-space cutoff for oracle-check (chosen from the grid when absent)
    #[arg(long)]
    cutoff: Option<usize>,
    /// Integration tolerance (evolve: switches to the integrator)
    #[arg(long)]
    tol: Option<f64>,
}

impl RunArgs {
    fn key_values(&self) -> Result<KeyValues> {
        let mut kv = match &self.scenario {
            Some(path) => {
                let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                KeyValues::parse(&text).with_context(|| format!("in {}", path.display()))?
            }
            None => KeyValues::default(),
        };
        let mut set = |key: &str, v: Option<String>| {
            if let Some(v) = v {
                kv.insert(key, v);
            }
        };
        let num = |v: Option<f64>| v.map(|x| x.to_string());
        set("k2", num(self.k2));
        set("g", num(self.g));
        set("omega_a", num(self.omega_a));
        set("omega_b", num(self.omega_b));
        set("omega", num(self.omega));
        set("fock", self.fock.clone());
        set("alpha", self.alpha.clone());
        set("beta", self.beta.clone());
        set("poisson", self.poisson.clone());
        set("observable", self.observable.clone());
        set("outcome", self.outcome.clone());
        set("theta", num(self.theta));
        set("final_alpha", self.final_alpha.clone());
        set("final_beta", self.final_beta.clone());
        set("photons", self.photons.map(|v| v.to_string()));
        set("label", self.label.clone());
        set("t_start", num(self.t_start));
        set("steps", self.steps.map(|v| v.to_string()));
        set("out", self.out.as_ref().map(|p| p.display().to_string()));
        if let Some(t) = self.tmax {
            // a flag replaces whichever spelling the file used
            let mut fresh = KeyValues::default();
            for k in kv.keys().filter(|k| *k != "t_end") {
                fresh.insert(k, kv.get_str(k).unwrap_or_default());
            }
            fresh.insert("tmax", t);
            kv = fresh;
        }
        Ok(kv)
    }
}

fn emit(table: &Table, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => {
            let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
            let mut w = BufWriter::new(file);
            table.write_csv(&mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            table.write_csv(stdout.lock())?;
        }
    }
    Ok(())
}

fn out_path(kv: &KeyValues) -> Option<PathBuf> {
    kv.get_str("out").map(PathBuf::from)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Evolve(args) => {
            let kv = args.key_values()?;
            let table = evolve(&params_from_kv(&kv)?, &Grid::from_kv(&kv)?, args.tol)?;
            emit(&table, out_path(&kv).as_deref())
        }
        Command::Prob(args) => {
            let mut kv = args.key_values()?;
            let name = if kv.contains("outcome") {
                "prob"
            } else if state_from_kv(&kv)?.coherent_pair().is_some() {
                "coherent_prob"
            } else {
                bail!("`prob` with a Fock input needs --outcome m,n");
            };
            kv.insert("observable", name);
            let s = Scenario::from_kv(&kv)?;
            emit(&s.run(), s.out.as_deref())
        }
        Command::Observable { name, run } => {
            if !OBSERVABLE_NAMES.contains(&name.as_str()) {
                bail!("unknown observable `{name}` (expected one of {})", OBSERVABLE_NAMES.join(", "));
            }
            let mut kv = run.key_values()?;
            kv.insert("observable", name);
            let s = Scenario::from_kv(&kv)?;
            emit(&s.run(), s.out.as_deref())
        }
        Command::Figure { name, tmax, steps, out } => {
            if name == "list" {
                let mut stdout = io::stdout().lock();
                for (n, d) in PRESETS {
                    writeln!(stdout, "{n:<8} {d}")?;
                }
                return Ok(());
            }
            let fig = preset(&name, tmax, steps)?;
            emit(&fig.run(), out.as_deref())
        }
        Command::Sweep { param, values, run } => {
            let kv = run.key_values()?;
            let table = paramp::scenario::sweep(&kv, &param, &values)?;
            emit(&table, out_path(&kv).as_deref())
        }
        Command::OracleCheck(args) => {
            let kv = args.key_values()?;
            let params = params_from_kv(&kv)?;
            let state = state_from_kv(&kv)?;
            let grid = Grid::from_kv(&kv)?;
            let tol = args.tol.unwrap_or(1e-12);
            let report = match args.cutoff {
                Some(c) => oracle_check(&params, &state, &grid, c, tol, 1e-6)?,
                None => oracle_check_auto(&params, &state, &grid, tol)?,
            };
            emit(&report.table, out_path(&kv).as_deref())?;
            eprintln!("oracle-check: cutoff {}, worst ratio {:.3e}", report.cutoff, report.worst_ratio);
            if report.worst_ratio > 1.0 {
                bail!(
                    "closed form and truncated propagator disagree: worst error is {:.3} times the allowed 1e-8 + norm_deficit",
                    report.worst_ratio
                );
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("paramp: error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
