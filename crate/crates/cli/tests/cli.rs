//! End-to-end runs of the `paramp` binary.

use std::f64::consts::PI;
use std::process::{Command, Output};

fn paramp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_paramp")).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = paramp(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn fails(args: &[&str]) -> String {
    let out = paramp(args);
    assert!(!out.status.success(), "{args:?} should fail");
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(!err.trim().is_empty(), "{args:?}: no diagnostic");
    err
}

fn parse(csv: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = csv.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect();
    (header, rows)
}

const FIGURES: &[&str] = &[
    "fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig7log", "fig8", "fig9", "mandel", "fcoh", "rho",
];

#[test]
fn every_preset_runs() {
    for name in FIGURES {
        let (header, rows) = parse(&ok(&["figure", name, "--steps", "41"]));
        assert_eq!(header[0], "gt", "{name}");
        assert!(header.len() >= 3, "{name}");
        assert_eq!(rows.len(), 41, "{name}");
        assert!(rows.iter().all(|r| r.len() == header.len()), "{name}");
    }
    let listing = ok(&["figure", "list"]);
    for name in FIGURES {
        assert!(listing.lines().any(|l| l.starts_with(name)), "{name} missing from list");
    }
}

#[test]
fn output_is_byte_identical() {
    let a = paramp(&["figure", "fig6", "--steps", "101"]).stdout;
    let b = paramp(&["figure", "fig6", "--steps", "101"]).stdout;
    assert_eq!(a, b);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig6.csv");
    ok(&["figure", "fig6", "--steps", "101", "--out", path.to_str().unwrap()]);
    assert_eq!(std::fs::read(&path).unwrap(), a);
}

#[test]
fn fig1_revivals() {
    let t_rev = PI * 2f64.sqrt();
    let (header, rows) = parse(&ok(&["figure", "fig1", "--tmax", &(2.0 * t_rev).to_string(), "--steps", "3"]));
    assert_eq!(header, ["gt", "p11", "p33"]);
    for row in &rows {
        assert!((row[1] - 1.0).abs() < 1e-8 && row[2].abs() < 1e-8, "{row:?}");
    }
}

#[test]
fn fig8_has_eta_and_yuen_bound() {
    let (header, rows) = parse(&ok(&["figure", "fig8"]));
    assert_eq!(header, ["gt", "eta_a", "yuen"]);
    assert!(rows.iter().all(|r| r[1] <= r[2] + 1e-9));
}

#[test]
fn infinite_rho_is_written_as_inf() {
    let csv = ok(&["observable", "rho", "--k2", "1.5", "--fock", "1,1", "--tmax", "1", "--steps", "3"]);
    assert_eq!(csv.lines().nth(1).unwrap(), "0,inf");
    let (_, rows) = parse(&csv);
    assert!(rows[0][1].is_infinite() && rows[2][1].is_finite());
}

#[test]
fn poisson_peak_through_prob() {
    let csv = ok(&["prob", "--k2", "1.5", "--poisson", "0.85", "--outcome", "1,2", "--tmax", "20", "--steps", "4001"]);
    let (header, rows) = parse(&csv);
    assert_eq!(header, ["gt", "p12"]);
    let peak = rows.iter().map(|r| r[1]).fold(0.0, f64::max);
    let expected = 8.0 * 0.85f64.powi(2) * (-0.85f64.powi(2)).exp() / 27.0;
    assert!((peak - expected).abs() < 1e-4, "{peak} vs {expected}");
}

#[test]
fn coherent_prob_defaults_to_return_probability() {
    let t = PI * 20f64.sqrt();
    let csv = ok(&["prob", "--k2", "1.8", "--alpha", "1", "--beta", "1", "--t-start", "1", "--tmax", &t.to_string(), "--steps", "2"]);
    let (header, rows) = parse(&csv);
    assert_eq!(header, ["gt", "p_ba"]);
    assert!((rows[1][1] - 1.0).abs() < 1e-8);
}

#[test]
fn scenario_file_with_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.kv");
    std::fs::write(&path, "# vacuum squeezing\nk2 = 1.8\nfock = 0,0\nobservable = uncertainty\nt_end = 10\nsteps = 11\n").unwrap();
    let p = path.to_str().unwrap();
    let (header, rows) = parse(&ok(&["observable", "uncertainty", "--scenario", p]));
    assert_eq!(header, ["gt", "dX0_dX90"]);
    assert_eq!(rows.len(), 11);
    assert!(rows.iter().all(|r| r[1] >= 1.0 - 1e-10));
    let (_, rows) = parse(&ok(&["observable", "uncertainty", "--scenario", p, "--tmax", "2", "--steps", "3"]));
    assert_eq!(rows.iter().map(|r| r[0]).collect::<Vec<_>>(), [0.0, 1.0, 2.0]);
    let (header, _) = parse(&ok(&["observable", "delta_x", "--scenario", p, "--theta", "0"]));
    assert_eq!(header, ["gt", "dX0"]);
}

#[test]
fn sweeps() {
    let base = ["--fock", "1,1", "--outcome", "1,1", "--tmax", "3", "--steps", "7"];
    let mut args = vec!["sweep", "--param", "k2", "--values", "0.5", "1.0", "1.5"];
    args.extend(base);
    let (header, rows) = parse(&ok(&args));
    assert_eq!(header, ["gt", "p11@k2=0.5", "p11@k2=1.0", "p11@k2=1.5"]);
    assert!(rows.iter().all(|r| r[1..].iter().all(|p| (0.0..=1.0).contains(p))));

    let t = ["--k2", "1.5", "--fock", "0,0", "--observable", "variance", "--tmax", "2", "--steps", "5"];
    let mut args = vec!["sweep", "--param", "theta", "--values", "0", "0.7853981633974483", "1.5707963267948966"];
    args.extend(t);
    let (header, rows) = parse(&ok(&args));
    assert_eq!(header.len(), 4);
    assert!(rows[0][1..].iter().all(|v| (v - 1.0).abs() < 1e-14));

    let f = ["--k2", "1.5", "--fock", "1,1", "--observable", "big_f", "--tmax", "5", "--steps", "11"];
    let mut args = vec!["sweep", "--param", "fock", "--values", "50,10", "50,0", "3,3"];
    args.extend(f);
    let (header, rows) = parse(&ok(&args));
    assert_eq!(header, ["gt", "F@fock=50:10", "F@fock=50:0", "F@fock=3:3"]);
    assert!(rows.iter().all(|r| (r[3] + 1.0).abs() < 1e-10));
}

#[test]
fn evolve_integrator_matches_closed_form() {
    let grid = ["--k2", "0.8", "--tmax", "4", "--steps", "9"];
    let (ha, a) = parse(&ok(&[&["evolve"][..], &grid].concat()));
    let (hb, b) = parse(&ok(&[&["evolve", "--tol", "1e-11"][..], &grid].concat()));
    assert_eq!(ha, hb);
    assert_eq!(ha[..4], ["gt", "re_a_plus", "im_a_plus", "re_a_zero"]);
    for (ra, rb) in a.iter().zip(&b) {
        for (x, y) in ra.iter().zip(rb).take(8) {
            assert!((x - y).abs() < 1e-8 * x.abs().max(1.0), "{x} vs {y}");
        }
    }
}

#[test]
fn oracle_check_agrees_and_detects_truncation() {
    ok(&["oracle-check", "--k2", "1.5", "--fock", "2,1", "--tmax", "2", "--steps", "3"]);
    ok(&["oracle-check", "--k2", "0.6", "--alpha", "0.5-0.3i", "--beta", "-0.7", "--tmax", "1.5", "--steps", "3"]);
    let err = fails(&["oracle-check", "--k2", "0.5", "--fock", "3,3", "--tmax", "6", "--steps", "2", "--cutoff", "16"]);
    assert!(err.contains("cutoff"), "{err}");
}

#[test]
fn invalid_input_exits_nonzero() {
    let err = fails(&["prob", "--k2", "1.5", "--fock", "1,1", "--outcome", "1,1", "--tmax", "0", "--steps", "2"]);
    assert!(err.contains("empty grid"), "{err}");
    fails(&["prob", "--k2", "1.5", "--fock", "1,1", "--outcome", "1,1", "--tmax", "1", "--steps", "1"]);
    fails(&["prob", "--k2", "1.5", "--fock", "1,1", "--tmax", "1"]);
    fails(&["prob", "--fock", "1,1", "--outcome", "1,1", "--tmax", "1"]);
    fails(&["prob", "--k2", "1.5", "--omega", "3", "--fock", "1,1", "--outcome", "1,1", "--tmax", "1"]);
    fails(&["observable", "coherent_prob", "--k2", "1.5", "--fock", "1,1", "--tmax", "1"]);
    fails(&["observable", "prob", "--k2", "1.5", "--alpha", "1", "--beta", "1", "--outcome", "1,1", "--tmax", "1"]);
    fails(&["observable", "nonsense", "--k2", "1.5", "--fock", "1,1", "--tmax", "1"]);
    fails(&["observable", "rho", "--k2", "1.5", "--alpha", "1+", "--tmax", "1"]);
    fails(&["observable", "rho", "--k2", "1.5", "--fock", "1,1", "--poisson", "1", "--tmax", "1"]);
    fails(&["observable", "rho", "--scenario", "/nonexistent/scenario.kv"]);
    fails(&["figure", "fig10"]);
    fails(&["figure", "fig1", "--steps", "1"]);
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.kv");
    std::fs::write(&bad, "k2 = 1.5\nk2 = 2\n").unwrap();
    let err = fails(&["observable", "rho", "--scenario", bad.to_str().unwrap()]);
    assert!(err.contains("duplicate"), "{err}");
}
