//! Log-domain combinatorics, certified series sums and 1-D extremum search.

use std::sync::OnceLock;

use statrs::function::gamma::ln_gamma;

const FACTORIAL_TABLE: usize = 4096;

fn ln_factorial_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = Vec::with_capacity(FACTORIAL_TABLE);
        let mut acc = 0.0f64;
        t.push(0.0);
        for n in 1..FACTORIAL_TABLE {
            acc += (n as f64).ln();
            t.push(acc);
        }
        t
    })
}

/// `ln n!`, exact summation below 4096 and log-gamma above.
pub fn ln_factorial(n: u64) -> f64 {
    let table = ln_factorial_table();
    match table.get(n as usize) {
        Some(v) => *v,
        None => ln_gamma(n as f64 + 1.0),
    }
}

/// `ln C(n, k)`; `-inf` when `k > n`.
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// Finite prefix of a non-negative series plus a rigorous bound on what was left out.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesSum {
    pub sum: f64,
    pub tail_bound: f64,
    pub terms: usize,
}

/// Sums `term(n)` for `n = 0, 1, ...` until the tail is certified below `target`.
///
/// `envelope_ratio(n)` must bound `term(m+1)/term(m)` for every `m >= n` (for the
/// geometric-type series in this crate it is a non-increasing ratio such as
/// `y (n+1+d)/(n+1)`). Once that ratio is below one, the remainder is bounded by
/// `term(n+1) / (1 - ratio(n+1))`.
pub fn sum_certified(
    term: impl Fn(usize) -> f64,
    envelope_ratio: impl Fn(usize) -> f64,
    target: f64,
    max_terms: usize,
) -> SeriesSum {
    let mut sum = 0.0;
    let mut comp = 0.0;
    let mut n = 0usize;
    loop {
        let t = term(n);
        // Kahan summation; long geometric sums otherwise lose ~1e-12.
        let y = t - comp;
        let s = sum + y;
        comp = (s - sum) - y;
        sum = s;

        let ratio = envelope_ratio(n + 1);
        if ratio < 1.0 {
            let next = term(n + 1);
            let tail = next / (1.0 - ratio);
            if tail < target || n + 1 >= max_terms {
                return SeriesSum {
                    sum,
                    tail_bound: tail,
                    terms: n + 1,
                };
            }
        } else if n + 1 >= max_terms {
            return SeriesSum {
                sum,
                tail_bound: f64::INFINITY,
                terms: n + 1,
            };
        }
        n += 1;
    }
}

/// Evenly spaced grid including both ends.
pub fn linspace(start: f64, end: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let h = (end - start) / (points - 1) as f64;
            (0..points)
                .map(|i| if i + 1 == points { end } else { start + h * i as f64 })
                .collect()
        }
    }
}

/// Golden-section refinement of a minimum of `f` bracketed in `[a, b]`.
pub fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtremumKind {
    Min,
    Max,
}

/// Interior local extrema of `f` on `[a, b]`: bracket on a uniform grid of
/// `points` samples, then golden-section refinement to `tol` in the abscissa.
pub fn local_extrema(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    points: usize,
    kind: ExtremumKind,
    tol: f64,
) -> Vec<(f64, f64)> {
    let sign = match kind {
        ExtremumKind::Min => 1.0,
        ExtremumKind::Max => -1.0,
    };
    let g = |t: f64| sign * f(t);
    let ts = linspace(a, b, points.max(3));
    let vals: Vec<f64> = ts.iter().map(|&t| g(t)).collect();
    let mut out = Vec::new();
    for i in 1..ts.len() - 1 {
        if vals[i] <= vals[i - 1] && vals[i] < vals[i + 1] {
            let (t, v) = golden_min(g, ts[i - 1], ts[i + 1], tol);
            out.push((t, sign * v));
        }
    }
    out
}
