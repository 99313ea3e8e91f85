//! Normal-ordered moments of the evolved mode operators up to degree four.
//!
//! With `a~ = U_I† a U_I = p (a - A-* b†)` and `b~ = p (b - A-* a†)`,
//! `p = e^{-A0*}`, every moment `<a~†^i a~^j b~†^k b~^l>` expands into at most
//! sixteen words in the bare ladder operators. Mode-a and mode-b letters
//! commute, so each word factorizes on a product initial state into two
//! single-mode expectations, which are evaluated exactly.
//!
//! Moments are in the interaction frame. The Heisenberg operators carry the
//! extra free phases `a(t) = e^{-i omega_a t} a~`, which cancel in every
//! number-conserving pattern.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::amplitudes::{CoherentPair, FockPair};
use crate::wei_norman::WeiNormanCoefficients;

pub const MAX_DEGREE: u32 = 4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProductState {
    Fock(FockPair),
    Coherent(CoherentPair),
}

impl From<FockPair> for ProductState {
    fn from(f: FockPair) -> Self {
        ProductState::Fock(f)
    }
}

impl From<CoherentPair> for ProductState {
    fn from(c: CoherentPair) -> Self {
        ProductState::Coherent(c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mode {
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Ladder {
    Create,
    Annihilate,
}

#[derive(Debug, Clone, Copy)]
enum SingleMode {
    Fock(u64),
    Coherent(Complex64),
}

/// `<n| word |n>` with the word applied right to left.
fn fock_word(word: &[Ladder], n: u64) -> f64 {
    let mut level = n as i64;
    let mut amp = 1.0f64;
    for op in word.iter().rev() {
        match op {
            Ladder::Annihilate => {
                if level == 0 {
                    return 0.0;
                }
                amp *= (level as f64).sqrt();
                level -= 1;
            }
            Ladder::Create => {
                level += 1;
                amp *= (level as f64).sqrt();
            }
        }
    }
    if level == n as i64 {
        amp
    } else {
        0.0
    }
}

/// `<alpha| word |alpha> = <0| word(a + alpha, a† + alpha*) |0>`.
fn coherent_word(word: &[Ladder], alpha: Complex64) -> Complex64 {
    let len = word.len();
    let mut total = Complex64::new(0.0, 0.0);
    for mask in 0u32..(1 << len) {
        let mut scalar = Complex64::new(1.0, 0.0);
        let mut rest = Vec::with_capacity(len);
        for (i, op) in word.iter().enumerate() {
            if mask & (1 << i) != 0 {
                scalar *= match op {
                    Ladder::Annihilate => alpha,
                    Ladder::Create => alpha.conj(),
                };
            } else {
                rest.push(*op);
            }
        }
        let v = fock_word(&rest, 0);
        if v != 0.0 {
            total += scalar * v;
        }
    }
    total
}

fn single_mode_expectation(word: &[Ladder], state: SingleMode) -> Complex64 {
    match state {
        SingleMode::Fock(n) => Complex64::new(fock_word(word, n), 0.0),
        SingleMode::Coherent(alpha) => coherent_word(word, alpha),
    }
}

/// Linear combination of bare ladder operators.
type Linear = [(Complex64, Mode, Ladder); 2];

fn evolved_operators(c: &WeiNormanCoefficients) -> [Linear; 4] {
    let p = (-c.a_zero.conj()).exp();
    let q = -p * c.a_minus.conj();
    use Ladder::*;
    use Mode::*;
    [
        // a~†, a~, b~†, b~
        [(p.conj(), A, Create), (q.conj(), B, Annihilate)],
        [(p, A, Annihilate), (q, B, Create)],
        [(p.conj(), B, Create), (q.conj(), A, Annihilate)],
        [(p, B, Annihilate), (q, A, Create)],
    ]
}

fn expand_expectation(factors: &[&Linear], state: (SingleMode, SingleMode)) -> Complex64 {
    let n = factors.len();
    let mut total = Complex64::new(0.0, 0.0);
    for choice in 0u32..(1 << n) {
        let mut coeff = Complex64::new(1.0, 0.0);
        let mut word_a = Vec::with_capacity(n);
        let mut word_b = Vec::with_capacity(n);
        for (i, f) in factors.iter().enumerate() {
            let (w, mode, op) = f[((choice >> i) & 1) as usize];
            coeff *= w;
            match mode {
                Mode::A => word_a.push(op),
                Mode::B => word_b.push(op),
            }
        }
        if coeff == Complex64::new(0.0, 0.0) {
            continue;
        }
        let ea = single_mode_expectation(&word_a, state.0);
        if ea == Complex64::new(0.0, 0.0) {
            continue;
        }
        total += coeff * ea * single_mode_expectation(&word_b, state.1);
    }
    total
}

/// `<a~†^i a~^j b~†^k b~^l>` for all `i + j + k + l <= 4`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentTable {
    entries: BTreeMap<(u32, u32, u32, u32), Complex64>,
}

impl MomentTable {
    /// Panics if the pattern has degree above four.
    pub fn get(&self, i: u32, j: u32, k: u32, l: u32) -> Complex64 {
        *self
            .entries
            .get(&(i, j, k, l))
            .unwrap_or_else(|| panic!("moment ({i},{j},{k},{l}) exceeds degree {MAX_DEGREE}"))
    }

    pub fn patterns(&self) -> impl Iterator<Item = ((u32, u32, u32, u32), Complex64)> + '_ {
        self.entries.iter().map(|(k, v)| (*k, *v))
    }

    pub fn mean_a(&self) -> f64 {
        self.get(1, 1, 0, 0).re
    }

    pub fn mean_b(&self) -> f64 {
        self.get(0, 0, 1, 1).re
    }

    /// `Var[n_a] = <a†² a²> + <n_a> - <n_a>²`.
    pub fn variance_a(&self) -> f64 {
        let m = self.mean_a();
        self.get(2, 2, 0, 0).re + m - m * m
    }

    pub fn variance_b(&self) -> f64 {
        let m = self.mean_b();
        self.get(0, 0, 2, 2).re + m - m * m
    }
}

/// Every normal-ordered moment of degree at most four on a product input.
pub fn second_moments(state: impl Into<ProductState>, c: &WeiNormanCoefficients) -> MomentTable {
    let modes = match state.into() {
        ProductState::Fock(f) => (SingleMode::Fock(f.r), SingleMode::Fock(f.s)),
        ProductState::Coherent(p) => (SingleMode::Coherent(p.alpha), SingleMode::Coherent(p.beta)),
    };
    let ops = evolved_operators(c);
    let mut entries = BTreeMap::new();
    for i in 0..=MAX_DEGREE {
        for j in 0..=MAX_DEGREE - i {
            for k in 0..=MAX_DEGREE - i - j {
                for l in 0..=MAX_DEGREE - i - j - k {
                    let mut factors: Vec<&Linear> = Vec::with_capacity(4);
                    factors.extend(std::iter::repeat_n(&ops[0], i as usize));
                    factors.extend(std::iter::repeat_n(&ops[1], j as usize));
                    factors.extend(std::iter::repeat_n(&ops[2], k as usize));
                    factors.extend(std::iter::repeat_n(&ops[3], l as usize));
                    entries.insert((i, j, k, l), expand_expectation(&factors, modes));
                }
            }
        }
    }
    MomentTable { entries }
}
