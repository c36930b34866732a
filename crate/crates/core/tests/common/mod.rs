#![allow(dead_code)]

use rand::Rng;
use superopt::rational::{LaurentPoly, RationalEntry, SymbolSpec};
use superopt::C64;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn random_complex(rng: &mut impl Rng) -> C64 {
    c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// Ascending coefficients of `Π (z − p)`.
pub fn monic_from_roots(roots: &[C64]) -> Vec<C64> {
    let mut out = vec![c(1.0, 0.0)];
    for p in roots {
        let mut next = vec![c(0.0, 0.0); out.len() + 1];
        for (i, d) in out.iter().enumerate() {
            next[i + 1] += d;
            next[i] -= d * p;
        }
        out = next;
    }
    out
}

pub fn poly(coeffs: &[C64]) -> LaurentPoly {
    LaurentPoly::new(coeffs.iter().enumerate().map(|(k, &v)| (k as i64, v)))
}

/// Random distinct poles with moduli below `radius`.
pub fn random_poles(rng: &mut impl Rng, count: usize, radius: f64) -> Vec<C64> {
    let mut poles: Vec<C64> = Vec::new();
    while poles.len() < count {
        let p = C64::from_polar(rng.gen_range(0.05..radius), rng.gen_range(0.0..std::f64::consts::TAU));
        if poles.iter().all(|q| (p - q).norm() > 0.1) {
            poles.push(p);
        }
    }
    poles
}

/// `num / Π (z − p)` with random numerator of degree at most the number of
/// poles.
pub fn random_entry(rng: &mut impl Rng, poles: &[C64]) -> RationalEntry {
    let num: Vec<C64> = (0..=poles.len()).map(|_| random_complex(rng)).collect();
    RationalEntry::Ratio {
        num: poly(&num),
        den: poly(&monic_from_roots(poles)),
    }
}

pub fn random_symbol(rng: &mut impl Rng, m: usize, n: usize, radius: f64) -> SymbolSpec {
    let entries = (0..m * n)
        .map(|_| {
            let count = rng.gen_range(1..=2);
            let poles = random_poles(rng, count, radius);
            random_entry(rng, &poles)
        })
        .collect();
    SymbolSpec::new(m, n, entries).unwrap()
}
