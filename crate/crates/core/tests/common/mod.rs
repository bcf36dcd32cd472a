#![allow(dead_code)]

use jacobi_pe::{FiniteJacobi, SymbolTriple, C64};
use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn unit_disk(r: &mut ChaCha8Rng) -> C64 {
    C64::from_polar(r.gen::<f64>().sqrt(), r.gen_range(0.0..std::f64::consts::TAU))
}

/// Random alphabets of 1..=3 letters each: `u, w` in the unit disk and
/// `v` with modulus in `[u* + w* + margin, u* + w* + margin + 2]`.
pub fn dominant_triple(r: &mut ChaCha8Rng, margin: f64) -> SymbolTriple {
    let draw = |r: &mut ChaCha8Rng| -> Vec<C64> { (0..r.gen_range(1..=3)).map(|_| unit_disk(r)).collect() };
    let u = draw(r);
    let w = draw(r);
    let top = |s: &[C64]| s.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let base = top(&u) + top(&w) + margin;
    let v = (0..r.gen_range(1..=3))
        .map(|_| C64::from_polar(base + 2.0 * r.gen::<f64>(), r.gen_range(0.0..std::f64::consts::TAU)))
        .collect();
    SymbolTriple::new(u, v, w).unwrap()
}

/// Entries drawn independently: off-diagonals in the unit disk, diagonal in
/// the disk of radius 3.
pub fn random_jacobi(r: &mut ChaCha8Rng, n: usize) -> FiniteJacobi {
    let sub = (1..n).map(|_| unit_disk(r)).collect();
    let main = (0..n).map(|_| unit_disk(r) * 3.0).collect();
    let sup = (1..n).map(|_| unit_disk(r)).collect();
    FiniteJacobi::new(sub, main, sup).unwrap()
}

pub fn dense(j: &FiniteJacobi) -> DMatrix<C64> {
    let n = j.n();
    DMatrix::from_fn(n, n, |a, b| j.get(a, b))
}

pub fn col_sum_max(m: &DMatrix<C64>) -> f64 {
    (0..m.ncols())
        .map(|k| m.column(k).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn row_sum_max(m: &DMatrix<C64>) -> f64 {
    (0..m.nrows())
        .map(|k| m.row(k).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Singular values, largest first.
pub fn singular_values(m: &DMatrix<C64>) -> Vec<f64> {
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

pub fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}
