mod common;

use common::*;
use jacobi_pe::tridiag::{inv_norm, op_norm, sigma_min, solve};
use jacobi_pe::NormKind;
use rand::Rng;

#[test]
fn norms_match_dense_oracle() {
    let mut r = rng(11);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let n = r.gen_range(1..=50);
        let j = random_jacobi(&mut r, n);
        let a = dense(&j);
        let inv = a.clone().try_inverse().expect("invertible");
        let s = singular_values(&a);
        let pairs = [
            (op_norm(&j, NormKind::P1).unwrap().value, col_sum_max(&a)),
            (op_norm(&j, NormKind::Pinf).unwrap().value, row_sum_max(&a)),
            (op_norm(&j, NormKind::P2).unwrap().value, s[0]),
            (inv_norm(&j, NormKind::P1).unwrap().value, col_sum_max(&inv)),
            (inv_norm(&j, NormKind::Pinf).unwrap().value, row_sum_max(&inv)),
            (inv_norm(&j, NormKind::P2).unwrap().value, 1.0 / s[n - 1]),
            (sigma_min(&j).unwrap(), s[n - 1]),
        ];
        for (k, (got, want)) in pairs.iter().enumerate() {
            let e = rel(*got, *want);
            worst = worst.max(e);
            assert!(e < 1e-8, "n={n} quantity {k}: {got} vs {want}, cond {}", s[0] / s[n - 1]);
        }
    }
    eprintln!("worst relative deviation {worst:e}");
}

#[test]
fn solve_residual_bound() {
    let mut r = rng(12);
    for _ in 0..10_000 {
        let n = r.gen_range(1..=60);
        let j = random_jacobi(&mut r, n);
        let b: Vec<_> = (0..n).map(|_| unit_disk(&mut r)).collect();
        let x = solve(&j, &b).unwrap();
        let res = j
            .apply(&x)
            .iter()
            .zip(&b)
            .map(|(p, q)| (p - q).norm())
            .fold(0.0, f64::max);
        let xn = x.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let jn = op_norm(&j, NormKind::Pinf).unwrap().value;
        assert!(res <= 16.0 * n as f64 * f64::EPSILON * jn * xn, "n={n} residual {res}");
    }
}
