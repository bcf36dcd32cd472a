mod common;

use common::c;
use jacobi_pe::fsm::{
    cancel_index, cutoffs, fsm_solve, stability_check, FailureMode, FsmProblem, Rhs, Side,
};
use jacobi_pe::pseudospec::{
    eps_set, resolvent_field, sandwich_check, convergence_sweep, SweepOptions,
};
use jacobi_pe::regions::{kappa_at, IndexClass};
use jacobi_pe::{ComplexGrid, DiagonalStream, GridMask, NormKind, SymbolTriple};

fn triple(u: &[f64], v: &[f64], w: &[f64]) -> SymbolTriple {
    SymbolTriple::real(u, v, w).unwrap()
}

#[test]
fn index_one_needs_the_shift() {
    let t = triple(&[0.2], &[0.0], &[1.0]);
    assert_eq!(kappa_at(&t, c(0.0, 0.0)), IndexClass::Kappa(1));
    let s = DiagonalStream::new(t.clone(), 5);
    let sizes: Vec<usize> = (1..=8).map(|k| 10 * k).collect();
    let p = FsmProblem::new(s, Side::BiInfinite, Rhs::unit(0), cutoffs(Side::BiInfinite, &sizes));
    let plain = fsm_solve(&p).unwrap();
    assert_eq!(plain.failure_mode, Some(FailureMode::ProfileDiverging));
    let shifted = fsm_solve(&cancel_index(&p, 1).unwrap()).unwrap();
    assert!(shifted.converged, "{:?}", shifted.failure_mode);
    // after the shift the Toeplitz symbol family has index zero
    let renumbered = triple(&[0.0], &[0.2], &[0.0]);
    assert_eq!(kappa_at(&renumbered, c(0.0, 0.0)), IndexClass::Kappa(0));
}

#[test]
fn cancel_index_rejects_bad_requests() {
    let s = DiagonalStream::new(triple(&[0.0], &[2.0], &[1.0]), 0);
    let one = FsmProblem::new(s.clone(), Side::SemiInfinite, Rhs::unit(1), cutoffs(Side::SemiInfinite, &[4, 8]));
    assert!(cancel_index(&one, 1).is_err());
    let two = FsmProblem::new(s, Side::BiInfinite, Rhs::unit(1), cutoffs(Side::BiInfinite, &[4, 8]));
    assert!(cancel_index(&two, 0).is_err());
    assert!(cancel_index(&two, -1).is_ok());
}

#[test]
fn singular_truncations_are_reported() {
    // every odd section of the 2x2-periodic [[0, 1], [1, 0]] pattern is singular
    let s = DiagonalStream::new(triple(&[1.0], &[0.0], &[1.0]), 0);
    let sizes = [3, 5, 7, 9, 11];
    let p = FsmProblem::new(s, Side::SemiInfinite, Rhs::unit(1), cutoffs(Side::SemiInfinite, &sizes));
    let rep = fsm_solve(&p).unwrap();
    assert!(!rep.converged);
    assert!(rep.solutions.iter().all(|x| x.values.is_empty()));
    assert_eq!(rep.failure_mode, Some(FailureMode::ProfileDiverging));
}

#[test]
fn stability_check_examples() {
    let good = stability_check(&triple(&[1.0], &[4.0], &[0.0, 2.0]), c(0.0, 0.0), &[1, 2, 3], &[20, 40, 80]);
    assert!(good.stable && good.witness.is_none());
    assert!(good.max_inv_norm.is_finite() && good.max_inv_norm < 1.0);
    assert!(good.exhaustive_up_to >= 10);

    let toeplitz = stability_check(&triple(&[1.0], &[3.0], &[1.0]), c(0.0, 0.0), &[0], &[50, 100]);
    assert!(toeplitz.stable);

    // ±√2 are the eigenvalues of [[0, 2], [1, 0]] and lie in E for this triple
    let signed = triple(&[-1.0, 1.0], &[0.0], &[2.0]);
    let bad = stability_check(&signed, c(2f64.sqrt(), 0.0), &[1], &[10]);
    assert!(!bad.stable);
    let w = bad.witness.unwrap();
    assert!(w.sigma_min < 1e-12 && w.seed.is_none());
}

#[test]
fn normal_matrix_eps_set_is_union_of_disks() {
    let s = DiagonalStream::new(triple(&[1.0], &[2.0], &[1.0]), 0);
    let g = ComplexGrid::new(-1.0, 5.0, -1.5, 1.5, 121, 61).unwrap();
    let f = resolvent_field(&s, 3, &g, NormKind::P2).unwrap();
    let eigs: Vec<f64> = (1..=3).map(|k| 2.0 + 2.0 * (k as f64 * std::f64::consts::PI / 4.0).cos()).collect();
    for eps in [0.2, 0.5, 0.9] {
        let set = eps_set(&f, eps, false).unwrap();
        let disks = GridMask::from_fn(g, |z| eigs.iter().any(|&l| (z - c(l, 0.0)).norm() < eps));
        // the two masks may differ only where |z - λ| is within rounding of ε
        let diff = set.mask.difference(&disks).union(&disks.difference(&set.mask));
        for z in diff.points() {
            let d = eigs.iter().map(|&l| (z - c(l, 0.0)).norm()).fold(f64::INFINITY, f64::min);
            assert!((d - eps).abs() < 1e-9, "{z} at distance {d}");
        }
    }
}

#[test]
fn nilpotent_field() {
    let s = DiagonalStream::new(triple(&[0.0], &[0.0], &[1.0]), 0);
    let g = ComplexGrid::new(-2.0, 2.0, -1.0, 1.0, 5, 3).unwrap();
    let f = resolvent_field(&s, 8, &g, NormKind::P2).unwrap();
    let origin = g.nearest(c(0.0, 0.0)).unwrap();
    assert!(f.values[origin].is_infinite());
    let two = g.nearest(c(2.0, 0.0)).unwrap();
    assert!(f.values[two] <= 1.0);
}

#[test]
fn duality_on_fields() {
    let t = triple(&[0.5, -1.0], &[0.0, 1.0], &[2.0]);
    let g = ComplexGrid::square(3.0, 11).unwrap();
    for seed in [1, 2] {
        let s = DiagonalStream::new(t.clone(), seed);
        let n = 30;
        let a = s.window(1, n).unwrap();
        let b = a.reflect();
        let p1 = resolvent_field(&s, n as usize, &g, NormKind::P1).unwrap();
        for (k, z) in g.points().enumerate() {
            let q = jacobi_pe::tridiag::inv_norm(&b.shift_lambda(z), NormKind::Pinf).unwrap().value;
            assert!(common::rel(p1.values[k], q) < 1e-10);
        }
    }
}

#[test]
fn sweep_and_sandwich_on_shift() {
    let t = triple(&[0.0], &[0.0], &[1.0]);
    let s = DiagonalStream::new(t.clone(), 0);
    let g = ComplexGrid::square(1.5, 41).unwrap();
    let (rep, fields) = convergence_sweep(&s, &g, 0.1, &[25, 50, 100, 200], &SweepOptions::default()).unwrap();
    assert!(rep.count_decreases.is_empty());
    assert!(rep.inclusion_violations.iter().all(|&v| v == 0));
    let last = eps_set(fields.last().unwrap(), 0.1, false).unwrap();
    let sw = sandwich_check(&t, &last);
    assert!(sw.outer_holds());
    for f in &fields {
        assert!(sandwich_check(&t, &eps_set(f, 0.1, false).unwrap()).outer_holds());
    }
}
