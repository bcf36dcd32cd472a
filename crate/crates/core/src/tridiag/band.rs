//! Banded matrices and their LU factorization with partial pivoting.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::symbols::FiniteJacobi;

type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);

/// Pivots with magnitude below this are treated as exact zeros.
pub const PIVOT_THRESHOLD: f64 = 1e-300;

/// `n × n` matrix with `kl` sub- and `ku` superdiagonals, stored by rows.
#[derive(Clone, Debug, PartialEq)]
pub struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    data: Vec<C64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        Self {
            n,
            kl,
            ku,
            data: vec![ZERO; n * (kl + ku + 1)],
        }
    }

    pub fn from_fn(n: usize, kl: usize, ku: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(n, kl, ku);
        for i in 0..n {
            let (lo, hi) = m.row_span(i);
            for j in lo..hi {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kl(&self) -> usize {
        self.kl
    }

    pub fn ku(&self) -> usize {
        self.ku
    }

    /// Column range `lo..hi` of the band in row `i`.
    pub fn row_span(&self, i: usize) -> (usize, usize) {
        (i.saturating_sub(self.kl), (i + self.ku + 1).min(self.n))
    }

    fn width(&self) -> usize {
        self.kl + self.ku + 1
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        if j + self.kl < i || j > i + self.ku || i >= self.n || j >= self.n {
            return ZERO;
        }
        self.data[i * self.width() + j + self.kl - i]
    }

    pub fn set(&mut self, i: usize, j: usize, z: C64) {
        assert!(j + self.kl >= i && j <= i + self.ku, "({i}, {j}) outside the band");
        let w = self.width();
        self.data[i * w + j + self.kl - i] = z;
    }

    pub fn to_dense(&self) -> Vec<Vec<C64>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j)).collect())
            .collect()
    }

    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        (0..self.n)
            .map(|i| {
                let (lo, hi) = self.row_span(i);
                (lo..hi).map(|j| self.get(i, j) * x[j]).sum()
            })
            .collect()
    }

    pub fn apply_adjoint(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![ZERO; self.n];
        for i in 0..self.n {
            let (lo, hi) = self.row_span(i);
            for (j, yj) in y.iter_mut().enumerate().take(hi).skip(lo) {
                *yj += self.get(i, j).conj() * x[i];
            }
        }
        y
    }

    /// Maximum absolute column sum.
    pub fn norm_1(&self) -> f64 {
        let mut cols = vec![0.0; self.n];
        for i in 0..self.n {
            let (lo, hi) = self.row_span(i);
            for (j, c) in cols.iter_mut().enumerate().take(hi).skip(lo) {
                *c += self.get(i, j).norm();
            }
        }
        cols.into_iter().fold(0.0, f64::max)
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| {
                let (lo, hi) = self.row_span(i);
                (lo..hi).map(|j| self.get(i, j).norm()).sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    pub fn lu(&self) -> Result<BandLu> {
        BandLu::factor(self)
    }
}

impl From<&FiniteJacobi> for BandMatrix {
    fn from(j: &FiniteJacobi) -> Self {
        let n = j.n();
        let mut data = Vec::with_capacity(3 * n);
        for i in 0..n {
            data.push(if i > 0 { j.sub[i - 1] } else { ZERO });
            data.push(j.main[i]);
            data.push(if i + 1 < n { j.sup[i] } else { ZERO });
        }
        Self { n, kl: 1, ku: 1, data }
    }
}

/// `P_0 L_0 P_1 L_1 ... U` factorization of a band matrix.
///
/// `U` has bandwidth `kl + ku` because of row interchanges; the elimination
/// multipliers of step `k` are kept separately, as in LAPACK's `gbtrf`.
#[derive(Clone, Debug)]
pub struct BandLu {
    n: usize,
    kl: usize,
    uw: usize,
    // row k of U holds columns k..k+uw
    u: Vec<C64>,
    mult: Vec<C64>,
    piv: Vec<usize>,
}

impl BandLu {
    pub fn factor(a: &BandMatrix) -> Result<Self> {
        let (n, kl, ku) = (a.n, a.kl, a.ku);
        // working rows: columns i-kl ..= i+ku+kl
        let w = 2 * kl + ku + 1;
        let mut rows = vec![ZERO; n * w];
        for i in 0..n {
            let (lo, hi) = a.row_span(i);
            for j in lo..hi {
                rows[i * w + j + kl - i] = a.get(i, j);
            }
        }
        let at = |i: usize, j: usize| i * w + j + kl - i;
        let mut mult = vec![ZERO; n * kl];
        let mut piv = vec![0; n];
        for k in 0..n {
            let last = (k + kl).min(n - 1);
            let mut p = k;
            let mut best = rows[at(k, k)].norm();
            for i in k + 1..=last {
                let m = rows[at(i, k)].norm();
                if m > best {
                    best = m;
                    p = i;
                }
            }
            if !(best >= PIVOT_THRESHOLD) {
                return Err(Error::SingularMatrix { row: k, pivot: best });
            }
            piv[k] = p;
            let jmax = (k + kl + ku).min(n - 1);
            if p != k {
                for j in k..=jmax {
                    rows.swap(at(k, j), at(p, j));
                }
            }
            let inv = rows[at(k, k)].inv();
            for i in k + 1..=last {
                let l = rows[at(i, k)] * inv;
                mult[k * kl + (i - k - 1)] = l;
                rows[at(i, k)] = ZERO;
                if l != ZERO {
                    for j in k + 1..=jmax {
                        let ukj = rows[at(k, j)];
                        rows[at(i, j)] -= l * ukj;
                    }
                }
            }
        }
        let uw = kl + ku + 1;
        let mut u = vec![ZERO; n * uw];
        for k in 0..n {
            for t in 0..uw.min(n - k) {
                u[k * uw + t] = rows[at(k, k + t)];
            }
        }
        Ok(Self {
            n,
            kl,
            uw,
            u,
            mult,
            piv,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Diagonal of `U`.
    pub fn pivots(&self) -> impl Iterator<Item = C64> + '_ {
        (0..self.n).map(move |k| self.u[k * self.uw])
    }

    /// Solves `A x = b` in place.
    pub fn solve_in_place(&self, b: &mut [C64]) {
        let (n, kl, uw) = (self.n, self.kl, self.uw);
        assert_eq!(b.len(), n);
        for k in 0..n {
            b.swap(k, self.piv[k]);
            let bk = b[k];
            if bk != ZERO {
                for t in 0..kl.min(n - 1 - k) {
                    b[k + 1 + t] -= self.mult[k * kl + t] * bk;
                }
            }
        }
        for k in (0..n).rev() {
            let row = &self.u[k * uw..(k + 1) * uw];
            let mut s = b[k];
            for t in 1..uw.min(n - k) {
                s -= row[t] * b[k + t];
            }
            b[k] = s / row[0];
        }
    }

    pub fn solve(&self, b: &[C64]) -> Vec<C64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }

    /// Solves `A^* z = c` in place.
    pub fn solve_adjoint_in_place(&self, c: &mut [C64]) {
        let (n, kl, uw) = (self.n, self.kl, self.uw);
        assert_eq!(c.len(), n);
        for k in 0..n {
            let row = &self.u[k * uw..(k + 1) * uw];
            let yk = c[k] / row[0].conj();
            c[k] = yk;
            for t in 1..uw.min(n - k) {
                c[k + t] -= row[t].conj() * yk;
            }
        }
        for k in (0..n).rev() {
            let mut s = c[k];
            for t in 0..kl.min(n - 1 - k) {
                s -= self.mult[k * kl + t].conj() * c[k + 1 + t];
            }
            c[k] = s;
            c.swap(k, self.piv[k]);
        }
    }

    pub fn solve_adjoint(&self, c: &[C64]) -> Vec<C64> {
        let mut z = c.to_vec();
        self.solve_adjoint_in_place(&mut z);
        z
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn residual(a: &BandMatrix, x: &[C64], b: &[C64]) -> f64 {
        a.apply(x)
            .iter()
            .zip(b)
            .map(|(p, q)| (p - q).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn needs_pivoting() {
        // zero leading entry forces an interchange
        let j = FiniteJacobi::new(vec![c(1.0), c(1.0)], vec![c(0.0), c(0.0), c(1.0)], vec![c(1.0), c(2.0)]).unwrap();
        let a = BandMatrix::from(&j);
        let lu = a.lu().unwrap();
        let b = vec![c(1.0), c(-2.0), c(0.5)];
        let x = lu.solve(&b);
        assert!(residual(&a, &x, &b) < 1e-14);
        let z = lu.solve_adjoint(&b);
        let back = a.apply_adjoint(&z);
        for (p, q) in back.iter().zip(&b) {
            assert!((p - q).norm() < 1e-14);
        }
    }

    #[test]
    fn wider_bands() {
        let n = 9;
        let a = BandMatrix::from_fn(n, 2, 0, |i, j| C64::new((i * 3 + j) as f64 * 0.1 - 0.7, (i as f64 - j as f64) * 0.3));
        let lu = a.lu().unwrap();
        let b: Vec<C64> = (0..n).map(|k| C64::new(k as f64, 1.0)).collect();
        let x = lu.solve(&b);
        assert!(residual(&a, &x, &b) < 1e-10);
        let z = lu.solve_adjoint(&b);
        let back = a.apply_adjoint(&z);
        for (p, q) in back.iter().zip(&b) {
            assert!((p - q).norm() < 1e-10);
        }
    }

    #[test]
    fn singular_is_reported() {
        let j = FiniteJacobi::new(vec![c(0.0); 2], vec![c(0.0); 3], vec![c(1.0); 2]).unwrap();
        assert!(matches!(
            BandMatrix::from(&j).lu(),
            Err(Error::SingularMatrix { .. })
        ));
    }

    #[test]
    fn norms_of_band() {
        let j = FiniteJacobi::new(vec![c(-1.0), c(1.0)], vec![c(0.5); 3], vec![c(2.0), c(-2.0)]).unwrap();
        let a = BandMatrix::from(&j);
        assert_eq!(a.norm_inf(), 3.5);
        assert_eq!(a.norm_1(), 3.5);
        assert_eq!(a.get(0, 2), c(0.0));
        assert_eq!(a.to_dense(), j.to_dense());
    }
}
