//! Solves, norms, inverse norms and singular values of finite tridiagonal
//! (and slightly wider banded) matrices.

mod band;
mod svd;

pub use band::{BandLu, BandMatrix, PIVOT_THRESHOLD};
pub use svd::{bidiagonal_sigma_max, sigma_max, LanczosOptions, LanczosOutcome, LinearOperator};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symbols::{DiagonalStream, FiniteJacobi, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NormKind {
    P1,
    P2,
    Pinf,
}

impl NormKind {
    /// The Hölder conjugate exponent.
    pub fn dual(self) -> Self {
        match self {
            NormKind::P1 => NormKind::Pinf,
            NormKind::P2 => NormKind::P2,
            NormKind::Pinf => NormKind::P1,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            NormKind::P1 => "1",
            NormKind::P2 => "2",
            NormKind::Pinf => "inf",
        }
    }
}

impl std::str::FromStr for NormKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "1" | "p1" | "P1" => Ok(NormKind::P1),
            "2" | "p2" | "P2" => Ok(NormKind::P2),
            "inf" | "Inf" | "pinf" | "Pinf" | "∞" => Ok(NormKind::Pinf),
            other => Err(Error::Parse(format!("unknown norm `{other}` (use 1, 2 or inf)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    /// Non-negative, possibly `+inf`.
    pub value: f64,
    pub kind: NormKind,
    /// The value is only known to be a lower bound (iteration did not settle).
    pub certified_lower: bool,
    pub iterations: usize,
}

impl NormEstimate {
    pub fn exact(value: f64, kind: NormKind) -> Self {
        Self {
            value,
            kind,
            certified_lower: false,
            iterations: 0,
        }
    }

    pub fn infinite(kind: NormKind) -> Self {
        Self::exact(f64::INFINITY, kind)
    }
}

impl LinearOperator for BandMatrix {
    fn dim(&self) -> usize {
        self.n()
    }

    fn apply(&self, x: &[C64]) -> Vec<C64> {
        BandMatrix::apply(self, x)
    }

    fn apply_adjoint(&self, x: &[C64]) -> Vec<C64> {
        BandMatrix::apply_adjoint(self, x)
    }
}

struct Inverse<'a>(&'a BandLu);

impl LinearOperator for Inverse<'_> {
    fn dim(&self) -> usize {
        self.0.n()
    }

    fn apply(&self, x: &[C64]) -> Vec<C64> {
        self.0.solve(x)
    }

    fn apply_adjoint(&self, x: &[C64]) -> Vec<C64> {
        self.0.solve_adjoint(x)
    }
}

fn finish(out: LanczosOutcome, kind: NormKind) -> Result<NormEstimate> {
    let est = NormEstimate {
        value: out.value,
        kind,
        certified_lower: !out.converged || out.exceeded,
        iterations: out.iterations,
    };
    if out.converged {
        Ok(est)
    } else {
        Err(Error::ConvergenceFailure { best: est })
    }
}

/// Solves `J x = b` by banded LU with partial pivoting.
///
/// The residual satisfies `‖J x - b‖∞ ≤ 16 n ε ‖J‖∞ ‖x‖∞` on well-scaled input.
pub fn solve(j: &FiniteJacobi, b: &[C64]) -> Result<Vec<C64>> {
    if b.len() != j.n() {
        return Err(Error::InvalidArgument(format!(
            "right-hand side has length {}, expected {}",
            b.len(),
            j.n()
        )));
    }
    Ok(BandMatrix::from(j).lu()?.solve(b))
}

/// `(‖A⁻¹‖₁, ‖A⁻¹‖∞)` from all columns of the inverse.
fn inverse_abs_sums(lu: &BandLu) -> (f64, f64) {
    let n = lu.n();
    let mut rows = vec![0.0; n];
    let mut col_max = 0.0f64;
    let mut e = vec![C64::new(0.0, 0.0); n];
    for k in 0..n {
        e.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
        e[k] = C64::new(1.0, 0.0);
        lu.solve_in_place(&mut e);
        let mut col = 0.0;
        for (r, z) in rows.iter_mut().zip(&e) {
            let m = z.norm();
            col += m;
            *r += m;
        }
        col_max = col_max.max(col);
    }
    let row_max = rows.into_iter().fold(0.0, f64::max);
    let fix = |x: f64| if x.is_finite() { x } else { f64::INFINITY };
    (fix(col_max), fix(row_max))
}

pub fn inv_norm_band(a: &BandMatrix, kind: NormKind, opts: &LanczosOptions) -> Result<NormEstimate> {
    let lu = match a.lu() {
        Ok(lu) => lu,
        Err(Error::SingularMatrix { .. }) => return Ok(NormEstimate::infinite(kind)),
        Err(e) => return Err(e),
    };
    match kind {
        NormKind::P1 => Ok(NormEstimate::exact(inverse_abs_sums(&lu).0, kind)),
        NormKind::Pinf => Ok(NormEstimate::exact(inverse_abs_sums(&lu).1, kind)),
        NormKind::P2 => finish(sigma_max(&Inverse(&lu), opts), kind),
    }
}

pub fn op_norm_band(a: &BandMatrix, kind: NormKind, opts: &LanczosOptions) -> Result<NormEstimate> {
    match kind {
        NormKind::P1 => Ok(NormEstimate::exact(a.norm_1(), kind)),
        NormKind::Pinf => Ok(NormEstimate::exact(a.norm_inf(), kind)),
        NormKind::P2 => finish(sigma_max(a, opts), kind),
    }
}

/// `‖J⁻¹‖_p`, with `+inf` for singular `J`.
pub fn inv_norm(j: &FiniteJacobi, kind: NormKind) -> Result<NormEstimate> {
    inv_norm_with(j, kind, &LanczosOptions::default())
}

pub fn inv_norm_with(j: &FiniteJacobi, kind: NormKind, opts: &LanczosOptions) -> Result<NormEstimate> {
    inv_norm_band(&BandMatrix::from(j), kind, opts)
}

/// `‖J‖_p`.
pub fn op_norm(j: &FiniteJacobi, kind: NormKind) -> Result<NormEstimate> {
    op_norm_band(&BandMatrix::from(j), kind, &LanczosOptions::default())
}

/// Smallest singular value, `0` for singular `J`.
pub fn sigma_min(j: &FiniteJacobi) -> Result<f64> {
    let est = inv_norm(j, NormKind::P2)?;
    Ok(if est.value.is_infinite() { 0.0 } else { 1.0 / est.value })
}

/// `cond_p(J) = ‖J‖_p ‖J⁻¹‖_p`.
pub fn condition(j: &FiniteJacobi, kind: NormKind) -> Result<f64> {
    let inv = inv_norm(j, kind)?.value;
    if inv.is_infinite() {
        return Ok(f64::INFINITY);
    }
    Ok(op_norm(j, kind)?.value * inv)
}

fn settle(r: Result<NormEstimate>, kind: NormKind) -> NormEstimate {
    match r {
        Ok(e) => e,
        Err(Error::ConvergenceFailure { best }) => best,
        Err(_) => NormEstimate::infinite(kind),
    }
}

/// `‖(A_n - λ)⁻¹‖` for the leading sections `A_n = window(stream, 1, n)`.
///
/// Entries whose iteration did not settle are kept as lower bounds.
pub fn norm_growth_profile(
    stream: &DiagonalStream,
    lambda: C64,
    sizes: &[usize],
    kind: NormKind,
) -> Result<Vec<NormEstimate>> {
    if sizes.is_empty() || sizes[0] == 0 || sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(
            "sizes must be positive and strictly increasing".into(),
        ));
    }
    Ok(sizes
        .par_iter()
        .map(|&n| {
            let j = stream.window(1, n as i64).expect("n >= 1").shift_lambda(lambda);
            settle(inv_norm(&j, kind), kind)
        })
        .collect())
}
