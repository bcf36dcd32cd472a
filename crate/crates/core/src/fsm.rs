//! Finite section method: solve growing truncations `A_n x_n = b_n` of an
//! infinite Jacobi system, watch their stability, and cancel a nonzero
//! index by renumbering rows.

use num_complex::Complex;
use num_traits::{Num, One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symbols::{
    count_finite, enumerate_finite, sample_finite, DiagonalStream, FiniteJacobi, SymbolTriple, C64,
};
use crate::tridiag::{
    inv_norm_band, op_norm, BandMatrix, LanczosOptions, NormEstimate, NormKind,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    /// Rows and columns indexed by `1, 2, 3, ...`.
    SemiInfinite,
    /// Rows and columns indexed by `ℤ`.
    BiInfinite,
}

/// Right-hand side `b(i)`: explicit values on `offset..offset+len`, and a
/// bound on `|b(i)|` everywhere else.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rhs {
    pub offset: i64,
    pub values: Vec<C64>,
    pub tail_bound: f64,
}

impl Rhs {
    /// Finitely supported right-hand side.
    pub fn from_support(entries: &[(i64, C64)]) -> Self {
        if entries.is_empty() {
            return Self {
                offset: 0,
                values: Vec::new(),
                tail_bound: 0.0,
            };
        }
        let lo = entries.iter().map(|e| e.0).min().unwrap();
        let hi = entries.iter().map(|e| e.0).max().unwrap();
        let mut values = vec![C64::new(0.0, 0.0); (hi - lo + 1) as usize];
        for &(i, z) in entries {
            values[(i - lo) as usize] += z;
        }
        Self {
            offset: lo,
            values,
            tail_bound: 0.0,
        }
    }

    /// `b(i) = f(i)` on `lo..=hi`, with `|b(i)| ≤ tail_bound` outside.
    pub fn from_fn(lo: i64, hi: i64, tail_bound: f64, f: impl Fn(i64) -> C64) -> Self {
        Self {
            offset: lo,
            values: (lo..=hi).map(f).collect(),
            tail_bound,
        }
    }

    /// `e_k`.
    pub fn unit(k: i64) -> Self {
        Self::from_support(&[(k, C64::new(1.0, 0.0))])
    }

    pub fn at(&self, i: i64) -> C64 {
        let k = i - self.offset;
        if k >= 0 && (k as usize) < self.values.len() {
            self.values[k as usize]
        } else {
            C64::new(0.0, 0.0)
        }
    }
}

/// Cut-off pairs `(l_n, r_n)` for `n` in `sizes`: `(1, n)` one-sided,
/// `(-n, n)` two-sided.
pub fn cutoffs(side: Side, sizes: &[usize]) -> Vec<(i64, i64)> {
    sizes
        .iter()
        .map(|&n| match side {
            Side::SemiInfinite => (1, n as i64),
            Side::BiInfinite => (-(n as i64), n as i64),
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FsmProblem {
    pub stream: DiagonalStream,
    pub side: Side,
    pub rhs: Rhs,
    pub cutoffs: Vec<(i64, i64)>,
    /// Row renumbering `κ`: equation `i` of the solved system is equation
    /// `i - κ` of the original one.
    pub shift: i8,
    /// Solutions are compared on indices `j` with `|j| ≤ probe_radius`
    /// (`1..=probe_radius` one-sided).
    pub probe_radius: i64,
    pub atol: f64,
}

impl FsmProblem {
    pub fn new(stream: DiagonalStream, side: Side, rhs: Rhs, cutoffs: Vec<(i64, i64)>) -> Self {
        Self {
            stream,
            side,
            rhs,
            cutoffs,
            shift: 0,
            probe_radius: 20,
            atol: 1e-8,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.cutoffs.is_empty() {
            return Err(Error::InvalidArgument("no cut-offs given".into()));
        }
        if !(-1..=1).contains(&self.shift) {
            return Err(Error::InvalidArgument(format!("shift {} not in {{-1, 0, 1}}", self.shift)));
        }
        for &(l, r) in &self.cutoffs {
            if l > r {
                return Err(Error::InvalidArgument(format!("empty cut-off ({l}, {r})")));
            }
            if self.side == Side::SemiInfinite && l != 1 {
                return Err(Error::InvalidArgument("one-sided cut-offs must start at 1".into()));
            }
        }
        for w in self.cutoffs.windows(2) {
            if w[1].0 > w[0].0 || w[1].1 <= w[0].1 {
                return Err(Error::InvalidArgument(
                    "cut-offs must grow: l nonincreasing, r increasing".into(),
                ));
            }
        }
        if self.side == Side::SemiInfinite && self.shift != 0 {
            return Err(Error::InvalidArgument("one-sided problems cannot be shifted".into()));
        }
        Ok(())
    }

    fn probe(&self) -> (i64, i64) {
        match self.side {
            Side::SemiInfinite => (1, self.probe_radius),
            Side::BiInfinite => (-self.probe_radius, self.probe_radius),
        }
    }

    /// The section over rows and columns `l..=r` of the row-renumbered
    /// system: entry `(i, j)` is `a_{i-κ, j}`.
    pub fn section(&self, l: i64, r: i64) -> BandMatrix {
        let s = self.shift as i64;
        let n = (r - l + 1) as usize;
        let u = self.stream.u_range(l - s, n);
        let v = self.stream.v_range(l - s, n);
        let w = self.stream.w_range(l - s, n);
        let kl = (1 + s) as usize;
        let ku = (1 - s) as usize;
        BandMatrix::from_fn(n, kl, ku, |i, j| {
            // row i of the section is row p = i - s of A (local indices)
            let d = j as i64 - (i as i64 - s);
            match d {
                -1 => u[i],
                0 => v[i],
                1 => w[i],
                _ => C64::new(0.0, 0.0),
            }
        })
    }

    fn section_rhs(&self, l: i64, r: i64) -> Vec<C64> {
        let s = self.shift as i64;
        (l..=r).map(|i| self.rhs.at(i - s)).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FailureMode {
    TruncationSingular,
    ProfileDiverging,
    NotConverged,
}

/// One truncated solution, `values[k] = x_n(lo + k)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Section {
    pub lo: i64,
    pub hi: i64,
    /// Empty when the section is singular.
    pub values: Vec<C64>,
}

impl Section {
    pub fn at(&self, j: i64) -> C64 {
        if j < self.lo || j > self.hi || self.values.is_empty() {
            C64::new(0.0, 0.0)
        } else {
            self.values[(j - self.lo) as usize]
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FsmReport {
    pub solutions: Vec<Section>,
    pub converged: bool,
    pub final_error_estimate: f64,
    pub stability_profile: Vec<NormEstimate>,
    pub failure_mode: Option<FailureMode>,
    /// Probe-window differences between consecutive solutions.
    pub increments: Vec<f64>,
    pub shift: i8,
}

fn median(xs: &[f64]) -> f64 {
    let mut s = xs.to_vec();
    s.sort_by(f64::total_cmp);
    let m = s.len();
    if m % 2 == 1 {
        s[m / 2]
    } else {
        0.5 * (s[m / 2 - 1] + s[m / 2])
    }
}

/// The last value is finite and below twice the median.
pub fn profile_bounded(values: &[f64]) -> bool {
    match values.last() {
        None => true,
        Some(&last) => last.is_finite() && last < 2.0 * median(values),
    }
}

pub fn fsm_solve(problem: &FsmProblem) -> Result<FsmReport> {
    problem.validate()?;
    let opts = LanczosOptions::default();
    let results: Vec<(Section, NormEstimate)> = problem
        .cutoffs
        .par_iter()
        .map(|&(l, r)| {
            let a = problem.section(l, r);
            let b = problem.section_rhs(l, r);
            let (values, est) = match a.lu() {
                Ok(lu) => {
                    let x = lu.solve(&b);
                    let est = match inv_norm_band(&a, NormKind::P2, &opts) {
                        Ok(e) => e,
                        Err(Error::ConvergenceFailure { best }) => best,
                        Err(_) => NormEstimate::infinite(NormKind::P2),
                    };
                    if x.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
                        (x, est)
                    } else {
                        (Vec::new(), NormEstimate::infinite(NormKind::P2))
                    }
                }
                Err(_) => (Vec::new(), NormEstimate::infinite(NormKind::P2)),
            };
            (Section { lo: l, hi: r, values }, est)
        })
        .collect();
    let (solutions, profile): (Vec<Section>, Vec<NormEstimate>) = results.into_iter().unzip();

    let (plo, phi) = problem.probe();
    let increments: Vec<f64> = solutions
        .windows(2)
        .map(|w| {
            if w[0].values.is_empty() || w[1].values.is_empty() {
                return f64::INFINITY;
            }
            (plo..=phi)
                .map(|j| (w[1].at(j) - w[0].at(j)).norm())
                .fold(0.0, f64::max)
        })
        .collect();

    let values: Vec<f64> = profile.iter().map(|e| e.value).collect();
    let bounded = profile_bounded(&values);
    let any_singular = solutions.iter().any(|s| s.values.is_empty());
    let settled = increments.len() >= 3
        && increments[increments.len() - 3..].iter().all(|&d| d < problem.atol);
    let last_inc = increments.last().copied().unwrap_or(f64::INFINITY);
    let last_norm = values.last().copied().unwrap_or(f64::INFINITY);
    let tail = if problem.rhs.tail_bound > 0.0 {
        last_norm * problem.rhs.tail_bound
    } else {
        0.0
    };
    let failure_mode = if !bounded {
        Some(FailureMode::ProfileDiverging)
    } else if any_singular {
        Some(FailureMode::TruncationSingular)
    } else if !settled {
        Some(FailureMode::NotConverged)
    } else {
        None
    };
    Ok(FsmReport {
        solutions,
        converged: failure_mode.is_none(),
        final_error_estimate: last_inc.max(tail),
        stability_profile: profile,
        failure_mode,
        increments,
        shift: problem.shift,
    })
}

/// Renumbers rows by `κ` so that the shifted system has index zero.
pub fn cancel_index(problem: &FsmProblem, kappa: i8) -> Result<FsmProblem> {
    if problem.side == Side::SemiInfinite {
        return Err(Error::InvalidArgument(
            "a one-sided operator with nonzero index is not invertible; nothing to cancel".into(),
        ));
    }
    if kappa != 1 && kappa != -1 {
        return Err(Error::InvalidArgument(format!("kappa must be +1 or -1, got {kappa}")));
    }
    Ok(FsmProblem {
        shift: kappa,
        ..problem.clone()
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub matrix: FiniteJacobi,
    pub sigma_min: f64,
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityEvidence {
    pub stable: bool,
    /// Largest `‖F⁻¹‖₂` over all examined invertible matrices.
    pub max_inv_norm: f64,
    pub matrices_checked: usize,
    /// Largest `n` for which all of `M_n` was enumerated.
    pub exhaustive_up_to: usize,
    pub witness: Option<Witness>,
    /// A profile over `sizes` for one seed that was not bounded.
    pub diverging_seed: Option<u64>,
}

/// Enumeration stops once this many matrices would be needed.
pub const EXHAUSTIVE_BUDGET: u128 = 50_000;

/// Largest size that is enumerated exhaustively.
pub const EXHAUSTIVE_MAX_N: usize = 12;

/// `σ_min(F) ≤ n ε ‖F‖∞`: numerically singular.
fn is_singular(f: &FiniteJacobi, inv: f64) -> bool {
    if !inv.is_finite() {
        return true;
    }
    let scale = op_norm(f, NormKind::Pinf).map(|e| e.value).unwrap_or(0.0);
    1.0 / inv <= f.n() as f64 * f64::EPSILON * scale
}

fn inv2(f: &FiniteJacobi) -> f64 {
    match inv_norm_band(&BandMatrix::from(f), NormKind::P2, &LanczosOptions::default()) {
        Ok(e) => e.value,
        Err(Error::ConvergenceFailure { best }) => best.value,
        Err(_) => f64::INFINITY,
    }
}

/// Searches `M_n(U, V - λ, W)` for singular matrices: exhaustively for small
/// `n`, then by sampling every `(seed, size)` pair.
pub fn stability_check(
    triple: &SymbolTriple,
    lambda: C64,
    seeds: &[u64],
    sizes: &[usize],
) -> StabilityEvidence {
    let t = triple.shifted(lambda);
    let mut checked = 0;
    let mut max_inv = 0.0f64;
    let mut exhaustive_up_to = 0;
    let mut spent: u128 = 0;
    let mut n = 1;
    loop {
        let count = count_finite(&t, n);
        if n > EXHAUSTIVE_MAX_N || spent.saturating_add(count) > EXHAUSTIVE_BUDGET {
            break;
        }
        spent += count;
        let all: Vec<FiniteJacobi> = enumerate_finite(&t, n).collect();
        let found = all
            .par_iter()
            .map(|f| (inv2(f), f))
            .find_first(|(inv, f)| is_singular(f, *inv));
        checked += all.len();
        if let Some((inv, f)) = found {
            return StabilityEvidence {
                stable: false,
                max_inv_norm: f64::INFINITY,
                matrices_checked: checked,
                exhaustive_up_to,
                witness: Some(Witness {
                    matrix: f.clone(),
                    sigma_min: if inv.is_finite() { 1.0 / inv } else { 0.0 },
                    seed: None,
                }),
                diverging_seed: None,
            };
        }
        max_inv = all.par_iter().map(inv2).reduce(|| 0.0, f64::max).max(max_inv);
        exhaustive_up_to = n;
        n += 1;
    }

    let runs: Vec<(u64, Vec<(FiniteJacobi, f64)>)> = seeds
        .par_iter()
        .map(|&seed| {
            let row = sizes
                .iter()
                .filter(|&&n| n > 0)
                .map(|&n| {
                    let f = sample_finite(&t, n, seed).expect("n >= 1");
                    let inv = inv2(&f);
                    (f, inv)
                })
                .collect();
            (seed, row)
        })
        .collect();
    let mut diverging_seed = None;
    for (seed, row) in &runs {
        checked += row.len();
        for (f, inv) in row {
            if is_singular(f, *inv) {
                return StabilityEvidence {
                    stable: false,
                    max_inv_norm: f64::INFINITY,
                    matrices_checked: checked,
                    exhaustive_up_to,
                    witness: Some(Witness {
                        matrix: f.clone(),
                        sigma_min: if inv.is_finite() { 1.0 / inv } else { 0.0 },
                        seed: Some(*seed),
                    }),
                    diverging_seed: None,
                };
            }
            max_inv = max_inv.max(*inv);
        }
        let values: Vec<f64> = row.iter().map(|r| r.1).collect();
        if diverging_seed.is_none() && !profile_bounded(&values) {
            diverging_seed = Some(*seed);
        }
    }
    StabilityEvidence {
        stable: diverging_seed.is_none(),
        max_inv_norm: max_inv,
        matrices_checked: checked,
        exhaustive_up_to,
        witness: None,
        diverging_seed,
    }
}

/// `copies` copies of `F` joined by glue rows `(u, v, w)`; every coupling
/// between a block and a glue row is `u` below and `w` above the diagonal.
pub fn glueing_matrix(f: &FiniteJacobi, fill: (C64, C64, C64), copies: usize) -> Result<FiniteJacobi> {
    if copies == 0 {
        return Err(Error::InvalidArgument("copies must be at least 1".into()));
    }
    let (u, v, w) = fill;
    let mut sub = Vec::new();
    let mut main = Vec::new();
    let mut sup = Vec::new();
    for c in 0..copies {
        if c > 0 {
            // glue row between blocks
            sub.push(u);
            sup.push(w);
            main.push(v);
            sub.push(u);
            sup.push(w);
        }
        sub.extend_from_slice(&f.sub);
        main.extend_from_slice(&f.main);
        sup.extend_from_slice(&f.sup);
    }
    FiniteJacobi::new(sub, main, sup)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    /// `z_1 = z_2 = ... = 0` with `(r_0, r_1, ...)` bounded.
    Plus,
    /// `z_{-1} = z_{-2} = ... = 0` with `(..., r_{-2}, r_{-1})` bounded.
    Minus,
}

#[derive(Clone, Debug, PartialEq)]
pub enum RkRule<T> {
    /// `r_k = ρ^k` for all `k`.
    Geometric { rho: T },
    /// `r_at = 1`, every other `r_k = 0`.
    Unit { at: i64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct RkChoice<T> {
    pub branch: Branch,
    pub rule: RkRule<T>,
}

impl<T: Clone + Num> RkChoice<Complex<T>> {
    pub fn r(&self, k: i64) -> Complex<T> {
        match &self.rule {
            RkRule::Unit { at } => {
                if k == *at {
                    Complex::one()
                } else {
                    Complex::zero()
                }
            }
            RkRule::Geometric { rho } => {
                let base = if k >= 0 {
                    rho.clone()
                } else {
                    Complex::<T>::one() / rho.clone()
                };
                (0..k.unsigned_abs()).fold(Complex::one(), |acc, _| acc * base.clone())
            }
        }
    }

    /// `z_k = r_{k-1} u x_n + r_k w x_1`.
    pub fn z(&self, k: i64, x1: &Complex<T>, xn: &Complex<T>, u: &Complex<T>, w: &Complex<T>) -> Complex<T> {
        self.r(k - 1) * u.clone() * xn.clone() + self.r(k) * w.clone() * x1.clone()
    }
}

/// The sequence `(r_k)` making the glue rows of a glued kernel vector vanish
/// on one side.
pub fn choose_rk<T: Clone + Num + PartialOrd>(
    x1: Complex<T>,
    xn: Complex<T>,
    u: Complex<T>,
    w: Complex<T>,
) -> RkChoice<Complex<T>> {
    let a = u * xn;
    let b = w * x1;
    if !a.is_zero() && !b.is_zero() {
        let rho = (Complex::<T>::zero() - a) / b;
        let branch = if rho.norm_sqr() <= T::one() {
            Branch::Plus
        } else {
            Branch::Minus
        };
        RkChoice {
            branch,
            rule: RkRule::Geometric { rho },
        }
    } else if a.is_zero() {
        RkChoice {
            branch: Branch::Plus,
            rule: RkRule::Unit { at: 0 },
        }
    } else {
        RkChoice {
            branch: Branch::Minus,
            rule: RkRule::Unit { at: -1 },
        }
    }
}

/// The vector `(r_k x)` over the blocks of a `copies`-fold glueing window,
/// zeros on glue rows. Plus uses `k = 0..copies`, Minus `k = -copies..0`.
pub fn glueing_vector(x: &[C64], choice: &RkChoice<C64>, copies: usize) -> Vec<C64> {
    let ks: Vec<i64> = match choice.branch {
        Branch::Plus => (0..copies as i64).collect(),
        Branch::Minus => (-(copies as i64)..0).collect(),
    };
    let mut out = Vec::with_capacity(copies * (x.len() + 1));
    for (c, &k) in ks.iter().enumerate() {
        if c > 0 {
            out.push(C64::new(0.0, 0.0));
        }
        let r = choice.r(k);
        out.extend(x.iter().map(|&xi| xi * r));
    }
    out
}
