//! Largest singular value of an implicitly given operator by
//! Golub-Kahan-Lanczos bidiagonalization.
//!
//! After `k` steps the upper bidiagonal `B_k` (diagonal `α`, superdiagonal
//! `β`) satisfies `σ_max(B_k) ≤ σ_max(A)`, so every estimate is a lower bound
//! and the sequence is nondecreasing.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

type C64 = Complex64;

/// Matrix-free access to `A` and `A^*`.
pub trait LinearOperator {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[C64]) -> Vec<C64>;
    fn apply_adjoint(&self, x: &[C64]) -> Vec<C64>;
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LanczosOptions {
    pub rtol: f64,
    pub max_iter: usize,
    pub restarts: usize,
    pub seed: u64,
    /// Stop as soon as the lower bound exceeds this value.
    pub stop_above: Option<f64>,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            max_iter: 500,
            restarts: 3,
            seed: 0x6b6c,
            stop_above: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LanczosOutcome {
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
    /// The iteration stopped early because `stop_above` was exceeded.
    pub exceeded: bool,
}

fn norm(x: &[C64]) -> f64 {
    let scale = x.iter().fold(0.0f64, |m, z| m.max(z.re.abs()).max(z.im.abs()));
    if scale == 0.0 || !scale.is_finite() {
        return scale;
    }
    let s: f64 = x.iter().map(|z| (z / scale).norm_sqr()).sum();
    scale * s.sqrt()
}

fn scale_in_place(x: &mut [C64], s: f64) {
    x.iter_mut().for_each(|z| *z *= s);
}

fn axpy(y: &mut [C64], a: f64, x: &[C64]) {
    y.iter_mut().zip(x).for_each(|(p, q)| *p -= q * a);
}

/// Number of eigenvalues of the symmetric tridiagonal `(d, e)` below `x`.
fn count_below(d: &[f64], e: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for k in 0..d.len() {
        let off = if k > 0 { e[k - 1] * e[k - 1] / q } else { 0.0 };
        q = d[k] - x - off;
        if q == 0.0 {
            q = -f64::EPSILON * (d[k].abs() + x.abs()).max(f64::MIN_POSITIVE);
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Largest eigenvalue of a symmetric tridiagonal matrix, knowing it is at
/// least `floor`.
fn largest_eigenvalue(d: &[f64], e: &[f64], floor: f64) -> f64 {
    let n = d.len();
    let mut hi = f64::MIN;
    let mut lo = f64::MAX;
    for k in 0..n {
        let r = if k > 0 { e[k - 1].abs() } else { 0.0 } + if k + 1 < n { e[k].abs() } else { 0.0 };
        hi = hi.max(d[k] + r);
        lo = lo.min(d[k] - r);
    }
    let mut lo = lo.max(floor.min(hi));
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= 4.0 * f64::EPSILON * hi.abs().max(lo.abs()) {
            break;
        }
        if count_below(d, e, mid) == n {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `σ_max` of the upper bidiagonal with diagonal `alpha` and superdiagonal
/// `beta` (`beta.len() + 1 == alpha.len()`), at least `floor`.
pub fn bidiagonal_sigma_max(alpha: &[f64], beta: &[f64], floor: f64) -> f64 {
    let scale = alpha.iter().chain(beta).fold(0.0f64, |m, x| m.max(x.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    let a: Vec<f64> = alpha.iter().map(|x| x / scale).collect();
    let b: Vec<f64> = beta.iter().map(|x| x / scale).collect();
    // B^T B
    let d: Vec<f64> = (0..a.len())
        .map(|j| a[j] * a[j] + if j > 0 { b[j - 1] * b[j - 1] } else { 0.0 })
        .collect();
    let e: Vec<f64> = (0..b.len()).map(|j| a[j] * b[j]).collect();
    let f = floor / scale;
    scale * largest_eigenvalue(&d, &e, f * f).max(0.0).sqrt()
}

fn random_unit(n: usize, rng: &mut ChaCha8Rng) -> Vec<C64> {
    let mut x: Vec<C64> = (0..n)
        .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let s = norm(&x);
    scale_in_place(&mut x, 1.0 / s);
    x
}

fn single_run(op: &dyn LinearOperator, opts: &LanczosOptions, start: Vec<C64>, floor: f64) -> LanczosOutcome {
    let n = op.dim();
    let mut v = start;
    let mut u = op.apply(&v);
    let mut alpha = vec![norm(&u)];
    let mut beta: Vec<f64> = Vec::new();
    let mut estimate = alpha[0].max(floor);
    let done = |value: f64, iterations, converged, exceeded| LanczosOutcome {
        value,
        iterations,
        converged,
        exceeded,
    };
    if !estimate.is_finite() {
        return done(f64::INFINITY, 1, true, true);
    }
    if alpha[0] == 0.0 {
        return done(estimate, 1, true, false);
    }
    scale_in_place(&mut u, 1.0 / alpha[0]);
    let mut calm = 0;
    for it in 1..opts.max_iter {
        if let Some(t) = opts.stop_above {
            if estimate > t {
                return done(estimate, it, true, true);
            }
        }
        if alpha.len() >= n {
            return done(estimate, it, true, false);
        }
        let mut p = op.apply_adjoint(&u);
        axpy(&mut p, alpha[alpha.len() - 1], &v);
        let b = norm(&p);
        if !b.is_finite() {
            return done(f64::INFINITY, it, true, true);
        }
        let tiny = 1e-14 * estimate;
        if b <= tiny {
            return done(estimate, it, true, false);
        }
        scale_in_place(&mut p, 1.0 / b);
        v = p;
        let mut q = op.apply(&v);
        axpy(&mut q, b, &u);
        let a = norm(&q);
        if !a.is_finite() {
            return done(f64::INFINITY, it, true, true);
        }
        beta.push(b);
        alpha.push(a);
        let next = bidiagonal_sigma_max(&alpha, &beta, estimate).max(estimate);
        let change = (next - estimate) / next;
        estimate = next;
        if change < opts.rtol {
            calm += 1;
            if calm >= 3 {
                return done(estimate, it + 1, true, false);
            }
        } else {
            calm = 0;
        }
        if a <= 1e-14 * estimate {
            return done(estimate, it + 1, true, false);
        }
        scale_in_place(&mut q, 1.0 / a);
        u = q;
    }
    done(estimate, opts.max_iter, false, false)
}

/// Estimates `σ_max(op)`. Unconverged runs are restarted from fresh random
/// vectors; the best lower bound is kept throughout.
pub fn sigma_max(op: &dyn LinearOperator, opts: &LanczosOptions) -> LanczosOutcome {
    let n = op.dim();
    if n == 0 {
        return LanczosOutcome {
            value: 0.0,
            iterations: 0,
            converged: true,
            exceeded: false,
        };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut best = 0.0f64;
    let mut total = 0;
    for _ in 0..=opts.restarts {
        let start = random_unit(n, &mut rng);
        let out = single_run(op, opts, start, best);
        total += out.iterations;
        best = best.max(out.value);
        if out.converged {
            return LanczosOutcome {
                value: best,
                iterations: total,
                ..out
            };
        }
    }
    LanczosOutcome {
        value: best,
        iterations: total,
        converged: false,
        exceeded: false,
    }
}
