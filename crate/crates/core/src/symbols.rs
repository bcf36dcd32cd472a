//! Alphabets, reproducible diagonal streams and finite Jacobi matrices.
//!
//! A Jacobi matrix over `(U, V, W)` carries `u_i` on the subdiagonal at
//! `(i, i-1)`, `v_i` on the main diagonal and `w_i` on the superdiagonal at
//! `(i, i+1)`, every entry drawn from its alphabet.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// The three finite alphabets with cached modulus extremes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TripleRepr", into = "TripleRepr")]
pub struct SymbolTriple {
    u: Vec<C64>,
    v: Vec<C64>,
    w: Vec<C64>,
    pub u_star_max: f64,
    pub u_star_min: f64,
    pub w_star_max: f64,
    pub w_star_min: f64,
    pub v_star_max: f64,
}

#[derive(Serialize, Deserialize)]
struct TripleRepr {
    #[serde(rename = "U")]
    u: Vec<[f64; 2]>,
    #[serde(rename = "V")]
    v: Vec<[f64; 2]>,
    #[serde(rename = "W")]
    w: Vec<[f64; 2]>,
}

impl TryFrom<TripleRepr> for SymbolTriple {
    type Error = Error;

    fn try_from(r: TripleRepr) -> Result<Self> {
        let conv = |xs: Vec<[f64; 2]>| xs.into_iter().map(|[a, b]| C64::new(a, b)).collect();
        SymbolTriple::new(conv(r.u), conv(r.v), conv(r.w))
    }
}

impl From<SymbolTriple> for TripleRepr {
    fn from(t: SymbolTriple) -> Self {
        let conv = |xs: &[C64]| xs.iter().map(|z| [z.re, z.im]).collect();
        TripleRepr {
            u: conv(&t.u),
            v: conv(&t.v),
            w: conv(&t.w),
        }
    }
}

fn dedup_bitwise(xs: Vec<C64>) -> Vec<C64> {
    let mut out: Vec<C64> = Vec::with_capacity(xs.len());
    for z in xs {
        let seen = out
            .iter()
            .any(|y| y.re.to_bits() == z.re.to_bits() && y.im.to_bits() == z.im.to_bits());
        if !seen {
            out.push(z);
        }
    }
    out
}

fn extremes(xs: &[C64]) -> (f64, f64) {
    xs.iter().fold((0.0f64, f64::INFINITY), |(hi, lo), z| {
        let m = z.norm();
        (hi.max(m), lo.min(m))
    })
}

impl SymbolTriple {
    /// Builds a triple; duplicate entries (bitwise equal) are dropped.
    pub fn new(u: Vec<C64>, v: Vec<C64>, w: Vec<C64>) -> Result<Self> {
        for (name, xs) in [("U", &u), ("V", &v), ("W", &w)] {
            if xs.is_empty() {
                return Err(Error::InvalidAlphabet(format!("{name} is empty")));
            }
            if xs.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::InvalidAlphabet(format!("{name} has a non-finite entry")));
            }
        }
        let (u, v, w) = (dedup_bitwise(u), dedup_bitwise(v), dedup_bitwise(w));
        let (u_star_max, u_star_min) = extremes(&u);
        let (w_star_max, w_star_min) = extremes(&w);
        let (v_star_max, _) = extremes(&v);
        Ok(Self {
            u,
            v,
            w,
            u_star_max,
            u_star_min,
            w_star_max,
            w_star_min,
            v_star_max,
        })
    }

    /// Convenience constructor for real alphabets.
    pub fn real(u: &[f64], v: &[f64], w: &[f64]) -> Result<Self> {
        let c = |xs: &[f64]| xs.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::new(c(u), c(v), c(w))
    }

    pub fn u(&self) -> &[C64] {
        &self.u
    }

    pub fn v(&self) -> &[C64] {
        &self.v
    }

    pub fn w(&self) -> &[C64] {
        &self.w
    }

    /// `(U, V - lambda, W)`.
    pub fn shifted(&self, lambda: C64) -> Self {
        let v = self.v.iter().map(|&z| z - lambda).collect();
        Self::new(self.u.clone(), v, self.w.clone()).expect("shift preserves validity")
    }

    /// `(W, V, U)`: the alphabets of transposed matrices.
    pub fn transposed(&self) -> Self {
        Self::new(self.w.clone(), self.v.clone(), self.u.clone()).expect("valid")
    }

    /// True when every cached extreme matches a fresh recomputation.
    pub fn extremes_consistent(&self) -> bool {
        let (umax, umin) = extremes(&self.u);
        let (wmax, wmin) = extremes(&self.w);
        let (vmax, _) = extremes(&self.v);
        umax == self.u_star_max
            && umin == self.u_star_min
            && wmax == self.w_star_max
            && wmin == self.w_star_min
            && vmax == self.v_star_max
    }

    pub fn contains_u(&self, z: C64) -> bool {
        self.u.contains(&z)
    }

    pub fn contains_v(&self, z: C64) -> bool {
        self.v.contains(&z)
    }

    pub fn contains_w(&self, z: C64) -> bool {
        self.w.contains(&z)
    }

    /// Number of ellipses `|U|·|V|·|W|`.
    pub fn combinations(&self) -> usize {
        self.u.len() * self.v.len() * self.w.len()
    }

    /// Iterates all `(u, v, w)` combinations.
    pub fn iter_symbols(&self) -> impl Iterator<Item = (C64, C64, C64)> + '_ {
        self.u.iter().flat_map(move |&u| {
            self.v
                .iter()
                .flat_map(move |&v| self.w.iter().map(move |&w| (u, v, w)))
        })
    }

    /// Parses either the text form `U = [-1, 1]; V = [0]; W = [2+0i]` or a
    /// JSON object `{"U": [[re, im], ...], "V": ..., "W": ...}`.
    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.starts_with('{') {
            return serde_json::from_str(t).map_err(|e| Error::Parse(e.to_string()));
        }
        let mut parts: [Option<Vec<C64>>; 3] = [None, None, None];
        for clause in t.split(';').map(str::trim).filter(|c| !c.is_empty()) {
            let (name, list) = clause
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected NAME = [...] in `{clause}`")))?;
            let slot = match name.trim() {
                "U" | "u" => 0,
                "V" | "v" => 1,
                "W" | "w" => 2,
                other => return Err(Error::Parse(format!("unknown alphabet `{other}`"))),
            };
            if parts[slot].is_some() {
                return Err(Error::Parse(format!("alphabet `{}` given twice", name.trim())));
            }
            let list = list.trim();
            let inner = list
                .strip_prefix('[')
                .and_then(|l| l.strip_suffix(']'))
                .ok_or_else(|| Error::Parse(format!("expected [...] in `{clause}`")))?;
            let values = inner
                .split(',')
                .map(str::trim)
                .filter(|x| !x.is_empty())
                .map(parse_complex)
                .collect::<Result<Vec<_>>>()?;
            parts[slot] = Some(values);
        }
        let [u, v, w] = parts;
        let missing = |n: &str| Error::Parse(format!("alphabet {n} missing"));
        Self::new(
            u.ok_or_else(|| missing("U"))?,
            v.ok_or_else(|| missing("V"))?,
            w.ok_or_else(|| missing("W"))?,
        )
    }
}

impl FromStr for SymbolTriple {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

impl fmt::Display for SymbolTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |xs: &[C64]| {
            xs.iter()
                .map(|&z| format_complex(z))
                .collect::<Vec<_>>()
                .join(", ")
        };
        write!(
            f,
            "U = [{}]; V = [{}]; W = [{}]",
            list(&self.u),
            list(&self.v),
            list(&self.w)
        )
    }
}

/// Formats `a+bi` with shortest round-trip decimals; pure reals omit the
/// imaginary part.
pub fn format_complex(z: C64) -> String {
    if z.im == 0.0 && z.im.is_sign_positive() {
        format!("{}", z.re)
    } else if z.im.is_sign_negative() {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

/// Parses complex literals such as `2`, `-1.5`, `3i`, `-i`, `1+2i`, `1e-3-2.5i`.
pub fn parse_complex(s: &str) -> Result<C64> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::Parse(format!("bad complex literal `{s}`"));
    if s.is_empty() {
        return Err(bad());
    }
    let Some(body) = s.strip_suffix('i').or_else(|| s.strip_suffix('j')) else {
        return s.parse::<f64>().map(|x| C64::new(x, 0.0)).map_err(|_| bad());
    };
    // Split at the last sign that is not the leading one and not an exponent sign.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let imag = |t: &str| -> Result<f64> {
        match t {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => t.parse::<f64>().map_err(|_| bad()),
        }
    };
    match split {
        Some(k) => {
            let re = body[..k].parse::<f64>().map_err(|_| bad())?;
            Ok(C64::new(re, imag(&body[k..])?))
        }
        None => Ok(C64::new(0.0, imag(body)?)),
    }
}

/// Samples a closed parametrized curve `t ∈ [0, 1) ↦ z(t)` at `samples`
/// equispaced parameters, giving a finite alphabet.
pub fn discretize_curve(samples: usize, curve: impl Fn(f64) -> C64) -> Vec<C64> {
    (0..samples)
        .map(|k| curve(k as f64 / samples as f64))
        .collect()
}

/// Reproducible infinite sequence of `(u_i, v_i, w_i)`, addressable at any
/// row index `i ∈ ℤ`.
///
/// Entries are drawn uniformly and independently per index, which makes the
/// infinite matrix pseudoergodic with probability one. The generator is
/// counter-based: ChaCha8 keyed by `seed`, one stream per diagonal, word
/// position derived from `i + index_origin`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagonalStream {
    pub triple: SymbolTriple,
    pub seed: u64,
    #[serde(default)]
    pub index_origin: i64,
}

const STREAM_U: u64 = 0x5553;
const STREAM_V: u64 = 0x5653;
const STREAM_W: u64 = 0x5753;

fn counter_position(i: i64) -> u128 {
    // monotone map ℤ → [0, 2^64), two 32-bit words per draw
    ((i as i128 + (1i128 << 63)) as u128) * 2
}

fn pick(alphabet: &[C64], x: u64) -> C64 {
    let k = ((x as u128 * alphabet.len() as u128) >> 64) as usize;
    alphabet[k]
}

impl DiagonalStream {
    pub fn new(triple: SymbolTriple, seed: u64) -> Self {
        Self {
            triple,
            seed,
            index_origin: 0,
        }
    }

    pub fn with_origin(mut self, origin: i64) -> Self {
        self.index_origin = origin;
        self
    }

    fn draws(&self, stream: u64, alphabet: &[C64], lo: i64, count: usize) -> Vec<C64> {
        if alphabet.len() == 1 {
            return vec![alphabet[0]; count];
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng.set_word_pos(counter_position(lo.wrapping_add(self.index_origin)));
        (0..count).map(|_| pick(alphabet, rng.next_u64())).collect()
    }

    pub fn u_at(&self, i: i64) -> C64 {
        self.draws(STREAM_U, &self.triple.u, i, 1)[0]
    }

    pub fn v_at(&self, i: i64) -> C64 {
        self.draws(STREAM_V, &self.triple.v, i, 1)[0]
    }

    pub fn w_at(&self, i: i64) -> C64 {
        self.draws(STREAM_W, &self.triple.w, i, 1)[0]
    }

    /// Row `i` of the infinite matrix as `(u_i, v_i, w_i)`.
    pub fn entry(&self, i: i64) -> (C64, C64, C64) {
        (self.u_at(i), self.v_at(i), self.w_at(i))
    }

    /// Consecutive `u_lo..u_{lo+count-1}` (and likewise for `v`, `w`).
    pub fn u_range(&self, lo: i64, count: usize) -> Vec<C64> {
        self.draws(STREAM_U, &self.triple.u, lo, count)
    }

    pub fn v_range(&self, lo: i64, count: usize) -> Vec<C64> {
        self.draws(STREAM_V, &self.triple.v, lo, count)
    }

    pub fn w_range(&self, lo: i64, count: usize) -> Vec<C64> {
        self.draws(STREAM_W, &self.triple.w, lo, count)
    }

    /// Principal submatrix over rows and columns `lo..=hi`.
    pub fn window(&self, lo: i64, hi: i64) -> Result<FiniteJacobi> {
        if lo > hi {
            return Err(Error::InvalidArgument(format!("window {lo}..{hi} is empty")));
        }
        let n = (hi - lo + 1) as usize;
        FiniteJacobi::new(
            self.u_range(lo + 1, n - 1),
            self.v_range(lo, n),
            self.w_range(lo, n - 1),
        )
    }
}

/// `n × n` tridiagonal matrix stored by diagonals.
///
/// `sub[k]` sits at `(k+1, k)`, `sup[k]` at `(k, k+1)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiniteJacobi {
    pub sub: Vec<C64>,
    pub main: Vec<C64>,
    pub sup: Vec<C64>,
}

impl FiniteJacobi {
    pub fn new(sub: Vec<C64>, main: Vec<C64>, sup: Vec<C64>) -> Result<Self> {
        let n = main.len();
        if n == 0 {
            return Err(Error::InvalidArgument("matrix size must be at least 1".into()));
        }
        if sub.len() + 1 != n || sup.len() + 1 != n {
            return Err(Error::InvalidArgument(format!(
                "diagonal lengths {}/{}/{} do not fit n = {n}",
                sub.len(),
                main.len(),
                sup.len()
            )));
        }
        Ok(Self { sub, main, sup })
    }

    /// Constant-diagonal (Toeplitz) matrix.
    pub fn toeplitz(n: usize, u: C64, v: C64, w: C64) -> Self {
        assert!(n >= 1, "matrix size must be at least 1");
        Self {
            sub: vec![u; n - 1],
            main: vec![v; n],
            sup: vec![w; n - 1],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::toeplitz(n, C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0))
    }

    pub fn n(&self) -> usize {
        self.main.len()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        match j as isize - i as isize {
            0 => self.main[i],
            -1 => self.sub[j],
            1 => self.sup[i],
            _ => C64::new(0.0, 0.0),
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<C64>> {
        let n = self.n();
        (0..n).map(|i| (0..n).map(|j| self.get(i, j)).collect()).collect()
    }

    /// `J x`.
    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        let n = self.n();
        assert_eq!(x.len(), n);
        (0..n)
            .map(|i| {
                let mut s = self.main[i] * x[i];
                if i > 0 {
                    s += self.sub[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    s += self.sup[i] * x[i + 1];
                }
                s
            })
            .collect()
    }

    /// `J^* x`.
    pub fn apply_adjoint(&self, x: &[C64]) -> Vec<C64> {
        self.conj_transpose().apply(x)
    }

    pub fn transpose(&self) -> Self {
        Self {
            sub: self.sup.clone(),
            main: self.main.clone(),
            sup: self.sub.clone(),
        }
    }

    pub fn conj_transpose(&self) -> Self {
        let c = |xs: &[C64]| xs.iter().map(|z| z.conj()).collect();
        Self {
            sub: c(&self.sup),
            main: c(&self.main),
            sup: c(&self.sub),
        }
    }

    /// `J - λI`.
    pub fn shift_lambda(&self, lambda: C64) -> Self {
        let mut out = self.clone();
        out.main.iter_mut().for_each(|z| *z -= lambda);
        out
    }

    /// `R_n J^⊤ R_n` with `R_n` the flip; reverses each diagonal in place.
    pub fn reflect(&self) -> Self {
        let rev = |xs: &[C64]| xs.iter().rev().copied().collect();
        Self {
            sub: rev(&self.sub),
            main: rev(&self.main),
            sup: rev(&self.sup),
        }
    }

    /// True when every entry lies in its alphabet.
    pub fn is_over(&self, triple: &SymbolTriple) -> bool {
        self.sub.iter().all(|&z| triple.contains_u(z))
            && self.main.iter().all(|&z| triple.contains_v(z))
            && self.sup.iter().all(|&z| triple.contains_w(z))
    }
}

/// Uniform reproducible sample from `M_n(U, V, W)`.
pub fn sample_finite(triple: &SymbolTriple, n: usize, seed: u64) -> Result<FiniteJacobi> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    DiagonalStream::new(triple.clone(), seed).window(1, n as i64)
}

/// Cardinality of `M_n(U, V, W)`, saturating at `u128::MAX`.
pub fn count_finite(triple: &SymbolTriple, n: usize) -> u128 {
    let pow = |b: usize, e: usize| {
        (0..e).try_fold(1u128, |acc, _| acc.checked_mul(b as u128))
    };
    let (nu, nv, nw) = (triple.u.len(), triple.v.len(), triple.w.len());
    pow(nu, n.saturating_sub(1))
        .and_then(|a| pow(nv, n).and_then(|b| a.checked_mul(b)))
        .and_then(|a| pow(nw, n.saturating_sub(1)).and_then(|b| a.checked_mul(b)))
        .unwrap_or(u128::MAX)
}

/// Enumerates every matrix of `M_n(U, V, W)` in mixed-radix order.
pub fn enumerate_finite(triple: &SymbolTriple, n: usize) -> impl Iterator<Item = FiniteJacobi> + '_ {
    let total = count_finite(triple, n);
    let m = n.saturating_sub(1);
    let radices: Vec<usize> = std::iter::repeat_n(triple.u.len(), m)
        .chain(std::iter::repeat_n(triple.v.len(), n))
        .chain(std::iter::repeat_n(triple.w.len(), m))
        .collect();
    (0..total).map(move |mut code| {
        let digits: Vec<usize> = radices
            .iter()
            .map(|&r| {
                let d = (code % r as u128) as usize;
                code /= r as u128;
                d
            })
            .collect();
        FiniteJacobi {
            sub: digits[..m].iter().map(|&d| triple.u[d]).collect(),
            main: digits[m..m + n].iter().map(|&d| triple.v[d]).collect(),
            sup: digits[m + n..].iter().map(|&d| triple.w[d]).collect(),
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn singleton_alphabets_force_the_matrix() {
        let t = SymbolTriple::real(&[5.0], &[5.0], &[5.0]).unwrap();
        for seed in [0, 1, 99] {
            let j = sample_finite(&t, 2, seed).unwrap();
            assert_eq!(j.sub, vec![c(5.0)]);
            assert_eq!(j.main, vec![c(5.0), c(5.0)]);
            assert_eq!(j.sup, vec![c(5.0)]);
        }
    }

    #[test]
    fn signed_u_sample_is_reproducible() {
        let t = SymbolTriple::real(&[-1.0, 1.0], &[0.0], &[2.0]).unwrap();
        let a = sample_finite(&t, 3, 7).unwrap();
        let b = sample_finite(&t, 3, 7).unwrap();
        assert_eq!(a.main, vec![c(0.0); 3]);
        assert_eq!(a.sup, vec![c(2.0); 2]);
        assert!(a.sub.iter().all(|z| *z == c(1.0) || *z == c(-1.0)));
        assert_eq!(a, b);
        assert!(a.is_over(&t));
    }

    #[test]
    fn window_of_singletons() {
        let t = SymbolTriple::real(&[1.0], &[2.0], &[3.0]).unwrap();
        let s = DiagonalStream::new(t, 0);
        let j = s.window(1, 3).unwrap();
        assert_eq!(j.sub, vec![c(1.0); 2]);
        assert_eq!(j.main, vec![c(2.0); 3]);
        assert_eq!(j.sup, vec![c(3.0); 2]);
        let one = s.window(-4, -4).unwrap();
        assert_eq!(one.n(), 1);
        assert_eq!(one.main[0], s.v_at(-4));
    }

    #[test]
    fn nested_windows_agree() {
        let t = SymbolTriple::real(&[-1.0, 1.0, 0.5], &[0.0, 2.0], &[2.0, 3.0]).unwrap();
        let s = DiagonalStream::new(t, 42).with_origin(-17);
        let big = s.window(-3, 9).unwrap();
        let small = s.window(2, 6).unwrap();
        for i in 0..small.n() {
            for j in 0..small.n() {
                assert_eq!(small.get(i, j), big.get(i + 5, j + 5));
            }
        }
        assert!(s.window(3, 2).is_err());
    }

    #[test]
    fn shift_and_reflect() {
        let j = FiniteJacobi::new(vec![c(1.0), c(2.0)], vec![c(0.0); 3], vec![c(3.0), c(4.0)]).unwrap();
        let s = j.shift_lambda(c(2.0));
        assert_eq!(s.main, vec![c(-2.0); 3]);
        assert_eq!(j.shift_lambda(c(0.0)), j);
        assert_eq!(s.shift_lambda(c(-2.0)), j);

        let r = j.reflect();
        assert_eq!(r.sub, vec![c(2.0), c(1.0)]);
        assert_eq!(r.sup, vec![c(4.0), c(3.0)]);
        assert_eq!(r.reflect(), j);
        // entrywise definition R J^T R
        let n = j.n();
        for a in 0..n {
            for b in 0..n {
                assert_eq!(r.get(a, b), j.get(n - 1 - b, n - 1 - a));
            }
        }
    }

    #[test]
    fn parse_text_and_json() {
        let t = SymbolTriple::parse("U = [-1, 1]; V = [0]; W = [2+0i]").unwrap();
        assert_eq!(t.u(), &[c(-1.0), c(1.0)]);
        assert_eq!(t.w(), &[c(2.0)]);
        assert_eq!(t.u_star_max, 1.0);
        assert_eq!(t.w_star_min, 2.0);
        let compact: SymbolTriple = "U=[-1,1];V=[0];W=[2]".parse().unwrap();
        assert_eq!(compact, t);
        let json = r#"{"U": [[-1, 0], [1, 0]], "V": [[0, 0]], "W": [[2, 0]]}"#;
        assert_eq!(SymbolTriple::parse(json).unwrap(), t);
        let back = SymbolTriple::parse(&serde_json::to_string(&t).unwrap()).unwrap();
        assert_eq!(back, t);
        assert_eq!(SymbolTriple::parse(&t.to_string()).unwrap(), t);

        assert!(SymbolTriple::parse("U=[1]; V=[0]").is_err());
        assert!(SymbolTriple::parse("U=[]; V=[0]; W=[1]").is_err());
        assert!(SymbolTriple::parse("U=[x]; V=[0]; W=[1]").is_err());
    }

    #[test]
    fn complex_literals() {
        let cases = [
            ("3", C64::new(3.0, 0.0)),
            ("-1.5", C64::new(-1.5, 0.0)),
            ("2i", C64::new(0.0, 2.0)),
            ("i", C64::new(0.0, 1.0)),
            ("-i", C64::new(0.0, -1.0)),
            ("1+2i", C64::new(1.0, 2.0)),
            ("1 - i", C64::new(1.0, -1.0)),
            ("1e-3-2.5i", C64::new(1e-3, -2.5)),
            ("-2e+1+1e-2i", C64::new(-20.0, 0.01)),
        ];
        for (s, z) in cases {
            assert_eq!(parse_complex(s).unwrap(), z, "{s}");
        }
        assert!(parse_complex("").is_err());
        assert!(parse_complex("1+2").is_err());
    }

    #[test]
    fn duplicates_are_dropped() {
        let t = SymbolTriple::real(&[1.0, 1.0, -1.0], &[0.0], &[2.0, 2.0]).unwrap();
        assert_eq!(t.u().len(), 2);
        assert_eq!(t.w().len(), 1);
        assert!(t.extremes_consistent());
    }

    #[test]
    fn enumeration_covers_m_n() {
        let t = SymbolTriple::real(&[-1.0, 1.0], &[0.0, 3.0], &[2.0]).unwrap();
        let all: Vec<_> = enumerate_finite(&t, 3).collect();
        assert_eq!(all.len() as u128, count_finite(&t, 3));
        assert_eq!(all.len(), 4 * 8);
        assert!(all.iter().all(|j| j.is_over(&t)));
        for (k, a) in all.iter().enumerate() {
            assert!(all[k + 1..].iter().all(|b| b != a));
        }
    }
}
