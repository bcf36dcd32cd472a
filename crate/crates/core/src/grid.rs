//! Regular lattices in the complex plane, boolean masks over them, and
//! Hausdorff distances.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symbols::C64;

/// `nx × ny` lattice over `[x0, x1] × [y0, y1]`, endpoints included.
///
/// Point `k = j * nx + i` sits at `(x0 + i dx, y0 + j dy)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexGrid {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
    pub nx: usize,
    pub ny: usize,
}

impl ComplexGrid {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64, nx: usize, ny: usize) -> Result<Self> {
        if ![x0, x1, y0, y1].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidGrid("bounds must be finite".into()));
        }
        if !(x0 < x1 && y0 < y1) {
            return Err(Error::InvalidGrid(format!(
                "need x0 < x1 and y0 < y1, got [{x0}, {x1}] x [{y0}, {y1}]"
            )));
        }
        if nx < 2 || ny < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 points per axis, got {nx} x {ny}")));
        }
        Ok(Self { x0, x1, y0, y1, nx, ny })
    }

    /// Square grid `[-r, r]²` with `n` points per axis.
    pub fn square(r: f64, n: usize) -> Result<Self> {
        Self::new(-r, r, -r, r, n, n)
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dx(&self) -> f64 {
        (self.x1 - self.x0) / (self.nx - 1) as f64
    }

    pub fn dy(&self) -> f64 {
        (self.y1 - self.y0) / (self.ny - 1) as f64
    }

    /// The larger lattice spacing.
    pub fn cell(&self) -> f64 {
        self.dx().max(self.dy())
    }

    /// Half the diagonal of a lattice cell.
    pub fn half_diagonal(&self) -> f64 {
        0.5 * self.dx().hypot(self.dy())
    }

    pub fn x(&self, i: usize) -> f64 {
        if i + 1 == self.nx {
            self.x1
        } else {
            self.x0 + i as f64 * self.dx()
        }
    }

    pub fn y(&self, j: usize) -> f64 {
        if j + 1 == self.ny {
            self.y1
        } else {
            self.y0 + j as f64 * self.dy()
        }
    }

    pub fn point(&self, k: usize) -> C64 {
        C64::new(self.x(k % self.nx), self.y(k / self.nx))
    }

    pub fn points(&self) -> impl Iterator<Item = C64> + '_ {
        (0..self.len()).map(|k| self.point(k))
    }

    /// Evaluates `f` at every lattice point, in parallel, in index order.
    pub fn map<T: Send>(&self, f: impl Fn(C64) -> T + Sync + Send) -> Vec<T> {
        (0..self.len()).into_par_iter().map(|k| f(self.point(k))).collect()
    }

    /// Index of the lattice point nearest to `z`, if `z` is inside the rectangle.
    pub fn nearest(&self, z: C64) -> Option<usize> {
        let fi = ((z.re - self.x0) / self.dx()).round();
        let fj = ((z.im - self.y0) / self.dy()).round();
        if fi < 0.0 || fj < 0.0 || fi >= self.nx as f64 || fj >= self.ny as f64 {
            return None;
        }
        Some(fj as usize * self.nx + fi as usize)
    }
}

/// Subset of a grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridMask {
    pub grid: ComplexGrid,
    pub bits: Vec<bool>,
}

impl GridMask {
    pub fn new(grid: ComplexGrid, bits: Vec<bool>) -> Self {
        assert_eq!(bits.len(), grid.len(), "mask length must match the grid");
        Self { grid, bits }
    }

    pub fn from_fn(grid: ComplexGrid, f: impl Fn(C64) -> bool + Sync + Send) -> Self {
        Self::new(grid, grid.map(f))
    }

    pub fn empty(grid: ComplexGrid) -> Self {
        Self::new(grid, vec![false; grid.len()])
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }

    pub fn contains(&self, k: usize) -> bool {
        self.bits[k]
    }

    pub fn points(&self) -> Vec<C64> {
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(k, _)| self.grid.point(k))
            .collect()
    }

    fn zip(&self, other: &Self, f: impl Fn(bool, bool) -> bool) -> Self {
        assert_eq!(self.grid, other.grid, "masks live on different grids");
        Self::new(
            self.grid,
            self.bits.iter().zip(&other.bits).map(|(&a, &b)| f(a, b)).collect(),
        )
    }

    pub fn union(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a || b)
    }

    pub fn intersection(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a && b)
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a && !b)
    }

    pub fn complement(&self) -> Self {
        Self::new(self.grid, self.bits.iter().map(|b| !b).collect())
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.bits.iter().zip(&other.bits).all(|(&a, &b)| !a || b)
    }

    /// Squared Euclidean distance from every lattice point to the mask
    /// (`+inf` everywhere if the mask is empty).
    pub fn distance_sq(&self) -> Vec<f64> {
        let g = &self.grid;
        let (nx, ny) = (g.nx, g.ny);
        let mut f: Vec<f64> = self
            .bits
            .iter()
            .map(|&b| if b { 0.0 } else { f64::INFINITY })
            .collect();
        f.par_chunks_mut(nx).for_each(|row| {
            let out = envelope_1d(row, g.dx());
            row.copy_from_slice(&out);
        });
        let cols: Vec<Vec<f64>> = (0..nx)
            .into_par_iter()
            .map(|i| {
                let col: Vec<f64> = (0..ny).map(|j| f[j * nx + i]).collect();
                envelope_1d(&col, g.dy())
            })
            .collect();
        for (i, col) in cols.iter().enumerate() {
            for (j, v) in col.iter().enumerate() {
                f[j * nx + i] = *v;
            }
        }
        f
    }

    /// Points within distance `r` of the mask (up to rounding).
    pub fn dilate(&self, r: f64) -> Self {
        let r2 = r * r * (1.0 + 1e-9);
        Self::new(self.grid, self.distance_sq().into_iter().map(|d| d <= r2).collect())
    }

    /// Points of the mask farther than `r` from its complement (up to rounding).
    pub fn erode(&self, r: f64) -> Self {
        let r2 = r * r * (1.0 + 1e-9);
        let d = self.complement().distance_sq();
        Self::new(
            self.grid,
            self.bits.iter().zip(d).map(|(&b, d)| b && d > r2).collect(),
        )
    }

    /// `sup_{a ∈ self} dist(a, other)`.
    pub fn directed_hausdorff(&self, other: &Self) -> Result<f64> {
        assert_eq!(self.grid, other.grid, "masks live on different grids");
        if self.is_empty() || other.is_empty() {
            return Err(Error::EmptySet);
        }
        let d = other.distance_sq();
        let worst = self
            .bits
            .iter()
            .zip(d)
            .filter(|(&b, _)| b)
            .fold(0.0f64, |m, (_, d)| m.max(d));
        Ok(worst.sqrt())
    }

    /// Exact Hausdorff distance between two masks on the same grid.
    pub fn hausdorff(&self, other: &Self) -> Result<f64> {
        Ok(self.directed_hausdorff(other)?.max(other.directed_hausdorff(self)?))
    }
}

/// Lower envelope of parabolas: `out[q] = min_p (q - p)² h² + f[p]`.
fn envelope_1d(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    let pos = |p: usize| p as f64 * h;
    let mut v: Vec<usize> = Vec::with_capacity(n);
    let mut z: Vec<f64> = Vec::with_capacity(n + 1);
    for q in 0..n {
        if !f[q].is_finite() {
            continue;
        }
        let fq = f[q] + pos(q) * pos(q);
        loop {
            match v.last() {
                None => {
                    v.push(q);
                    z.clear();
                    z.push(f64::NEG_INFINITY);
                    break;
                }
                Some(&p) => {
                    let fp = f[p] + pos(p) * pos(p);
                    let s = (fq - fp) / (2.0 * (pos(q) - pos(p)));
                    if s <= z[z.len() - 1] {
                        v.pop();
                        z.pop();
                        if v.is_empty() {
                            continue;
                        }
                    } else {
                        v.push(q);
                        z.push(s);
                        break;
                    }
                }
            }
        }
    }
    if v.is_empty() {
        return vec![f64::INFINITY; n];
    }
    let mut out = vec![0.0; n];
    let mut k = 0;
    for (q, o) in out.iter_mut().enumerate() {
        let x = pos(q);
        while k + 1 < v.len() && z[k + 1] < x {
            k += 1;
        }
        let d = x - pos(v[k]);
        *o = d * d + f[v[k]];
    }
    out
}

/// `sup_{a ∈ A} dist(a, B)`, exact, with early termination of inner scans.
pub fn directed_hausdorff(a: &[C64], b: &[C64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet);
    }
    let chunk = 256;
    let worst = a
        .par_chunks(chunk)
        .map(|part| {
            let mut cmax = 0.0f64;
            for &p in part {
                let mut cmin = f64::INFINITY;
                for &q in b {
                    let d = (p - q).norm_sqr();
                    if d < cmin {
                        cmin = d;
                        if cmin < cmax {
                            break;
                        }
                    }
                }
                cmax = cmax.max(cmin);
            }
            cmax
        })
        .reduce(|| 0.0, f64::max);
    Ok(worst.sqrt())
}

/// Hausdorff distance `max(sup_A dist(·, B), sup_B dist(·, A))` of finite sets.
pub fn hausdorff(a: &[C64], b: &[C64]) -> Result<f64> {
    Ok(directed_hausdorff(a, b)?.max(directed_hausdorff(b, a)?))
}
