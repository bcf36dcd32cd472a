//! The partition of the plane by the symbol ellipses of a triple.
//!
//! With `E(U,V,W)` the family of all ellipses `E(u,v,w)`:
//! - `E0`: outside every ellipse,
//! - `E1`: inside every ellipse, all of them clockwise (`|u| < |w|`),
//! - `Em1`: inside every ellipse, all of them counter-clockwise,
//! - `E`: the rest, including every point on some curve.
//!
//! `E ⊂ Σ ⊂ E ∪ E1 ∪ Em1`, and the spectrum of the one-sided operators is
//! `Σ₊ = Σ ∪ E∩`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ellipse::{segment_distance, Orientation, OrientedEllipse, PointClass, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::grid::{ComplexGrid, GridMask};
use crate::symbols::{SymbolTriple, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegionLabel {
    E0,
    E,
    E1,
    Em1,
    OnBoundary,
}

impl RegionLabel {
    pub fn name(self) -> &'static str {
        match self {
            RegionLabel::E0 => "E0",
            RegionLabel::E => "E",
            RegionLabel::E1 => "E1",
            RegionLabel::Em1 => "Em1",
            RegionLabel::OnBoundary => "OnBoundary",
        }
    }

    /// `OnBoundary` folded into `E`.
    pub fn folded(self) -> Self {
        match self {
            RegionLabel::OnBoundary => RegionLabel::E,
            l => l,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum IndexClass {
    /// If `A - λ` is Fredholm, its index is this value.
    Kappa(i8),
    /// `λ ∈ E ⊂ Σ`: no operator over the shifted triple is Fredholm.
    NotFredholmCandidate,
}

/// All ellipses of a triple, precomputed for repeated queries.
#[derive(Clone, Debug)]
pub struct EllipseFamily {
    pub ellipses: Vec<OrientedEllipse>,
}

impl EllipseFamily {
    pub fn new(triple: &SymbolTriple) -> Self {
        Self {
            ellipses: triple
                .iter_symbols()
                .map(|(u, v, w)| OrientedEllipse::new(u, v, w))
                .collect(),
        }
    }

    pub fn classify(&self, lambda: C64, tol: f64) -> RegionLabel {
        let mut all_out = true;
        let mut all_in = true;
        let mut all_cw = true;
        let mut all_ccw = true;
        for e in &self.ellipses {
            match e.classify_point(lambda, tol) {
                PointClass::OnCurve => return RegionLabel::OnBoundary,
                PointClass::Interior => all_out = false,
                PointClass::Exterior => all_in = false,
            }
            all_cw &= e.orientation == Orientation::Clockwise;
            all_ccw &= e.orientation == Orientation::CounterClockwise;
        }
        if all_out {
            RegionLabel::E0
        } else if all_in && all_cw {
            RegionLabel::E1
        } else if all_in && all_ccw {
            RegionLabel::Em1
        } else {
            RegionLabel::E
        }
    }

    /// `λ ∈ E∪`: inside or on some filled ellipse.
    pub fn in_union(&self, lambda: C64, tol: f64) -> bool {
        self.ellipses
            .iter()
            .any(|e| e.classify_point(lambda, tol) != PointClass::Exterior)
    }

    /// `λ ∈ E∩`: strictly inside every ellipse.
    pub fn in_intersection(&self, lambda: C64, tol: f64) -> bool {
        self.ellipses
            .iter()
            .all(|e| e.classify_point(lambda, tol) == PointClass::Interior)
    }
}

pub fn classify_region(triple: &SymbolTriple, lambda: C64, tol: f64) -> RegionLabel {
    EllipseFamily::new(triple).classify(lambda, tol)
}

pub fn kappa_at(triple: &SymbolTriple, lambda: C64) -> IndexClass {
    match classify_region(triple, lambda, DEFAULT_TOL) {
        RegionLabel::E0 => IndexClass::Kappa(0),
        RegionLabel::E1 => IndexClass::Kappa(1),
        RegionLabel::Em1 => IndexClass::Kappa(-1),
        RegionLabel::E | RegionLabel::OnBoundary => IndexClass::NotFredholmCandidate,
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionCounts {
    pub e0: usize,
    pub e: usize,
    pub e1: usize,
    pub em1: usize,
    pub on_boundary: usize,
}

impl RegionCounts {
    /// Size of `E` with boundary points included.
    pub fn e_folded(&self) -> usize {
        self.e + self.on_boundary
    }

    pub fn total(&self) -> usize {
        self.e0 + self.e + self.e1 + self.em1 + self.on_boundary
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionMap {
    pub grid: ComplexGrid,
    pub labels: Vec<RegionLabel>,
    pub triple: SymbolTriple,
}

impl RegionMap {
    pub fn counts(&self) -> RegionCounts {
        let mut c = RegionCounts::default();
        for l in &self.labels {
            match l {
                RegionLabel::E0 => c.e0 += 1,
                RegionLabel::E => c.e += 1,
                RegionLabel::E1 => c.e1 += 1,
                RegionLabel::Em1 => c.em1 += 1,
                RegionLabel::OnBoundary => c.on_boundary += 1,
            }
        }
        c
    }

    pub fn mask(&self, pred: impl Fn(RegionLabel) -> bool) -> GridMask {
        GridMask::new(self.grid, self.labels.iter().map(|&l| pred(l)).collect())
    }

    pub fn label_at(&self, lambda: C64) -> Option<RegionLabel> {
        self.grid.nearest(lambda).map(|k| self.labels[k])
    }
}

pub fn region_map(triple: &SymbolTriple, grid: &ComplexGrid) -> RegionMap {
    let fam = EllipseFamily::new(triple);
    RegionMap {
        grid: *grid,
        labels: grid.map(|z| fam.classify(z, DEFAULT_TOL)),
        triple: triple.clone(),
    }
}

/// `min_v |λ - v| ≤ u* + w*`. A `false` answer proves `λ ∉ Σ₊`.
pub fn upper_bound_contains(triple: &SymbolTriple, lambda: C64) -> bool {
    let r = triple.u_star_max + triple.w_star_max;
    triple.v().iter().any(|&v| (lambda - v).norm() <= r)
}

/// Adds the grid points of `E1 ∪ Em1` to an estimate of `Σ`, giving `Σ₊`.
pub fn gap_compose(sigma_estimate: &GridMask, triple: &SymbolTriple) -> GridMask {
    let fam = EllipseFamily::new(triple);
    let extra = GridMask::from_fn(sigma_estimate.grid, |z| {
        matches!(fam.classify(z, DEFAULT_TOL), RegionLabel::E1 | RegionLabel::Em1)
    });
    sigma_estimate.union(&extra)
}

/// Exact `Σ` and `Σ₊` on a grid when one off-diagonal alphabet is `{0}`.
///
/// With `U = {0}` the curves are circles `v + wT` and
/// `Σ₊ = ∪_v (v + w* D̄)`, `Σ = Σ₊ \ ∩_v (v + w_* D)`. The returned `Σ` keeps
/// every point whose cell meets `Σ`, so a curve renders as a band one
/// cell wide instead of missing the lattice.
pub fn bidiagonal_spectra(triple: &SymbolTriple, grid: &ComplexGrid) -> Result<(GridMask, GridMask)> {
    let zero = |xs: &[C64]| xs.len() == 1 && xs[0] == C64::new(0.0, 0.0);
    let (r_max, r_min) = if zero(triple.u()) {
        (triple.w_star_max, triple.w_star_min)
    } else if zero(triple.w()) {
        (triple.u_star_max, triple.u_star_min)
    } else {
        return Err(Error::InvalidArgument(
            "exact spectra need U = {0} or W = {0}".into(),
        ));
    };
    let v = triple.v().to_vec();
    let h = grid.half_diagonal();
    let sigma_plus = GridMask::from_fn(*grid, |z| v.iter().any(|&c| (z - c).norm() <= r_max));
    let deep = GridMask::from_fn(*grid, |z| v.iter().all(|&c| (z - c).norm() < r_min - h));
    Ok((sigma_plus.difference(&deep), sigma_plus))
}

/// Convex polygon with counter-clockwise vertices (possibly a segment or a point).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvexPolygon {
    pub vertices: Vec<C64>,
}

impl ConvexPolygon {
    /// Convex hull by the monotone chain.
    pub fn hull(points: &[C64]) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptySet);
        }
        let mut pts = points.to_vec();
        pts.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        pts.dedup();
        if pts.len() < 3 {
            return Ok(Self { vertices: pts });
        }
        let cross = |o: C64, a: C64, b: C64| (a - o).re * (b - o).im - (a - o).im * (b - o).re;
        let mut lower: Vec<C64> = Vec::new();
        for &p in &pts {
            while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
                lower.pop();
            }
            lower.push(p);
        }
        let mut upper: Vec<C64> = Vec::new();
        for &p in pts.iter().rev() {
            while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
                upper.pop();
            }
            upper.push(p);
        }
        lower.pop();
        upper.pop();
        lower.extend(upper);
        Ok(Self { vertices: lower })
    }

    /// Distance from `z` to the polygon, `0` inside.
    pub fn distance(&self, z: C64) -> f64 {
        let v = &self.vertices;
        match v.len() {
            1 => return (z - v[0]).norm(),
            2 => return segment_distance(z, v[0], v[1]),
            _ => {}
        }
        let n = v.len();
        let mut inside = true;
        let mut best = f64::INFINITY;
        for k in 0..n {
            let (a, b) = (v[k], v[(k + 1) % n]);
            let cr = (b - a).re * (z - a).im - (b - a).im * (z - a).re;
            if cr < 0.0 {
                inside = false;
            }
            best = best.min(segment_distance(z, a, b));
        }
        if inside {
            0.0
        } else {
            best
        }
    }

    pub fn contains(&self, z: C64, tol: f64) -> bool {
        self.distance(z) <= tol
    }
}

/// Hull of `samples` boundary points per ellipse; `conv(E∪)` from inside.
///
/// The true hull is within [`hull_slack`] of the returned polygon.
pub fn hull_bound(triple: &SymbolTriple, samples: usize) -> ConvexPolygon {
    let samples = samples.max(3);
    let pts: Vec<C64> = EllipseFamily::new(triple)
        .ellipses
        .par_iter()
        .flat_map_iter(|e| e.boundary(samples))
        .collect();
    ConvexPolygon::hull(&pts).expect("triples are non-empty")
}

/// Worst gap between an ellipse and its `samples`-gon for this triple.
pub fn hull_slack(triple: &SymbolTriple, samples: usize) -> f64 {
    let a = triple.u_star_max + triple.w_star_max;
    a * (1.0 - (std::f64::consts::PI / samples.max(3) as f64).cos())
}
