//! Resolvent norms of finite sections on grids, ε-pseudospectra and their
//! convergence as the section grows.
//!
//! `spec_ε B = { λ : ‖(B - λ)⁻¹‖ > 1/ε }`, with `‖(B - λ)⁻¹‖ = ∞` on the
//! spectrum.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
pub use crate::grid::{directed_hausdorff, hausdorff, ComplexGrid, GridMask};
use crate::regions::{hull_bound, hull_slack, ConvexPolygon, EllipseFamily};
use crate::ellipse::DEFAULT_TOL;
use crate::symbols::{DiagonalStream, SymbolTriple, C64};
use crate::tridiag::{inv_norm_band, BandMatrix, LanczosOptions, NormEstimate, NormKind};

/// Boundary samples per ellipse for the hull used in pruning and checks.
pub const HULL_SAMPLES: usize = 1024;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResolventField {
    pub grid: ComplexGrid,
    /// `‖(A_n - λ)⁻¹‖` per grid point, `+inf` where singular.
    pub values: Vec<f64>,
    /// The value at this point is only a lower bound.
    pub lower_bound: Vec<bool>,
    pub n: usize,
    pub kind: NormKind,
    pub seed: u64,
    pub triple: SymbolTriple,
}

impl ResolventField {
    pub fn failures(&self) -> usize {
        self.lower_bound.iter().filter(|&&b| b).count()
    }

    /// Largest finite value (`0` if none).
    pub fn max_finite(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .filter(|v| v.is_finite())
            .fold(0.0, f64::max)
    }
}

fn evaluate(a: &BandMatrix, lambda: C64, kind: NormKind, opts: &LanczosOptions) -> NormEstimate {
    let mut shifted = a.clone();
    for i in 0..a.n() {
        shifted.set(i, i, a.get(i, i) - lambda);
    }
    match inv_norm_band(&shifted, kind, opts) {
        Ok(e) => e,
        Err(Error::ConvergenceFailure { best }) => best,
        Err(_) => NormEstimate::infinite(kind),
    }
}

/// `‖(window(stream, 1, n) - λ)⁻¹‖` at every grid point.
pub fn resolvent_field(
    stream: &DiagonalStream,
    n: usize,
    grid: &ComplexGrid,
    kind: NormKind,
) -> Result<ResolventField> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let a = BandMatrix::from(&stream.window(1, n as i64)?);
    let opts = LanczosOptions::default();
    let est = grid.map(|z| evaluate(&a, z, kind, &opts));
    Ok(ResolventField {
        grid: *grid,
        values: est.iter().map(|e| e.value).collect(),
        lower_bound: est.iter().map(|e| e.certified_lower && e.value.is_finite()).collect(),
        n,
        kind,
        seed: stream.seed,
        triple: stream.triple.clone(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpsSet {
    pub eps: f64,
    /// Threshold `≥ 1/ε` instead of `> 1/ε`.
    pub closed: bool,
    pub mask: GridMask,
}

impl EpsSet {
    pub fn count(&self) -> usize {
        self.mask.count()
    }
}

/// Thresholds a field at `1/ε`.
pub fn eps_set(field: &ResolventField, eps: f64, closed: bool) -> Result<EpsSet> {
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument(format!("eps must be positive, got {eps}")));
    }
    let t = 1.0 / eps;
    let bits = field
        .values
        .iter()
        .map(|&v| if closed { v >= t } else { v > t })
        .collect();
    Ok(EpsSet {
        eps,
        closed,
        mask: GridMask::new(field.grid, bits),
    })
}

/// `spec_ε(A_n)` at `P2` without computing the full field.
///
/// Points farther than `ε` from `conv(E∪)` are skipped: the numerical range
/// of every section lies in that hull, which bounds the resolvent by the
/// reciprocal distance. Elsewhere the iteration stops once its lower bound
/// passes `1/ε`.
pub fn eps_set_direct(stream: &DiagonalStream, n: usize, grid: &ComplexGrid, eps: f64) -> Result<EpsSet> {
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument(format!("eps must be positive, got {eps}")));
    }
    let a = BandMatrix::from(&stream.window(1, n as i64)?);
    let hull = hull_bound(&stream.triple, HULL_SAMPLES);
    let slack = hull_slack(&stream.triple, HULL_SAMPLES);
    let t = 1.0 / eps;
    let opts = LanczosOptions {
        stop_above: Some(t),
        ..Default::default()
    };
    let bits = grid.map(|z| {
        if hull.distance(z) - slack >= eps {
            return false;
        }
        evaluate(&a, z, NormKind::P2, &opts).value > t
    });
    Ok(EpsSet {
        eps,
        closed: false,
        mask: GridMask::new(*grid, bits),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepOptions {
    pub kind: NormKind,
    /// Relative slack when comparing a section's field with the largest one.
    pub rtol: f64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            kind: NormKind::P2,
            rtol: 0.05,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub sizes: Vec<usize>,
    pub eps: f64,
    pub counts: Vec<usize>,
    /// Points per size whose value exceeds the largest section's by more than `rtol`.
    pub inclusion_violations: Vec<usize>,
    /// Sizes at which the member count dropped below the previous one.
    pub count_decreases: Vec<usize>,
    /// Hausdorff distance between consecutive ε-sets (`None` if one is empty).
    pub hausdorff_steps: Vec<Option<f64>>,
    pub cell: f64,
}

pub fn convergence_sweep(
    stream: &DiagonalStream,
    grid: &ComplexGrid,
    eps: f64,
    sizes: &[usize],
    opts: &SweepOptions,
) -> Result<(SweepReport, Vec<ResolventField>)> {
    check_sizes(sizes)?;
    let fields = sizes
        .iter()
        .map(|&n| resolvent_field(stream, n, grid, opts.kind))
        .collect::<Result<Vec<_>>>()?;
    Ok((sweep_report(&fields, eps, opts.rtol)?, fields))
}

fn check_sizes(sizes: &[usize]) -> Result<()> {
    if sizes.is_empty() || sizes[0] == 0 || sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("sizes must be positive and increasing".into()));
    }
    Ok(())
}

/// Sweep diagnostics from fields already computed on one grid, ordered by
/// increasing size; the last field stands in for the limit.
pub fn sweep_report(fields: &[ResolventField], eps: f64, rtol: f64) -> Result<SweepReport> {
    let sizes: Vec<usize> = fields.iter().map(|f| f.n).collect();
    check_sizes(&sizes)?;
    let grid = fields[0].grid;
    if fields.iter().any(|f| f.grid != grid) {
        return Err(Error::InvalidArgument("fields live on different grids".into()));
    }
    let sets = fields
        .iter()
        .map(|f| eps_set(f, eps, false))
        .collect::<Result<Vec<_>>>()?;
    let limit = fields.last().expect("non-empty");
    let inclusion_violations = fields
        .iter()
        .map(|f| {
            f.values
                .iter()
                .zip(&limit.values)
                .filter(|(&v, &l)| v > l * (1.0 + rtol))
                .count()
        })
        .collect();
    let counts: Vec<usize> = sets.iter().map(EpsSet::count).collect();
    let count_decreases = sizes
        .iter()
        .skip(1)
        .zip(counts.windows(2))
        .filter(|(_, w)| w[1] < w[0])
        .map(|(&n, _)| n)
        .collect();
    let hausdorff_steps = sets
        .windows(2)
        .map(|w| w[0].mask.hausdorff(&w[1].mask).ok())
        .collect();
    Ok(SweepReport {
        sizes,
        eps,
        counts,
        inclusion_violations,
        count_decreases,
        hausdorff_steps,
        cell: grid.cell(),
    })
}

/// `E∪ ⊕ εD ⊂ spec_ε ⊂ conv(E∪) ⊕ εD` at `P2`, checked on the grid with
/// one cell of slack on each side.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SandwichReport {
    pub eps: f64,
    pub members: usize,
    /// Points of the eroded inner set.
    pub inner_total: usize,
    /// Inner points that are not members (finite-section undershoot).
    pub inner_missing: usize,
    /// Members outside the dilated outer set; must be zero for every `n`.
    pub outer_violations: usize,
}

impl SandwichReport {
    pub fn outer_holds(&self) -> bool {
        self.outer_violations == 0
    }
}

/// `E∪ ⊕ εD` on the grid.
pub fn union_plus_disk(triple: &SymbolTriple, grid: &ComplexGrid, eps: f64) -> GridMask {
    let fam = EllipseFamily::new(triple);
    GridMask::from_fn(*grid, |z| fam.in_union(z, DEFAULT_TOL)).dilate(eps)
}

/// `conv(E∪) ⊕ rD` on the grid, from the sampled hull.
pub fn hull_plus_disk(hull: &ConvexPolygon, grid: &ComplexGrid, r: f64) -> GridMask {
    GridMask::from_fn(*grid, |z| hull.distance(z) <= r)
}

pub fn sandwich_check(triple: &SymbolTriple, set: &EpsSet) -> SandwichReport {
    let grid = set.mask.grid;
    let cell = grid.cell();
    let inner = union_plus_disk(triple, &grid, set.eps).erode(cell);
    let hull = hull_bound(triple, HULL_SAMPLES);
    let outer = hull_plus_disk(&hull, &grid, set.eps + cell + hull_slack(triple, HULL_SAMPLES));
    let missing = inner
        .bits
        .par_iter()
        .zip(&set.mask.bits)
        .filter(|(&i, &m)| i && !m)
        .count();
    SandwichReport {
        eps: set.eps,
        members: set.count(),
        inner_total: inner.count(),
        inner_missing: missing,
        outer_violations: set.mask.difference(&outer).count(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn diag_stream() -> DiagonalStream {
        DiagonalStream::new(SymbolTriple::real(&[0.0], &[0.5], &[0.0]).unwrap(), 0)
    }

    #[test]
    fn diagonal_field_is_exact() {
        let g = ComplexGrid::square(1.0, 9).unwrap();
        for kind in [NormKind::P1, NormKind::P2, NormKind::Pinf] {
            let f = resolvent_field(&diag_stream(), 6, &g, kind).unwrap();
            for (k, v) in f.values.iter().enumerate() {
                let exact = 1.0 / (g.point(k) - c(0.5, 0.0)).norm();
                if exact.is_finite() {
                    assert!((v - exact).abs() <= 1e-10 * exact, "{kind:?} {k}");
                } else {
                    assert!(v.is_infinite());
                }
            }
            let s = eps_set(&f, 0.5, false).unwrap();
            for k in 0..g.len() {
                assert_eq!(s.mask.contains(k), (g.point(k) - c(0.5, 0.0)).norm() < 0.5);
            }
        }
    }

    #[test]
    fn nilpotent_sections() {
        let s = DiagonalStream::new(SymbolTriple::real(&[0.0], &[0.0], &[1.0]).unwrap(), 0);
        let g = ComplexGrid::new(-2.0, 2.0, -1.0, 1.0, 5, 3).unwrap();
        let f = resolvent_field(&s, 8, &g, NormKind::P2).unwrap();
        let at = |z: C64| f.values[g.nearest(z).unwrap()];
        assert!(at(c(0.0, 0.0)).is_infinite());
        assert!(at(c(2.0, 0.0)) <= 1.0 + 1e-12);
    }

    #[test]
    fn eps_sets_nest() {
        let s = DiagonalStream::new(SymbolTriple::real(&[-1.0, 1.0], &[0.0], &[2.0]).unwrap(), 5);
        let g = ComplexGrid::square(3.5, 21).unwrap();
        let f = resolvent_field(&s, 30, &g, NormKind::P2).unwrap();
        let a = eps_set(&f, 0.05, false).unwrap();
        let b = eps_set(&f, 0.2, false).unwrap();
        assert!(a.mask.is_subset(&b.mask));
        assert!(eps_set(&f, 0.0, false).is_err());
        let direct = eps_set_direct(&s, 30, &g, 0.2).unwrap();
        assert_eq!(direct.mask, b.mask);
    }
}
