//! Plain-text and raster output.
//!
//! CSV files have a single header line and use `,` separators; floats are
//! written in shortest round-trip form. Rasters are binary netpbm files
//! (`P4`, `P5`, `P6`) with one pixel per grid point, the top image row being
//! the largest `y`.
//!
//! Region palette (RGB): `E0` white `255 255 255`, `E` light gray
//! `200 200 200`, `E1` dark gray `80 80 80`, `Em1` dark blue `60 60 140`,
//! `OnBoundary` black `0 0 0`.

use std::fmt::Write as _;

use crate::ellipse::OrientedEllipse;
use crate::grid::{ComplexGrid, GridMask};
use crate::pseudospec::ResolventField;
use crate::regions::{RegionLabel, RegionMap};
use crate::tridiag::NormEstimate;

pub fn region_rgb(label: RegionLabel) -> [u8; 3] {
    match label {
        RegionLabel::E0 => [255, 255, 255],
        RegionLabel::E => [200, 200, 200],
        RegionLabel::E1 => [80, 80, 80],
        RegionLabel::Em1 => [60, 60, 140],
        RegionLabel::OnBoundary => [0, 0, 0],
    }
}

/// Grid indices in image order: rows from top (`y1`) to bottom, left to right.
fn image_order(grid: &ComplexGrid) -> impl Iterator<Item = usize> + '_ {
    (0..grid.ny)
        .rev()
        .flat_map(move |j| (0..grid.nx).map(move |i| j * grid.nx + i))
}

/// `re,im` per boundary sample.
pub fn curve_csv(e: &OrientedEllipse, samples: usize) -> String {
    let mut s = String::from("re,im\n");
    for p in e.boundary(samples) {
        let _ = writeln!(s, "{},{}", p.re, p.im);
    }
    s
}

/// `x,y,label` per grid point in grid order.
pub fn region_csv(map: &RegionMap) -> String {
    let mut s = String::from("x,y,label\n");
    for (k, l) in map.labels.iter().enumerate() {
        let p = map.grid.point(k);
        let _ = writeln!(s, "{},{},{}", p.re, p.im, l.name());
    }
    s
}

/// Binary `P6` image of a region map.
pub fn region_ppm(map: &RegionMap) -> Vec<u8> {
    let g = &map.grid;
    let mut out = format!("P6\n{} {}\n255\n", g.nx, g.ny).into_bytes();
    for k in image_order(g) {
        out.extend_from_slice(&region_rgb(map.labels[k]));
    }
    out
}

/// `x,y,value,lower_bound,infinite`; infinite values are written as the
/// largest finite value with `infinite = 1`.
pub fn field_csv(field: &ResolventField) -> String {
    let cap = field.max_finite();
    let mut s = String::from("x,y,value,lower_bound,infinite\n");
    for (k, &v) in field.values.iter().enumerate() {
        let p = field.grid.point(k);
        let inf = v.is_infinite();
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            p.re,
            p.im,
            if inf { cap } else { v },
            field.lower_bound[k] as u8,
            inf as u8
        );
    }
    s
}

/// Binary `P5` image of `log10` of the field, scaled linearly so the
/// smallest positive value is black and the largest (infinite capped) is
/// white.
pub fn field_pgm(field: &ResolventField) -> Vec<u8> {
    let g = &field.grid;
    let logs: Vec<f64> = field
        .values
        .iter()
        .map(|&v| if v > 0.0 { v.log10() } else { f64::NAN })
        .collect();
    let finite = logs.iter().copied().filter(|x| x.is_finite());
    let lo = finite.clone().fold(f64::INFINITY, f64::min);
    let hi = finite.fold(f64::NEG_INFINITY, f64::max);
    let span = if hi > lo { hi - lo } else { 1.0 };
    let mut out = format!("P5\n{} {}\n255\n", g.nx, g.ny).into_bytes();
    for k in image_order(g) {
        let x = logs[k];
        let level = if x.is_nan() {
            0.0
        } else if x.is_infinite() {
            255.0
        } else {
            ((x - lo) / span * 255.0).round()
        };
        out.push(level.clamp(0.0, 255.0) as u8);
    }
    out
}

/// `x,y` per member point in grid order.
pub fn mask_csv(mask: &GridMask) -> String {
    let mut s = String::from("x,y\n");
    for p in mask.points() {
        let _ = writeln!(s, "{},{}", p.re, p.im);
    }
    s
}

/// Binary `P4` bitmap; members are black (bit 1).
pub fn mask_pbm(mask: &GridMask) -> Vec<u8> {
    let g = &mask.grid;
    let mut out = format!("P4\n{} {}\n", g.nx, g.ny).into_bytes();
    let row_bytes = g.nx.div_ceil(8);
    for j in (0..g.ny).rev() {
        let mut row = vec![0u8; row_bytes];
        for i in 0..g.nx {
            if mask.bits[j * g.nx + i] {
                row[i / 8] |= 0x80 >> (i % 8);
            }
        }
        out.extend_from_slice(&row);
    }
    out
}

/// `n,value,certified_lower,iterations`.
pub fn profile_csv(sizes: &[usize], profile: &[NormEstimate]) -> String {
    let mut s = String::from("n,value,certified_lower,iterations\n");
    for (n, e) in sizes.iter().zip(profile) {
        let _ = writeln!(s, "{},{},{},{}", n, e.value, e.certified_lower as u8, e.iterations);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regions::region_map;
    use crate::symbols::{SymbolTriple, C64};

    #[test]
    fn ppm_layout() {
        let t = SymbolTriple::real(&[0.0], &[0.0], &[1.0]).unwrap();
        let g = ComplexGrid::new(-2.0, 0.0, -2.0, 0.0, 3, 2).unwrap();
        let m = region_map(&t, &g);
        let img = region_ppm(&m);
        let header = b"P6\n3 2\n255\n";
        assert_eq!(&img[..header.len()], header);
        assert_eq!(img.len(), header.len() + 18);
        // top-right pixel is the origin, inside the unit circle
        assert_eq!(&img[header.len() + 6..header.len() + 9], &[80, 80, 80]);
        assert!(region_csv(&m).starts_with("x,y,label\n-2,-2,E0\n"));
    }

    #[test]
    fn pbm_packs_bits() {
        let g = ComplexGrid::new(0.0, 9.0, 0.0, 1.0, 10, 2).unwrap();
        let m = GridMask::from_fn(g, |z: C64| z.im > 0.5 && z.re < 0.5);
        let img = mask_pbm(&m);
        let header = b"P4\n10 2\n";
        assert_eq!(&img[header.len()..], &[0x80, 0, 0, 0]);
        assert_eq!(mask_csv(&m), "x,y\n0,1\n");
    }
}
