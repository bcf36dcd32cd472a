//! Symbol curves `E(u, v, w) = { u t + v + w/t : |t| = 1 }`.
//!
//! On the unit circle `1/t = conj(t)`, so the curve is the image of the circle
//! under the real-linear map `z ↦ u z + w conj(z)`, translated by `v`.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symbols::C64;

/// Relative tolerance used when none is given.
pub const DEFAULT_TOL: f64 = 1e-12;

const MAX_WINDING_SAMPLES: usize = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Orientation {
    CounterClockwise,
    Clockwise,
    /// `|u| = |w|`: the curve is a segment (or a point) traversed back and forth.
    Degenerate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PointClass {
    Interior,
    Exterior,
    OnCurve,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrientedEllipse {
    pub u: C64,
    pub v: C64,
    pub w: C64,
    pub semi_major: f64,
    pub semi_minor: f64,
    /// Direction of the major axis in radians, normalized to `[0, π)`.
    pub major_axis_angle: f64,
    pub orientation: Orientation,
    /// Row-major real matrix of `z ↦ u z + w conj(z)` acting on `(re, im)`.
    pub linmap: [[f64; 2]; 2],
}

impl OrientedEllipse {
    pub fn new(u: C64, v: C64, w: C64) -> Self {
        let (mu, mw) = (u.norm(), w.norm());
        let orientation = if mu > mw {
            Orientation::CounterClockwise
        } else if mu < mw {
            Orientation::Clockwise
        } else {
            Orientation::Degenerate
        };
        let major_axis_angle = if mu > 0.0 && mw > 0.0 {
            (0.5 * (u.arg() + w.arg())).rem_euclid(PI)
        } else {
            0.0
        };
        let (a, b, c, d) = (u.re, u.im, w.re, w.im);
        Self {
            u,
            v,
            w,
            semi_major: mu + mw,
            semi_minor: (mu - mw).abs(),
            major_axis_angle,
            orientation,
            linmap: [[a + c, d - b], [b + d, a - c]],
        }
    }

    /// `|u|² - |w|²`, the determinant of `linmap`.
    pub fn det(&self) -> f64 {
        self.u.norm_sqr() - self.w.norm_sqr()
    }

    pub fn linmap_det(&self) -> f64 {
        let m = &self.linmap;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    /// The curve point at parameter `t = e^{iθ}`.
    pub fn point(&self, theta: f64) -> C64 {
        let t = C64::from_polar(1.0, theta);
        self.u * t + self.v + self.w * t.conj()
    }

    /// `samples` equispaced boundary points, starting at `θ = 0`.
    pub fn boundary(&self, samples: usize) -> Vec<C64> {
        (0..samples)
            .map(|k| self.point(TAU * k as f64 / samples as f64))
            .collect()
    }

    /// Endpoints of the segment for a degenerate curve.
    pub fn segment(&self) -> Option<(C64, C64)> {
        if self.orientation != Orientation::Degenerate {
            return None;
        }
        let r = self.u.norm();
        let half = C64::from_polar(2.0 * r, self.major_axis_angle);
        Some((self.v - half, self.v + half))
    }

    /// Preimage of `z` on the unit-circle side: `y` with `u y + w conj(y) = z - v`.
    /// `None` for degenerate curves.
    pub fn preimage(&self, z: C64) -> Option<C64> {
        let d = self.det();
        if self.orientation == Orientation::Degenerate || d == 0.0 {
            return None;
        }
        let zeta = z - self.v;
        Some((self.u.conj() * zeta - self.w * zeta.conj()) / d)
    }

    pub fn classify(&self, z: C64) -> PointClass {
        self.classify_point(z, DEFAULT_TOL)
    }

    pub fn classify_point(&self, z: C64, tol: f64) -> PointClass {
        match self.preimage(z) {
            Some(y) => {
                let r = y.norm();
                if r < 1.0 - tol {
                    PointClass::Interior
                } else if r > 1.0 + tol {
                    PointClass::Exterior
                } else {
                    PointClass::OnCurve
                }
            }
            None => {
                let (a, b) = self.segment().expect("degenerate");
                let len = (b - a).norm();
                if segment_distance(z, a, b) <= tol * len {
                    PointClass::OnCurve
                } else {
                    PointClass::Exterior
                }
            }
        }
    }

    /// Winding number of the curve around `z` from the discretized argument
    /// increment. The sampling is refined until every step turns by less than
    /// a quarter turn, so the result is exact for off-curve points.
    pub fn winding(&self, z: C64, samples: usize) -> Result<i32> {
        if samples < 64 {
            return Err(Error::InvalidArgument(format!(
                "winding needs at least 64 samples, got {samples}"
            )));
        }
        if self.classify(z) == PointClass::OnCurve {
            return Err(Error::OnCurve);
        }
        let floor = DEFAULT_TOL * self.semi_major.max(f64::MIN_POSITIVE);
        let mut m = samples;
        loop {
            let mut total = 0.0;
            let mut fine = true;
            let mut prev = self.point(0.0) - z;
            for k in 1..=m {
                let cur = if k == m {
                    self.point(0.0) - z
                } else {
                    self.point(TAU * k as f64 / m as f64) - z
                };
                if cur.norm() <= floor {
                    return Err(Error::OnCurve);
                }
                let step = (cur / prev).arg();
                if step.abs() > 0.5 * PI {
                    fine = false;
                    break;
                }
                total += step;
                prev = cur;
            }
            if fine {
                return Ok((total / TAU).round() as i32);
            }
            if m >= MAX_WINDING_SAMPLES {
                return Err(Error::OnCurve);
            }
            m *= 2;
        }
    }
}

/// Shorthand for [`OrientedEllipse::new`].
pub fn make_ellipse(u: C64, v: C64, w: C64) -> OrientedEllipse {
    OrientedEllipse::new(u, v, w)
}

pub(crate) fn segment_distance(z: C64, a: C64, b: C64) -> f64 {
    let d = b - a;
    let l2 = d.norm_sqr();
    if l2 == 0.0 {
        return (z - a).norm();
    }
    let t = (((z - a) * d.conj()).re / l2).clamp(0.0, 1.0);
    (z - (a + d * t)).norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn axes_of_u3_wi() {
        let e = make_ellipse(c(3.0, 0.0), c(0.0, 0.0), c(0.0, 1.0));
        assert_eq!(e.semi_major, 4.0);
        assert_eq!(e.semi_minor, 2.0);
        assert!((e.major_axis_angle - FRAC_PI_4).abs() < 1e-15);
        assert_eq!(e.orientation, Orientation::CounterClockwise);
        // the extreme point along the major axis is at distance 4
        let far = C64::from_polar(4.0, FRAC_PI_4);
        assert_eq!(e.classify(far), PointClass::OnCurve);
    }

    #[test]
    fn circle_when_u_vanishes() {
        let v0 = c(1.0, -2.0);
        let w0 = c(0.0, 1.5);
        let e = make_ellipse(c(0.0, 0.0), v0, w0);
        assert_eq!(e.orientation, Orientation::Clockwise);
        assert_eq!(e.semi_major, 1.5);
        assert_eq!(e.semi_minor, 1.5);
        for p in e.boundary(37) {
            assert!(((p - v0).norm() - 1.5).abs() < 1e-14);
        }
    }

    #[test]
    fn segment_when_moduli_agree() {
        let e = make_ellipse(c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0));
        assert_eq!(e.orientation, Orientation::Degenerate);
        let (a, b) = e.segment().unwrap();
        assert_eq!((a, b), (c(-2.0, 0.0), c(2.0, 0.0)));
        assert_eq!(e.classify(c(0.5, 0.0)), PointClass::OnCurve);
        assert_eq!(e.classify(c(0.5, 0.1)), PointClass::Exterior);
        assert_eq!(e.classify(c(2.5, 0.0)), PointClass::Exterior);
        assert_eq!(e.winding(c(0.5, 0.1), 64).unwrap(), 0);
    }

    #[test]
    fn membership_examples() {
        let e = make_ellipse(c(1.0, 0.0), c(0.0, 0.0), c(2.0, 0.0));
        assert_eq!(e.classify(c(0.0, 0.0)), PointClass::Interior);
        assert_eq!(e.winding(c(0.0, 0.0), 64).unwrap(), -1);
        let e = make_ellipse(c(-1.0, 0.0), c(0.0, 0.0), c(2.0, 0.0));
        assert_eq!(e.classify(c(2.0, 0.0)), PointClass::Exterior);
        assert_eq!(e.winding(c(2.0, 0.0), 64).unwrap(), 0);
        let e = make_ellipse(c(3.0, 0.0), c(0.0, 0.0), c(1.0, 0.0));
        assert_eq!(e.winding(c(0.0, 0.0), 64).unwrap(), 1);
        assert_eq!(e.winding(c(4.5, 0.0), 64).unwrap(), 0);
    }

    #[test]
    fn linmap_determinant() {
        let e = make_ellipse(c(0.3, -1.2), c(5.0, 5.0), c(-0.7, 0.4));
        assert!((e.linmap_det() - e.det()).abs() < 1e-14);
        assert!(e.det() > 0.0);
    }

    #[test]
    fn winding_rejects_points_on_curve() {
        let e = make_ellipse(c(1.0, 0.0), c(0.0, 0.0), c(2.0, 0.0));
        assert_eq!(e.winding(c(3.0, 0.0), 64), Err(Error::OnCurve));
        assert!(e.winding(c(0.0, 0.0), 10).is_err());
    }

    #[test]
    fn point_ellipse() {
        let e = make_ellipse(c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0));
        assert_eq!(e.classify(c(0.0, 0.0)), PointClass::OnCurve);
        assert_eq!(e.classify(c(1e-9, 0.0)), PointClass::Exterior);
    }
}
