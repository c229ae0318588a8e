//! Disk geometry: boundary points, Möbius maps and non-tangential approach
//! paths toward boundary points.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// A point of the unit circle stored by its angle, with the unimodular value
/// cached so repeated use never drifts off the circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "RawBoundaryPoint")]
pub struct BoundaryPoint {
    angle: f64,
    #[serde(skip)]
    value: Complex64,
}

#[derive(Deserialize)]
struct RawBoundaryPoint {
    angle: f64,
}

impl From<RawBoundaryPoint> for BoundaryPoint {
    fn from(raw: RawBoundaryPoint) -> Self {
        Self::from_angle(raw.angle)
    }
}

impl BoundaryPoint {
    pub fn from_angle(angle: f64) -> Self {
        let angle = wrap_angle(angle);
        Self {
            angle,
            value: Complex64::from_polar(1.0, angle),
        }
    }

    pub fn from_complex(z: Complex64) -> Result<Self> {
        if !(z.norm() > 0.0) || !z.re.is_finite() || !z.im.is_finite() {
            return Err(invalid("boundary point needs a nonzero finite direction"));
        }
        Ok(Self::from_angle(z.arg()))
    }

    /// Angle in `(-pi, pi]`.
    pub fn angle(&self) -> f64 {
        self.angle
    }

    pub fn value(&self) -> Complex64 {
        self.value
    }

    /// Counterclockwise angular distance from `self` to `other`, in `[0, 2 pi)`.
    pub fn ccw_to(&self, other: &BoundaryPoint) -> f64 {
        (other.angle - self.angle).rem_euclid(2.0 * PI)
    }
}

/// Wrap an angle into `(-pi, pi]`.
pub fn wrap_angle(a: f64) -> f64 {
    let w = (a + PI).rem_euclid(2.0 * PI) - PI;
    if w <= -PI {
        w + 2.0 * PI
    } else {
        w
    }
}

/// Fractional-linear map `z -> (a z + b) / (c z + d)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MobiusMap {
    coeffs: [Complex64; 4],
    automorphism: bool,
}

impl MobiusMap {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self> {
        let det = a * d - b * c;
        if det.norm() < 1e-300 {
            return Err(invalid("Möbius map with zero determinant"));
        }
        let mut m = Self {
            coeffs: [a, b, c, d],
            automorphism: false,
        };
        m.automorphism = m.check_automorphism();
        Ok(m)
    }

    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Self {
            coeffs: [one, zero, zero, one],
            automorphism: true,
        }
    }

    /// `z -> e^{i theta} (z - p) / (1 - conj(p) z)` with `|p| < 1`.
    pub fn disk_automorphism(theta: f64, p: Complex64) -> Result<Self> {
        if !(p.norm() < 1.0) {
            return Err(invalid("automorphism base point must lie in the disk"));
        }
        let rot = Complex64::from_polar(1.0, theta);
        Ok(Self {
            coeffs: [rot, -rot * p, -p.conj(), Complex64::new(1.0, 0.0)],
            automorphism: true,
        })
    }

    /// The automorphism sending `1 -> a` and `-1 -> b`, symmetric about the
    /// bisector of the arc from `a` to `b`.
    pub fn sending_pair(a: BoundaryPoint, b: BoundaryPoint) -> Result<Self> {
        let sep = a.ccw_to(&b);
        if sep == 0.0 {
            return Err(invalid("vertices must be distinct"));
        }
        // p = i s moves 1 to e^{-2i atan s} and -1 to e^{i(pi + 2 atan s)}
        let s = ((sep - PI) / 4.0).tan();
        let base = Self::disk_automorphism(0.0, Complex64::new(0.0, s))?;
        let img1 = base.apply(Complex64::new(1.0, 0.0))?;
        let rot = a.value() / img1;
        Self::disk_automorphism(rot.arg(), Complex64::new(0.0, s))
    }

    /// The Möbius map sending `src[i] -> dst[i]`; an automorphism of the disk
    /// when both triples lie on the circle in the same cyclic order.
    pub fn from_triples(src: [Complex64; 3], dst: [Complex64; 3]) -> Result<Self> {
        // z -> cross ratio (z, p1, p2, p3), sending p1, p2, p3 to 0, 1, inf
        let cross = |p: [Complex64; 3]| {
            let u = p[1] - p[2];
            let v = p[1] - p[0];
            Self::new(u, -p[0] * u, v, -p[2] * v)
        };
        let m = cross(dst)?.inverse().compose(&cross(src)?);
        Self::new(m.coeffs[0], m.coeffs[1], m.coeffs[2], m.coeffs[3])
    }

    pub fn coefficients(&self) -> [Complex64; 4] {
        self.coeffs
    }

    pub fn is_automorphism(&self) -> bool {
        self.automorphism
    }

    fn check_automorphism(&self) -> bool {
        let probes = 12;
        let boundary_ok = (0..probes).all(|k| {
            let z = Complex64::from_polar(1.0, 2.0 * PI * (k as f64 + 0.3) / probes as f64);
            matches!(self.apply(z), Ok(w) if (w.norm() - 1.0).abs() < 1e-10)
        });
        boundary_ok && matches!(self.apply(Complex64::new(0.0, 0.0)), Ok(w) if w.norm() < 1.0)
    }

    pub fn apply(&self, z: Complex64) -> Result<Complex64> {
        let [a, b, c, d] = self.coeffs;
        let den = c * z + d;
        let scale = (c.norm() * z.norm()).max(d.norm());
        if den.norm() <= 1e-15 * scale {
            return Err(Error::Pole(z));
        }
        Ok((a * z + b) / den)
    }

    pub fn derivative(&self, z: Complex64) -> Result<Complex64> {
        let [a, b, c, d] = self.coeffs;
        let den = c * z + d;
        if den.norm() == 0.0 {
            return Err(Error::Pole(z));
        }
        Ok((a * d - b * c) / (den * den))
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &MobiusMap) -> MobiusMap {
        let [a1, b1, c1, d1] = self.coeffs;
        let [a2, b2, c2, d2] = other.coeffs;
        MobiusMap {
            coeffs: [
                a1 * a2 + b1 * c2,
                a1 * b2 + b1 * d2,
                c1 * a2 + d1 * c2,
                c1 * b2 + d1 * d2,
            ],
            automorphism: self.automorphism && other.automorphism,
        }
    }

    pub fn inverse(&self) -> MobiusMap {
        let [a, b, c, d] = self.coeffs;
        MobiusMap {
            coeffs: [d, -b, -c, a],
            automorphism: self.automorphism,
        }
    }
}

/// Angular derivative `|m'(xi)|` of a Möbius map at a boundary fixed point.
pub fn mobius_boundary_derivative(m: &MobiusMap, xi: BoundaryPoint) -> Result<f64> {
    let z = xi.value();
    let w = m.apply(z)?;
    if (w - z).norm() > 1e-12 {
        return Err(Error::NotFixed(z));
    }
    Ok(m.derivative(z)?.norm())
}

/// Sample points approaching a boundary point inside a Stolz angle.
///
/// Samples are `xi (1 - d_j e^{i offset})` with `d_j = start_gap * ratio^j`,
/// i.e. radii `r_j = 1 - (1 - r_0) ratio^j` along a ray that makes the angle
/// `offset` with the inward radius.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApproachPath {
    pub target: BoundaryPoint,
    pub opening: f64,
    pub offset: f64,
    pub gaps: Vec<f64>,
}

/// Radial path toward `xi` with `n_samples` points and geometric ratio `ratio`.
pub fn build_approach_path(xi: BoundaryPoint, opening: f64, n_samples: usize, ratio: f64) -> Result<ApproachPath> {
    ApproachPath::new(xi, opening, n_samples, ratio, 0.1, 0.0)
}

impl ApproachPath {
    pub fn new(
        xi: BoundaryPoint,
        opening: f64,
        n_samples: usize,
        ratio: f64,
        start_gap: f64,
        offset: f64,
    ) -> Result<Self> {
        if !(opening > 1e-6 && opening < PI) {
            return Err(invalid(format!("Stolz opening {opening} outside (0, pi)")));
        }
        if !(ratio > 0.0 && ratio < 1.0) {
            return Err(invalid("approach ratio must lie in (0, 1)"));
        }
        if n_samples < 3 {
            return Err(invalid("approach path needs at least 3 samples"));
        }
        if offset.abs() >= 0.5 * opening {
            return Err(invalid("approach ray lies outside the Stolz angle"));
        }
        if !(start_gap > 0.0 && start_gap < offset.cos()) {
            return Err(invalid("start gap must keep samples inside the disk"));
        }
        let gaps = (0..n_samples).map(|j| start_gap * ratio.powi(j as i32)).collect();
        Ok(Self {
            target: xi,
            opening,
            offset,
            gaps,
        })
    }

    /// Same geometry along the ray at angle `offset` from the radius.
    pub fn with_offset(&self, offset: f64) -> Result<Self> {
        let ratio = self.gaps[1] / self.gaps[0];
        Self::new(self.target, self.opening, self.gaps.len(), ratio, self.gaps[0], offset)
    }

    pub fn points(&self) -> Vec<Complex64> {
        let dir = Complex64::from_polar(1.0, self.offset);
        self.gaps
            .iter()
            .map(|&d| self.target.value() * (Complex64::new(1.0, 0.0) - dir * d))
            .collect()
    }

    pub fn radii(&self) -> Vec<f64> {
        self.points().iter().map(|z| z.norm()).collect()
    }

    /// Whether `z` lies in the open Stolz sector of this path's opening.
    pub fn in_region(&self, z: Complex64) -> bool {
        let xi = self.target.value();
        let rel = (xi - z) / xi;
        z.norm() < 1.0 && rel.norm() > 0.0 && rel.arg().abs() < 0.5 * self.opening
    }
}
