//! Boundary fixed points of holomorphic self-maps of the disk: angular
//! derivatives, classification and the Denjoy-Wolff point.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::geometry::{build_approach_path, ApproachPath, BoundaryPoint, MobiusMap};
use crate::koenigs::SemigroupElement;
use crate::numerics::extrapolate_limit;

/// Evaluation contract for a holomorphic `φ: 𝔻 -> 𝔻`.
pub trait SelfMapEvaluator {
    fn eval(&self, z: Complex64) -> Result<Complex64>;

    /// Largest `|φ(z)|` over a polar sample grid; fails if any sample leaves
    /// the disk.
    fn max_modulus_check(&self) -> Result<f64> {
        let mut worst = 0.0f64;
        for i in 0..12 {
            let r = 0.95 * (i as f64 + 1.0) / 12.0;
            for j in 0..24 {
                let z = Complex64::from_polar(r, 2.0 * PI * j as f64 / 24.0);
                let w = self.eval(z)?;
                if !(w.norm() < 1.0) {
                    return Err(Error::OutsideDomain(w));
                }
                worst = worst.max(w.norm());
            }
        }
        Ok(worst)
    }
}

impl<T: SelfMapEvaluator + ?Sized> SelfMapEvaluator for &T {
    fn eval(&self, z: Complex64) -> Result<Complex64> {
        (**self).eval(z)
    }
}

impl SelfMapEvaluator for MobiusMap {
    fn eval(&self, z: Complex64) -> Result<Complex64> {
        self.apply(z)
    }
}

impl SelfMapEvaluator for SemigroupElement<'_> {
    fn eval(&self, z: Complex64) -> Result<Complex64> {
        self.apply(z)
    }
}

/// Wraps a closed-form expression.
pub struct ClosureMap<F>(pub F);

impl<F: Fn(Complex64) -> Complex64> SelfMapEvaluator for ClosureMap<F> {
    fn eval(&self, z: Complex64) -> Result<Complex64> {
        Ok((self.0)(z))
    }
}

/// `outer ∘ inner`.
pub struct Composition<A, B> {
    pub outer: A,
    pub inner: B,
}

impl<A: SelfMapEvaluator, B: SelfMapEvaluator> SelfMapEvaluator for Composition<A, B> {
    fn eval(&self, z: Complex64) -> Result<Complex64> {
        self.outer.eval(self.inner.eval(z)?)
    }
}

/// Samples of `φ(r ξ)` along one radius, interpolated in `log(1 - r)`.
///
/// Only points on the tabulated radius can be evaluated.
#[derive(Debug, Clone)]
pub struct TabulatedRadial {
    direction: BoundaryPoint,
    // (log(1 - r), value), increasing in r
    table: Vec<(f64, Complex64)>,
}

impl TabulatedRadial {
    /// Requires at least 8 samples, reaching `1 - r <= 1e-3`, with
    /// consecutive gaps `1 - r` shrinking by at most a factor 4.
    pub fn new(direction: BoundaryPoint, samples: &[(f64, Complex64)]) -> Result<Self> {
        if samples.len() < 8 {
            return Err(invalid("tabulated map needs at least 8 samples"));
        }
        let mut table: Vec<(f64, Complex64)> = Vec::with_capacity(samples.len());
        for &(r, v) in samples {
            if !(r > 0.0 && r < 1.0) || !(v.norm() < 1.0) {
                return Err(invalid("tabulated samples must lie in the disk"));
            }
            table.push(((1.0 - r).ln(), v));
        }
        table.sort_by(|a, b| b.0.total_cmp(&a.0));
        if table.windows(2).any(|w| w[0].0 - w[1].0 > 4f64.ln() || w[0].0 == w[1].0) {
            return Err(invalid("tabulated samples are too sparse near the boundary"));
        }
        if table.last().map(|t| t.0).unwrap_or(0.0) > (1e-3f64).ln() {
            return Err(invalid("tabulated samples do not approach the boundary"));
        }
        Ok(Self { direction, table })
    }
}

impl SelfMapEvaluator for TabulatedRadial {
    fn eval(&self, z: Complex64) -> Result<Complex64> {
        let rel = z / self.direction.value();
        if rel.im.abs() > 1e-12 * rel.norm().max(1e-300) || rel.re <= 0.0 {
            return Err(invalid("tabulated map evaluated off its radius"));
        }
        let s = (1.0 - rel.re).ln();
        let n = self.table.len();
        let (first, last) = (self.table[0].0, self.table[n - 1].0);
        if s > first + 1e-12 || s < last - 1e-12 {
            return Err(invalid("tabulated map evaluated outside its range"));
        }
        let idx = self.table.iter().position(|t| t.0 <= s).unwrap_or(n - 1);
        let start = idx.saturating_sub(2).min(n - 4);
        // cubic Lagrange
        let pts = &self.table[start..start + 4];
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, (si, vi)) in pts.iter().enumerate() {
            let mut l = 1.0;
            for (j, (sj, _)) in pts.iter().enumerate() {
                if i != j {
                    l *= (s - sj) / (si - sj);
                }
            }
            acc += *vi * l;
        }
        Ok(acc)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FixedPointClass {
    Attractive,
    Neutral,
    Repulsive,
    NonRegular,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryFixedPoint {
    pub location: BoundaryPoint,
    /// `f64::INFINITY` when the angular derivative is infinite.
    pub multiplier: f64,
    pub error: f64,
    pub class: FixedPointClass,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngularOptions {
    pub infinity_threshold: f64,
    pub neutral_band: f64,
    pub fixed_tolerance: f64,
    /// Shrink the path so that `|φ'(ξ)| · gap` stays small.
    pub auto_scale: bool,
}

impl Default for AngularOptions {
    fn default() -> Self {
        Self {
            infinity_threshold: 1e8,
            neutral_band: 1e-9,
            fixed_tolerance: 1e-6,
            auto_scale: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AngularDerivative {
    pub multiplier: f64,
    pub error: f64,
    pub infinite: bool,
    pub non_regular: bool,
    /// Gaps `|z_j - ξ|` actually used.
    pub gaps: Vec<f64>,
}

const MIN_START_GAP: f64 = 1e-6;

fn quotient<E: SelfMapEvaluator>(phi: &E, xi: Complex64, dir: Complex64, d: f64) -> Result<(Complex64, Complex64)> {
    let step = -xi * dir * d;
    let value = phi.eval(xi + step)?;
    Ok((value, (value - xi) / step))
}

/// Angular derivative `∠lim (φ(z) - ξ)/(z - ξ)` from samples on `path`,
/// extrapolated to the boundary.
pub fn estimate_angular_derivative<E: SelfMapEvaluator>(
    phi: &E,
    xi: BoundaryPoint,
    path: &ApproachPath,
    opts: &AngularOptions,
) -> Result<AngularDerivative> {
    let x = xi.value();
    let dir = Complex64::from_polar(1.0, path.offset);
    let n = path.gaps.len();
    let ratio = path.gaps[1] / path.gaps[0];
    let mut start = path.gaps[0];
    if opts.auto_scale {
        for _ in 0..6 {
            let (_, q) = quotient(phi, x, dir, start)?;
            let target = 0.05 / q.norm().max(1.0);
            if target >= 0.5 * start {
                break;
            }
            start = target;
        }
    }
    // shrink the path until the samples settle on ξ
    let (gaps, quotients) = loop {
        let gaps: Vec<f64> = (0..n).map(|j| start * ratio.powi(j as i32)).collect();
        let mut values = Vec::with_capacity(n);
        let mut quotients = Vec::with_capacity(n);
        for &d in &gaps {
            let (v, q) = quotient(phi, x, dir, d)?;
            values.push((d, v));
            quotients.push((d, q));
        }
        let limit = extrapolate_limit(&values)?;
        let last_gap = (values[n - 1].1 - x).norm();
        if (limit.value - x).norm() <= opts.fixed_tolerance || last_gap <= opts.fixed_tolerance {
            break (gaps, quotients);
        }
        if !opts.auto_scale || start < MIN_START_GAP {
            return Err(Error::NotBoundaryFixed(x));
        }
        start /= 16.0;
    };

    let q_last = quotients[n - 1].1.norm();
    if q_last > opts.infinity_threshold || !q_last.is_finite() {
        return Ok(AngularDerivative {
            multiplier: f64::INFINITY,
            error: f64::INFINITY,
            infinite: true,
            non_regular: true,
            gaps,
        });
    }
    let ex = extrapolate_limit(&quotients)?;
    let roundoff = 16.0 * f64::EPSILON * (1.0 + ex.value.norm()) / gaps[n - 1];
    let error = ex.error.max(ex.value.im.abs()) + roundoff;
    let multiplier = ex.value.re;
    let non_regular = ex.non_monotone || !(multiplier > 0.0) || error > 0.1 * multiplier.abs();
    Ok(AngularDerivative {
        multiplier,
        error,
        infinite: false,
        non_regular,
        gaps,
    })
}

/// Radial estimate with the default path (10 samples, ratio 1/2).
pub fn radial_angular_derivative<E: SelfMapEvaluator>(phi: &E, xi: BoundaryPoint) -> Result<AngularDerivative> {
    let path = build_approach_path(xi, PI / 3.0, 10, 0.5)?;
    estimate_angular_derivative(phi, xi, &path, &AngularOptions::default())
}

pub fn classify(multiplier: f64, opts: &AngularOptions) -> Result<FixedPointClass> {
    if multiplier.is_nan() || multiplier <= 0.0 {
        return Err(invalid(format!("boundary multiplier {multiplier} must be positive")));
    }
    Ok(if multiplier.is_infinite() {
        FixedPointClass::NonRegular
    } else if (multiplier - 1.0).abs() <= opts.neutral_band {
        FixedPointClass::Neutral
    } else if multiplier < 1.0 {
        FixedPointClass::Attractive
    } else {
        FixedPointClass::Repulsive
    })
}

/// Estimate and classify the boundary fixed point `xi` along the radius.
pub fn analyze_fixed_point<E: SelfMapEvaluator>(
    phi: &E,
    xi: BoundaryPoint,
    opts: &AngularOptions,
) -> Result<BoundaryFixedPoint> {
    let path = build_approach_path(xi, PI / 3.0, 10, 0.5)?;
    let est = estimate_angular_derivative(phi, xi, &path, opts)?;
    let class = if est.non_regular {
        FixedPointClass::NonRegular
    } else {
        classify(est.multiplier, opts)?
    };
    Ok(BoundaryFixedPoint {
        location: xi,
        multiplier: est.multiplier,
        error: est.error,
        class,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DenjoyWolffPoint {
    Interior { point: Complex64, derivative: Complex64 },
    Boundary(BoundaryFixedPoint),
}

impl DenjoyWolffPoint {
    pub fn point(&self) -> Complex64 {
        match self {
            DenjoyWolffPoint::Interior { point, .. } => *point,
            DenjoyWolffPoint::Boundary(b) => b.location.value(),
        }
    }

    pub fn multiplier(&self) -> f64 {
        match self {
            DenjoyWolffPoint::Interior { derivative, .. } => derivative.norm(),
            DenjoyWolffPoint::Boundary(b) => b.multiplier,
        }
    }
}

const MAX_ORBIT: usize = 20_000;

/// Iterate `φ` from the origin until the orbit settles (interior point) or
/// reaches `1 - |z| < 1e-8` (boundary point).
///
/// The caller asserts that `φ` is not an elliptic automorphism.
pub fn find_denjoy_wolff<E: SelfMapEvaluator>(phi: &E, opts: &AngularOptions) -> Result<DenjoyWolffPoint> {
    let mut orbit = vec![Complex64::new(0.0, 0.0)];
    for _ in 0..MAX_ORBIT {
        let z = *orbit.last().expect("orbit is never empty");
        let next = phi.eval(z)?;
        if !(next.norm() < 1.0) {
            return Err(Error::OutsideDomain(next));
        }
        orbit.push(next);
        let step = (next - z).norm();
        if 1.0 - next.norm() < 1e-8 {
            return boundary_limit(phi, &orbit, opts);
        }
        if step < 1e-10 {
            if 1.0 - next.norm() < 1e-6 {
                return boundary_limit(phi, &orbit, opts);
            }
            let h = 1e-5 * (1.0 - next.norm()).min(1.0);
            let dp = phi.eval(next + h)?;
            let dm = phi.eval(next - h)?;
            return Ok(DenjoyWolffPoint::Interior {
                point: next,
                derivative: (dp - dm) / (2.0 * h),
            });
        }
    }
    Err(Error::PossibleRotation(MAX_ORBIT))
}

fn boundary_limit<E: SelfMapEvaluator>(phi: &E, orbit: &[Complex64], opts: &AngularOptions) -> Result<DenjoyWolffPoint> {
    let n = orbit.len();
    let mut guess = orbit[n - 1] / orbit[n - 1].norm();
    if n >= 3 {
        // Aitken acceleration of the last three iterates
        let (z0, z1, z2) = (orbit[n - 3], orbit[n - 2], orbit[n - 1]);
        let denom = (z2 - z1) - (z1 - z0);
        if denom.norm() > 0.0 {
            let a = z2 - (z2 - z1) * (z2 - z1) / denom;
            if a.norm().is_finite() && (a / a.norm() - guess).norm() < 1e-6 {
                guess = a / a.norm();
            }
        }
    }
    let location = BoundaryPoint::from_complex(guess)?;
    let fp = analyze_fixed_point(phi, location, opts)?;
    Ok(DenjoyWolffPoint::Boundary(fp))
}
