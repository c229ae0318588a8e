//! The star quadratic differential
//! `Q(z) dz² = A Π (z - e^{iβ_j})² / ((z - a)² Π (z - ξ_k)²) dz²`
//! whose trajectory structure carries the extremal semigroups.
//!
//! Since every zero is double and every pole simple in `√Q`, the branch
//! `√Q(z) = c Π (z - e^{iβ_j}) / ((z - a) Π (z - ξ_k))` with `c² = A` is a
//! single-valued rational function; `c` is fixed by `Re Res_{ξ_1} √Q > 0`.
//! With this branch the height of the strip domain at `ξ_k` is
//! `π Res_{ξ_k} √Q` and the heights sum to one.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::Serialize;

use crate::angular::SelfMapEvaluator;
use crate::error::{invalid, Error, Result};
use crate::geometry::{wrap_angle, BoundaryPoint};
use crate::numerics::{integrate, integrate_ode, solve_system, OdeOptions, OdeStatus, QuadratureSpec, SolveOptions};

const POLE_RADIUS: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StarQuadDiff {
    a: BoundaryPoint,
    xis: Vec<BoundaryPoint>,
    betas: Vec<BoundaryPoint>,
    constant: Complex64,
    /// `√A` on the branch with `Re Res_{ξ_1} √Q > 0`.
    root: Complex64,
    alphas: Vec<f64>,
    warnings: Vec<String>,
}

/// Arcs `(start, length)`, counter-clockwise, carrying the zeros.
fn zero_arcs(a: BoundaryPoint, xis: &[BoundaryPoint]) -> Vec<(f64, f64)> {
    xis.windows(2)
        .map(|w| {
            let ccw = w[0].ccw_to(&w[1]);
            if w[0].ccw_to(&a) < ccw {
                (w[1].angle(), w[1].ccw_to(&w[0]))
            } else {
                (w[0].angle(), ccw)
            }
        })
        .collect()
}

fn validate_points(a: BoundaryPoint, xis: &[BoundaryPoint]) -> Result<()> {
    if xis.is_empty() {
        return Err(invalid("at least one repulsive point is required"));
    }
    let rel: Vec<f64> = xis.iter().map(|x| a.ccw_to(x)).collect();
    if rel.iter().any(|r| *r < 1e-12 || *r > TAU - 1e-12) {
        return Err(invalid("repulsive points must differ from the Denjoy-Wolff point"));
    }
    let inc = rel.windows(2).all(|w| w[1] > w[0] + 1e-12);
    let dec = rel.windows(2).all(|w| w[1] < w[0] - 1e-12);
    if !(inc || dec) {
        return Err(invalid("repulsive points must be distinct and in cyclic order from the Denjoy-Wolff point"));
    }
    Ok(())
}

impl StarQuadDiff {
    pub fn new(
        a: BoundaryPoint,
        xis: Vec<BoundaryPoint>,
        betas: Vec<BoundaryPoint>,
        constant: Complex64,
        alphas: Vec<f64>,
    ) -> Result<Self> {
        validate_points(a, &xis)?;
        if betas.len() + 1 != xis.len() || alphas.len() != xis.len() {
            return Err(invalid("need n - 1 zeros and n heights for n repulsive points"));
        }
        for (b, (start, len)) in betas.iter().zip(zero_arcs(a, &xis)) {
            let off = BoundaryPoint::from_angle(start).ccw_to(b);
            if !(off > 0.0 && off < len) {
                return Err(invalid("each zero must lie on the arc between consecutive repulsive points"));
            }
        }
        if !(constant.norm() > 0.0) || !constant.re.is_finite() || !constant.im.is_finite() {
            return Err(invalid("the constant A must be non-zero"));
        }
        let mut qd = Self {
            a,
            xis,
            betas,
            constant,
            root: constant.sqrt(),
            alphas,
            warnings: vec![],
        };
        if qd.residue(0).re < 0.0 {
            qd.root = -qd.root;
        }
        Ok(qd)
    }

    pub fn denjoy_wolff(&self) -> BoundaryPoint {
        self.a
    }

    pub fn repulsive(&self) -> &[BoundaryPoint] {
        &self.xis
    }

    pub fn zeros(&self) -> &[BoundaryPoint] {
        &self.betas
    }

    pub fn constant(&self) -> Complex64 {
        self.constant
    }

    pub fn target_heights(&self) -> &[f64] {
        &self.alphas
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Same zeros and poles with `A` replaced.
    pub fn with_constant(&self, constant: Complex64) -> Result<Self> {
        Self::new(self.a, self.xis.clone(), self.betas.clone(), constant, self.alphas.clone())
    }

    fn poles(&self) -> impl Iterator<Item = Complex64> + '_ {
        std::iter::once(self.a.value()).chain(self.xis.iter().map(|x| x.value()))
    }

    fn critical_points(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.poles().chain(self.betas.iter().map(|b| b.value()))
    }

    /// The rational branch of `√Q`, without pole checks.
    fn sqrt_raw(&self, z: Complex64) -> Complex64 {
        let mut v = self.root / (z - self.a.value());
        for b in &self.betas {
            v *= z - b.value();
        }
        for x in &self.xis {
            v /= z - x.value();
        }
        v
    }

    pub fn sqrt_q(&self, z: Complex64) -> Result<Complex64> {
        self.check_pole(z)?;
        Ok(self.sqrt_raw(z))
    }

    fn check_pole(&self, z: Complex64) -> Result<()> {
        match self.poles().find(|p| (z - p).norm() <= POLE_RADIUS) {
            Some(p) => Err(Error::Pole(p)),
            None => Ok(()),
        }
    }

    /// Residue of `√Q` at `ξ_k`.
    pub fn residue(&self, k: usize) -> Complex64 {
        let x = self.xis[k].value();
        let mut v = self.root / (x - self.a.value());
        for b in &self.betas {
            v *= x - b.value();
        }
        for (j, y) in self.xis.iter().enumerate() {
            if j != k {
                v /= x - y.value();
            }
        }
        v
    }

    /// Residue of `√Q` at `a`.
    pub fn residue_at_denjoy_wolff(&self) -> Complex64 {
        let a = self.a.value();
        let mut v = self.root;
        for b in &self.betas {
            v *= a - b.value();
        }
        for x in &self.xis {
            v /= a - x.value();
        }
        v
    }
}

#[allow(non_snake_case)]
pub fn eval_Q(qd: &StarQuadDiff, z: Complex64) -> Result<Complex64> {
    qd.check_pole(z)?;
    let mut num = qd.constant;
    for b in &qd.betas {
        num *= (z - b.value()) * (z - b.value());
    }
    let mut den = (z - qd.a.value()) * (z - qd.a.value());
    for x in &qd.xis {
        den *= (z - x.value()) * (z - x.value());
    }
    Ok(num / den)
}

/// Fit zeros and constant so that the unit circle is a trajectory and the
/// strip domains have heights `alphas`.
pub fn solve_parameters(a: BoundaryPoint, xis: &[BoundaryPoint], alphas: &[f64]) -> Result<StarQuadDiff> {
    solve_parameters_from(a, xis, alphas, None)
}

/// As [`solve_parameters`] with optional initial zero positions, given as
/// fractions in `(0, 1)` along their arcs.
pub fn solve_parameters_from(
    a: BoundaryPoint,
    xis: &[BoundaryPoint],
    alphas: &[f64],
    fractions: Option<&[f64]>,
) -> Result<StarQuadDiff> {
    validate_points(a, xis)?;
    let n = xis.len();
    if alphas.len() != n {
        return Err(invalid("one height per repulsive point is required"));
    }
    if alphas.iter().any(|al| !(*al > 0.0)) || (alphas.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
        return Err(invalid("heights must be positive and sum to 1"));
    }
    let arcs = zero_arcs(a, xis);
    // probe on the arc from a to its neighbour, which carries no zero
    let probe = {
        let first = a.ccw_to(&xis[0]);
        let last = a.ccw_to(&xis[n - 1]);
        let (near, far) = (first.min(last), first.max(last));
        if near > TAU - far {
            Complex64::from_polar(1.0, a.angle() + 0.5 * near)
        } else {
            Complex64::from_polar(1.0, a.angle() - 0.5 * (TAU - far))
        }
    };

    let build = |x: &[f64]| -> Option<StarQuadDiff> {
        let betas: Vec<BoundaryPoint> = arcs
            .iter()
            .zip(x)
            .map(|((start, len), u)| BoundaryPoint::from_angle(start + len / (1.0 + (-u).exp())))
            .collect();
        let mut g = (Complex64::i() * probe).powi(2) / (probe - a.value()).powi(2);
        for b in &betas {
            g *= (probe - b.value()).powi(2);
        }
        for xi in xis {
            g /= (probe - xi.value()).powi(2);
        }
        let constant = Complex64::from_polar(x[n - 1].exp(), -g.arg());
        StarQuadDiff::new(a, xis.to_vec(), betas, constant, alphas.to_vec()).ok()
    };
    let residual = |x: &[f64]| -> Vec<f64> {
        match build(x) {
            Some(qd) => (0..n).map(|k| PI * qd.residue(k).re - alphas[k]).collect(),
            None => vec![f64::NAN; n],
        }
    };

    let mut guess: Vec<f64> = match fractions {
        Some(f) => {
            if f.len() + 1 != n || f.iter().any(|v| !(*v > 0.0 && *v < 1.0)) {
                return Err(invalid("initial fractions must lie in (0, 1), one per zero"));
            }
            f.iter().map(|v| (v / (1.0 - v)).ln()).collect()
        }
        None => vec![0.0; n - 1],
    };
    guess.push(0.0);
    if let Some(qd) = build(&guess) {
        let total: f64 = (0..n).map(|k| PI * qd.residue(k).re).sum();
        guess[n - 1] = if total > 0.0 { -2.0 * total.ln() } else { (4.0 / (PI * PI)).ln() };
    }
    let report = solve_system(
        residual,
        &guess,
        SolveOptions {
            tolerance: 1e-14,
            max_iterations: 100,
            fd_step: 1e-7,
        },
    )
    .or_else(|e| match e {
        // round-off floor of the residue sums
        Error::SolveFailed {
            residual_norm,
            best,
            iterations,
        } if residual_norm <= 1e-12 => Ok(crate::numerics::SolveReport {
            root: best,
            residual_norm,
            iterations,
        }),
        other => Err(other),
    })?;
    let mut qd = build(&report.root).ok_or(Error::SolveFailed {
        iterations: report.iterations,
        residual_norm: f64::NAN,
        best: report.root.clone(),
    })?;
    for (j, ((_, len), u)) in arcs.iter().zip(&report.root).enumerate() {
        let frac = 1.0 / (1.0 + (-u).exp());
        if frac.min(1.0 - frac) * len < 1e-10 {
            qd.warnings.push(format!("zero {} pressed against the end of its arc", j + 1));
        }
    }
    Ok(qd)
}

/// Heights of the strip domains: `Im ∫ √Q dz` across each channel along an
/// arc of `|z - ξ_k| = ρ` inside the disk.
pub fn heights(qd: &StarQuadDiff) -> Result<Vec<f64>> {
    (0..qd.xis.len())
        .map(|k| {
            let x = qd.xis[k].value();
            let dist = qd
                .critical_points()
                .filter(|p| (p - x).norm() > 1e-12)
                .map(|p| (p - x).norm())
                .fold(f64::INFINITY, f64::min);
            let rho = (0.5 * dist).min(0.5);
            if !(rho > 1e-10) {
                return Err(Error::BranchFailure(x));
            }
            let c = (-0.5 * rho).acos();
            let t0 = qd.xis[k].angle();
            let spec = QuadratureSpec::new(t0 + c, t0 + TAU - c, 1e-13)?;
            let q = integrate(
                |t| {
                    let e = Complex64::from_polar(rho, t);
                    qd.sqrt_raw(x + e) * Complex64::i() * e
                },
                &spec,
            )?;
            Ok(q.value.im)
        })
        .collect()
}

/// `max |Im(Q (iz)²)| / |Q (iz)²|` over `samples` points of the circle,
/// skipping points within `exclusion` of a pole or zero.
pub fn circle_trajectory_residual(qd: &StarQuadDiff, samples: usize, exclusion: f64) -> f64 {
    let mut worst = 0.0f64;
    for j in 0..samples {
        let z = Complex64::from_polar(1.0, TAU * (j as f64 + 0.5) / samples as f64);
        if qd.critical_points().any(|p| (z - p).norm() < exclusion) {
            continue;
        }
        let Ok(q) = eval_Q(qd, z) else { continue };
        let v = q * (Complex64::i() * z).powi(2);
        if v.norm() > 0.0 {
            worst = worst.max(v.im.abs() / v.norm());
        }
    }
    worst
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TrajectoryKind {
    /// `Q dz² > 0`
    Trajectory,
    /// `Q dz² < 0`
    Orthogonal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "reason", content = "at", rename_all = "snake_case")]
pub enum Termination {
    MaxLength,
    LeftDisk,
    NearPole(Complex64),
    NearZero(Complex64),
    StepUnderflow,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub kind: TrajectoryKind,
    pub points: Vec<Complex64>,
    /// `∫ |√Q| |dz|` along the polyline.
    pub length: f64,
    pub termination: Termination,
}

impl Trajectory {
    /// Largest deviation of `arg(Q Δz²)` from `0` (trajectory) or `π`
    /// (orthogonal) over the polyline segments.
    pub fn max_phase_deviation(&self, qd: &StarQuadDiff) -> f64 {
        self.points
            .windows(2)
            .filter_map(|w| {
                let dz = w[1] - w[0];
                let q = eval_Q(qd, 0.5 * (w[0] + w[1])).ok()?;
                let v = q * dz * dz;
                let target = match self.kind {
                    TrajectoryKind::Trajectory => v,
                    TrajectoryKind::Orthogonal => -v,
                };
                (v.norm() > 0.0).then(|| target.arg().abs())
            })
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceOptions {
    pub kind: TrajectoryKind,
    pub max_length: f64,
    /// Reverse the default direction.
    pub reverse: bool,
    pub critical_radius: f64,
    pub max_step: f64,
    pub tolerance: f64,
}

impl TraceOptions {
    pub fn new(kind: TrajectoryKind, max_length: f64) -> Self {
        Self {
            kind,
            max_length,
            reverse: false,
            critical_radius: 1e-6,
            max_step: 0.01,
            tolerance: 1e-12,
        }
    }
}

/// Integrate `dz/ds = e^{iχ} / √Q(z)`.
///
/// The default direction follows the branch of `√Q` (for the Koenigs
/// normalization: increasing `Re h`), except that starts on the unit circle
/// run counter-clockwise.
pub fn trace_trajectory(qd: &StarQuadDiff, z0: Complex64, opts: &TraceOptions) -> Result<Trajectory> {
    if let Some(p) = qd.betas.iter().map(|b| b.value()).find(|b| (z0 - b).norm() <= opts.critical_radius) {
        return Err(Error::CriticalPoint(p));
    }
    qd.check_pole(z0)?;
    if z0.norm() > 1.0 + 1e-12 {
        return Err(Error::OutsideDomain(z0));
    }
    if !(opts.max_length > 0.0) {
        return Err(invalid("trajectory length must be positive"));
    }
    let rot = match opts.kind {
        TrajectoryKind::Trajectory => Complex64::new(1.0, 0.0),
        TrajectoryKind::Orthogonal => Complex64::i(),
    };
    let mut sign = if opts.reverse { -1.0 } else { 1.0 };
    if (z0.norm() - 1.0).abs() < 1e-9 {
        let v = rot / qd.sqrt_raw(z0);
        let ccw = (v * (Complex64::i() * z0).conj()).re >= 0.0;
        sign = if ccw != opts.reverse { 1.0 } else { -1.0 };
    }
    trace_signed(qd, z0, rot * sign, opts, opts.critical_radius)
}

fn trace_signed(
    qd: &StarQuadDiff,
    z0: Complex64,
    dir: Complex64,
    opts: &TraceOptions,
    radius: f64,
) -> Result<Trajectory> {
    let poles: Vec<Complex64> = qd.poles().collect();
    let zeros: Vec<Complex64> = qd.betas.iter().map(|b| b.value()).collect();
    let mut reason = Termination::MaxLength;
    let sol = integrate_ode(
        |_, z| dir / qd.sqrt_raw(z),
        z0,
        (0.0, opts.max_length),
        OdeOptions {
            tolerance: opts.tolerance,
            max_step: opts.max_step,
            ..OdeOptions::default()
        },
        |_, z| {
            if let Some(p) = poles.iter().find(|p| (z - *p).norm() < radius) {
                reason = Termination::NearPole(*p);
                return true;
            }
            if let Some(p) = zeros.iter().find(|p| (z - *p).norm() < radius) {
                reason = Termination::NearZero(*p);
                return true;
            }
            if z.norm() > 1.0 + 1e-6 {
                reason = Termination::LeftDisk;
                return true;
            }
            false
        },
    )?;
    let termination = match sol.status {
        OdeStatus::Completed => Termination::MaxLength,
        OdeStatus::Stopped => reason,
        OdeStatus::StoppedAtSingularity => Termination::StepUnderflow,
    };
    let (length, _) = sol.end();
    Ok(Trajectory {
        kind: opts.kind,
        points: sol.points().collect(),
        length,
        termination,
    })
}

/// For each zero `e^{iβ_j}`, the trajectory entering the disk from it, traced
/// for `√Q`-length `length`.
pub fn slit_arcs(qd: &StarQuadDiff, length: f64) -> Result<Vec<Trajectory>> {
    let opts = TraceOptions {
        max_step: 0.005,
        ..TraceOptions::new(TrajectoryKind::Trajectory, length)
    };
    qd.betas
        .iter()
        .map(|b| {
            let start = b.value() * (1.0 - 1e-5);
            let v = 1.0 / qd.sqrt_raw(start);
            // inward means against the outer normal b
            let sign = if (v * b.value().conj()).re < 0.0 { 1.0 } else { -1.0 };
            let mut t = trace_signed(qd, start, Complex64::new(sign, 0.0), &opts, 1e-7)?;
            t.points.insert(0, b.value());
            Ok(t)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OdeResidualReport {
    pub max_residual: f64,
    pub evaluated: usize,
    pub skipped: Vec<Complex64>,
}

/// `max |φ'(z) - R(z)/R(φ(z))|` over `grid`, with `φ'` by central
/// differences (step `1e-6`) and `R = √Q` (the constant `A` cancels).
pub fn extremal_ode_residual<E: SelfMapEvaluator>(
    qd: &StarQuadDiff,
    phi: &E,
    grid: &[Complex64],
    exclusion: f64,
) -> Result<OdeResidualReport> {
    let h = 1e-6;
    let mut worst = 0.0f64;
    let mut evaluated = 0;
    let mut skipped = Vec::new();
    for &z in grid {
        if qd.critical_points().any(|p| (z - p).norm() < exclusion) || z.norm() + h >= 1.0 {
            skipped.push(z);
            continue;
        }
        let w = phi.eval(z)?;
        if qd.critical_points().any(|p| (w - p).norm() < exclusion) {
            skipped.push(z);
            continue;
        }
        let dp = phi.eval(z + h)?;
        let dm = phi.eval(z - h)?;
        let dpi = phi.eval(z + Complex64::new(0.0, h))?;
        let dmi = phi.eval(z - Complex64::new(0.0, h))?;
        // average of the real- and imaginary-direction central differences
        let derivative = 0.5 * ((dp - dm) / (2.0 * h) + (dpi - dmi) / (Complex64::new(0.0, 2.0 * h)));
        let f = qd.sqrt_raw(z) / qd.sqrt_raw(w);
        worst = worst.max((derivative - f).norm());
        evaluated += 1;
    }
    Ok(OdeResidualReport {
        max_residual: worst,
        evaluated,
        skipped,
    })
}

/// Polar interior grid, `rings × spokes` points with radii up to `r_max`.
pub fn interior_grid(rings: usize, spokes: usize, r_max: f64) -> Vec<Complex64> {
    let mut g = Vec::with_capacity(rings * spokes);
    for i in 0..rings {
        let r = r_max * (i as f64 + 1.0) / rings as f64;
        for j in 0..spokes {
            let t = TAU * (j as f64 + 0.5 * (i % 2) as f64) / spokes as f64;
            g.push(Complex64::from_polar(r, t));
        }
    }
    g
}

fn point_to_polyline(p: Complex64, line: &[Complex64]) -> f64 {
    if line.len() == 1 {
        return (p - line[0]).norm();
    }
    line.windows(2)
        .map(|w| {
            let d = w[1] - w[0];
            let len2 = d.norm_sqr();
            let s = if len2 > 0.0 { (((p - w[0]) * d.conj()).re / len2).clamp(0.0, 1.0) } else { 0.0 };
            (p - (w[0] + d * s)).norm()
        })
        .fold(f64::INFINITY, f64::min)
}

/// Symmetric Hausdorff distance between two polylines (vertex to polyline).
pub fn hausdorff_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return f64::INFINITY;
    }
    let ab = a.iter().map(|p| point_to_polyline(*p, b)).fold(0.0, f64::max);
    let ba = b.iter().map(|p| point_to_polyline(*p, a)).fold(0.0, f64::max);
    ab.max(ba)
}

/// Smallest distance between sampled points of two different arcs.
pub fn min_arc_separation(arcs: &[Trajectory]) -> f64 {
    let mut best = f64::INFINITY;
    for (i, x) in arcs.iter().enumerate() {
        for y in &arcs[i + 1..] {
            for p in &x.points {
                for q in &y.points {
                    best = best.min((p - q).norm());
                }
            }
        }
    }
    best
}

/// Zero angles wrapped to `(-π, π]`.
pub fn zero_angles(qd: &StarQuadDiff) -> Vec<f64> {
    qd.betas.iter().map(|b| wrap_angle(b.angle())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bp(t: f64) -> BoundaryPoint {
        BoundaryPoint::from_angle(t)
    }

    fn strip_qd() -> StarQuadDiff {
        solve_parameters(bp(0.0), &[bp(PI)], &[1.0]).unwrap()
    }

    /// Zeros of `Σ α_k/(z - ξ_k) - 1/(z - a)` on the circle and the matching
    /// constant, from the polynomial numerator.
    fn oracle(a: Complex64, xis: &[Complex64], alphas: &[f64]) -> (Vec<Complex64>, Complex64) {
        // numerator coefficients, lowest degree first
        let mul = |p: &[Complex64], r: Complex64| -> Vec<Complex64> {
            let mut out = vec![Complex64::new(0.0, 0.0); p.len() + 1];
            for (i, c) in p.iter().enumerate() {
                out[i + 1] += c;
                out[i] -= c * r;
            }
            out
        };
        let n = xis.len();
        let mut num = vec![Complex64::new(0.0, 0.0); n + 1];
        for k in 0..n {
            let mut p = vec![Complex64::new(alphas[k], 0.0)];
            for (j, x) in xis.iter().enumerate() {
                if j != k {
                    p = mul(&p, *x);
                }
            }
            p = mul(&p, a);
            for (i, c) in p.iter().enumerate() {
                num[i] += c;
            }
        }
        let mut p = vec![Complex64::new(1.0, 0.0)];
        for x in xis {
            p = mul(&p, *x);
        }
        for (i, c) in p.iter().enumerate() {
            num[i] -= c;
        }
        let lead = num[n - 1];
        // roots by Durand-Kerner on the monic numerator of degree n - 1
        let monic: Vec<Complex64> = num[..n].iter().map(|c| c / lead).collect();
        let mut roots: Vec<Complex64> =
            (0..n - 1).map(|j| Complex64::from_polar(0.9, 0.4 + j as f64 * 1.3)).collect();
        for _ in 0..500 {
            let old = roots.clone();
            for i in 0..roots.len() {
                let z = roots[i];
                let mut val = Complex64::new(0.0, 0.0);
                for c in monic.iter().rev() {
                    val = val * z + c;
                }
                let mut den = Complex64::new(1.0, 0.0);
                for (j, r) in old.iter().enumerate() {
                    if j != i {
                        den *= z - r;
                    }
                }
                roots[i] = z - val / den;
            }
        }
        (roots, lead * lead / (PI * PI))
    }

    #[test]
    fn strip_constant_matches_closed_form() {
        let qd = strip_qd();
        assert!(qd.zeros().is_empty());
        assert!((qd.constant() - Complex64::new(4.0 / (PI * PI), 0.0)).norm() < 1e-12);
        let z = Complex64::new(0.3, 0.2);
        let dh = 2.0 / (PI * (1.0 - z * z));
        assert!((eval_Q(&qd, z).unwrap() - dh * dh).norm() < 1e-12);
        let h = heights(&qd).unwrap();
        assert!((h[0] - 1.0).abs() < 1e-8);
        // n = 1 with real positive A: exactly real at θ = π/2
        let i = Complex64::i();
        let v = eval_Q(&qd, i).unwrap() * (i * i).powi(2);
        assert!(v.im.abs() < 1e-15);
    }

    #[test]
    fn symmetric_zero_at_minus_one() {
        let xis = [bp(TAU / 3.0), bp(-TAU / 3.0)];
        let qd = solve_parameters(bp(0.0), &xis, &[0.5, 0.5]).unwrap();
        assert!((qd.zeros()[0].value() + 1.0).norm() < 1e-10);
        assert!(circle_trajectory_residual(&qd, 2000, 1e-2) <= 1e-10);
        let h = heights(&qd).unwrap();
        assert!((h[0] - 0.5).abs() < 1e-8 && (h[1] - 0.5).abs() < 1e-8);
        let z = Complex64::new(0.2, 0.5);
        assert!((eval_Q(&qd, z.conj()).unwrap() - eval_Q(&qd, z).unwrap().conj()).norm() < 1e-13);
    }

    #[test]
    fn asymmetric_matches_numerator_roots() {
        let xis = [bp(TAU / 3.0), bp(-TAU / 3.0)];
        let alphas = [0.4, 0.6];
        let qd = solve_parameters(bp(0.0), &xis, &alphas).unwrap();
        let (roots, constant) = oracle(Complex64::new(1.0, 0.0), &[xis[0].value(), xis[1].value()], &alphas);
        assert!((qd.zeros()[0].value() - roots[0]).norm() < 1e-10);
        assert!((qd.constant() - constant).norm() < 1e-10);
        assert!(qd.zeros()[0].value().im.abs() > 1e-3);
        let h = heights(&qd).unwrap();
        assert!((h[0] - 0.4).abs() < 1e-8 && (h[1] - 0.6).abs() < 1e-8);
        assert!(circle_trajectory_residual(&qd, 2000, 1e-2) <= 1e-10);
    }

    #[test]
    fn three_channel_oracle() {
        let xis = [bp(1.0), bp(2.5), bp(4.0)];
        let alphas = [0.2, 0.5, 0.3];
        let qd = solve_parameters(bp(0.0), &xis, &alphas).unwrap();
        let (mut roots, constant) = oracle(Complex64::new(1.0, 0.0), &xis.map(|x| x.value()), &alphas);
        roots.sort_by(|p, q| p.arg().total_cmp(&q.arg()));
        let mut got: Vec<Complex64> = qd.zeros().iter().map(|b| b.value()).collect();
        got.sort_by(|p, q| p.arg().total_cmp(&q.arg()));
        for (r, g) in roots.iter().zip(&got) {
            assert!((r - g).norm() < 1e-10);
        }
        assert!((qd.constant() - constant).norm() < 1e-10);
    }

    #[test]
    fn uniqueness_from_different_guesses() {
        let xis = [bp(TAU / 3.0), bp(-TAU / 3.0)];
        let p = solve_parameters_from(bp(0.0), &xis, &[0.4, 0.6], Some(&[0.2])).unwrap();
        let q = solve_parameters_from(bp(0.0), &xis, &[0.4, 0.6], Some(&[0.8])).unwrap();
        assert!((p.zeros()[0].value() - q.zeros()[0].value()).norm() < 1e-8);
        assert!((p.constant() - q.constant()).norm() < 1e-8);
    }

    #[test]
    fn rotated_constant_breaks_circle() {
        let qd = strip_qd();
        let bad = qd.with_constant(qd.constant() * Complex64::from_polar(1.0, PI / 4.0)).unwrap();
        assert!(circle_trajectory_residual(&bad, 500, 1e-2) >= 0.5);
    }

    #[test]
    fn heights_scale_with_root_of_constant() {
        let xis = [bp(TAU / 3.0), bp(-TAU / 3.0)];
        let qd = solve_parameters(bp(0.0), &xis, &[0.4, 0.6]).unwrap();
        let scaled = qd.with_constant(qd.constant() * 9.0).unwrap();
        let (h, hs) = (heights(&qd).unwrap(), heights(&scaled).unwrap());
        for (x, y) in h.iter().zip(&hs) {
            assert!((y - 3.0 * x).abs() < 1e-8);
        }
    }

    #[test]
    fn double_zero_slope() {
        let xis = [bp(TAU / 3.0), bp(-TAU / 3.0)];
        let qd = solve_parameters(bp(0.0), &xis, &[0.4, 0.6]).unwrap();
        let b = qd.zeros()[0].value();
        let q1 = eval_Q(&qd, b * (1.0 - 1e-3)).unwrap().norm();
        let q2 = eval_Q(&qd, b * (1.0 - 1e-4)).unwrap().norm();
        let slope = (q1 / q2).log10();
        assert!((slope - 2.0).abs() < 1e-2);
    }

    #[test]
    fn poles_are_rejected() {
        let qd = strip_qd();
        assert!(matches!(eval_Q(&qd, Complex64::new(1.0, 0.0)), Err(Error::Pole(_))));
        assert!(solve_parameters(bp(0.0), &[bp(1.0), bp(3.0)], &[0.5, 0.6]).is_err());
        assert!(solve_parameters(bp(0.0), &[bp(3.0), bp(1.0), bp(2.0)], &[0.3, 0.3, 0.4]).is_err());
    }

    #[test]
    fn circle_is_a_trajectory() {
        let xis = [bp(TAU / 3.0), bp(-TAU / 3.0)];
        let qd = solve_parameters(bp(0.0), &xis, &[0.4, 0.6]).unwrap();
        let z0 = Complex64::from_polar(1.0, 0.3);
        let t = trace_trajectory(&qd, z0, &TraceOptions::new(TrajectoryKind::Trajectory, 2.0)).unwrap();
        assert!(t.points.len() > 10);
        let drift = t.points.iter().map(|z| (z.norm() - 1.0).abs()).fold(0.0, f64::max);
        assert!(drift <= 1e-6, "{drift}");
        // counter-clockwise start
        assert!(t.points[1].arg() > t.points[0].arg());
        assert!(t.max_phase_deviation(&qd) < 1e-4);
    }

    #[test]
    fn orthogonal_trajectory_terminates() {
        let qd = strip_qd();
        let t = trace_trajectory(&qd, Complex64::new(0.2, 0.1), &TraceOptions::new(TrajectoryKind::Orthogonal, 5.0))
            .unwrap();
        assert!(matches!(t.termination, Termination::LeftDisk | Termination::NearPole(_)));
        assert!(t.max_phase_deviation(&qd) < 1e-4);
    }

    #[test]
    fn start_at_zero_is_critical() {
        let xis = [bp(TAU / 3.0), bp(-TAU / 3.0)];
        let qd = solve_parameters(bp(0.0), &xis, &[0.5, 0.5]).unwrap();
        let r = trace_trajectory(&qd, Complex64::new(-1.0, 0.0), &TraceOptions::new(TrajectoryKind::Trajectory, 1.0));
        assert!(matches!(r, Err(Error::CriticalPoint(_))));
    }

    #[test]
    fn slit_arc_shapes() {
        assert!(slit_arcs(&strip_qd(), 1.0).unwrap().is_empty());
        let xis = [bp(TAU / 3.0), bp(-TAU / 3.0)];
        let qd = solve_parameters(bp(0.0), &xis, &[0.5, 0.5]).unwrap();
        let arcs = slit_arcs(&qd, 1.0).unwrap();
        assert_eq!(arcs.len(), 1);
        assert!(arcs[0].points.iter().all(|z| z.im.abs() < 1e-8));
        assert!(arcs[0].points.last().unwrap().re > -0.99);
        let three = solve_parameters(bp(0.0), &[bp(1.0), bp(2.5), bp(4.0)], &[0.2, 0.5, 0.3]).unwrap();
        let arcs = slit_arcs(&three, 0.5).unwrap();
        assert_eq!(arcs.len(), 2);
        assert!(min_arc_separation(&arcs) > 1e-3);
    }

    #[test]
    fn identity_satisfies_ode_trivially() {
        let qd = strip_qd();
        let id = crate::angular::ClosureMap(|z| z);
        let r = extremal_ode_residual(&qd, &id, &interior_grid(5, 8, 0.9), 1e-2).unwrap();
        assert!(r.max_residual < 1e-9);
        assert_eq!(r.evaluated, 40);
    }

    #[test]
    fn hausdorff_basics() {
        let a = [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)];
        let b = [Complex64::new(0.0, 0.1), Complex64::new(1.0, 0.1)];
        assert!((hausdorff_distance(&a, &b) - 0.1).abs() < 1e-15);
        let c = [Complex64::new(0.5, 0.0)];
        assert!((hausdorff_distance(&a, &c) - 0.5).abs() < 1e-15);
    }
}
