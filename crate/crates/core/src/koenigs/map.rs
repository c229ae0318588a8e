use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::Serialize;

use super::domain::SlitStripDomain;
use crate::error::{Error, Result};
use crate::geometry::BoundaryPoint;
use crate::inequality::{FixedPointMultiplier, MultiplierData};
use crate::numerics::{brent, integrate, solve_system, QuadratureSpec, SolveOptions};

const SINGULAR_RADIUS: f64 = 1e-14;
const CROWDING: f64 = 1e-12;
const GRID: usize = 64;
/// Relative accuracy of the quadratures that re-check the side conditions.
const CERTIFICATE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "index", rename_all = "snake_case")]
pub enum PrevertexKind {
    /// End of the domain at `+∞`.
    DenjoyWolff,
    /// Left end of channel `k` (0-based).
    ChannelEnd(usize),
    /// Tip of slit `k` (0-based).
    SlitTip(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Prevertex {
    pub kind: PrevertexKind,
    pub point: BoundaryPoint,
    /// Power of `(z - p)` in `h'`: `-1` at channel ends, `+1` at slit tips.
    pub exponent: f64,
}

/// `h'(z) = constant · Π (z - p)^{exponent}` over the prevertices.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScRepresentation {
    pub prevertices: Vec<Prevertex>,
    pub constant: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SideResidual {
    pub side: String,
    pub target: f64,
    pub achieved: f64,
    pub residual: f64,
}

/// Side conditions re-evaluated by quadrature of the SC integrand.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KoenigsCertificate {
    pub max_residual: f64,
    pub sides: Vec<SideResidual>,
    pub normalization_residual: f64,
    pub solve_residual: f64,
    pub solve_iterations: usize,
    pub min_prevertex_gap: f64,
    pub warnings: Vec<String>,
}

/// Riemann map `h: 𝔻 -> Ω` with `h(0) = 0`, `h'(0) > 0`.
///
/// Partial fractions of the SC integrand give
/// `h(z) = (1/π) [Σ α_k Log(1 - z conj ξ_k) - Log(1 - z conj a)]`,
/// which is what evaluation uses; the product form is integrated
/// numerically for the certificate.
#[derive(Debug, Clone)]
pub struct KoenigsMap {
    domain: SlitStripDomain,
    a: BoundaryPoint,
    xis: Vec<BoundaryPoint>,
    tips: Vec<BoundaryPoint>,
    sc: ScRepresentation,
    certificate: KoenigsCertificate,
    seeds: Vec<(Complex64, Complex64)>,
    max_step: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixedPoints {
    pub denjoy_wolff: BoundaryPoint,
    pub repulsive: Vec<BoundaryPoint>,
}

struct Layout {
    theta_a: f64,
    /// angles of `ξ_1..ξ_n`
    xi: Vec<f64>,
    /// arcs `(start, end)` carrying tips `1..n-1`, counter-clockwise
    tip_arcs: Vec<(f64, f64)>,
    bottom_mid: f64,
    gaps: Vec<f64>,
}

fn layout(alphas: &[f64], u: &[f64]) -> Layout {
    let n = alphas.len();
    let m = u.iter().cloned().fold(0.0f64, f64::max);
    let e: Vec<f64> = u.iter().map(|v| (v - m).exp()).chain(std::iter::once((-m).exp())).collect();
    let s: f64 = e.iter().sum();
    let gaps: Vec<f64> = e.iter().map(|v| TAU * v / s).collect();
    // relative angles, counter-clockwise from a: ξ_n, ξ_{n-1}, ..., ξ_1
    let mut rel = vec![0.0; n];
    let mut acc = 0.0;
    for (i, g) in gaps.iter().take(n).enumerate() {
        acc += g;
        rel[n - 1 - i] = acc;
    }
    let w: Complex64 = Complex64::new(1.0, 0.0)
        - alphas
            .iter()
            .zip(&rel)
            .map(|(al, phi)| Complex64::from_polar(*al, -phi))
            .sum::<Complex64>();
    let theta_a = w.arg();
    let xi: Vec<f64> = rel.iter().map(|r| theta_a + r).collect();
    let tip_arcs = (1..n).map(|k| (xi[k], xi[k - 1])).collect();
    Layout {
        theta_a,
        bottom_mid: xi[0] + 0.5 * gaps[n],
        xi,
        tip_arcs,
        gaps,
    }
}

struct Raw<'a> {
    alphas: &'a [f64],
    a: Complex64,
    xi: Vec<Complex64>,
}

impl Raw<'_> {
    fn h(&self, z: Complex64) -> Complex64 {
        let one = Complex64::new(1.0, 0.0);
        let mut acc = -(one - z * self.a.conj()).ln();
        for (al, x) in self.alphas.iter().zip(&self.xi) {
            acc += *al * (one - z * x.conj()).ln();
        }
        acc / PI
    }

    fn dh(&self, z: Complex64) -> Complex64 {
        let mut acc = -1.0 / (z - self.a);
        for (al, x) in self.alphas.iter().zip(&self.xi) {
            acc += *al / (z - x);
        }
        acc / PI
    }

    /// `d/dθ Re h(e^{iθ})`
    fn tangential(&self, theta: f64) -> f64 {
        let z = Complex64::from_polar(1.0, theta);
        (self.dh(z) * Complex64::i() * z).re
    }

    fn tip(&self, arc: (f64, f64)) -> Option<f64> {
        let len = arc.1 - arc.0;
        let d = 1e-10 * len;
        brent(|t| self.tangential(t), arc.0 + d, arc.1 - d, 1e-15)
    }
}

fn raw<'a>(alphas: &'a [f64], lay: &Layout) -> Raw<'a> {
    Raw {
        alphas,
        a: Complex64::from_polar(1.0, lay.theta_a),
        xi: lay.xi.iter().map(|t| Complex64::from_polar(1.0, *t)).collect(),
    }
}

fn residuals(domain: &SlitStripDomain, u: &[f64]) -> Vec<f64> {
    let lay = layout(domain.alphas(), u);
    let r = raw(domain.alphas(), &lay);
    let mut out = Vec::with_capacity(domain.n());
    out.push(r.h(Complex64::from_polar(1.0, lay.bottom_mid)).im + 0.5);
    for (k, arc) in lay.tip_arcs.iter().enumerate() {
        match r.tip(*arc) {
            Some(t) => out.push(r.h(Complex64::from_polar(1.0, t)).re - domain.gammas()[k]),
            None => out.push(f64::NAN),
        }
    }
    out
}

fn solve_parameters(
    domain: &SlitStripDomain,
    guess: &[f64],
    opts: SolveOptions,
    tolerance: f64,
) -> Result<crate::numerics::SolveReport> {
    solve_system(|u| residuals(domain, u), guess, opts).or_else(|err| match err {
        // a stalled solve is accepted if it already meets the caller's tolerance
        Error::SolveFailed {
            residual_norm,
            best,
            iterations,
        } if residual_norm <= tolerance => Ok(crate::numerics::SolveReport {
            root: best,
            residual_norm,
            iterations,
        }),
        other => Err(other),
    })
}

/// Walk the slit abscissas from `-1/2` to their targets, halving the step
/// whenever a solve fails.
fn continuation(domain: &SlitStripDomain, opts: SolveOptions, tolerance: f64) -> Result<crate::numerics::SolveReport> {
    let at = |s: f64| {
        let gammas = domain.gammas().iter().map(|g| -0.5 + s * (g + 0.5)).collect();
        SlitStripDomain::new(domain.alphas().to_vec(), gammas)
    };
    let mut report = solve_parameters(&at(0.0)?, &vec![0.0; domain.n()], opts, tolerance)?;
    let (mut s, mut step) = (0.0f64, 0.25f64);
    let mut iterations = report.iterations;
    while s < 1.0 {
        let next = (s + step).min(1.0);
        match solve_parameters(&at(next)?, &report.root, opts, tolerance) {
            Ok(r) => {
                iterations += r.iterations;
                report = r;
                s = next;
                step = (2.0 * step).min(0.25);
            }
            Err(e) if step < 1.0 / 1024.0 => return Err(e),
            Err(_) => step *= 0.5,
        }
    }
    report.iterations = iterations;
    Ok(report)
}

/// Solve the SC parameter problem for `domain`.
///
/// Side conditions are met to `min(tolerance, 1e-13)`; the returned map
/// carries an independent quadrature certificate.
pub fn build_koenigs_map(domain: &SlitStripDomain, tolerance: f64) -> Result<KoenigsMap> {
    if !(tolerance > 0.0) {
        return Err(crate::error::invalid("tolerance must be positive"));
    }
    let n = domain.n();
    let opts = SolveOptions {
        tolerance: tolerance.min(1e-13),
        max_iterations: 100,
        fd_step: 1e-7,
    };
    let report = match solve_parameters(domain, &vec![0.0; n], opts, tolerance) {
        Ok(r) => r,
        Err(direct) => continuation(domain, opts, tolerance).map_err(|_| direct)?,
    };
    let lay = layout(domain.alphas(), &report.root);
    let r = raw(domain.alphas(), &lay);
    let tip_angles: Vec<f64> = lay
        .tip_arcs
        .iter()
        .map(|arc| r.tip(*arc).ok_or(Error::SolveFailed {
            iterations: report.iterations,
            residual_norm: f64::NAN,
            best: report.root.clone(),
        }))
        .collect::<Result<_>>()?;

    let a = BoundaryPoint::from_angle(lay.theta_a);
    let xis: Vec<BoundaryPoint> = lay.xi.iter().map(|t| BoundaryPoint::from_angle(*t)).collect();
    let tips: Vec<BoundaryPoint> = tip_angles.iter().map(|t| BoundaryPoint::from_angle(*t)).collect();

    let constant = (domain
        .alphas()
        .iter()
        .zip(&xis)
        .map(|(al, x)| *al * x.value())
        .sum::<Complex64>()
        - a.value())
        / PI;
    let mut prevertices = vec![Prevertex {
        kind: PrevertexKind::DenjoyWolff,
        point: a,
        exponent: -1.0,
    }];
    for (k, x) in xis.iter().enumerate() {
        prevertices.push(Prevertex {
            kind: PrevertexKind::ChannelEnd(k),
            point: *x,
            exponent: -1.0,
        });
    }
    for (k, t) in tips.iter().enumerate() {
        prevertices.push(Prevertex {
            kind: PrevertexKind::SlitTip(k),
            point: *t,
            exponent: 1.0,
        });
    }

    let mut map = KoenigsMap {
        domain: domain.clone(),
        a,
        xis,
        tips,
        sc: ScRepresentation { prevertices, constant },
        certificate: KoenigsCertificate {
            max_residual: f64::NAN,
            sides: vec![],
            normalization_residual: f64::NAN,
            solve_residual: report.residual_norm,
            solve_iterations: report.iterations,
            min_prevertex_gap: lay.gaps.iter().cloned().fold(f64::INFINITY, f64::min),
            warnings: vec![],
        },
        seeds: vec![],
        max_step: 0.2 * domain.alphas().iter().cloned().fold(1.0, f64::min),
    };
    map.certify(&lay)?;
    map.seeds = map.seed_grid();
    Ok(map)
}

impl KoenigsMap {
    fn certify(&mut self, lay: &Layout) -> Result<()> {
        let points: Vec<Complex64> = self.sc.prevertices.iter().map(|p| p.point.value()).collect();
        let mut closest = self.certificate.min_prevertex_gap;
        for (i, p) in points.iter().enumerate() {
            for q in &points[i + 1..] {
                closest = closest.min((p - q).norm());
            }
        }
        self.certificate.min_prevertex_gap = closest;
        // the integrand loses about log10(1/gap) digits next to a crowded pair
        let rel_tol = CERTIFICATE_TOL.max(100.0 * f64::EPSILON / closest);
        let mut sides = Vec::new();
        let bottom = Complex64::from_polar(1.0, lay.bottom_mid);
        let v = self.radial_integral(bottom, 0.0, rel_tol)?;
        sides.push(SideResidual {
            side: "bottom wall".into(),
            target: -0.5,
            achieved: v.im,
            residual: (v.im + 0.5).abs(),
        });
        for (k, tip) in self.tips.clone().iter().enumerate() {
            let v = self.radial_integral(tip.value(), 1.0, rel_tol)?;
            let target = self.domain.gammas()[k];
            sides.push(SideResidual {
                side: format!("slit {} tip", k + 1),
                target,
                achieved: v.re,
                residual: (v.re - target).abs(),
            });
        }
        let d0 = self.sc_integrand(Complex64::new(0.0, 0.0));
        let normalization_residual = (d0.im / d0.norm()).abs() + if d0.re > 0.0 { 0.0 } else { 1.0 };
        let max_residual = sides.iter().map(|s| s.residual).fold(normalization_residual, f64::max);
        let mut warnings = Vec::new();
        if self.certificate.min_prevertex_gap < CROWDING {
            warnings.push(format!(
                "prevertex crowding: smallest gap {:e}",
                self.certificate.min_prevertex_gap
            ));
        }
        self.certificate.sides = sides;
        self.certificate.normalization_residual = normalization_residual;
        self.certificate.max_residual = max_residual;
        self.certificate.warnings = warnings;
        Ok(())
    }

    /// `∫_0^1 h'(r p) p dr` with an algebraic exponent at `r = 1`.
    fn radial_integral(&self, p: Complex64, exp_upper: f64, rel_tol: f64) -> Result<Complex64> {
        let spec = QuadratureSpec::with_exponents(0.0, 1.0, 0.0, exp_upper, rel_tol)?;
        Ok(integrate(|r| self.sc_integrand(p * r) * p, &spec)?.value)
    }

    /// Product form `C Π (z - p)^{e_p}` of `h'`.
    pub fn sc_integrand(&self, z: Complex64) -> Complex64 {
        self.sc.prevertices.iter().fold(self.sc.constant, |acc, p| {
            if p.exponent > 0.0 {
                acc * (z - p.point.value())
            } else {
                acc / (z - p.point.value())
            }
        })
    }

    /// `h(z)` by quadrature of the SC integrand along the radius to `z`.
    pub fn eval_h_quadrature(&self, z: Complex64) -> Result<Complex64> {
        self.check_interior(z)?;
        if z.norm() == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let spec = QuadratureSpec::new(0.0, 1.0, CERTIFICATE_TOL)?;
        Ok(integrate(|r| self.sc_integrand(z * r) * z, &spec)?.value)
    }

    fn check_interior(&self, z: Complex64) -> Result<()> {
        if !(z.norm() < 1.0) {
            return Err(Error::OutsideDomain(z));
        }
        if self
            .sc
            .prevertices
            .iter()
            .any(|p| p.exponent < 0.0 && (z - p.point.value()).norm() <= SINGULAR_RADIUS)
        {
            return Err(Error::BoundarySingularity(z));
        }
        Ok(())
    }

    fn raw(&self) -> Raw<'_> {
        Raw {
            alphas: self.domain.alphas(),
            a: self.a.value(),
            xi: self.xis.iter().map(|x| x.value()).collect(),
        }
    }

    pub fn eval_h(&self, z: Complex64) -> Result<Complex64> {
        self.check_interior(z)?;
        Ok(self.raw().h(z))
    }

    pub fn eval_dh(&self, z: Complex64) -> Result<Complex64> {
        self.check_interior(z)?;
        Ok(self.raw().dh(z))
    }

    /// `z` with `h(z) = w`.
    pub fn eval_h_inverse(&self, w: Complex64) -> Result<Complex64> {
        if !self.domain.contains(w) {
            return Err(Error::OutsideDomain(w));
        }
        if w == Complex64::new(0.0, 0.0) {
            return Ok(w);
        }
        // four nearest seeds by image distance
        let mut order: Vec<(f64, usize)> = Vec::with_capacity(4);
        for (i, (_, ws)) in self.seeds.iter().enumerate() {
            let d = (ws - w).norm();
            if order.len() < 4 || d < order[3].0 {
                let pos = order.partition_point(|e| e.0 <= d);
                order.insert(pos, (d, i));
                order.truncate(4);
            }
        }
        let mut last = Error::InverseFailed {
            target: w,
            residual: f64::INFINITY,
        };
        for &(_, i) in &order {
            let (z0, w0) = self.seeds[i];
            match self.route(z0, w0, w) {
                Ok(z) => return Ok(z),
                Err(e) => last = e,
            }
        }
        Err(last)
    }

    /// `z` with `h(z) = w`, continued from a nearby preimage `hint`.
    pub fn eval_h_inverse_near(&self, w: Complex64, hint: Complex64) -> Result<Complex64> {
        if !self.domain.contains(w) {
            return Err(Error::OutsideDomain(w));
        }
        if let Ok(w0) = self.eval_h(hint) {
            if !self.crosses_slit(w0, w) {
                if let Ok(z) = self.track(hint, w0, w) {
                    return Ok(z);
                }
            }
        }
        self.eval_h_inverse(w)
    }

    /// Track the preimage from `(z0, w0 = h(z0))` to `w` along a path inside Ω.
    fn route(&self, z0: Complex64, w0: Complex64, w: Complex64) -> Result<Complex64> {
        if !self.crosses_slit(w0, w) {
            return self.track(z0, w0, w);
        }
        let x = w0.re.max(w.re).max(0.0) + 0.5;
        let p1 = Complex64::new(x, w0.im);
        let p2 = Complex64::new(x, w.im);
        let z1 = self.track(z0, w0, p1)?;
        let z2 = self.track(z1, p1, p2)?;
        self.track(z2, p2, w)
    }

    fn crosses_slit(&self, p: Complex64, q: Complex64) -> bool {
        let y = self.domain.levels();
        self.domain.gammas().iter().enumerate().any(|(k, g)| {
            let yk = y[k + 1];
            let (dp, dq) = (p.im - yk, q.im - yk);
            if dp * dq > 0.0 {
                return false;
            }
            if dp == dq {
                return dp == 0.0 && p.re.min(q.re) <= *g;
            }
            let s = dp / (dp - dq);
            p.re + s * (q.re - p.re) <= *g
        })
    }

    fn track(&self, z0: Complex64, w0: Complex64, w: Complex64) -> Result<Complex64> {
        let raw = self.raw();
        let total = w - w0;
        let len = total.norm();
        let mut z = z0;
        let mut lam = 0.0;
        let mut dl = if len > 0.0 { (self.max_step / len).min(1.0) } else { 1.0 };
        let mut current = w0;
        while lam < 1.0 {
            let next = (lam + dl).min(1.0);
            let target = w0 + total * next;
            let last = next >= 1.0;
            let d = raw.dh(z);
            let mut zp = z + (target - current) / d;
            if !(zp.norm() < 1.0) || !zp.re.is_finite() {
                zp = z;
            }
            let tol = if last { 1e-14 } else { 1e-9 } * target.norm().max(1.0);
            match newton(&raw, zp, target, tol) {
                Some(zn) => {
                    z = zn;
                    lam = next;
                    current = target;
                    dl = (dl * 1.5).min((self.max_step / len.max(1e-300)).min(1.0));
                }
                None => {
                    dl *= 0.5;
                    if dl * len < 1e-12 {
                        let residual = (raw.h(z) - target).norm();
                        return Err(Error::InverseFailed { target: w, residual });
                    }
                }
            }
        }
        Ok(z)
    }

    fn seed_grid(&self) -> Vec<(Complex64, Complex64)> {
        let raw = self.raw();
        let mut seeds = vec![(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0))];
        let decay = (1e4f64).ln() / GRID as f64;
        for i in 0..GRID {
            let r = 1.0 - (-(i as f64 + 1.0) * decay).exp();
            for j in 0..GRID {
                let z = Complex64::from_polar(r, TAU * (j as f64 + 0.5) / GRID as f64);
                let w = raw.h(z);
                if w.re.is_finite() && w.im.is_finite() {
                    seeds.push((z, w));
                }
            }
        }
        seeds
    }

    pub fn domain(&self) -> &SlitStripDomain {
        &self.domain
    }

    pub fn sc_representation(&self) -> &ScRepresentation {
        &self.sc
    }

    pub fn certificate(&self) -> &KoenigsCertificate {
        &self.certificate
    }

    pub fn tips(&self) -> &[BoundaryPoint] {
        &self.tips
    }

    pub fn locate_fixed_points(&self) -> FixedPoints {
        FixedPoints {
            denjoy_wolff: self.a,
            repulsive: self.xis.clone(),
        }
    }

    /// `φ_t'(a) = e^{-πt}`, `φ_t'(ξ_k) = e^{πt/α_k}`, with locations.
    pub fn exact_multipliers(&self, t: f64) -> Result<MultiplierData> {
        let data = exact_multipliers(&self.domain, t)?;
        MultiplierData::new(
            FixedPointMultiplier {
                point: Some(self.a),
                ..*data.denjoy_wolff()
            },
            data.repulsive()
                .iter()
                .zip(&self.xis)
                .map(|(m, x)| FixedPointMultiplier { point: Some(*x), ..*m })
                .collect(),
        )
    }

    pub fn certificate_view(&self) -> CertificateView<'_> {
        CertificateView {
            alphas: self.domain.alphas(),
            gammas: self.domain.gammas(),
            denjoy_wolff: self.a,
            repulsive: &self.xis,
            slit_tips: &self.tips,
            sc_representation: &self.sc,
            certificate: &self.certificate,
        }
    }
}

/// Map data plus certificate, as exported.
#[derive(Debug, Serialize)]
pub struct CertificateView<'a> {
    pub alphas: &'a [f64],
    pub gammas: &'a [f64],
    pub denjoy_wolff: BoundaryPoint,
    pub repulsive: &'a [BoundaryPoint],
    pub slit_tips: &'a [BoundaryPoint],
    pub sc_representation: &'a ScRepresentation,
    pub certificate: &'a KoenigsCertificate,
}

fn newton(raw: &Raw<'_>, z0: Complex64, target: Complex64, tol: f64) -> Option<Complex64> {
    let mut z = z0;
    let mut r = raw.h(z) - target;
    if !(r.norm().is_finite()) {
        return None;
    }
    for _ in 0..40 {
        let rn = r.norm();
        if rn <= tol {
            return Some(z);
        }
        let dz = -r / raw.dh(z);
        if !(dz.norm().is_finite()) {
            return None;
        }
        if dz.norm() <= 4.0 * f64::EPSILON * z.norm().max(1e-300) {
            // step below the resolution of z
            return Some(z);
        }
        let mut s = 1.0;
        loop {
            let zn = z + dz * s;
            if zn.norm() < 1.0 {
                let rt = raw.h(zn) - target;
                if rt.norm() < rn {
                    z = zn;
                    r = rt;
                    break;
                }
            }
            s *= 0.5;
            if s < 1e-4 {
                return None;
            }
        }
    }
    (r.norm() <= tol).then_some(z)
}

/// Exact multipliers of `φ_t` from the domain data (no locations).
pub fn exact_multipliers(domain: &SlitStripDomain, t: f64) -> Result<MultiplierData> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(crate::error::invalid("time must be positive"));
    }
    MultiplierData::new(
        FixedPointMultiplier::exact(None, -PI * t / domain.nu()),
        domain
            .alphas()
            .iter()
            .map(|al| FixedPointMultiplier::exact(None, PI * t / al))
            .collect(),
    )
}

/// `φ_t = h^{-1}(h + t)`.
#[derive(Debug, Clone, Copy)]
pub struct SemigroupElement<'a> {
    map: &'a KoenigsMap,
    t: f64,
}

impl<'a> SemigroupElement<'a> {
    pub fn new(map: &'a KoenigsMap, t: f64) -> Result<Self> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(crate::error::invalid("semigroup time must be non-negative"));
        }
        Ok(Self { map, t })
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn map(&self) -> &'a KoenigsMap {
        self.map
    }

    pub fn apply(&self, z: Complex64) -> Result<Complex64> {
        semigroup_apply(self, z)
    }
}

pub fn semigroup_apply(element: &SemigroupElement<'_>, z: Complex64) -> Result<Complex64> {
    let w = element.map.eval_h(z)?;
    if element.t == 0.0 {
        return Ok(z);
    }
    // Ω + t ⊂ Ω, so the horizontal segment stays inside the domain
    element.map.track(z, w, w + element.t)
}
