//! Digons, reduced moduli, the change-of-variable law and the extremal star
//! system of a slit-strip Koenigs map.
//!
//! Convention: a digon `(D, a, b)` with chart `c: S -> D` satisfies
//! `|c(w) - a| ~ K_a e^{-δ(a) Re w}` and `|c(w) - b| ~ K_b e^{δ(b) Re w}`, and
//! its reduced modulus is
//! `m = lim_{ε -> 0} [λ(ε) + (1/δ(a) + 1/δ(b)) log ε] = log K_a / δ(a) + log K_b / δ(b)`,
//! where `λ(ε)` is the extremal length of the strip truncated where the chart
//! enters the `ε`-disks about the vertices. With this normalization
//! `m(𝔻, p, q) = (1/π) log |p - q|^2`.

mod chart;
pub mod laplace;

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::angular::SelfMapEvaluator;
use crate::error::{invalid, Error, Result};
use crate::geometry::BoundaryPoint;
use crate::koenigs::KoenigsMap;
use crate::numerics::{extrapolate_limit_real, GaussJacobi};

pub use chart::{ComposedChart, DigonChart, DiskChart, StarChart, SubstripChart};

/// A simply connected domain with two marked boundary points and the inner
/// angles at them, described by a strip chart.
#[derive(Clone)]
pub struct Digon<'a> {
    chart: Arc<dyn DigonChart + 'a>,
    a: BoundaryPoint,
    b: BoundaryPoint,
    delta_a: f64,
    delta_b: f64,
}

impl std::fmt::Debug for Digon<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Digon")
            .field("a", &self.a)
            .field("b", &self.b)
            .field("delta_a", &self.delta_a)
            .field("delta_b", &self.delta_b)
            .finish_non_exhaustive()
    }
}

impl<'a> Digon<'a> {
    pub fn new(
        chart: Arc<dyn DigonChart + 'a>,
        a: BoundaryPoint,
        b: BoundaryPoint,
        delta_a: f64,
        delta_b: f64,
    ) -> Result<Self> {
        if (a.value() - b.value()).norm() < 1e-12 {
            return Err(invalid("digon vertices must be distinct"));
        }
        for d in [delta_a, delta_b] {
            if !(d > 0.0 && d <= 2.0 * PI) {
                return Err(invalid(format!("digon angle {d} outside (0, 2π]")));
            }
        }
        let digon = Self {
            chart,
            a,
            b,
            delta_a,
            delta_b,
        };
        digon.check_ends()?;
        Ok(digon)
    }

    /// The strip ends must run into the declared vertices.
    fn check_ends(&self) -> Result<()> {
        for (vertex, other, delta, sign) in [(self.a, self.b, self.delta_a, 1.0), (self.b, self.a, self.delta_b, -1.0)] {
            let mut state = None;
            let mut last = f64::INFINITY;
            for s in [2.0, 4.0, 8.0, 16.0] {
                let w = Complex64::new(sign * s / delta, 0.5);
                let (z, st) = self.chart.eval_tracked(w, state)?;
                state = Some(st);
                let d = (z - vertex.value()).norm();
                if s > 2.0 && d > last {
                    return Err(invalid("chart end does not approach its vertex"));
                }
                last = d;
            }
            let w = Complex64::new(sign * 16.0 / delta, 0.5);
            let z = self.chart.eval_tracked(w, state)?.0;
            if !(last < 0.05 && last < 0.5 * (z - other.value()).norm()) {
                return Err(invalid(format!(
                    "chart end stays {last:e} away from its vertex"
                )));
            }
        }
        Ok(())
    }

    pub fn chart(&self) -> &Arc<dyn DigonChart + 'a> {
        &self.chart
    }

    pub fn vertices(&self) -> (BoundaryPoint, BoundaryPoint) {
        (self.a, self.b)
    }

    pub fn angles(&self) -> (f64, f64) {
        (self.delta_a, self.delta_b)
    }

    /// The same digon seen through a univalent self-map fixing both vertices.
    pub fn image_under(&self, phi: &'a dyn SelfMapEvaluator) -> Result<Digon<'a>> {
        Digon::new(
            Arc::new(ComposedChart::new(phi, self.chart.clone())),
            self.a,
            self.b,
            self.delta_a,
            self.delta_b,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulusOptions {
    /// Largest truncation radius.
    pub eps0: f64,
    /// Number of halvings of `eps0`.
    pub levels: usize,
    /// Gauss-Legendre nodes across the strip.
    pub nodes: usize,
    /// Largest accepted extrapolation error.
    pub tolerance: f64,
}

impl Default for ModulusOptions {
    fn default() -> Self {
        Self {
            eps0: 1e-2,
            levels: 7,
            nodes: 16,
            tolerance: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReducedModulus {
    pub value: f64,
    pub error: f64,
    pub epsilons: Vec<f64>,
    /// `λ(ε) + (1/δ(a) + 1/δ(b)) log ε` at each truncation radius.
    pub regularized: Vec<f64>,
    /// Inner angles read off the chart asymptotics.
    pub measured_angles: (f64, f64),
    pub angle_error: f64,
}

/// Abscissa `x` with `|c(x + iy) - v| = ε`, the chart end at `sign inf` running
/// into `v` with rate `delta`.
#[allow(clippy::too_many_arguments)]
fn cut_abscissa(
    chart: &dyn DigonChart,
    y: f64,
    vertex: Complex64,
    sign: f64,
    delta: f64,
    log_eps: f64,
    guess: f64,
    state: &mut Option<Complex64>,
) -> Result<f64> {
    let g = |x: f64, st: &mut Option<Complex64>| -> Result<f64> {
        let (z, s) = chart.eval_tracked(Complex64::new(x, y), *st)?;
        *st = Some(s);
        Ok((z - vertex).norm().ln() - log_eps)
    };
    let max_step = 2.0 / delta;
    // latest abscissas with g > 0 and g < 0
    let mut pos: Option<f64> = None;
    let mut neg: Option<f64> = None;
    let note = |x: f64, gx: f64, pos: &mut Option<f64>, neg: &mut Option<f64>| {
        if gx > 0.0 {
            *pos = Some(x);
        } else {
            *neg = Some(x);
        }
    };
    let mut x0 = guess;
    let mut g0 = g(x0, state)?;
    note(x0, g0, &mut pos, &mut neg);
    let mut x1 = x0 + (sign * g0 / delta).clamp(-max_step, max_step);
    let mut g1 = g(x1, state)?;
    note(x1, g1, &mut pos, &mut neg);
    for _ in 0..80 {
        if g1 == 0.0 {
            return Ok(x1);
        }
        let slope = (g1 - g0) / (x1 - x0);
        let mut x2 = if slope.is_finite() && slope * sign < 0.0 {
            x1 - g1 / slope
        } else {
            x1 + sign * g1 / delta
        };
        x2 = x1 + (x2 - x1).clamp(-max_step, max_step);
        if let (Some(p), Some(q)) = (pos, neg) {
            let (lo, hi) = (p.min(q), p.max(q));
            if !(x2 > lo && x2 < hi) {
                x2 = 0.5 * (lo + hi);
            }
        }
        let g2 = g(x2, state)?;
        note(x2, g2, &mut pos, &mut neg);
        if (x2 - x1).abs() <= 1e-12 * x1.abs().max(1.0) || g2.abs() <= 1e-13 {
            return Ok(x2);
        }
        x0 = x1;
        g0 = g1;
        x1 = x2;
        g1 = g2;
    }
    Err(Error::ModulusUnstable {
        last: x1,
        spread: (x1 - x0).abs(),
    })
}

/// Cut curves of one digon across a sequence of truncation radii, warm
/// started from the previous radius.
struct Truncation<'d, 'a> {
    digon: &'d Digon<'a>,
    ys: Vec<f64>,
    wts: Vec<f64>,
    xa: Vec<f64>,
    xb: Vec<f64>,
    sa: Vec<Option<Complex64>>,
    sb: Vec<Option<Complex64>>,
    last_log_eps: Option<f64>,
}

struct Level {
    regularized: f64,
    angle_a: f64,
    angle_b: f64,
}

impl<'d, 'a> Truncation<'d, 'a> {
    fn new(digon: &'d Digon<'a>, nodes: usize) -> Result<Self> {
        let rule = GaussJacobi::new(nodes, 0.0, 0.0)?;
        let ys: Vec<f64> = rule.nodes().iter().map(|x| 0.5 * (1.0 + x)).collect();
        let wts: Vec<f64> = rule.weights().iter().map(|w| 0.5 * w).collect();
        let (a, b) = (digon.a.value(), digon.b.value());
        let mut t = Self {
            digon,
            xa: Vec::with_capacity(ys.len()),
            xb: Vec::with_capacity(ys.len()),
            sa: Vec::with_capacity(ys.len()),
            sb: Vec::with_capacity(ys.len()),
            ys,
            wts,
            last_log_eps: None,
        };
        for &y in &t.ys {
            let (z, s) = digon.chart.eval_tracked(Complex64::new(0.0, y), None)?;
            // guesses are completed once the first radius is known
            t.xa.push((z - a).norm().ln() / digon.delta_a);
            t.xb.push(-(z - b).norm().ln() / digon.delta_b);
            t.sa.push(Some(s));
            t.sb.push(Some(s));
        }
        Ok(t)
    }

    fn level(&mut self, eps: f64) -> Result<Level> {
        let d = self.digon;
        let chart = d.chart.as_ref();
        let (a, b) = (d.a.value(), d.b.value());
        let (da, db) = (d.delta_a, d.delta_b);
        let log_eps = eps.ln();
        let prev = self.last_log_eps.unwrap_or(0.0);
        let shift = (-(log_eps - prev) / da, (log_eps - prev) / db);
        let mut width = 0.0;
        for i in 0..self.ys.len() {
            let y = self.ys[i];
            self.xa[i] = cut_abscissa(chart, y, a, 1.0, da, log_eps, self.xa[i] + shift.0, &mut self.sa[i])?;
            self.xb[i] = cut_abscissa(chart, y, b, -1.0, db, log_eps, self.xb[i] + shift.1, &mut self.sb[i])?;
            width += self.wts[i] * (self.xa[i] - self.xb[i]);
        }
        self.last_log_eps = Some(log_eps);
        let mid = self.ys.len() / 2;
        Ok(Level {
            regularized: width + (1.0 / da + 1.0 / db) * log_eps,
            angle_a: -turning(chart, self.xa[mid], a, self.sa[mid])?,
            angle_b: turning(chart, self.xb[mid], b, self.sb[mid])?,
        })
    }
}

/// `λ(ε) + (1/δ(a) + 1/δ(b)) log ε` at a single truncation radius, with `λ(ε)`
/// taken as the mean width of the truncated strip.
pub fn regularized_modulus(d: &Digon<'_>, eps: f64, nodes: usize) -> Result<f64> {
    if !(eps > 0.0 && eps < 0.5) || nodes < 2 {
        return Err(invalid("need 0 < eps < 0.5 and at least 2 nodes"));
    }
    Ok(Truncation::new(d, nodes)?.level(eps)?.regularized)
}

/// Reduced modulus by truncation at a halving sequence of radii and
/// polynomial extrapolation in `ε`.
pub fn reduced_modulus(d: &Digon<'_>, opts: &ModulusOptions) -> Result<ReducedModulus> {
    if !(opts.eps0 > 0.0 && opts.eps0 < 0.5) || opts.levels < 3 || opts.nodes < 2 {
        return Err(invalid("modulus options need 0 < eps0 < 0.5, at least 3 levels and 2 nodes"));
    }
    let mut trunc = Truncation::new(d, opts.nodes)?;
    let mut epsilons = Vec::with_capacity(opts.levels);
    let mut regularized = Vec::with_capacity(opts.levels);
    let mut angles_a = Vec::with_capacity(opts.levels);
    let mut angles_b = Vec::with_capacity(opts.levels);
    for j in 0..opts.levels {
        let eps = opts.eps0 * 0.5f64.powi(j as i32);
        let level = trunc.level(eps)?;
        epsilons.push(eps);
        regularized.push(level.regularized);
        angles_a.push((eps, level.angle_a));
        angles_b.push((eps, level.angle_b));
    }

    let samples: Vec<(f64, f64)> = epsilons.iter().copied().zip(regularized.iter().copied()).collect();
    let (value, error, non_monotone) = extrapolate_limit_real(&samples)?;
    let spread = (regularized[regularized.len() - 1] - regularized[regularized.len() - 2]).abs();
    if non_monotone || !error.is_finite() || error > opts.tolerance * value.abs().max(1.0) {
        return Err(Error::ModulusUnstable {
            last: *regularized.last().unwrap_or(&value),
            spread: if non_monotone { spread } else { error },
        });
    }
    let (ma, ea, _) = extrapolate_limit_real(&angles_a)?;
    let (mb, eb, _) = extrapolate_limit_real(&angles_b)?;
    Ok(ReducedModulus {
        value,
        error,
        epsilons,
        regularized,
        measured_angles: (ma, mb),
        angle_error: ea.max(eb),
    })
}

/// `d arg(c(x + iy) - v) / dy` across `y in [1/4, 3/4]`.
fn turning(chart: &dyn DigonChart, x: f64, vertex: Complex64, state: Option<Complex64>) -> Result<f64> {
    let mut st = state;
    let mut prev: Option<Complex64> = None;
    let mut total = 0.0;
    for y in [0.25, 0.375, 0.5, 0.625, 0.75] {
        let (z, s) = chart.eval_tracked(Complex64::new(x, y), st)?;
        st = Some(s);
        let v = z - vertex;
        if let Some(p) = prev {
            total += (v / p).arg();
        }
        prev = Some(v);
    }
    Ok(total / 0.5)
}

/// `m + log(da) / δ_a + log(db) / δ_b`: the reduced modulus of the image of a
/// digon under a map conformal at the vertices with angular derivatives
/// `da`, `db` there.
pub fn change_of_variable(m: f64, delta_a: f64, delta_b: f64, da: f64, db: f64) -> Result<f64> {
    if !(da > 0.0 && db > 0.0) || !da.is_finite() || !db.is_finite() {
        return Err(invalid("angular derivatives must be positive"));
    }
    for d in [delta_a, delta_b] {
        if !(d > 0.0 && d <= 2.0 * PI) {
            return Err(invalid(format!("digon angle {d} outside (0, 2π]")));
        }
    }
    Ok(m + da.ln() / delta_a + db.ln() / delta_b)
}

/// Closed-form reduced modulus of `(𝔻, p, q)`.
pub fn disk_modulus(p: BoundaryPoint, q: BoundaryPoint) -> f64 {
    (p.value() - q.value()).norm_sqr().ln() / PI
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VertexIndexSet {
    pub vertex: BoundaryPoint,
    pub members: Vec<usize>,
}

/// Digons `D_k` joining a common center `a` to endpoints `ξ_k`, with heights
/// `α_k`.
#[derive(Debug, Clone)]
pub struct DigonSystem<'a> {
    center: BoundaryPoint,
    endpoints: Vec<BoundaryPoint>,
    alphas: Vec<f64>,
    digons: Vec<Digon<'a>>,
    index_sets: Vec<VertexIndexSet>,
    moduli: Vec<Option<ReducedModulus>>,
}

impl<'a> DigonSystem<'a> {
    pub fn new(
        center: BoundaryPoint,
        endpoints: Vec<BoundaryPoint>,
        alphas: Vec<f64>,
        digons: Vec<Digon<'a>>,
    ) -> Result<Self> {
        let n = digons.len();
        if n == 0 || endpoints.len() != n || alphas.len() != n {
            return Err(invalid("digon system needs one endpoint and height per digon"));
        }
        if alphas.iter().any(|a| !(*a > 0.0)) || (alphas.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
            return Err(invalid("heights must be positive and sum to 1"));
        }
        let same = |p: &BoundaryPoint, q: &BoundaryPoint| (p.value() - q.value()).norm() < 1e-12;
        for (k, d) in digons.iter().enumerate() {
            if !same(&d.a, &center) || !same(&d.b, &endpoints[k]) {
                return Err(invalid(format!("digon {k} does not join the center to its endpoint")));
            }
        }
        let mut index_sets: Vec<VertexIndexSet> = Vec::new();
        for (k, d) in digons.iter().enumerate() {
            for v in [d.a, d.b] {
                match index_sets.iter_mut().find(|s| same(&s.vertex, &v)) {
                    Some(s) => s.members.push(k),
                    None => index_sets.push(VertexIndexSet { vertex: v, members: vec![k] }),
                }
            }
        }
        let system = Self {
            center,
            endpoints,
            alphas,
            digons,
            index_sets,
            moduli: vec![None; n],
        };
        system.check_compatibility()?;
        system.check_overlap()?;
        Ok(system)
    }

    /// Required angle `π α_k / Σ_{j in I_v} α_j` of digon `k` at vertex `v`.
    pub fn compatible_angle(&self, k: usize, v: &BoundaryPoint) -> Option<f64> {
        let set = self
            .index_sets
            .iter()
            .find(|s| (s.vertex.value() - v.value()).norm() < 1e-12)?;
        let total: f64 = set.members.iter().map(|j| self.alphas[*j]).sum();
        Some(PI * self.alphas[k] / total)
    }

    fn check_compatibility(&self) -> Result<()> {
        for (k, d) in self.digons.iter().enumerate() {
            for (v, delta) in [(d.a, d.delta_a), (d.b, d.delta_b)] {
                let want = self.compatible_angle(k, &v).unwrap_or(f64::NAN);
                if !((delta - want).abs() <= 1e-9) {
                    return Err(invalid(format!(
                        "digon {k} has angle {delta} at a vertex, compatibility needs {want}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Sampled disjointness: interior points of each digon must not lie in
    /// another digon, where membership tests are available.
    fn check_overlap(&self) -> Result<()> {
        let n = self.digons.len();
        if n < 2 {
            return Ok(());
        }
        for (i, d) in self.digons.iter().enumerate() {
            let scale = 1.0 / d.delta_a.min(d.delta_b);
            let mut state = None;
            for p in 0..9 {
                let x = scale * (-3.0 + 0.75 * p as f64);
                for q in 1..6 {
                    let y = q as f64 / 6.0;
                    let (z, s) = d.chart.eval_tracked(Complex64::new(x, y), state)?;
                    state = Some(s);
                    for (j, other) in self.digons.iter().enumerate() {
                        if j != i && other.chart.contains(z) == Some(true) {
                            return Err(invalid(format!("digons {i} and {j} overlap near {z}")));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn center(&self) -> BoundaryPoint {
        self.center
    }

    pub fn endpoints(&self) -> &[BoundaryPoint] {
        &self.endpoints
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn digons(&self) -> &[Digon<'a>] {
        &self.digons
    }

    pub fn index_sets(&self) -> &[VertexIndexSet] {
        &self.index_sets
    }

    pub fn moduli(&self) -> &[Option<ReducedModulus>] {
        &self.moduli
    }

    /// Attach the reduced modulus of every digon.
    pub fn with_moduli(mut self, opts: &ModulusOptions) -> Result<Self> {
        let moduli = self
            .digons
            .iter()
            .map(|d| reduced_modulus(d, opts).map(Some))
            .collect::<Result<Vec<_>>>()?;
        self.moduli = moduli;
        Ok(self)
    }

    /// Images `φ(D_k)` under a univalent self-map fixing the center and every
    /// endpoint; angles are carried over and moduli are not attached.
    pub fn image_under(&self, phi: &'a dyn SelfMapEvaluator) -> Result<DigonSystem<'a>> {
        let digons = self
            .digons
            .iter()
            .map(|d| d.image_under(phi))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            center: self.center,
            endpoints: self.endpoints.clone(),
            alphas: self.alphas.clone(),
            digons,
            index_sets: self.index_sets.clone(),
            moduli: vec![None; self.alphas.len()],
        })
    }

    pub fn report(&self) -> Result<DigonSystemReport> {
        let digons = self
            .digons
            .iter()
            .zip(&self.moduli)
            .map(|(d, m)| DigonReport {
                a: d.a.angle(),
                b: d.b.angle(),
                delta_a: d.delta_a,
                delta_b: d.delta_b,
                modulus: m.clone(),
            })
            .collect();
        Ok(DigonSystemReport {
            center: self.center.angle(),
            endpoints: self.endpoints.iter().map(|e| e.angle()).collect(),
            alphas: self.alphas.clone(),
            digons,
            weighted_sum: weighted_modulus_sum(self)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DigonReport {
    /// Vertex angles (arguments on the circle).
    pub a: f64,
    pub b: f64,
    /// Inner angles of the digon at its vertices.
    pub delta_a: f64,
    pub delta_b: f64,
    pub modulus: Option<ReducedModulus>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DigonSystemReport {
    pub center: f64,
    pub endpoints: Vec<f64>,
    pub alphas: Vec<f64>,
    pub digons: Vec<DigonReport>,
    pub weighted_sum: f64,
}

/// `D_k = h^{-1}(k-th channel strip)` with angles `(π α_k, π)`, moduli attached.
pub fn extremal_star_system<'a>(
    map: &'a KoenigsMap,
    alpha: &[f64],
    opts: &ModulusOptions,
) -> Result<DigonSystem<'a>> {
    let widths = map.domain().alphas();
    if alpha.len() != widths.len() || alpha.iter().zip(widths).any(|(x, y)| (x - y).abs() > 1e-12) {
        return Err(Error::WeightMismatch);
    }
    let fixed = map.locate_fixed_points();
    let digons = (0..widths.len())
        .map(|k| {
            Digon::new(
                Arc::new(StarChart::new(map, k)?),
                fixed.denjoy_wolff,
                fixed.repulsive[k],
                PI * widths[k],
                PI,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    DigonSystem::new(fixed.denjoy_wolff, fixed.repulsive.clone(), widths.to_vec(), digons)?.with_moduli(opts)
}

/// `Σ α_k^2 m(D_k)`.
pub fn weighted_modulus_sum(system: &DigonSystem<'_>) -> Result<f64> {
    system
        .moduli
        .iter()
        .zip(&system.alphas)
        .enumerate()
        .map(|(k, (m, a))| {
            m.as_ref()
                .map(|m| a * a * m.value)
                .ok_or_else(|| Error::Missing(format!("reduced modulus of digon {k}")))
        })
        .sum()
}
