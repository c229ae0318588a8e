//! Finite-element oracle for the extremal length of a curvilinear
//! quadrilateral: piecewise-linear Dirichlet problem on a boundary-fitted
//! (Coons patch) grid, solved by Jacobi-preconditioned conjugate gradients.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::geometry::BoundaryPoint;

type Side = Box<dyn Fn(f64) -> Complex64>;

/// Quadrilateral bounded by four parametrized sides, `s, t in [0, 1]`.
/// `bottom(0) = left(0)`, `bottom(1) = right(0)`, `top(0) = left(1)`,
/// `top(1) = right(1)`. Curves joining `left` to `right` are measured.
pub struct Quadrilateral {
    pub bottom: Side,
    pub top: Side,
    pub left: Side,
    pub right: Side,
}

impl Quadrilateral {
    fn corner_gap(&self) -> f64 {
        [
            ((self.bottom)(0.0) - (self.left)(0.0)).norm(),
            ((self.bottom)(1.0) - (self.right)(0.0)).norm(),
            ((self.top)(0.0) - (self.left)(1.0)).norm(),
            ((self.top)(1.0) - (self.right)(1.0)).norm(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    /// Transfinite interpolation of the four sides.
    pub fn coons(&self, s: f64, t: f64) -> Complex64 {
        let (b, tp, l, r) = (&self.bottom, &self.top, &self.left, &self.right);
        (b)(s) * (1.0 - t) + (tp)(s) * t + (l)(t) * (1.0 - s) + (r)(t) * s
            - ((b)(0.0) * ((1.0 - s) * (1.0 - t))
                + (b)(1.0) * (s * (1.0 - t))
                + (tp)(0.0) * ((1.0 - s) * t)
                + (tp)(1.0) * (s * t))
    }
}

/// Boundary-fitted grid of `𝔻` minus the closed `ε`-disks about the boundary
/// points `a` and `b`, as a map `(s, t) -> z` of the unit square. `s = 0` is the
/// arc about `b`, `s = 1` the arc about `a`.
///
/// Cross-sections `s = const` are hyperbolic geodesics between matching points
/// of the two long sides, blended onto the truncation arcs; the long sides are
/// graded by `log(|z - b| / |z - a|)`, which refines geometrically toward both
/// vertices.
pub fn disk_digon_grid(a: BoundaryPoint, b: BoundaryPoint, eps: f64) -> Result<impl Fn(f64, f64) -> Complex64> {
    let sep = (a.value() - b.value()).norm();
    if !(eps > 0.0 && eps < 0.25 * sep) {
        return Err(invalid("truncation radius must be small compared to the vertex distance"));
    }
    let psi = 2.0 * (eps / 2.0).asin();
    let tb = b.angle();
    let ccw = b.ccw_to(&a);
    let (av, bv) = (a.value(), b.value());
    let g = move |theta: f64| {
        let z = Complex64::from_polar(1.0, theta);
        ((z - bv).norm() / (z - av).norm()).ln()
    };
    let arc = move |from: f64, to: f64| {
        let (g0, g1) = (g(from), g(to));
        move |s: f64| {
            let target = g0 + s * (g1 - g0);
            let theta = if s <= 0.0 {
                from
            } else if s >= 1.0 {
                to
            } else {
                crate::numerics::brent(|th| g(th) - target, from, to, 1e-15).unwrap_or(from + s * (to - from))
            };
            BoundaryPoint::from_angle(theta)
        }
    };
    let bottom = arc(tb + psi, tb + ccw - psi);
    let top = arc(tb - psi, tb + ccw - 2.0 * PI + psi);
    let open = PI - psi;
    let left = move |t: f64| bv + Complex64::from_polar(eps, (-bv).arg() - open / 2.0 + t * open);
    let right = move |t: f64| av + Complex64::from_polar(eps, (-av).arg() + open / 2.0 - t * open);
    // geodesic from bottom(s) (t = 0) to top(s) (t = 1)
    let geodesic = move |s: f64, t: f64| -> Complex64 {
        let x = Complex64::new(-(PI * t).cos(), 0.0);
        match crate::geometry::MobiusMap::sending_pair(top(s), bottom(s)).and_then(|m| m.apply(x)) {
            Ok(z) => z,
            Err(_) => Complex64::new(f64::NAN, f64::NAN),
        }
    };
    let corners = [
        (left(0.0) - geodesic(0.0, 0.0)).norm(),
        (left(1.0) - geodesic(0.0, 1.0)).norm(),
        (right(0.0) - geodesic(1.0, 0.0)).norm(),
        (right(1.0) - geodesic(1.0, 1.0)).norm(),
    ];
    if corners.iter().any(|c| !(*c < 1e-12)) {
        return Err(invalid("truncated quadrilateral sides do not close up"));
    }
    Ok(move |s: f64, t: f64| {
        geodesic(s, t) + (left(t) - geodesic(0.0, t)) * (1.0 - s) + (right(t) - geodesic(1.0, t)) * s
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LaplaceOptions {
    /// Grid nodes along the measured direction (`s`).
    pub ns: usize,
    /// Grid nodes across (`t`).
    pub nt: usize,
    pub cg_tolerance: f64,
    pub max_iterations: usize,
}

impl Default for LaplaceOptions {
    fn default() -> Self {
        Self {
            ns: 161,
            nt: 81,
            cg_tolerance: 1e-11,
            max_iterations: 20_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LaplaceSolution {
    /// Dirichlet energy of the potential, the conformal modulus.
    pub energy: f64,
    pub extremal_length: f64,
    pub iterations: usize,
}

/// Extremal length of the family of curves joining `left` to `right`.
pub fn extremal_length(q: &Quadrilateral, opts: &LaplaceOptions) -> Result<LaplaceSolution> {
    if q.corner_gap() > 1e-9 {
        return Err(invalid("quadrilateral sides do not meet at the corners"));
    }
    grid_extremal_length(&|s, t| q.coons(s, t), opts)
}

/// Extremal length of the curves joining the sides `s = 0` and `s = 1` of the
/// image of a structured grid map of the unit square.
pub fn grid_extremal_length(grid: &dyn Fn(f64, f64) -> Complex64, opts: &LaplaceOptions) -> Result<LaplaceSolution> {
    let (ns, nt) = (opts.ns, opts.nt);
    if ns < 3 || nt < 2 {
        return Err(invalid("Laplace grid needs ns >= 3 and nt >= 2"));
    }
    let idx = |i: usize, j: usize| i * nt + j;
    let mut pts = vec![Complex64::new(0.0, 0.0); ns * nt];
    for i in 0..ns {
        let s = i as f64 / (ns - 1) as f64;
        for j in 0..nt {
            let t = j as f64 / (nt - 1) as f64;
            pts[idx(i, j)] = grid(s, t);
        }
    }

    let orientation = {
        let (p0, p1, p2) = (pts[idx(0, 0)], pts[idx(1, 0)], pts[idx(1, 1)]);
        ((p1 - p0).re * (p2 - p0).im - (p1 - p0).im * (p2 - p0).re).signum()
    };
    // stencil[node][k], k = (di + 1) * 3 + (dj + 1)
    let mut stencil = vec![[0.0f64; 9]; ns * nt];
    let mut add_triangle = |v: [(usize, usize); 3]| -> Result<()> {
        let p: Vec<Complex64> = v.iter().map(|&(i, j)| pts[idx(i, j)]).collect();
        let area2 = (p[1] - p[0]).re * (p[2] - p[0]).im - (p[1] - p[0]).im * (p[2] - p[0]).re;
        if !(area2 * orientation > 0.0) {
            return Err(invalid("folded or degenerate element in the boundary-fitted grid"));
        }
        for a in 0..3 {
            let (ea1, ea2) = (p[(a + 1) % 3], p[(a + 2) % 3]);
            let ga = Complex64::new(ea1.im - ea2.im, ea2.re - ea1.re);
            for bb in 0..3 {
                let (eb1, eb2) = (p[(bb + 1) % 3], p[(bb + 2) % 3]);
                let gb = Complex64::new(eb1.im - eb2.im, eb2.re - eb1.re);
                let k = (ga.re * gb.re + ga.im * gb.im) / (2.0 * area2.abs());
                let (ia, ja) = v[a];
                let (ib, jb) = v[bb];
                let slot = ((ib as isize - ia as isize + 1) * 3 + (jb as isize - ja as isize + 1)) as usize;
                stencil[idx(ia, ja)][slot] += k;
            }
        }
        Ok(())
    };
    for i in 0..ns - 1 {
        for j in 0..nt - 1 {
            add_triangle([(i, j), (i + 1, j), (i + 1, j + 1)])?;
            add_triangle([(i, j), (i + 1, j + 1), (i, j + 1)])?;
        }
    }

    let neighbors = |i: usize, j: usize| {
        (0..9).filter_map(move |k| {
            let ii = i as isize + (k / 3) as isize - 1;
            let jj = j as isize + (k % 3) as isize - 1;
            (ii >= 0 && jj >= 0 && (ii as usize) < ns && (jj as usize) < nt).then_some((k, ii as usize, jj as usize))
        })
    };
    let matvec = |u: &[f64], out: &mut [f64]| {
        for i in 0..ns {
            for j in 0..nt {
                let row = &stencil[idx(i, j)];
                out[idx(i, j)] = neighbors(i, j).map(|(k, ii, jj)| row[k] * u[idx(ii, jj)]).sum();
            }
        }
    };
    let free = |n: usize| {
        let i = n / nt;
        i > 0 && i < ns - 1
    };

    let mut u = vec![0.0; ns * nt];
    for j in 0..nt {
        u[idx(ns - 1, j)] = 1.0;
    }
    let mut ku = vec![0.0; ns * nt];
    matvec(&u, &mut ku);
    let mut r: Vec<f64> = (0..ns * nt).map(|n| if free(n) { -ku[n] } else { 0.0 }).collect();
    let diag: Vec<f64> = stencil.iter().map(|row| row[4]).collect();
    let mut z: Vec<f64> = (0..ns * nt).map(|n| if free(n) { r[n] / diag[n] } else { 0.0 }).collect();
    let mut p = z.clone();
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    let r0 = r.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-300);
    let mut ap = vec![0.0; ns * nt];
    let mut iterations = 0;
    loop {
        let rn = r.iter().map(|x| x * x).sum::<f64>().sqrt();
        if rn <= opts.cg_tolerance * r0 {
            break;
        }
        if iterations >= opts.max_iterations {
            return Err(Error::SolveFailed {
                iterations,
                residual_norm: rn,
                best: Vec::new(),
            });
        }
        matvec(&p, &mut ap);
        for (n, v) in ap.iter_mut().enumerate() {
            if !free(n) {
                *v = 0.0;
            }
        }
        let alpha = rz / p.iter().zip(&ap).map(|(a, b)| a * b).sum::<f64>();
        for n in 0..ns * nt {
            u[n] += alpha * p[n];
            r[n] -= alpha * ap[n];
        }
        for n in 0..ns * nt {
            z[n] = if free(n) { r[n] / diag[n] } else { 0.0 };
        }
        let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz_new / rz;
        rz = rz_new;
        for n in 0..ns * nt {
            p[n] = z[n] + beta * p[n];
        }
        iterations += 1;
    }
    matvec(&u, &mut ku);
    let energy: f64 = u.iter().zip(&ku).map(|(a, b)| a * b).sum();
    Ok(LaplaceSolution {
        energy,
        extremal_length: 1.0 / energy,
        iterations,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LaplaceOracle {
    pub eps: f64,
    /// `λ(ε) + (1/δ(a) + 1/δ(b)) log ε` on the fine grid.
    pub regularized: f64,
    /// Difference between the fine and the coarse (half-resolution) grid.
    pub grid_change: f64,
}

/// Regularized extremal length of the `ε`-truncated disk digon `(𝔻, a, b)`.
pub fn disk_digon_oracle(a: BoundaryPoint, b: BoundaryPoint, eps: f64, opts: &LaplaceOptions) -> Result<LaplaceOracle> {
    let grid = disk_digon_grid(a, b, eps)?;
    let fine = grid_extremal_length(&grid, opts)?;
    let coarse = grid_extremal_length(
        &grid,
        &LaplaceOptions {
            ns: opts.ns.div_ceil(2),
            nt: opts.nt.div_ceil(2),
            ..*opts
        },
    )?;
    let growth = 2.0 / PI * eps.ln();
    Ok(LaplaceOracle {
        eps,
        regularized: fine.extremal_length + growth,
        grid_change: (fine.extremal_length - coarse.extremal_length).abs(),
    })
}
