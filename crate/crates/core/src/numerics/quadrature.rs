//! Quadrature on a real interval for complex-valued integrands.
//!
//! Integrands are allowed an algebraic endpoint behaviour `(x - L)^mu_l` and
//! `(R - x)^mu_r` with declared exponents. Panels touching a declared singular
//! endpoint are integrated with a one-sided Gauss-Jacobi rule that absorbs the
//! power; everything else goes through adaptive Gauss-Kronrod (7, 15)
//! bisection.
//!
//! Error model: the returned `error` is the sum of the per-panel estimates
//! (Kronrod-minus-Gauss for regular panels, order doubling for Jacobi panels).
//! On success `error <= max(rel_tol * |value|, ABS_FLOOR)`.

use std::collections::BinaryHeap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

const ABS_FLOOR: f64 = 1e-15;
const MAX_PANELS: usize = 4000;
const ROUNDOFF: f64 = 50.0 * f64::EPSILON;
const JACOBI_ORDER: usize = 24;

/// Interval, endpoint exponents and relative tolerance for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub lower: f64,
    pub upper: f64,
    pub exp_lower: f64,
    pub exp_upper: f64,
    pub rel_tol: f64,
}

impl QuadratureSpec {
    pub fn new(lower: f64, upper: f64, rel_tol: f64) -> Result<Self> {
        Self::with_exponents(lower, upper, 0.0, 0.0, rel_tol)
    }

    pub fn with_exponents(
        lower: f64,
        upper: f64,
        exp_lower: f64,
        exp_upper: f64,
        rel_tol: f64,
    ) -> Result<Self> {
        if !(lower.is_finite() && upper.is_finite() && lower < upper) {
            return Err(invalid(format!("bad interval [{lower}, {upper}]")));
        }
        if !(exp_lower > -1.0 && exp_upper > -1.0) {
            return Err(invalid("endpoint exponents must exceed -1"));
        }
        if !(rel_tol > 0.0 && rel_tol < 1.0) {
            return Err(invalid("tolerance must lie in (0, 1)"));
        }
        Ok(Self {
            lower,
            upper,
            exp_lower,
            exp_upper,
            rel_tol,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: Complex64,
    pub error: f64,
}

/// Integrate `f` over the interval described by `spec`.
pub fn integrate<F>(f: F, spec: &QuadratureSpec) -> Result<Quadrature>
where
    F: Fn(f64) -> Complex64,
{
    let (l, r) = (spec.lower, spec.upper);
    let sing_l = spec.exp_lower != 0.0;
    let sing_r = spec.exp_upper != 0.0;
    let width = r - l;

    let mut total = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    let mut mid_lo = l;
    let mut mid_hi = r;

    if sing_l {
        let cut = l + 0.25 * width;
        let q = singular_end(&f, l, cut, spec.exp_lower, true, spec.rel_tol)?;
        total += q.value;
        err += q.error;
        mid_lo = cut;
    }
    if sing_r {
        let cut = r - 0.25 * width;
        let q = singular_end(&f, cut, r, spec.exp_upper, false, spec.rel_tol)?;
        total += q.value;
        err += q.error;
        mid_hi = cut;
    }
    let q = adaptive_gk(&f, mid_lo, mid_hi, spec.rel_tol, ABS_FLOOR)?;
    total += q.value;
    err += q.error;
    Ok(Quadrature {
        value: total,
        error: err,
    })
}

/// Integrate a panel `[lo, hi]` whose `lo` (if `at_lower`) or `hi` endpoint
/// carries the power `mu`. The singular sub-panel is halved until the
/// Jacobi rule is resolved; the peeled remainders go to Gauss-Kronrod.
fn singular_end<F>(f: &F, lo: f64, hi: f64, mu: f64, at_lower: bool, rel_tol: f64) -> Result<Quadrature>
where
    F: Fn(f64) -> Complex64,
{
    let coarse = GaussJacobi::one_sided(JACOBI_ORDER, mu)?;
    let fine = GaussJacobi::one_sided(2 * JACOBI_ORDER, mu)?;
    let mut acc = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    let (mut a, mut b) = (lo, hi);
    for _ in 0..60 {
        let q1 = coarse.apply(f, a, b, at_lower);
        let q2 = fine.apply(f, a, b, at_lower);
        let diff = (q2 - q1).norm();
        if diff <= (rel_tol * q2.norm()).max(ABS_FLOOR) {
            acc += q2;
            err += diff;
            return Ok(Quadrature { value: acc, error: err });
        }
        let m = 0.5 * (a + b);
        let (reg_lo, reg_hi) = if at_lower { (m, b) } else { (a, m) };
        let q = adaptive_gk(f, reg_lo, reg_hi, rel_tol, ABS_FLOOR)?;
        acc += q.value;
        err += q.error;
        if at_lower {
            b = m;
        } else {
            a = m;
        }
    }
    Err(Error::QuadratureNonConvergence {
        estimate: acc,
        error: f64::INFINITY,
    })
}

/// Gauss-Jacobi rule for the weight `(1 - x)^alpha (1 + x)^beta` on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussJacobi {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    alpha: f64,
    beta: f64,
}

impl GaussJacobi {
    /// Golub-Welsch construction.
    pub fn new(n: usize, alpha: f64, beta: f64) -> Result<Self> {
        if n < 2 || !(alpha > -1.0 && beta > -1.0) {
            return Err(invalid("Gauss-Jacobi needs n >= 2 and exponents > -1"));
        }
        let mut jm = DMatrix::<f64>::zeros(n, n);
        let ab = alpha + beta;
        for i in 0..n {
            let k = i as f64;
            let s = 2.0 * k + ab;
            let diag = if i == 0 {
                (beta - alpha) / (ab + 2.0)
            } else {
                (beta * beta - alpha * alpha) / (s * (s + 2.0))
            };
            jm[(i, i)] = diag;
            if i + 1 < n {
                let k1 = k + 1.0;
                let s1 = 2.0 * k1 + ab;
                let off = 2.0 / s1
                    * (k1 * (k1 + alpha) * (k1 + beta) * (k1 + ab) / ((s1 + 1.0) * (s1 - 1.0)))
                        .sqrt();
                jm[(i, i + 1)] = off;
                jm[(i + 1, i)] = off;
            }
        }
        let eig = jm.symmetric_eigen();
        let mu0 = ((ab + 1.0) * std::f64::consts::LN_2 + ln_gamma(alpha + 1.0) + ln_gamma(beta + 1.0)
            - ln_gamma(ab + 2.0))
        .exp();
        let mut pairs: Vec<(f64, f64)> = (0..n)
            .map(|i| {
                let v0 = eig.eigenvectors[(0, i)];
                (eig.eigenvalues[i], mu0 * v0 * v0)
            })
            .collect();
        pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
        Ok(Self {
            nodes: pairs.iter().map(|p| p.0).collect(),
            weights: pairs.iter().map(|p| p.1).collect(),
            alpha,
            beta,
        })
    }

    /// Rule carrying only the `(1 + x)^mu` factor.
    pub fn one_sided(n: usize, mu: f64) -> Result<Self> {
        Self::new(n, 0.0, mu)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `int_{-1}^{1} (1-x)^alpha (1+x)^beta g(x) dx`.
    pub fn integrate_weighted<G: Fn(f64) -> Complex64>(&self, g: G) -> Complex64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| g(x) * w)
            .sum()
    }

    /// One-sided rule applied to `int_a^b f(x) dx` where `f ~ (x - a)^beta`
    /// (`at_lower`) or `f ~ (b - x)^beta`.
    fn apply<F: Fn(f64) -> Complex64>(&self, f: &F, a: f64, b: f64, at_lower: bool) -> Complex64 {
        debug_assert_eq!(self.alpha, 0.0);
        let half = 0.5 * (b - a);
        let mu = self.beta;
        let scale = half.powf(mu + 1.0);
        self.integrate_weighted(|t| {
            // t = -1 sits on the singular endpoint
            let (x, dist) = if at_lower {
                (a + half * (t + 1.0), half * (t + 1.0))
            } else {
                (b - half * (t + 1.0), half * (t + 1.0))
            };
            f(x) / dist.powf(mu)
        }) * scale
    }
}

/// Lanczos approximation (g = 7, n = 9).
pub(crate) fn ln_gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const C: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = C[0];
    let t = x + G + 0.5;
    for (i, c) in C.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

// Gauss-Kronrod (7, 15) abscissae and weights, QUADPACK qk15.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Kronrod value, error estimate and the Kronrod value of `∫|f|`.
fn gk15<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs = fc.norm() * WGK[7];
    for j in 0..7 {
        let x = h * XGK[j];
        let (lo, hi) = (f(c - x), f(c + x));
        let fsum = lo + hi;
        kron += fsum * WGK[j];
        abs += (lo.norm() + hi.norm()) * WGK[j];
        if j % 2 == 1 {
            gauss += fsum * WG[j / 2];
        }
    }
    let kron = kron * h;
    let gauss = gauss * h;
    (kron, (kron - gauss).norm(), abs * h.abs())
}

struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
    magnitude: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Globally adaptive Gauss-Kronrod bisection.
pub fn adaptive_gk<F>(f: &F, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> Result<Quadrature>
where
    F: Fn(f64) -> Complex64,
{
    if a == b {
        return Ok(Quadrature {
            value: Complex64::new(0.0, 0.0),
            error: 0.0,
        });
    }
    let (v, e, mag) = gk15(f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Panel {
        a,
        b,
        value: v,
        error: e,
        magnitude: mag,
    });
    let mut total = v;
    let mut err = e;
    let mut magnitude = mag;
    // accuracy is capped by round-off in the sum of |f|
    while err > (rel_tol * total.norm()).max(abs_tol).max(ROUNDOFF * magnitude) {
        if heap.len() >= MAX_PANELS {
            return Err(Error::QuadratureNonConvergence {
                estimate: total,
                error: err,
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let m = 0.5 * (worst.a + worst.b);
        if !(m > worst.a && m < worst.b) {
            // interval cannot be split further in floating point
            return Err(Error::QuadratureNonConvergence {
                estimate: total,
                error: err,
            });
        }
        let (v1, e1, m1) = gk15(f, worst.a, m);
        let (v2, e2, m2) = gk15(f, m, worst.b);
        total += v1 + v2 - worst.value;
        err += e1 + e2 - worst.error;
        magnitude += m1 + m2 - worst.magnitude;
        heap.push(Panel {
            a: worst.a,
            b: m,
            value: v1,
            error: e1,
            magnitude: m1,
        });
        heap.push(Panel {
            a: m,
            b: worst.b,
            value: v2,
            error: e2,
            magnitude: m2,
        });
        if !total.re.is_finite() || !total.im.is_finite() {
            return Err(Error::QuadratureNonConvergence {
                estimate: total,
                error: f64::INFINITY,
            });
        }
    }
    // recompute the sums from scratch to shed accumulated cancellation
    let value = heap.iter().map(|p| p.value).sum();
    let error = heap.iter().map(|p| p.error).sum();
    Ok(Quadrature { value, error })
}
