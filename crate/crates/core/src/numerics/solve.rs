use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Relative finite-difference step for the Jacobian.
    pub fd_step: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-12,
            max_iterations: 80,
            fd_step: 1e-7,
        }
    }
}

impl SolveOptions {
    pub fn with_tolerance(tolerance: f64) -> Self {
        Self {
            tolerance,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub root: Vec<f64>,
    pub residual_norm: f64,
    pub iterations: usize,
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| if x.is_finite() { m.max(x.abs()) } else { f64::INFINITY })
}

/// Damped Newton iteration with a forward-difference Jacobian.
///
/// Residual evaluations returning non-finite entries are treated as
/// infeasible and trigger step halving, so callers can reject iterates that
/// leave their parameter domain by returning `NaN`.
pub fn solve_system<F>(residual: F, guess: &[f64], opts: SolveOptions) -> Result<SolveReport>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let n = guess.len();
    let mut x = guess.to_vec();
    let mut fx = residual(&x);
    let m = fx.len();
    let mut norm = inf_norm(&fx);
    if !norm.is_finite() {
        return Err(Error::SolveFailed {
            iterations: 0,
            residual_norm: norm,
            best: x,
        });
    }
    if n == 0 || norm <= opts.tolerance {
        return Ok(SolveReport {
            root: x,
            residual_norm: norm,
            iterations: 0,
        });
    }

    for iter in 1..=opts.max_iterations {
        let mut jac = DMatrix::<f64>::zeros(m, n);
        for j in 0..n {
            let h = opts.fd_step * x[j].abs().max(1.0);
            let mut xp = x.clone();
            xp[j] += h;
            let fp = residual(&xp);
            for i in 0..m {
                jac[(i, j)] = (fp[i] - fx[i]) / h;
            }
        }
        let rhs = DVector::from_iterator(m, fx.iter().map(|v| -v));
        let step = if m == n {
            jac.clone().lu().solve(&rhs)
        } else {
            None
        }
        .or_else(|| jac.clone().svd(true, true).solve(&rhs, 1e-14).ok());
        let Some(step) = step else {
            return Err(Error::SolveFailed {
                iterations: iter,
                residual_norm: norm,
                best: x,
            });
        };

        let mut lambda = 1.0;
        let mut accepted = false;
        while lambda > 1e-6 {
            let trial: Vec<f64> = x.iter().zip(step.iter()).map(|(xi, si)| xi + lambda * si).collect();
            let ft = residual(&trial);
            let nt = inf_norm(&ft);
            if nt.is_finite() && (nt < (1.0 - 1e-4 * lambda) * norm || nt <= opts.tolerance) {
                x = trial;
                fx = ft;
                norm = nt;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if norm <= opts.tolerance {
            return Ok(SolveReport {
                root: x,
                residual_norm: norm,
                iterations: iter,
            });
        }
        if !accepted {
            return Err(Error::SolveFailed {
                iterations: iter,
                residual_norm: norm,
                best: x,
            });
        }
    }
    Err(Error::SolveFailed {
        iterations: opts.max_iterations,
        residual_norm: norm,
        best: x,
    })
}

/// Root of a scalar function on a bracket `[a, b]` with `f(a) f(b) <= 0`
/// (Brent's method).
pub fn brent<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> Option<f64> {
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if fa.signum() == fb.signum() || !fa.is_finite() || !fb.is_finite() {
        return None;
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Some(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b);
        if !fb.is_finite() {
            return None;
        }
    }
    Some(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn scalar_square_root() {
        let r = solve_system(|x| vec![x[0] * x[0] - 4.0], &[1.0], SolveOptions::default()).unwrap();
        assert_abs_diff_eq!(r.root[0], 2.0, epsilon = 1e-10);
        assert!(r.residual_norm <= 1e-12);
    }

    #[test]
    fn linear_pair() {
        let r = solve_system(|x| vec![x[0] + x[1] - 1.0, x[0] - x[1]], &[0.0, 0.0], SolveOptions::default())
            .unwrap();
        assert_abs_diff_eq!(r.root[0], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(r.root[1], 0.5, epsilon = 1e-12);
    }

    #[test]
    fn empty_system_is_accepted() {
        let r = solve_system(|_| vec![], &[], SolveOptions::default()).unwrap();
        assert!(r.root.is_empty());
        assert_eq!(r.residual_norm, 0.0);
    }

    #[test]
    fn no_root_reports_best_iterate() {
        let err = solve_system(|x| vec![x[0] * x[0] + 1.0], &[0.3], SolveOptions::default()).unwrap_err();
        match err {
            Error::SolveFailed { residual_norm, best, .. } => {
                assert!(residual_norm >= 1.0);
                assert_eq!(best.len(), 1);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn nan_residuals_are_backtracked() {
        // sqrt-domain guard: the undamped first step lands at x < 0
        let f = |x: &[f64]| {
            if x[0] < 0.0 {
                vec![f64::NAN]
            } else {
                vec![x[0].sqrt() - 0.1]
            }
        };
        let r = solve_system(f, &[4.0], SolveOptions::default()).unwrap();
        assert_abs_diff_eq!(r.root[0], 0.01, epsilon = 1e-10);
    }

    #[test]
    fn brent_finds_cos_root() {
        let r = brent(|x: f64| x.cos(), 1.0, 2.0, 1e-14).unwrap();
        assert_abs_diff_eq!(r, std::f64::consts::FRAC_PI_2, epsilon = 1e-13);
        assert!(brent(|x: f64| x * x + 1.0, -1.0, 1.0, 1e-12).is_none());
    }
}
