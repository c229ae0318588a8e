//! Adaptive Dormand-Prince 5(4) integration of a single complex ODE
//! `dz/ds = f(s, z)`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OdeStatus {
    /// Reached the end of the span.
    Completed,
    /// A stopping predicate fired.
    Stopped,
    /// The step size underflowed, typically next to a singular point of the field.
    StoppedAtSingularity,
}

#[derive(Debug, Clone)]
pub struct OdeSolution {
    pub samples: Vec<(f64, Complex64)>,
    /// Largest accepted local error estimate (scaled).
    pub error_estimate: f64,
    pub status: OdeStatus,
}

impl OdeSolution {
    pub fn end(&self) -> (f64, Complex64) {
        *self.samples.last().expect("solutions hold at least the start point")
    }

    pub fn points(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.samples.iter().map(|s| s.1)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub tolerance: f64,
    pub max_step: f64,
    pub min_step: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            max_step: f64::INFINITY,
            min_step: 1e-14,
            max_steps: 200_000,
        }
    }
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// 5th order weights equal the last row of A (FSAL); E = b5 - b4.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Integrate from `(s0, z0)` up to `s1 > s0`.
///
/// `stop(s, z)` is consulted after every accepted step; returning `true`
/// ends the integration with [`OdeStatus::Stopped`]. Field values that are
/// not finite make the step fail and shrink.
pub fn integrate_ode<F, P>(
    field: F,
    z0: Complex64,
    span: (f64, f64),
    opts: OdeOptions,
    mut stop: P,
) -> Result<OdeSolution>
where
    F: Fn(f64, Complex64) -> Complex64,
    P: FnMut(f64, Complex64) -> bool,
{
    let (s0, s1) = span;
    if !(s1 > s0) {
        return Err(invalid("ODE span must be increasing"));
    }
    if !(opts.tolerance > 0.0) {
        return Err(invalid("ODE tolerance must be positive"));
    }
    let mut samples = vec![(s0, z0)];
    let mut s = s0;
    let mut z = z0;
    let mut k1 = field(s, z);
    if !finite(k1) {
        return Ok(OdeSolution {
            samples,
            error_estimate: 0.0,
            status: OdeStatus::StoppedAtSingularity,
        });
    }
    let mut h = ((s1 - s0) * 1e-3).min(opts.max_step).max(opts.min_step);
    let mut worst = 0.0f64;

    for _ in 0..opts.max_steps {
        if s >= s1 {
            break;
        }
        h = h.min(s1 - s).min(opts.max_step);
        let mut k = [Complex64::new(0.0, 0.0); 7];
        k[0] = k1;
        let mut ok = true;
        for stage in 1..7 {
            let mut acc = z;
            for (j, kj) in k.iter().enumerate().take(stage) {
                acc += *kj * (h * A[stage][j]);
            }
            k[stage] = field(s + C[stage] * h, acc);
            if !finite(k[stage]) {
                ok = false;
                break;
            }
        }
        let (z_new, err) = if ok {
            let mut zn = z;
            for (j, kj) in k.iter().enumerate().take(6) {
                zn += *kj * (h * A[6][j]);
            }
            let mut e = Complex64::new(0.0, 0.0);
            for (j, kj) in k.iter().enumerate() {
                e += *kj * (h * E[j]);
            }
            let scale = opts.tolerance * (1.0 + z.norm().max(zn.norm()));
            (zn, e.norm() / scale)
        } else {
            (z, f64::INFINITY)
        };

        if err <= 1.0 {
            s += h;
            z = z_new;
            k1 = k[6];
            worst = worst.max(err);
            samples.push((s, z));
            if stop(s, z) {
                return Ok(OdeSolution {
                    samples,
                    error_estimate: worst * opts.tolerance,
                    status: OdeStatus::Stopped,
                });
            }
            let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h *= fac;
        } else {
            let fac = if err.is_finite() { (0.9 * err.powf(-0.2)).clamp(0.1, 0.9) } else { 0.25 };
            h *= fac;
            if h < opts.min_step * (1.0 + s.abs()) {
                return Ok(OdeSolution {
                    samples,
                    error_estimate: worst * opts.tolerance,
                    status: OdeStatus::StoppedAtSingularity,
                });
            }
        }
    }
    let status = if s >= s1 { OdeStatus::Completed } else { OdeStatus::StoppedAtSingularity };
    Ok(OdeSolution {
        samples,
        error_estimate: worst * opts.tolerance,
        status,
    })
}

fn finite(z: Complex64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn never(_: f64, _: Complex64) -> bool {
        false
    }

    #[test]
    fn circular_motion() {
        let i = Complex64::i();
        let sol = integrate_ode(|_, z| i * z, Complex64::new(1.0, 0.0), (0.0, PI), OdeOptions::default(), never)
            .unwrap();
        assert_eq!(sol.status, OdeStatus::Completed);
        let (s, z) = sol.end();
        assert!((s - PI).abs() < 1e-14);
        assert!((z + 1.0).norm() < 1e-8, "{z}");
    }

    #[test]
    fn zero_field_is_constant() {
        let z0 = Complex64::new(0.3, -0.2);
        let sol =
            integrate_ode(|_, _| Complex64::new(0.0, 0.0), z0, (0.0, 2.0), OdeOptions::default(), never).unwrap();
        assert!(sol.points().all(|z| z == z0));
    }

    #[test]
    fn predicate_truncates_before_singularity() {
        // z' = 1/(2 sqrt(1 - s)) blows up at s = 1
        let field = |s: f64, _| Complex64::new(0.5 / (1.0 - s).sqrt(), 0.0);
        let sol = integrate_ode(field, Complex64::new(0.0, 0.0), (0.0, 1.0), OdeOptions::default(), |s, _| {
            1.0 - s < 1e-6
        })
        .unwrap();
        assert_eq!(sol.status, OdeStatus::Stopped);
        let (s, z) = sol.end();
        // exact solution 1 - sqrt(1 - s)
        assert!((z.re - (1.0 - (1.0 - s).sqrt())).abs() < 1e-6);
    }

    #[test]
    fn step_underflow_is_flagged() {
        let field = |s: f64, _| Complex64::new(0.5 / (1.0 - s).sqrt(), 0.0);
        let sol = integrate_ode(field, Complex64::new(0.0, 0.0), (0.0, 2.0), OdeOptions::default(), never).unwrap();
        assert_eq!(sol.status, OdeStatus::StoppedAtSingularity);
        assert!(sol.end().0 < 1.0);
    }

    #[test]
    fn split_span_matches_single_span() {
        let f = |s: f64, z: Complex64| Complex64::new(s.cos(), 0.3) * z + Complex64::new(0.0, 0.1);
        let tol = 1e-10;
        let opts = OdeOptions { tolerance: tol, ..OdeOptions::default() };
        let z0 = Complex64::new(0.5, 0.1);
        let whole = integrate_ode(f, z0, (0.0, 2.0), opts, never).unwrap().end().1;
        let mid = integrate_ode(f, z0, (0.0, 1.0), opts, never).unwrap().end().1;
        let split = integrate_ode(f, mid, (1.0, 2.0), opts, never).unwrap().end().1;
        assert!((whole - split).norm() <= 10.0 * tol * (1.0 + whole.norm()));
    }
}
