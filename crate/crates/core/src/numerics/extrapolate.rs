//! Polynomial (Richardson/Neville) extrapolation of `v(h)` to `h = 0`.

use num_complex::Complex64;

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extrapolation {
    pub value: Complex64,
    pub error: f64,
    /// Set when the raw samples stopped converging monotonically; `value` is
    /// then the last raw sample.
    pub non_monotone: bool,
}

/// Extrapolate samples `(h_j, v_j)` with `h` strictly decreasing to `h = 0`.
///
/// The Neville tableau is evaluated at zero; the returned estimate is the
/// diagonal entry whose difference to its predecessor is smallest, and that
/// difference is the error estimate. Exact for data polynomial in `h` of
/// degree below the number of samples.
pub fn extrapolate_limit(samples: &[(f64, Complex64)]) -> Result<Extrapolation> {
    if samples.len() < 3 {
        return Err(invalid("extrapolation needs at least 3 samples"));
    }
    if samples.iter().any(|(h, _)| !(*h > 0.0)) {
        return Err(invalid("extrapolation step sizes must be positive"));
    }
    if samples.windows(2).any(|w| !(w[1].0 < w[0].0)) {
        return Err(invalid("extrapolation step sizes must decrease"));
    }

    let n = samples.len();
    let diffs: Vec<f64> = samples.windows(2).map(|w| (w[1].1 - w[0].1).norm()).collect();
    let scale = samples.iter().map(|s| s.1.norm()).fold(0.0, f64::max);
    let noise = 64.0 * f64::EPSILON * scale.max(1e-300);
    let raw_monotone = diffs.windows(2).all(|d| d[1] <= 1.05 * d[0] + noise);

    // Neville: p[i] holds the interpolant through samples i-k..=i at h = 0
    let mut p: Vec<Complex64> = samples.iter().map(|s| s.1).collect();
    let mut diag = vec![p[0]];
    for k in 1..n {
        for i in (k..n).rev() {
            let hi = samples[i].0;
            let hik = samples[i - k].0;
            p[i] = (p[i] * hik - p[i - 1] * hi) / (hik - hi);
        }
        diag.push(p[k]);
    }
    let mut best = 1;
    let mut best_err = (diag[1] - diag[0]).norm();
    for k in 2..n {
        let e = (diag[k] - diag[k - 1]).norm();
        if e <= best_err {
            best = k;
            best_err = e;
        }
    }
    // Raw increments may wobble before the asymptotic regime; only flag the
    // data when the tableau does not improve on the last raw step either.
    if !raw_monotone && (best == 1 || best_err >= diffs[n - 2]) {
        return Ok(Extrapolation {
            value: samples[n - 1].1,
            error: diffs[n - 2],
            non_monotone: true,
        });
    }
    Ok(Extrapolation {
        value: diag[best],
        error: best_err.max(noise),
        non_monotone: false,
    })
}

/// Real-valued convenience wrapper around [`extrapolate_limit`].
pub fn extrapolate_limit_real(samples: &[(f64, f64)]) -> Result<(f64, f64, bool)> {
    let c: Vec<(f64, Complex64)> = samples.iter().map(|&(h, v)| (h, Complex64::new(v, 0.0))).collect();
    let e = extrapolate_limit(&c)?;
    Ok((e.value.re, e.error, e.non_monotone))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn geometric(f: impl Fn(f64) -> f64, n: usize) -> Vec<(f64, f64)> {
        (0..n).map(|j| {
            let h = 0.1 * 0.5f64.powi(j as i32);
            (h, f(h))
        })
        .collect()
    }

    #[test]
    fn linear_model() {
        let (v, _, flag) = extrapolate_limit_real(&geometric(|h| 1.0 + h, 3)).unwrap();
        assert!((v - 1.0).abs() < 1e-10);
        assert!(!flag);
    }

    #[test]
    fn quadratic_model() {
        let (v, _, _) = extrapolate_limit_real(&geometric(|h| 2.0 + 3.0 * h * h, 3)).unwrap();
        assert!((v - 2.0).abs() < 1e-13);
    }

    #[test]
    fn exponential_model() {
        let (v, err, _) = extrapolate_limit_real(&geometric(f64::exp, 6)).unwrap();
        assert!((v - 1.0).abs() < 1e-8, "{v}");
        assert!(err < 1e-6);
    }

    #[test]
    fn oscillating_data_is_flagged() {
        let s = [(0.1, 1.0), (0.05, 1.5), (0.025, 0.2), (0.0125, 2.0)];
        let (v, _, flag) = extrapolate_limit_real(&s).unwrap();
        assert!(flag);
        assert_eq!(v, 2.0);
    }

    #[test]
    fn rejects_short_or_unordered() {
        assert!(extrapolate_limit_real(&[(0.1, 1.0), (0.05, 1.0)]).is_err());
        assert!(extrapolate_limit_real(&[(0.1, 1.0), (0.2, 1.0), (0.05, 1.0)]).is_err());
    }

    proptest! {
        #[test]
        fn exact_on_quadratics(c0 in -5.0f64..5.0, c1 in -5.0f64..5.0, c2 in -5.0f64..5.0) {
            let (v, _, _) = extrapolate_limit_real(&geometric(|h| c0 + c1 * h + c2 * h * h, 4)).unwrap();
            prop_assert!((v - c0).abs() <= 1e-13 * (1.0 + c0.abs() + c1.abs() + c2.abs()));
        }
    }
}
