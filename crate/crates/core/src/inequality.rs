//! Multiplier inequalities at boundary fixed points of univalent self-maps.
//!
//! With `c_k = log φ'(ξ_k) > 0` and `log φ'(a) < 0`:
//!
//! * unweighted form: `Σ 1/c_k <= -1/log φ'(a)`;
//! * weighted form: `Σ α_k² c_k + log φ'(a) >= 0` for every weight vector
//!   `α` on the simplex.
//!
//! Everything is evaluated in log space.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::BoundaryPoint;

const DEGENERATE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    Exact,
    /// `log_error` bounds the absolute error of `log φ'`, i.e. the relative
    /// error of the multiplier.
    Estimated { log_error: f64 },
}

impl Provenance {
    pub fn log_error(&self) -> f64 {
        match self {
            Provenance::Exact => 0.0,
            Provenance::Estimated { log_error } => *log_error,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedPointMultiplier {
    pub point: Option<BoundaryPoint>,
    pub log_multiplier: f64,
    pub provenance: Provenance,
}

impl FixedPointMultiplier {
    pub fn exact(point: Option<BoundaryPoint>, log_multiplier: f64) -> Self {
        Self {
            point,
            log_multiplier,
            provenance: Provenance::Exact,
        }
    }

    /// From a multiplier value with an absolute error estimate.
    pub fn estimated(point: Option<BoundaryPoint>, multiplier: f64, error: f64) -> Self {
        Self {
            point,
            log_multiplier: multiplier.ln(),
            provenance: Provenance::Estimated {
                log_error: error.abs() / multiplier,
            },
        }
    }

    pub fn multiplier(&self) -> f64 {
        self.log_multiplier.exp()
    }
}

/// Denjoy-Wolff multiplier in `(0, 1)` plus repulsive multipliers in `(1, ∞)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultiplierData {
    denjoy_wolff: FixedPointMultiplier,
    repulsive: Vec<FixedPointMultiplier>,
}

impl MultiplierData {
    pub fn new(denjoy_wolff: FixedPointMultiplier, repulsive: Vec<FixedPointMultiplier>) -> Result<Self> {
        if repulsive.is_empty() {
            return Err(invalid("at least one repulsive fixed point is required"));
        }
        let la = denjoy_wolff.log_multiplier;
        if la.is_nan() || la > 0.0 {
            return Err(invalid(format!("Denjoy-Wolff multiplier {} is not in (0, 1)", la.exp())));
        }
        if la.exp() <= DEGENERATE || (la.exp() - 1.0).abs() <= DEGENERATE {
            return Err(Error::DegenerateMultiplier(la.exp()));
        }
        for r in &repulsive {
            let l = r.log_multiplier;
            if l.is_nan() || l < 0.0 {
                return Err(invalid(format!("repulsive multiplier {} is not above 1", l.exp())));
            }
            if l.exp_m1() <= DEGENERATE || !l.is_finite() {
                return Err(Error::DegenerateMultiplier(l.exp()));
            }
        }
        let points: Vec<BoundaryPoint> = std::iter::once(&denjoy_wolff)
            .chain(repulsive.iter())
            .filter_map(|m| m.point)
            .collect();
        for (i, p) in points.iter().enumerate() {
            for q in &points[i + 1..] {
                if (p.value() - q.value()).norm() <= 1e-12 {
                    return Err(invalid("fixed points must be pairwise distinct"));
                }
            }
        }
        Ok(Self {
            denjoy_wolff,
            repulsive,
        })
    }

    /// Exact data from plain multiplier values, without locations.
    pub fn from_multipliers(denjoy_wolff: f64, repulsive: &[f64]) -> Result<Self> {
        if !(denjoy_wolff > 0.0) || repulsive.iter().any(|m| !(*m > 0.0)) {
            return Err(invalid("multipliers must be positive"));
        }
        Self::new(
            FixedPointMultiplier::exact(None, denjoy_wolff.ln()),
            repulsive.iter().map(|m| FixedPointMultiplier::exact(None, m.ln())).collect(),
        )
    }

    pub fn denjoy_wolff(&self) -> &FixedPointMultiplier {
        &self.denjoy_wolff
    }

    pub fn repulsive(&self) -> &[FixedPointMultiplier] {
        &self.repulsive
    }

    pub fn n(&self) -> usize {
        self.repulsive.len()
    }

    /// `c_k = log φ'(ξ_k)`.
    pub fn costs(&self) -> Vec<f64> {
        self.repulsive.iter().map(|r| r.log_multiplier).collect()
    }

    pub fn is_exact(&self) -> bool {
        std::iter::once(&self.denjoy_wolff)
            .chain(&self.repulsive)
            .all(|m| m.provenance == Provenance::Exact)
    }
}

/// Non-negative weights summing to one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(invalid("weight vector is empty"));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(invalid("weights must be non-negative"));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(invalid(format!("weights sum to {sum}, expected 1")));
        }
        Ok(Self(weights))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// `f(α) = Σ α_k² c_k`.
    pub fn objective(&self, costs: &[f64]) -> f64 {
        self.0.iter().zip(costs).map(|(a, c)| a * a * c).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Theorem {
    Unweighted,
    Weighted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// The whole error bar lies at or above zero (up to round-off).
    Yes,
    /// The whole error bar lies below zero.
    No,
    /// The error bar straddles zero.
    Indeterminate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityReport {
    pub theorem: Theorem,
    /// For the weighted form both sides are logarithms of the products.
    pub left: f64,
    pub right: f64,
    pub slack: f64,
    pub error_bound: f64,
    /// `slack >= -error_bound`.
    pub satisfied: bool,
    pub verdict: Verdict,
    pub weights: Option<Vec<f64>>,
    pub consistency_residual: Option<f64>,
    pub unweighted: Option<Box<InequalityReport>>,
}

fn report(
    theorem: Theorem,
    left: f64,
    right: f64,
    slack: f64,
    propagated: f64,
    scale: f64,
    weights: Option<Vec<f64>>,
) -> InequalityReport {
    let floor = 16.0 * f64::EPSILON * scale;
    let error_bound = propagated + floor;
    let verdict = if slack - propagated >= -floor {
        Verdict::Yes
    } else if slack + propagated < -floor {
        Verdict::No
    } else {
        Verdict::Indeterminate
    };
    InequalityReport {
        theorem,
        left,
        right,
        slack,
        error_bound,
        satisfied: slack >= -error_bound,
        verdict,
        weights,
        consistency_residual: None,
        unweighted: None,
    }
}

/// `Σ 1/log φ'(ξ_k) <= -1/log φ'(a)`, slack = right - left.
pub fn verify_unweighted(data: &MultiplierData) -> Result<InequalityReport> {
    let la = data.denjoy_wolff.log_multiplier;
    let left: f64 = data.repulsive.iter().map(|r| 1.0 / r.log_multiplier).sum();
    let right = -1.0 / la;
    let propagated = data.denjoy_wolff.provenance.log_error() / (la * la)
        + data
            .repulsive
            .iter()
            .map(|r| r.provenance.log_error() / (r.log_multiplier * r.log_multiplier))
            .sum::<f64>();
    Ok(report(
        Theorem::Unweighted,
        left,
        right,
        right - left,
        propagated,
        left.abs() + right.abs(),
        None,
    ))
}

/// `Σ α_k² log φ'(ξ_k) >= -log φ'(a)`, slack = left - right.
pub fn verify_weighted(data: &MultiplierData, weights: &WeightVector) -> Result<InequalityReport> {
    if weights.0.len() != data.n() {
        return Err(Error::WeightMismatch);
    }
    let left: f64 = weights
        .0
        .iter()
        .zip(&data.repulsive)
        .map(|(a, r)| a * a * r.log_multiplier)
        .sum();
    let right = -data.denjoy_wolff.log_multiplier;
    let propagated = data.denjoy_wolff.provenance.log_error()
        + weights
            .0
            .iter()
            .zip(&data.repulsive)
            .map(|(a, r)| a * a * r.provenance.log_error())
            .sum::<f64>();
    Ok(report(
        Theorem::Weighted,
        left,
        right,
        left - right,
        propagated,
        left.abs() + right.abs(),
        Some(weights.0.clone()),
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimalWeights {
    pub weights: WeightVector,
    pub costs: Vec<f64>,
    /// `min f = 1 / Σ (1/c_k)`.
    pub minimum: f64,
    /// `|f(projected-gradient minimizer) - minimum|`.
    pub cross_check_gap: f64,
}

/// Minimizer of `Σ α_k² c_k` over the simplex: `α_k ∝ 1/c_k`.
pub fn optimal_weights(data: &MultiplierData) -> Result<OptimalWeights> {
    optimal_weights_for_costs(&data.costs())
}

pub fn optimal_weights_for_costs(costs: &[f64]) -> Result<OptimalWeights> {
    if costs.is_empty() || costs.iter().any(|c| !(c.is_finite() && *c > 0.0)) {
        return Err(invalid("all costs log φ'(ξ_k) must be positive"));
    }
    let s: f64 = costs.iter().map(|c| 1.0 / c).sum();
    let weights: Vec<f64> = costs.iter().map(|c| (1.0 / c) / s).collect();
    let minimum = 1.0 / s;
    let pg = projected_gradient(costs);
    let pg_value: f64 = pg.iter().zip(costs).map(|(a, c)| a * a * c).sum();
    let cross_check_gap = (pg_value - minimum).abs();
    if cross_check_gap > 1e-9 * (1.0 + minimum) {
        return Err(Error::SolveFailed {
            iterations: 0,
            residual_norm: cross_check_gap,
            best: pg,
        });
    }
    Ok(OptimalWeights {
        weights: WeightVector(weights),
        costs: costs.to_vec(),
        minimum,
        cross_check_gap,
    })
}

fn projected_gradient(costs: &[f64]) -> Vec<f64> {
    let n = costs.len();
    let cmax = costs.iter().cloned().fold(0.0, f64::max);
    let step = 1.0 / (2.0 * cmax);
    let mut x = vec![1.0 / n as f64; n];
    for _ in 0..100_000 {
        let y: Vec<f64> = x.iter().zip(costs).map(|(xi, c)| xi - step * 2.0 * c * xi).collect();
        let next = project_simplex(&y);
        let change = next.iter().zip(&x).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        x = next;
        if change < 1e-15 {
            break;
        }
    }
    x
}

/// Euclidean projection onto `{x >= 0, Σx = 1}`.
fn project_simplex(y: &[f64]) -> Vec<f64> {
    let mut u = y.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (j, uj) in u.iter().enumerate() {
        cumulative += uj;
        let t = (cumulative - 1.0) / (j + 1) as f64;
        if uj - t > 0.0 {
            theta = t;
        }
    }
    y.iter().map(|v| (v - theta).max(0.0)).collect()
}

/// Weighted form at the optimal weights, with the unweighted form attached
/// and the algebraic identity `slack_w = slack_u · (-log φ'(a)) / Σ(1/c_k)`
/// checked.
pub fn recover_unweighted(data: &MultiplierData) -> Result<InequalityReport> {
    let opt = optimal_weights(data)?;
    let mut weighted = verify_weighted(data, &opt.weights)?;
    let unweighted = verify_unweighted(data)?;
    let s: f64 = opt.costs.iter().map(|c| 1.0 / c).sum();
    let la = data.denjoy_wolff.log_multiplier;
    let predicted = unweighted.slack * (-la) / s;
    let scale = weighted.left.abs() + weighted.right.abs();
    weighted.consistency_residual = Some((weighted.slack - predicted).abs() / scale.max(1.0));
    weighted.unweighted = Some(Box::new(unweighted));
    Ok(weighted)
}

/// Header matching [`InequalityReport::csv_row`].
pub const CSV_HEADER: [&str; 8] = [
    "theorem",
    "left",
    "right",
    "slack",
    "error_bound",
    "satisfied",
    "verdict",
    "weights",
];

impl InequalityReport {
    pub fn csv_row(&self) -> Vec<String> {
        vec![
            match self.theorem {
                Theorem::Unweighted => "unweighted".into(),
                Theorem::Weighted => "weighted".into(),
            },
            format!("{:.17e}", self.left),
            format!("{:.17e}", self.right),
            format!("{:.17e}", self.slack),
            format!("{:.3e}", self.error_bound),
            self.satisfied.to_string(),
            match self.verdict {
                Verdict::Yes => "yes".into(),
                Verdict::No => "no".into(),
                Verdict::Indeterminate => "indeterminate".into(),
            },
            self.weights
                .as_ref()
                .map(|w| w.iter().map(|v| format!("{v}")).collect::<Vec<_>>().join(";"))
                .unwrap_or_default(),
        ]
    }
}
