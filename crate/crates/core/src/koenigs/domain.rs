use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// The strip `|Im w| < 1/2` with `n - 1` horizontal slits
/// `{Im w = y_k, Re w <= gamma_k}` where `y_k = -1/2 + alpha_1 + ... + alpha_k`.
///
/// Channel `k` (between `y_{k-1}` and `y_k`) has width `alpha_k`; the slits
/// run off to `-inf` so the domain is invariant under `w -> w + t`, `t >= 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDomain")]
pub struct SlitStripDomain {
    alphas: Vec<f64>,
    gammas: Vec<f64>,
}

#[derive(Deserialize)]
struct RawDomain {
    alphas: Vec<f64>,
    #[serde(default)]
    gammas: Vec<f64>,
}

impl TryFrom<RawDomain> for SlitStripDomain {
    type Error = crate::Error;

    fn try_from(raw: RawDomain) -> Result<Self> {
        Self::new(raw.alphas, raw.gammas)
    }
}

impl SlitStripDomain {
    pub fn new(alphas: Vec<f64>, gammas: Vec<f64>) -> Result<Self> {
        if alphas.is_empty() {
            return Err(invalid("at least one channel width is required"));
        }
        if alphas.iter().any(|a| !(a.is_finite() && *a > 0.0)) {
            return Err(invalid("channel widths must be positive"));
        }
        let total: f64 = alphas.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(invalid(format!("channel widths sum to {total}, expected 1")));
        }
        if gammas.len() + 1 != alphas.len() {
            return Err(invalid(format!(
                "{} channels need {} slit abscissas, got {}",
                alphas.len(),
                alphas.len() - 1,
                gammas.len()
            )));
        }
        if gammas.iter().any(|g| !(g.is_finite() && *g < 0.0)) {
            return Err(invalid("slit tip abscissas must be negative"));
        }
        Ok(Self { alphas, gammas })
    }

    /// The plain strip, `n = 1`.
    pub fn strip() -> Self {
        Self {
            alphas: vec![1.0],
            gammas: vec![],
        }
    }

    pub fn n(&self) -> usize {
        self.alphas.len()
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn gammas(&self) -> &[f64] {
        &self.gammas
    }

    /// Ordinates `y_0 = -1/2, ..., y_n = 1/2` of the channel walls.
    pub fn levels(&self) -> Vec<f64> {
        let mut y = Vec::with_capacity(self.n() + 1);
        let mut acc = -0.5;
        y.push(acc);
        for a in &self.alphas {
            acc += a;
            y.push(acc);
        }
        // pin the top wall exactly
        if let Some(last) = y.last_mut() {
            *last = 0.5;
        }
        y
    }

    /// Slit tips `gamma_k + i y_k`, `k = 1..n-1`.
    pub fn slit_tips(&self) -> Vec<Complex64> {
        let y = self.levels();
        self.gammas
            .iter()
            .enumerate()
            .map(|(k, g)| Complex64::new(*g, y[k + 1]))
            .collect()
    }

    pub fn contains(&self, w: Complex64) -> bool {
        if !(w.im.abs() < 0.5) || !w.re.is_finite() {
            return false;
        }
        let y = self.levels();
        !self
            .gammas
            .iter()
            .enumerate()
            .any(|(k, g)| (w.im - y[k + 1]).abs() <= 1e-15 && w.re <= *g)
    }

    /// Supremum of the lengths of vertical segments inside the domain.
    pub fn nu(&self) -> f64 {
        1.0
    }

    /// Invariant set `V = ∩_{t >= 0} (Ω + t)`: one horizontal strip per channel.
    pub fn invariant_set(&self) -> InvariantSetReport {
        let y = self.levels();
        let components: Vec<InvariantStrip> = (0..self.n())
            .map(|k| InvariantStrip {
                lower: y[k],
                upper: y[k + 1],
                width: self.alphas[k],
                fixed_point_index: k,
            })
            .collect();
        // V_k - t must stay in the domain for every t >= 0
        let spot_check = components.iter().all(|c| {
            [0.25, 0.5, 0.75].iter().all(|f| {
                let im = c.lower + f * (c.upper - c.lower);
                [-100.0, -10.0, -1.0, 0.0, 3.0]
                    .iter()
                    .all(|re| self.contains(Complex64::new(*re, im)))
            })
        });
        InvariantSetReport {
            components,
            spot_check_passed: spot_check,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvariantStrip {
    pub lower: f64,
    pub upper: f64,
    pub width: f64,
    /// Index `k` of the repulsive fixed point `xi_{k+1}` this strip corresponds to.
    pub fixed_point_index: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvariantSetReport {
    pub components: Vec<InvariantStrip>,
    pub spot_check_passed: bool,
}

impl InvariantSetReport {
    pub fn widths(&self) -> Vec<f64> {
        self.components.iter().map(|c| c.width).collect()
    }
}
