use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};

use angulus::koenigs::SlitStripDomain;

/// Multiplier table supplied instead of a slit-strip domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultiplierTable {
    pub denjoy_wolff: f64,
    pub repulsive: Vec<f64>,
    /// Absolute errors; all values are treated as exact when absent.
    #[serde(default)]
    pub denjoy_wolff_error: Option<f64>,
    #[serde(default)]
    pub repulsive_errors: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub alphas: Option<Vec<f64>>,
    pub gammas: Option<Vec<f64>>,
    pub times: Option<Vec<f64>>,
    pub weights: Option<Vec<Vec<f64>>>,
    pub tolerance: Option<f64>,
    pub multipliers: Option<MultiplierTable>,
    pub out: Option<PathBuf>,
}

impl ScenarioFile {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing scenario {}", path.display()))
    }
}

/// Validated run description.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub domain: Option<SlitStripDomain>,
    pub times: Vec<f64>,
    pub weights: Vec<Vec<f64>>,
    pub tolerance: f64,
    pub multipliers: Option<MultiplierTable>,
    pub out: PathBuf,
}

#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub alphas: Option<Vec<f64>>,
    pub gammas: Option<Vec<f64>>,
    pub times: Option<Vec<f64>>,
    pub weights: Option<Vec<Vec<f64>>>,
    pub tolerance: Option<f64>,
    pub multipliers: Option<MultiplierTable>,
    pub out: Option<PathBuf>,
}

/// Signals a problem with the inputs rather than with a computation.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub const DEFAULT_TOLERANCE: f64 = 1e-10;

impl Scenario {
    pub fn resolve(file: ScenarioFile, o: Overrides, need_domain: bool) -> anyhow::Result<Self> {
        let usage = |m: String| anyhow::Error::new(UsageError(m));
        let alphas = o.alphas.or(file.alphas);
        let gammas = o.gammas.or(file.gammas).unwrap_or_default();
        let multipliers = o.multipliers.or(file.multipliers);
        let domain = match alphas {
            Some(a) => Some(SlitStripDomain::new(a, gammas).map_err(|e| usage(e.to_string()))?),
            None if need_domain || multipliers.is_none() => {
                return Err(usage("--alphas (or a scenario with \"alphas\") is required".into()))
            }
            None => None,
        };
        let times = o.times.or(file.times).unwrap_or_else(|| vec![1.0]);
        if times.is_empty() || times.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
            return Err(usage("times must be positive".into()));
        }
        let weights = o.weights.or(file.weights).unwrap_or_default();
        let tolerance = o.tolerance.or(file.tolerance).unwrap_or(DEFAULT_TOLERANCE);
        if !(tolerance > 0.0 && tolerance < 1e-2) {
            return Err(usage(format!("tolerance {tolerance} outside (0, 1e-2)")));
        }
        let Some(out) = o.out.or(file.out) else {
            return Err(usage("--out DIR is required".into()));
        };
        Ok(Self {
            domain,
            times,
            weights,
            tolerance,
            multipliers,
            out,
        })
    }
}

pub fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| format!("bad number {x:?}: {e}")))
        .collect()
}

/// `0.3,0.7;0.5,0.5` -> two weight vectors.
pub fn parse_weight_lists(s: &str) -> Result<Vec<Vec<f64>>, String> {
    s.split(';').map(parse_list).collect()
}

pub fn ensure_out(dir: &Path) -> anyhow::Result<()> {
    if dir.exists() && !dir.is_dir() {
        bail!("{} exists and is not a directory", dir.display());
    }
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}
