//! Job configuration.

use std::path::Path;

use anyhow::Context;
use gtoqtt::gauss_pw::PlaneWaveGrid;
use gtoqtt::orbital::DEFAULT_EPS_SUM;
use gtoqtt::resources::{LambdaPolicy, MIN_BITS};
use serde::{Deserialize, Serialize};

/// A rejected input, with the JSON path of the offending field.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{path}: {message}")]
pub struct ValidationError {
    pub path: String,
    pub message: String,
}

impl ValidationError {
    pub fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self { path: path.into(), message: message.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub grid: GridConfig,
    pub compression: CompressionConfig,
    pub resources: ResourceConfig,
    #[serde(default)]
    pub sweep: SweepConfig,
    #[serde(default)]
    pub oracle: OracleConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(rename = "L_bohr")]
    pub l_bohr: f64,
    #[serde(rename = "K_inv_bohr", default, skip_serializing_if = "Option::is_none")]
    pub k_inv_bohr: Option<f64>,
    #[serde(rename = "E_cut_hartree", default, skip_serializing_if = "Option::is_none")]
    pub e_cut_hartree: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompressionConfig {
    /// Relative SVD cutoff applied to each finished orbital; 0 disables it.
    pub svd_cutoff: f64,
    #[serde(default = "default_eps_sum")]
    pub eps_sum: f64,
    /// Per-primitive trace-distance budget.
    pub eps_primitive: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResourceConfig {
    pub b: u32,
    /// Electron count; defaults to the fixture's total occupation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<u64>,
    #[serde(default = "default_lambda_policy")]
    pub lambda_policy: LambdaPolicy,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(rename = "L_bohr", default)]
    pub l_bohr: Vec<f64>,
    #[serde(rename = "K_inv_bohr", default)]
    pub k_inv_bohr: Vec<f64>,
    #[serde(default)]
    pub svd_cutoff: Vec<f64>,
}

impl SweepConfig {
    pub fn is_empty(&self) -> bool {
        self.l_bohr.is_empty() && self.k_inv_bohr.is_empty() && self.svd_cutoff.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleConfig {
    #[serde(default = "yes")]
    pub enabled: bool,
    #[serde(default = "default_max_points")]
    pub max_points_per_axis: u64,
    #[serde(default = "default_oracle_tol")]
    pub tol: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            enabled: true,
            max_points_per_axis: default_max_points(),
            tol: default_oracle_tol(),
        }
    }
}

fn default_eps_sum() -> f64 {
    DEFAULT_EPS_SUM
}
fn default_lambda_policy() -> LambdaPolicy {
    LambdaPolicy::OptimalMu
}
fn yes() -> bool {
    true
}
fn default_max_points() -> u64 {
    32
}
fn default_oracle_tol() -> f64 {
    1e-6
}

fn positive(path: &str, x: f64) -> Result<(), ValidationError> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(ValidationError::new(path, format!("must be a finite number > 0, got {x}")))
    }
}

fn unit_interval(path: &str, x: f64, allow_zero: bool) -> Result<(), ValidationError> {
    let lower_ok = if allow_zero { x >= 0.0 } else { x > 0.0 };
    if lower_ok && x < 1.0 {
        Ok(())
    } else {
        let lo = if allow_zero { "[0" } else { "(0" };
        Err(ValidationError::new(path, format!("must lie in {lo}, 1), got {x}")))
    }
}

impl JobConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let cfg: Self = serde_json::from_str(&text)
            .with_context(|| format!("parsing config {}", path.display()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ValidationError> {
        positive("grid.L_bohr", self.grid.l_bohr)?;
        match (self.grid.k_inv_bohr, self.grid.e_cut_hartree) {
            (Some(k), None) => positive("grid.K_inv_bohr", k)?,
            (None, Some(e)) => positive("grid.E_cut_hartree", e)?,
            _ => {
                return Err(ValidationError::new(
                    "grid",
                    "exactly one of K_inv_bohr and E_cut_hartree is required",
                ))
            }
        }
        self.grid().map_err(|e| ValidationError::new("grid", e.to_string()))?;
        unit_interval("compression.svd_cutoff", self.compression.svd_cutoff, true)?;
        unit_interval("compression.eps_sum", self.compression.eps_sum, true)?;
        unit_interval("compression.eps_primitive", self.compression.eps_primitive, false)?;
        if self.resources.b < MIN_BITS {
            return Err(ValidationError::new(
                "resources.b",
                format!("must be >= {MIN_BITS}, got {}", self.resources.b),
            ));
        }
        if let LambdaPolicy::Fixed(l) = self.resources.lambda_policy {
            if !l.is_power_of_two() {
                return Err(ValidationError::new(
                    "resources.lambda_policy.lambda",
                    format!("must be a power of two, got {l}"),
                ));
            }
        }
        if self.resources.eta == Some(0) {
            return Err(ValidationError::new("resources.eta", "must be >= 1"));
        }
        for (i, &l) in self.sweep.l_bohr.iter().enumerate() {
            positive(&format!("sweep.L_bohr[{i}]"), l)?;
        }
        for (i, &k) in self.sweep.k_inv_bohr.iter().enumerate() {
            positive(&format!("sweep.K_inv_bohr[{i}]"), k)?;
        }
        for (i, &c) in self.sweep.svd_cutoff.iter().enumerate() {
            unit_interval(&format!("sweep.svd_cutoff[{i}]"), c, true)?;
        }
        if self.oracle.max_points_per_axis < 3 {
            return Err(ValidationError::new("oracle.max_points_per_axis", "must be >= 3"));
        }
        positive("oracle.tol", self.oracle.tol)?;
        Ok(())
    }

    /// Momentum cutoff in inverse Bohr; an energy cutoff converts as
    /// `K = sqrt(2 E_cut)`.
    pub fn cutoff(&self) -> f64 {
        match (self.grid.k_inv_bohr, self.grid.e_cut_hartree) {
            (Some(k), _) => k,
            (None, Some(e)) => (2.0 * e).sqrt(),
            (None, None) => f64::NAN,
        }
    }

    pub fn grid(&self) -> gtoqtt::Result<PlaneWaveGrid> {
        PlaneWaveGrid::new(self.grid.l_bohr, self.cutoff())
    }

    /// Copy with the grid replaced by an explicit `(L, K)` pair.
    pub fn with_grid(&self, l_bohr: f64, k_inv_bohr: f64) -> Self {
        let mut c = self.clone();
        c.grid = GridConfig { l_bohr, k_inv_bohr: Some(k_inv_bohr), e_cut_hartree: None };
        c
    }

    pub fn with_svd_cutoff(&self, svd_cutoff: f64) -> Self {
        let mut c = self.clone();
        c.compression.svd_cutoff = svd_cutoff;
        c
    }
}
