//! Molecule fixtures: explicit primitive lists plus orbital coefficients.

use std::path::Path;

use anyhow::Context;
use gtoqtt::gauss_pw::PrimitiveGaussian;
use gtoqtt::orbital::MolecularOrbital;
use gtoqtt::C64;
use serde::{Deserialize, Serialize};

use crate::config::ValidationError;

/// Eigenvalue cutoff assumed when a fixture does not state one.
pub const DEFAULT_SIGMA: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MoleculeFixture {
    pub name: String,
    /// Where the numbers come from.
    pub provenance: String,
    /// Canonical-orthogonalization cutoff the coefficients were produced with.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    pub primitives: Vec<PrimitiveSpec>,
    pub orbitals: Vec<OrbitalSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrimitiveSpec {
    pub center: [f64; 3],
    pub gamma: f64,
    #[serde(default)]
    pub ang: [u32; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrbitalSpec {
    pub name: String,
    pub occupation: u8,
    pub coeffs: Vec<f64>,
    /// Indices into `primitives`, parallel to `coeffs`.
    pub primitives: Vec<usize>,
}

/// A validated orbital with coefficients rescaled to unit whole-space norm.
#[derive(Debug, Clone)]
pub struct PreparedOrbital {
    pub name: String,
    pub occupation: u8,
    pub mo: MolecularOrbital,
    /// Whole-space norm squared of the coefficients as given.
    pub input_norm_sq: f64,
}

impl PreparedOrbital {
    pub fn max_angular(&self) -> u32 {
        self.mo.primitives.iter().map(|g| g.total_angular()).max().unwrap_or(0)
    }

    pub fn max_gamma(&self) -> f64 {
        self.mo.primitives.iter().map(|g| g.gamma).fold(0.0, f64::max)
    }
}

impl MoleculeFixture {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading fixture {}", path.display()))?;
        let fx: Self = serde_json::from_str(&text)
            .with_context(|| format!("parsing fixture {}", path.display()))?;
        fx.validate()?;
        Ok(fx)
    }

    pub fn sigma(&self) -> f64 {
        self.sigma.unwrap_or(DEFAULT_SIGMA)
    }

    pub fn total_occupation(&self) -> u64 {
        self.orbitals.iter().map(|o| o.occupation as u64).sum()
    }

    pub fn validate(&self) -> Result<(), ValidationError> {
        if self.primitives.is_empty() {
            return Err(ValidationError::new("primitives", "at least one primitive is required"));
        }
        if self.orbitals.is_empty() {
            return Err(ValidationError::new("orbitals", "at least one orbital is required"));
        }
        if let Some(s) = self.sigma {
            if !(s > 0.0 && s <= 1.0) {
                return Err(ValidationError::new("sigma", format!("must lie in (0, 1], got {s}")));
            }
        }
        for (i, p) in self.primitives.iter().enumerate() {
            PrimitiveGaussian::new(p.center, p.gamma, p.ang)
                .map_err(|e| ValidationError::new(format!("primitives[{i}]"), e.to_string()))?;
        }
        for (i, o) in self.orbitals.iter().enumerate() {
            let path = format!("orbitals[{i}]");
            if !(o.occupation == 1 || o.occupation == 2) {
                return Err(ValidationError::new(
                    format!("{path}.occupation"),
                    format!("must be 1 or 2, got {}", o.occupation),
                ));
            }
            if o.coeffs.is_empty() {
                return Err(ValidationError::new(format!("{path}.coeffs"), "empty"));
            }
            if o.coeffs.len() != o.primitives.len() {
                return Err(ValidationError::new(
                    format!("{path}.coeffs"),
                    format!(
                        "{} coefficients for {} primitive indices",
                        o.coeffs.len(),
                        o.primitives.len()
                    ),
                ));
            }
            for (j, &p) in o.primitives.iter().enumerate() {
                if p >= self.primitives.len() {
                    return Err(ValidationError::new(
                        format!("{path}.primitives[{j}]"),
                        format!("index {p} out of range ({} primitives)", self.primitives.len()),
                    ));
                }
            }
            for (j, c) in o.coeffs.iter().enumerate() {
                if !c.is_finite() {
                    return Err(ValidationError::new(format!("{path}.coeffs[{j}]"), "not finite"));
                }
            }
            if self.orbitals[..i].iter().any(|p| p.name == o.name) {
                return Err(ValidationError::new(format!("{path}.name"), "duplicate orbital name"));
            }
        }
        Ok(())
    }

    /// Checks that every primitive centre lies inside the cell `[-L/2, L/2]^3`.
    pub fn check_cell(&self, l_bohr: f64) -> Result<(), ValidationError> {
        for (i, p) in self.primitives.iter().enumerate() {
            for (ax, &c) in p.center.iter().enumerate() {
                if c.abs() > l_bohr / 2.0 {
                    return Err(ValidationError::new(
                        format!("primitives[{i}].center[{ax}]"),
                        format!("{c} lies outside the cell of side {l_bohr}"),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Orbitals normalized with analytic whole-space overlaps.
    pub fn prepare(&self) -> Result<Vec<PreparedOrbital>, ValidationError> {
        self.validate()?;
        let sigma = self.sigma();
        let mut out = Vec::with_capacity(self.orbitals.len());
        for (i, o) in self.orbitals.iter().enumerate() {
            let path = format!("orbitals[{i}]");
            let prims: Vec<PrimitiveGaussian> = o
                .primitives
                .iter()
                .map(|&p| {
                    let s = &self.primitives[p];
                    PrimitiveGaussian::new(s.center, s.gamma, s.ang).expect("validated above")
                })
                .collect();
            let coeffs: Vec<C64> = o.coeffs.iter().map(|&c| C64::new(c, 0.0)).collect();
            let raw = MolecularOrbital::new(coeffs.clone(), prims.clone(), None)
                .map_err(|e| ValidationError::new(&path, e.to_string()))?;
            let norm_sq = raw.whole_line_norm_sq();
            if !(norm_sq > 0.0 && norm_sq.is_finite()) {
                return Err(ValidationError::new(
                    format!("{path}.coeffs"),
                    format!("combination has norm^2 {norm_sq}"),
                ));
            }
            let s = 1.0 / norm_sq.sqrt();
            let scaled = coeffs.iter().map(|c| c * s).collect();
            let mo = MolecularOrbital::new(scaled, prims, Some(sigma))
                .map_err(|e| ValidationError::new(format!("{path}.coeffs"), e.to_string()))?;
            if mo.coeff_norm() > 1.0 / sigma {
                return Err(ValidationError::new(
                    format!("{path}.coeffs"),
                    format!(
                        "||c|| = {} exceeds 1/sigma = {}; not an orthogonalized combination",
                        mo.coeff_norm(),
                        1.0 / sigma
                    ),
                ));
            }
            out.push(PreparedOrbital {
                name: o.name.clone(),
                occupation: o.occupation,
                mo,
                input_norm_sq: norm_sq,
            });
        }
        Ok(out)
    }
}
