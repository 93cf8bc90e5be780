//! TOML run configuration.

use crate::error::{Error, Result};
use crate::hopf::MeanFlowGauge;
use crate::profiles::ShearProfile;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ProfileConfig {
    #[default]
    Poiseuille,
    /// Two-column CSV `y, U`.
    Tabulated { path: PathBuf },
    TanhSymmetric { beta: f64 },
}

impl ProfileConfig {
    /// Loads the profile; any failure is a configuration error.
    pub fn load(&self) -> Result<ShearProfile> {
        let res = match self {
            Self::Poiseuille => Ok(ShearProfile::poiseuille()),
            Self::Tabulated { path } => ShearProfile::from_csv(path),
            Self::TanhSymmetric { beta } => ShearProfile::tanh_symmetric(*beta),
        };
        res.map_err(|e| match e {
            Error::Config(_) => e,
            other => Error::Config(format!("cannot load profile: {other}")),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HopfConfig {
    pub gauge: MeanFlowGauge,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AmplitudeConfig {
    /// Bifurcation parameter `mu = nu - nu_star`. When absent, `mu_magnitude`
    /// is used with the sign on which the limit cycle exists.
    pub mu: Option<f64>,
    pub mu_magnitude: f64,
    /// Initial amplitude as a fraction of the cycle radius.
    pub start_fraction: f64,
    /// Integration length in units of the radial relaxation time `1 / |2 Re(c1) mu|`.
    pub relaxation_times: f64,
    /// Recorded states in `amplitude.csv`.
    pub samples: usize,
}

impl Default for AmplitudeConfig {
    fn default() -> Self {
        Self {
            mu: None,
            mu_magnitude: 1e-6,
            start_fraction: 0.5,
            relaxation_times: 20.0,
            samples: 2000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RollConfig {
    pub nx: usize,
    pub nt: usize,
}

impl Default for RollConfig {
    fn default() -> Self {
        Self { nx: 64, nt: 4 }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    /// Viscosities for `sweep`; each gets its own pipeline and output subdirectory.
    pub nu: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub profile: ProfileConfig,
    /// Polynomial degree of the collocation grid.
    pub n: usize,
    pub nu: f64,
    pub seed: u64,
    pub output_dir: PathBuf,
    /// Locate the critical point (nose of the neutral curve) before the audit.
    pub critical: bool,
    pub hopf: HopfConfig,
    pub amplitude: AmplitudeConfig,
    pub roll: RollConfig,
    pub sweep: SweepConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            profile: ProfileConfig::Poiseuille,
            n: 128,
            nu: 8e-5,
            seed: 42,
            output_dir: PathBuf::from("stripstab-out"),
            critical: true,
            hopf: HopfConfig::default(),
            amplitude: AmplitudeConfig::default(),
            roll: RollConfig::default(),
            sweep: SweepConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a config file. Relative profile paths resolve against the
    /// directory of the config file.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg: Self = toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        if let ProfileConfig::Tabulated { path: p } = &mut cfg.profile {
            if p.is_relative() {
                if let Some(dir) = path.parent() {
                    *p = dir.join(&*p);
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < crate::specgrid::MIN_NODES {
            return Err(Error::Config(format!("n = {} below the minimum {}", self.n, crate::specgrid::MIN_NODES)));
        }
        if !(self.nu > 0.0 && self.nu.is_finite()) {
            return Err(Error::Config(format!("nu must be positive, got {}", self.nu)));
        }
        if !(self.amplitude.mu_magnitude > 0.0) {
            return Err(Error::Config("amplitude.mu_magnitude must be positive".into()));
        }
        if self.amplitude.mu == Some(0.0) {
            return Err(Error::Config("amplitude.mu must be non-zero".into()));
        }
        if !(self.amplitude.start_fraction > 0.0) || !(self.amplitude.relaxation_times > 0.0) {
            return Err(Error::Config("amplitude.start_fraction and relaxation_times must be positive".into()));
        }
        if self.roll.nx < 4 || self.roll.nt == 0 {
            return Err(Error::Config("roll needs nx >= 4 and nt >= 1".into()));
        }
        if let Some(bad) = self.sweep.nu.iter().find(|v| !(**v > 0.0)) {
            return Err(Error::Config(format!("sweep viscosity {bad} is not positive")));
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON form; stamped into every artifact.
    pub fn hash(&self) -> String {
        config_hash(self)
    }
}

/// SHA-256 (hex) of the JSON serialization of any parameter set.
pub fn config_hash<T: Serialize>(value: &T) -> String {
    let bytes = serde_json::to_vec(value).expect("parameters serialize");
    hex::encode(Sha256::digest(&bytes))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_uses_defaults() {
        let cfg = RunConfig::from_toml_str("nu = 7e-5\n[profile]\nkind = \"poiseuille\"\n").unwrap();
        assert_eq!(cfg.nu, 7e-5);
        assert_eq!(cfg.n, 128);
        assert_eq!(cfg.hopf.gauge, MeanFlowGauge::Pressure);
    }

    #[test]
    fn roundtrip_preserves_hash() {
        let mut cfg = RunConfig::default();
        cfg.profile = ProfileConfig::Tabulated {
            path: "u.csv".into(),
        };
        cfg.sweep.nu = vec![7e-5, 8e-5];
        let back = RunConfig::from_toml_str(&cfg.to_toml_string().unwrap()).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.hash(), cfg.hash());
        let mut other = cfg.clone();
        other.seed += 1;
        assert_ne!(other.hash(), cfg.hash());
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(RunConfig::from_toml_str("nuu = 1.0").is_err());
        assert!(RunConfig::from_toml_str("nu = -1.0").is_err());
        assert!(RunConfig::from_toml_str("[profile]\nkind = \"plug\"").is_err());
    }

    #[test]
    fn missing_profile_file_is_config_error() {
        let p = ProfileConfig::Tabulated {
            path: "/nonexistent/profile.csv".into(),
        };
        assert!(matches!(p.load(), Err(Error::Config(_))));
    }
}
