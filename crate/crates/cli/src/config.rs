//! Run configuration: a TOML document in which every field has a default.

use std::path::{Path, PathBuf};

use levy_spde_core::{ColorationKernel, GreenOperator, JumpDensity, KernelFamily, LevyMeasure, OperatorFamily, TrialRunner};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const SCHEMA_VERSION: u32 = 1;

/// Worker count used when neither the flag, the environment nor the config
/// sets one. Results never depend on it.
pub const DEFAULT_WORKERS: usize = 8;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("config does not match the schema: {0}")]
    Schema(String),
    #[error("unsupported schema_version {found}; this build reads version {SCHEMA_VERSION}")]
    Version { found: u32 },
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub operator: OperatorFamily,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    /// Monte Carlo trials for `simulate` and `noise-check`.
    pub trials: usize,
    /// `[p, B_p]` pairs: Rosenthal constants used by moment envelopes.
    pub b_p: Vec<[f64; 2]>,
    pub kernel: KernelConfig,
    pub levy: LevyConfig,
    pub grid: GridConfig,
    pub chaos: ChaosConfig,
    pub tolerances: Tolerances,
    pub output: OutputConfig,
    pub acceptance: AcceptanceConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KernelConfig {
    pub family: KernelFamily,
    pub alpha: f64,
    pub dim: usize,
}

/// Either `atoms = [[z, w], ...]` or `density = "power:β" | "gamma:λ"` with
/// `support = [eps, max]`.
///
/// Fields left out of a present block are absent rather than defaulted, so
/// that a density block does not inherit the default atoms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevyConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub atoms: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support: Option<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub t: Vec<f64>,
    pub x: Vec<f64>,
    pub p: Vec<f64>,
    /// Half-width of the simulation box; the smallest valid box when absent.
    #[serde(rename = "box", skip_serializing_if = "Option::is_none")]
    pub box_half_width: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChaosConfig {
    pub t: f64,
    pub m2: f64,
    pub orders: Vec<usize>,
    pub tail_tol: f64,
    /// Monte Carlo samples per chaos order.
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Monte Carlo agreement radius in standard errors.
    pub se_multiplier: f64,
    /// Characteristic-function radius in units of `1/√trials`.
    pub cf_multiplier: f64,
    /// Closed-form `H_t` against Simpson quadrature.
    pub h_transform: f64,
    /// Relative agreement of the two first-chaos routes.
    pub identity_rel: f64,
    /// Absolute slack of the heat sup-at-zero check.
    pub sup_abs: f64,
    /// Allowed deviation of fitted envelope exponents.
    pub slope: f64,
    /// Relative error allowed in the wave factorial ratio.
    pub factorial_rel: f64,
    /// Largest allowed change of the Rosenthal supremum between trial counts.
    pub rosenthal_change: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AcceptanceConfig {
    /// Criteria to run, numbered 1 to 15.
    pub criteria: Vec<u32>,
    /// Multiplies every Monte Carlo trial count; counts never drop below 100.
    pub trial_scale: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            operator: OperatorFamily::Heat,
            seed: 42,
            workers: None,
            trials: 100_000,
            // p = 2 is the isometry: ‖L(φ)‖₂ = m₂^{1/2}‖φ‖₂.
            b_p: vec![[2.0, 1.0]],
            kernel: KernelConfig::default(),
            levy: LevyConfig::default(),
            grid: GridConfig::default(),
            chaos: ChaosConfig::default(),
            tolerances: Tolerances::default(),
            output: OutputConfig::default(),
            acceptance: AcceptanceConfig::default(),
        }
    }
}

impl Default for KernelConfig {
    fn default() -> Self {
        Self { family: KernelFamily::Heat, alpha: 1.0, dim: 1 }
    }
}

impl Default for LevyConfig {
    fn default() -> Self {
        Self { atoms: Some(vec![[-1.0, 0.5], [1.0, 0.5]]), density: None, support: None }
    }
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { t: vec![0.5, 1.0], x: vec![0.0], p: vec![2.0, 4.0], box_half_width: None }
    }
}

impl Default for ChaosConfig {
    fn default() -> Self {
        Self { t: 1.0, m2: 1.0, orders: vec![1, 2, 3], tail_tol: 1e-8, samples: 100_000 }
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            se_multiplier: 3.0,
            cf_multiplier: 4.0,
            h_transform: 1e-10,
            identity_rel: 1e-8,
            sup_abs: 1e-8,
            slope: 0.02,
            factorial_rel: 1e-12,
            rosenthal_change: 2.0,
        }
    }
}

impl Default for AcceptanceConfig {
    fn default() -> Self {
        Self { criteria: (1..=15).collect(), trial_scale: 1.0 }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let config: Self = toml::from_str(text).map_err(|e| ConfigError::Schema(e.to_string()))?;
        if config.schema_version != SCHEMA_VERSION {
            return Err(ConfigError::Version { found: config.schema_version });
        }
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("every config field is representable in TOML")
    }

    /// Structural checks only; numeric validity is left to the modules so
    /// that it is reported as a failed check.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let levy = &self.levy;
        match (&levy.atoms, &levy.density) {
            (Some(_), Some(_)) => return Err(ConfigError::Invalid("levy sets both atoms and density".into())),
            (None, None) => return Err(ConfigError::Invalid("levy needs atoms or density".into())),
            (None, Some(_)) if levy.support.is_none() => {
                return Err(ConfigError::Invalid("levy.density needs support = [eps, max]".into()))
            }
            (Some(_), _) if levy.support.is_some() => {
                return Err(ConfigError::Invalid("levy.support only applies to a density".into()))
            }
            _ => {}
        }
        if self.workers == Some(0) {
            return Err(ConfigError::Invalid("workers must be at least 1".into()));
        }
        if self.acceptance.criteria.iter().any(|c| !(1..=15).contains(c)) {
            return Err(ConfigError::Invalid("acceptance.criteria must lie in 1..=15".into()));
        }
        if !(self.acceptance.trial_scale > 0.0) {
            return Err(ConfigError::Invalid("acceptance.trial_scale must be positive".into()));
        }
        Ok(())
    }

    pub fn operator(&self) -> levy_spde_core::Result<GreenOperator> {
        GreenOperator::new(self.operator, self.kernel.dim)
    }

    pub fn coloration(&self) -> levy_spde_core::Result<ColorationKernel> {
        ColorationKernel::new(self.kernel.family, self.kernel.alpha, self.kernel.dim)
    }

    pub fn levy_measure(&self) -> levy_spde_core::Result<LevyMeasure> {
        match (&self.levy.atoms, &self.levy.density, self.levy.support) {
            (Some(atoms), _, _) => {
                let pairs: Vec<(f64, f64)> = atoms.iter().map(|a| (a[0], a[1])).collect();
                LevyMeasure::atoms(&pairs)
            }
            (None, Some(density), Some([eps, max])) => LevyMeasure::truncated(JumpDensity::parse(density)?, eps, max),
            _ => Err(levy_spde_core::Error::InvalidParameter("levy block is incomplete".into())),
        }
    }

    /// `B_p` from the table, matched exactly on `p`.
    pub fn bp(&self, p: f64) -> Option<f64> {
        self.b_p.iter().find(|e| e[0] == p).map(|e| e[1])
    }

    pub fn set_bp(&mut self, p: f64, value: f64) {
        self.b_p.retain(|e| e[0] != p);
        self.b_p.push([p, value]);
    }

    pub fn workers(&self) -> usize {
        self.workers.unwrap_or(DEFAULT_WORKERS)
    }

    pub fn runner(&self) -> TrialRunner {
        TrialRunner::new(self.seed, self.workers())
    }

    /// Scaled Monte Carlo count for the acceptance suite.
    pub fn scaled_trials(&self, base: usize) -> usize {
        ((base as f64 * self.acceptance.trial_scale).round() as usize).max(100)
    }

    /// SHA-256 of the TOML form with the worker count removed, since worker
    /// counts never change results.
    pub fn hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.workers = None;
        let digest = Sha256::digest(canonical.to_toml().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}
