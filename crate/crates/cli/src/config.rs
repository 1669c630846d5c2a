//! Run configuration: a versioned, strictly validated JSON schema plus the
//! effective-config echo that makes every run reproducible from one file.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use hd_core::identify::FitConfig;
use hd_core::measure::{CapacityConfig, ContentMode, KernelMode};
use hd_core::noise::KakutaniConfig;
use hd_core::{AnalyticModel, BoundarySet, GaugeFunction, NoiseModel, SamplingScheme};

pub const SCHEMA_VERSION: &str = "hd-config/1";

/// CLI failure split by exit code: validation problems exit 2, numeric
/// failures (nonconvergence, rank deficiency) exit 3.
#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Validation(_) => 2,
            Self::Numeric(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Validation(m) => write!(f, "invalid configuration: {m}"),
            Self::Numeric(m) => write!(f, "numeric failure: {m}"),
        }
    }
}

/// Maps a core error raised while handling one config block to a CLI error
/// whose message names the failing field as block.field.
pub fn block_error(block: &str, e: hd_core::Error) -> CliError {
    match e {
        hd_core::Error::InvalidParameter { field, message } => {
            CliError::Validation(format!("{block}.{field}: {message}"))
        }
        hd_core::Error::NoConvergence { iterations, residual } => CliError::Numeric(format!(
            "{block}: no convergence after {iterations} iterations (residual {residual})"
        )),
        hd_core::Error::RankDeficient(m) => CliError::Numeric(format!("{block}: {m}")),
        other => CliError::Validation(format!("{block}: {other}")),
    }
}

/// Capacity request: exponent, grid resolution, kernel flavor, and solver
/// limits, all defaulted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CapacitySpec {
    pub alpha: f64,
    pub grid: usize,
    pub kernel: KernelMode,
    pub gap_tolerance: f64,
    pub max_iterations: usize,
}

impl Default for CapacitySpec {
    fn default() -> Self {
        let solver = CapacityConfig::default();
        Self {
            alpha: 0.5,
            grid: 256,
            kernel: KernelMode::Angular,
            gap_tolerance: solver.gap_tolerance,
            max_iterations: solver.max_iterations,
        }
    }
}

impl CapacitySpec {
    pub fn solver(&self) -> CapacityConfig {
        CapacityConfig { gap_tolerance: self.gap_tolerance, max_iterations: self.max_iterations }
    }
}

/// One run's declarative inputs. Unknown keys are rejected; blocks a command
/// does not use may stay null. The echoed effective config fills every block
/// the run consulted with fully explicit values.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Must equal "hd-config/1".
    pub schema: String,
    #[serde(default)]
    pub command: Option<String>,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub threads: Option<usize>,
    #[serde(default)]
    pub set: Option<BoundarySet>,
    #[serde(default)]
    pub gauge: Option<GaugeFunction>,
    #[serde(default)]
    pub plan: Option<SamplingScheme>,
    #[serde(default)]
    pub model: Option<AnalyticModel>,
    #[serde(default)]
    pub model_b: Option<AnalyticModel>,
    #[serde(default)]
    pub noise: Option<NoiseModel>,
    #[serde(default)]
    pub fit: Option<FitConfig>,
    #[serde(default)]
    pub ladder: Option<Vec<usize>>,
    #[serde(default)]
    pub seeds: Option<Vec<u64>>,
    #[serde(default)]
    pub content_mode: Option<ContentMode>,
    #[serde(default)]
    pub capacity: Option<CapacitySpec>,
    #[serde(default)]
    pub kakutani: Option<KakutaniConfig>,
    #[serde(default)]
    pub coverage_grid: Option<usize>,
    #[serde(default)]
    pub observations: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Validation(format!("cannot read config {}: {e}", path.display()))
        })?;
        let cfg: RunConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::Validation(format!("config {}: {e}", path.display())))?;
        if cfg.schema != SCHEMA_VERSION {
            return Err(CliError::Validation(format!(
                "schema: expected \"{SCHEMA_VERSION}\", got \"{}\"",
                cfg.schema
            )));
        }
        Ok(cfg)
    }

    /// A config with nothing set; used when a command needs no input file.
    pub fn empty() -> Self {
        Self {
            schema: SCHEMA_VERSION.to_string(),
            command: None,
            out: None,
            seed: None,
            threads: None,
            set: None,
            gauge: None,
            plan: None,
            model: None,
            model_b: None,
            noise: None,
            fit: None,
            ladder: None,
            seeds: None,
            content_mode: None,
            capacity: None,
            kakutani: None,
            coverage_grid: None,
            observations: None,
        }
    }

    pub fn require_set(&self) -> Result<&BoundarySet, CliError> {
        self.set
            .as_ref()
            .ok_or_else(|| CliError::Validation("set: required by this command".into()))
    }

    pub fn require_gauge(&self) -> Result<&GaugeFunction, CliError> {
        self.gauge
            .as_ref()
            .ok_or_else(|| CliError::Validation("gauge: required by this command".into()))
    }

    pub fn require_plan(&self) -> Result<&SamplingScheme, CliError> {
        self.plan
            .as_ref()
            .ok_or_else(|| CliError::Validation("plan: required by this command".into()))
    }

    pub fn require_model(&self) -> Result<&AnalyticModel, CliError> {
        let m = self
            .model
            .as_ref()
            .ok_or_else(|| CliError::Validation("model: required by this command".into()))?;
        m.validate().map_err(|e| block_error("model", e))?;
        Ok(m)
    }

    pub fn require_model_b(&self) -> Result<&AnalyticModel, CliError> {
        let m = self
            .model_b
            .as_ref()
            .ok_or_else(|| CliError::Validation("model_b: required by this command".into()))?;
        m.validate().map_err(|e| block_error("model_b", e))?;
        Ok(m)
    }

    pub fn require_noise(&self) -> Result<&NoiseModel, CliError> {
        let n = self
            .noise
            .as_ref()
            .ok_or_else(|| CliError::Validation("noise: required by this command".into()))?;
        n.validate().map_err(|e| block_error("noise", e))?;
        Ok(n)
    }
}
