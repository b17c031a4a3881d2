//! JSON scenario configuration.
//!
//! Complex numbers are `[re, im]` pairs and matrices are row-major nested
//! arrays of them. Paths inside a config are resolved relative to the
//! config file.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::Deserialize;

#[derive(Debug)]
pub struct ConfigError {
    /// Dotted path to the offending field, or `""` for the document.
    pub field: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.field.is_empty() {
            write!(f, "{}", self.message)
        } else {
            write!(f, "{}: {}", self.field, self.message)
        }
    }
}

pub type Complex = [f64; 2];
pub type Matrix = Vec<Vec<Complex>>;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub system: SystemConfig,
    #[serde(default)]
    pub baths: Vec<BathConfig>,
    #[serde(default)]
    pub psa: PsaConfig,
    #[serde(default)]
    pub initial_state: Option<InitialState>,
    #[serde(default)]
    pub times: Option<Times>,
    #[serde(default = "default_outputs")]
    pub outputs: Vec<OutputKind>,
    /// Free-form label for the energy unit, copied into report metadata.
    #[serde(default)]
    pub units: Option<String>,
}

fn default_outputs() -> Vec<OutputKind> {
    vec![OutputKind::SymmetryReport, OutputKind::Blocks]
}

#[derive(Debug, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum SystemConfig {
    TwoSpins {
        omega1: f64,
        omega2: f64,
        lambda: f64,
        #[serde(default)]
        generator: Generator,
    },
    SpinChain {
        omegas: Vec<f64>,
        couplings: Vec<f64>,
    },
    Bosons {
        energies: Vec<f64>,
        n_max: u32,
        #[serde(default)]
        squeezing: Option<SqueezingConfig>,
    },
    Custom {
        modes: usize,
        statistics: StatisticsConfig,
        #[serde(default = "one")]
        n_max: u32,
        hamiltonian: Matrix,
        /// Named coupling operators referenced from bath channels.
        operators: std::collections::BTreeMap<String, Matrix>,
        /// Mode energies used for the condition report, if known.
        #[serde(default)]
        mode_energies: Option<Vec<f64>>,
    },
    RandomGraded {},
}

fn one() -> u32 {
    1
}

#[derive(Clone, Copy, Debug, Default, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum Generator {
    #[default]
    Global,
    Local,
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StatisticsConfig {
    Fermionic,
    Bosonic,
}

/// Single-mode squeezed bath: rate `gamma`, occupation `n_th`, squeezing
/// parameter `m`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SqueezingConfig {
    pub gamma: f64,
    pub n_th: f64,
    pub m: Complex,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BathConfig {
    pub mu: f64,
    pub temperature: f64,
    pub cutoff: f64,
    #[serde(default)]
    pub lamb_shift: LambShiftConfig,
    #[serde(default)]
    pub channels: Vec<ChannelConfig>,
}

#[derive(Clone, Copy, Debug, Default, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum LambShiftConfig {
    #[default]
    Off,
    Numeric,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum ChannelConfig {
    Name(String),
    Weighted {
        operator: String,
        #[serde(default = "unit_weight")]
        weight: f64,
    },
}

fn unit_weight() -> f64 {
    1.0
}

impl ChannelConfig {
    pub fn name(&self) -> &str {
        match self {
            ChannelConfig::Name(n) => n,
            ChannelConfig::Weighted { operator, .. } => operator,
        }
    }

    pub fn weight(&self) -> f64 {
        match self {
            ChannelConfig::Name(_) => 1.0,
            ChannelConfig::Weighted { weight, .. } => *weight,
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PsaConfig {
    #[serde(default)]
    pub mode: PsaModeConfig,
    pub chi: Option<f64>,
    /// Defaults to `μ⁻²` of the first bath.
    pub tau_r: Option<f64>,
    pub freq_tol: Option<f64>,
}

#[derive(Clone, Copy, Debug, Default, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum PsaModeConfig {
    #[default]
    Partial,
    FullSecular,
    None,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialState {
    BasisState { occupation: Vec<u32> },
    Thermal { temperature: f64 },
    MatrixFile { path: PathBuf },
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum Times {
    List(Vec<f64>),
    Range { start: f64, stop: f64, step: f64 },
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq, PartialOrd, Ord)]
#[serde(rename_all = "snake_case")]
pub enum OutputKind {
    SymmetryReport,
    Blocks,
    Spectrum,
    SteadyState,
    Trajectory,
    Gaussian,
}

/// Reads and parses a config, reporting the JSON path of any schema error.
pub fn load(path: &Path) -> Result<ScenarioConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::new("", format!("cannot read {}: {e}", path.display())))?;
    let mut de = serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let field = e.path().to_string();
        let inner = e.into_inner();
        let field = if field == "." { String::new() } else { field };
        ConfigError::new(field, format!("{inner}"))
    })
}

/// Expands a time specification, requiring strictly increasing finite times.
pub fn expand_times(times: &Times) -> Result<Vec<f64>, ConfigError> {
    let values = match times {
        Times::List(v) => v.clone(),
        Times::Range { start, stop, step } => {
            if !(step.is_finite() && *step > 0.0) {
                return Err(ConfigError::new("times.step", "must be a positive number"));
            }
            if !(start.is_finite() && stop.is_finite()) || stop < start {
                return Err(ConfigError::new("times", "range needs finite start ≤ stop"));
            }
            let n = ((stop - start) / step + 1e-9).floor() as usize;
            (0..=n).map(|k| start + k as f64 * step).collect()
        }
    };
    if values.is_empty() {
        return Err(ConfigError::new("times", "no time points"));
    }
    for (k, t) in values.iter().enumerate() {
        if !t.is_finite() || *t < 0.0 {
            return Err(ConfigError::new(format!("times[{k}]"), "must be finite and non-negative"));
        }
        if k > 0 && *t <= values[k - 1] {
            return Err(ConfigError::new(format!("times[{k}]"), "times must be strictly increasing"));
        }
    }
    Ok(values)
}

/// Parses a `[re, im]` matrix, checking it is square of size `dim`.
pub fn parse_matrix(
    m: &Matrix,
    dim: usize,
    field: &str,
) -> Result<liouville_blocks::linalg::CMatrix, ConfigError> {
    if m.len() != dim || m.iter().any(|row| row.len() != dim) {
        return Err(ConfigError::new(field, format!("expected a {dim}×{dim} matrix")));
    }
    Ok(liouville_blocks::linalg::CMatrix::from_fn(dim, dim, |r, c| {
        let [re, im] = m[r][c];
        liouville_blocks::C64::new(re, im)
    }))
}
