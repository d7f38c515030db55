//! Pipeline configuration: defaults, JSON file, dotted-path overrides and
//! validation with field-path diagnostics.

use std::path::PathBuf;

use cointegrate::data_io::{DatasetSpec, DgpSpec};
use cointegrate::irf::{DEFAULT_HORIZON, DEFAULT_LEVEL, DEFAULT_N_BOOT};
use cointegrate::johansen::DetSpec;
use cointegrate::unit_root::{LagChoice, Regression};
use cointegrate::var_select::DEFAULT_P_MAX;
use cointegrate::Period;
use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Variables of the cointegrated system, in Cholesky order.
pub const DEFAULT_SYSTEM: [&str; 5] = ["CREDIT", "UMCSENT", "FEDFUNDS", "CPIAUCSL", "M2SL"];

/// A configuration problem tied to a dotted field path.
#[derive(Debug)]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError {
            path: path.into(),
            message: message.into(),
        }
    }
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.path.is_empty() {
            write!(f, "{}", self.message)
        } else {
            write!(f, "`{}`: {}", self.path, self.message)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    #[default]
    Snapshot,
    Fred,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataConfig {
    pub source: Source,
    /// Snapshot directory; falls back to `COINTEGRATE_SNAPSHOT_DIR`, then
    /// `./data/snapshot`, then the copy shipped with the sources.
    pub snapshot_dir: Option<PathBuf>,
    /// A frame CSV (`DATE,<names>`) used instead of the dataset; `-` is stdin.
    pub input: Option<String>,
}

impl Default for DataConfig {
    fn default() -> Self {
        DataConfig {
            source: Source::Snapshot,
            snapshot_dir: None,
            input: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WindowConfig {
    /// Window for the descriptive statistics and unit-root tests, each
    /// series on its own observations.
    pub describe: Option<(Period, Period)>,
    /// Common window for every estimation stage.
    pub estimation: Option<(Period, Period)>,
}

impl Default for WindowConfig {
    fn default() -> Self {
        let p = |y, m| Period::new(y, m).expect("valid period");
        WindowConfig {
            describe: Some((p(1959, 1), p(2024, 8))),
            estimation: Some((p(1978, 1), p(2024, 8))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AdfConfig {
    pub regression: Regression,
    pub max_lag: Option<usize>,
    pub lag_choice: LagChoice,
    /// Restrict to these columns (or series ids); all when empty.
    pub series: Vec<String>,
}

impl Default for AdfConfig {
    fn default() -> Self {
        AdfConfig {
            regression: Regression::Constant,
            max_lag: None,
            lag_choice: LagChoice::AutoSic,
            series: vec![],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LagSelectConfig {
    pub p_max: usize,
    /// All dataset columns when absent.
    pub variables: Option<Vec<String>>,
}

impl Default for LagSelectConfig {
    fn default() -> Self {
        LagSelectConfig {
            p_max: DEFAULT_P_MAX,
            variables: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct JohansenConfig {
    pub lag_diff: usize,
    pub det_spec: DetSpec,
    /// Rank imposed on the VECM; the trace test choice when absent.
    pub rank: Option<usize>,
    /// System variables; the five-variable system on the dataset, every
    /// column on a frame input.
    pub variables: Option<Vec<String>>,
}

impl Default for JohansenConfig {
    fn default() -> Self {
        JohansenConfig {
            lag_diff: 2,
            det_spec: DetSpec::UnrestrictedConstant,
            rank: Some(2),
            variables: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VecmConfig {
    pub det_spec: DetSpec,
}

impl Default for VecmConfig {
    fn default() -> Self {
        VecmConfig {
            det_spec: DetSpec::RestrictedConstant,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IrfConfig {
    pub horizon: usize,
    pub n_boot: usize,
    pub seed: u64,
    pub level: f64,
    /// Cholesky order; the system order when absent.
    pub ordering: Option<Vec<String>>,
    /// A saved model to use instead of fitting one.
    pub from_model: Option<PathBuf>,
}

impl Default for IrfConfig {
    fn default() -> Self {
        IrfConfig {
            horizon: DEFAULT_HORIZON,
            n_boot: DEFAULT_N_BOOT,
            seed: 1,
            level: DEFAULT_LEVEL,
            ordering: None,
            from_model: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Json,
    Csv,
    Markdown,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    /// Written in addition to JSON.
    pub format: Format,
    pub directory: PathBuf,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            format: Format::Json,
            directory: PathBuf::from("output"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateConfig {
    pub dgp: DgpSpec,
    /// CSV path; stdout when absent.
    pub output: Option<PathBuf>,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        SimulateConfig {
            dgp: DgpSpec::bivariate_example(1000, 5),
            output: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub dataset: DatasetSpec,
    pub data: DataConfig,
    pub window: WindowConfig,
    pub adf: AdfConfig,
    pub lagselect: LagSelectConfig,
    pub johansen: JohansenConfig,
    pub vecm: VecmConfig,
    pub irf: IrfConfig,
    pub output: OutputConfig,
    pub simulate: SimulateConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            dataset: DatasetSpec::default_six(),
            data: DataConfig::default(),
            window: WindowConfig::default(),
            adf: AdfConfig::default(),
            lagselect: LagSelectConfig::default(),
            johansen: JohansenConfig::default(),
            vecm: VecmConfig::default(),
            irf: IrfConfig::default(),
            output: OutputConfig::default(),
            simulate: SimulateConfig::default(),
        }
    }
}

/// Short flags and the dotted paths they stand for. `--out` and `--seed`
/// depend on the command.
pub fn alias(command: &str, flag: &str) -> Option<&'static str> {
    Some(match (command, flag) {
        ("simulate", "seed") => "simulate.dgp.seed",
        ("simulate", "out") => "simulate.output",
        ("fetch", "out") => "data.snapshot_dir",
        (_, "out") => "output.directory",
        (_, "seed") => "irf.seed",
        (_, "lag-diff") => "johansen.lag_diff",
        (_, "rank") => "johansen.rank",
        (_, "det") => "johansen.det_spec",
        (_, "series") => "adf.series",
        (_, "regression") => "adf.regression",
        (_, "p-max") => "lagselect.p_max",
        (_, "horizon") => "irf.horizon",
        (_, "n-boot") => "irf.n_boot",
        (_, "level") => "irf.level",
        (_, "ordering") => "irf.ordering",
        (_, "from-model") => "irf.from_model",
        (_, "format") => "output.format",
        (_, "input") => "data.input",
        (_, "snapshot") => "data.snapshot_dir",
        (_, "source") => "data.source",
        _ => return None,
    })
}

fn merge(base: &mut Value, patch: Value) {
    match (base, patch) {
        (Value::Object(b), Value::Object(p)) => {
            for (k, v) in p {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

/// Interprets an override string: JSON when it parses, a comma list for
/// list-valued settings, otherwise a plain string.
fn override_value(current: &Value, raw: &str) -> Value {
    if let Ok(v) = serde_json::from_str::<Value>(raw) {
        if !(current.is_array() && v.is_string()) {
            return v;
        }
    }
    if current.is_array() || raw.contains(',') {
        return Value::Array(raw.split(',').map(|s| Value::String(s.trim().to_string())).collect());
    }
    Value::String(raw.to_string())
}

fn set_path(root: &mut Value, path: &str, raw: &str) -> Result<(), ConfigError> {
    let mut node = root;
    let parts: Vec<&str> = path.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        let next = match node {
            Value::Object(m) => m.get_mut(*part),
            Value::Array(a) => part.parse::<usize>().ok().and_then(|i| a.get_mut(i)),
            _ => None,
        };
        let Some(next) = next else {
            return Err(ConfigError::new(path, "unknown setting"));
        };
        if i + 1 == parts.len() {
            *next = override_value(next, raw);
            return Ok(());
        }
        node = next;
    }
    unreachable!("split yields at least one part")
}

/// Builds the configuration from defaults, an optional JSON file and
/// `(dotted path, value)` overrides, then validates it.
pub fn load(file: Option<&str>, overrides: &[(String, String)]) -> Result<PipelineConfig, ConfigError> {
    let mut value = serde_json::to_value(PipelineConfig::default()).expect("defaults serialize");
    if let Some(f) = file {
        let text = std::fs::read_to_string(f).map_err(|e| ConfigError::new("", format!("cannot read config {f}: {e}")))?;
        let patch: Value =
            serde_json::from_str(&text).map_err(|e| ConfigError::new("", format!("config {f} is not valid JSON: {e}")))?;
        if !patch.is_object() {
            return Err(ConfigError::new("", format!("config {f} must be a JSON object")));
        }
        merge(&mut value, patch);
    }
    for (path, raw) in overrides {
        set_path(&mut value, path, raw)?;
    }
    let config: PipelineConfig = serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        ConfigError::new(if path == "." { String::new() } else { path }, e.into_inner().to_string())
    })?;
    config.validate()?;
    Ok(config)
}

impl PipelineConfig {
    /// Checks that do not depend on the data.
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.dataset
            .validate()
            .map_err(|e| ConfigError::new("dataset", e.to_string()))?;
        for (name, w) in [("window.describe", self.window.describe), ("window.estimation", self.window.estimation)] {
            if let Some((a, b)) = w {
                if a > b {
                    return Err(ConfigError::new(name, format!("start {a} is after end {b}")));
                }
            }
        }
        if self.lagselect.p_max == 0 {
            return Err(ConfigError::new("lagselect.p_max", "must be at least 1"));
        }
        if let LagChoice::Fixed(l) = self.adf.lag_choice {
            if self.adf.max_lag.is_some_and(|m| l > m) {
                return Err(ConfigError::new("adf.lag_choice", format!("fixed lag {l} exceeds max_lag")));
            }
        }
        if self.irf.horizon == 0 {
            return Err(ConfigError::new("irf.horizon", "must be at least 1"));
        }
        if self.irf.n_boot < 99 {
            return Err(ConfigError::new("irf.n_boot", "must be at least 99"));
        }
        if !(self.irf.level > 0.0 && self.irf.level < 1.0) {
            return Err(ConfigError::new("irf.level", "must lie strictly between 0 and 1"));
        }
        if self.data.input.is_none() {
            let columns = self.columns();
            for (path, list) in [
                ("lagselect.variables", &self.lagselect.variables),
                ("johansen.variables", &self.johansen.variables),
            ] {
                if let Some(v) = list {
                    check_subset(path, v, &columns)?;
                }
            }
            self.validate_system(&self.system(&columns))?;
        }
        self.simulate
            .dgp
            .validate()
            .map_err(|e| ConfigError::new("simulate.dgp", e.to_string()))?;
        Ok(())
    }

    /// Checks that need the system variables.
    pub fn validate_system(&self, system: &[String]) -> Result<(), ConfigError> {
        let k = system.len();
        if k < 2 {
            return Err(ConfigError::new("johansen.variables", "need at least two variables"));
        }
        if let Some(r) = self.johansen.rank {
            if r == 0 || r > k {
                return Err(ConfigError::new(
                    "johansen.rank",
                    format!("rank {r} is invalid for {k} variables (must be 1..={k})"),
                ));
            }
        }
        if let Some(o) = &self.irf.ordering {
            let mut a = o.clone();
            let mut b = system.to_vec();
            a.sort();
            b.sort();
            if a != b {
                return Err(ConfigError::new(
                    "irf.ordering",
                    format!("must be a permutation of {}", system.join(", ")),
                ));
            }
        }
        Ok(())
    }

    /// Dataset column names.
    pub fn columns(&self) -> Vec<String> {
        self.dataset.entries.iter().map(|e| e.column_name.clone()).collect()
    }

    /// System variables given the available columns.
    pub fn system(&self, columns: &[String]) -> Vec<String> {
        if let Some(v) = &self.johansen.variables {
            return v.clone();
        }
        let default: Vec<String> = DEFAULT_SYSTEM.iter().map(|s| s.to_string()).collect();
        if self.data.input.is_none() && default.iter().all(|d| columns.contains(d)) {
            default
        } else {
            columns.to_vec()
        }
    }

    pub fn lag_variables(&self, columns: &[String]) -> Vec<String> {
        self.lagselect.variables.clone().unwrap_or_else(|| columns.to_vec())
    }
}

pub fn check_subset(path: &str, names: &[String], columns: &[String]) -> Result<(), ConfigError> {
    for n in names {
        if !columns.contains(n) {
            return Err(ConfigError::new(path, format!("unknown variable `{n}`")));
        }
    }
    Ok(())
}
