//! Flat `key = value` run configuration.
//!
//! ```text
//! # comments start with '#'
//! r = 0, 0.3, 0.6
//! n_bar = 1e-3, 1e-4
//! omega = 1.2e15
//! lambda = 1
//! ```
//!
//! Exactly one of `n_bar` and `temperature` must be present. Every other key
//! except `r` and `omega` has a default.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use eiwe_core::OccupationModel;

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn err<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => err(format!("unknown format '{other}' (expected csv or json)")),
        }
    }
}

/// Thermal axis of the grid: occupations given directly or derived from
/// temperatures.
#[derive(Debug, Clone, PartialEq)]
pub enum ThermalGrid {
    NBar(Vec<f64>),
    Temperature(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub r: Vec<f64>,
    pub thermal: ThermalGrid,
    pub model: OccupationModel,
    /// rad/s
    pub omega: f64,
    pub lambda: Vec<f64>,
    pub phi: Vec<f64>,
    pub format: Format,
    pub seed: u64,
    /// Fock cutoff when the oracle is on.
    pub oracle: Option<usize>,
    /// Keys that were set explicitly, for commands that ignore some of them.
    pub explicit: Vec<String>,
}

const KEYS: [&str; 11] = [
    "r", "n_bar", "temperature", "model", "omega", "lambda", "phi", "format", "seed", "oracle",
    "cutoff",
];

impl SweepConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
        text.parse()
    }

    pub fn is_set(&self, key: &str) -> bool {
        self.explicit.iter().any(|k| k == key)
    }
}

fn parse_list<T: FromStr>(key: &str, raw: &str) -> Result<Vec<T>, ConfigError> {
    let items: Vec<&str> = raw.split(',').map(str::trim).collect();
    if items.iter().any(|s| s.is_empty()) {
        return err(format!("'{key}' has an empty list entry"));
    }
    items
        .into_iter()
        .map(|s| {
            s.parse::<T>()
                .map_err(|_| ConfigError(format!("'{key}': cannot parse '{s}'")))
        })
        .collect()
}

fn parse_one<T: FromStr>(key: &str, raw: &str) -> Result<T, ConfigError> {
    let mut v = parse_list::<T>(key, raw)?;
    if v.len() != 1 {
        return err(format!("'{key}' takes a single value"));
    }
    Ok(v.remove(0))
}

fn check_all(key: &str, values: &[f64], ok: impl Fn(f64) -> bool, what: &str) -> Result<(), ConfigError> {
    match values.iter().find(|&&v| !ok(v)) {
        Some(v) => err(format!("'{key}' value {v} must be {what}")),
        None => Ok(()),
    }
}

impl FromStr for SweepConfig {
    type Err = ConfigError;

    fn from_str(text: &str) -> Result<Self, ConfigError> {
        let mut raw: BTreeMap<String, String> = BTreeMap::new();
        for (no, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return err(format!("line {}: expected 'key = value'", no + 1));
            };
            let key = key.trim();
            if !KEYS.contains(&key) {
                return err(format!("line {}: unknown key '{key}'", no + 1));
            }
            if raw.insert(key.to_string(), value.trim().to_string()).is_some() {
                return err(format!("line {}: duplicate key '{key}'", no + 1));
            }
        }
        let get = |k: &str| raw.get(k).map(String::as_str);

        let r: Vec<f64> = match get("r") {
            Some(v) => parse_list("r", v)?,
            None => return err("missing required key 'r'"),
        };
        check_all("r", &r, |v| v.is_finite() && v.abs() <= eiwe_core::states::MAX_SQUEEZING, "finite with |r| <= 10")?;

        let omega: f64 = match get("omega") {
            Some(v) => parse_one("omega", v)?,
            None => return err("missing required key 'omega'"),
        };
        check_all("omega", &[omega], |v| v > 0.0 && v.is_finite(), "positive")?;

        let thermal = match (get("n_bar"), get("temperature")) {
            (Some(n), None) => {
                let v = parse_list("n_bar", n)?;
                check_all("n_bar", &v, |x| x >= 0.0 && x.is_finite(), "non-negative")?;
                ThermalGrid::NBar(v)
            }
            (None, Some(t)) => {
                let v = parse_list("temperature", t)?;
                check_all("temperature", &v, |x| x > 0.0 && x.is_finite(), "positive")?;
                ThermalGrid::Temperature(v)
            }
            (Some(_), Some(_)) => return err("set exactly one of 'n_bar' and 'temperature', not both"),
            (None, None) => return err("set one of 'n_bar' or 'temperature'"),
        };

        let model = match get("model").unwrap_or("boltzmann") {
            "boltzmann" => OccupationModel::BoltzmannApprox,
            "bose_einstein" => OccupationModel::BoseEinstein,
            other => return err(format!("unknown model '{other}' (expected boltzmann or bose_einstein)")),
        };
        if let (ThermalGrid::NBar(v), OccupationModel::BoltzmannApprox) = (&thermal, model) {
            check_all("n_bar", v, |x| x > 0.0 && x < 1.0, "in (0, 1) under the boltzmann model")?;
        }
        if let (ThermalGrid::NBar(v), OccupationModel::BoseEinstein) = (&thermal, model) {
            check_all("n_bar", v, |x| x > 0.0, "positive")?;
        }

        let lambda: Vec<f64> = get("lambda").map_or(Ok(vec![1.0]), |v| parse_list("lambda", v))?;
        check_all("lambda", &lambda, |v| v > 0.0 && v.is_finite(), "positive")?;
        let phi: Vec<f64> = get("phi").map_or(Ok(vec![0.0]), |v| parse_list("phi", v))?;
        check_all("phi", &phi, f64::is_finite, "finite")?;

        let format = get("format").map_or(Ok(Format::Csv), |v| v.parse())?;
        let seed: u64 = get("seed").map_or(Ok(0), |v| parse_one("seed", v))?;
        let cutoff: Option<usize> = get("cutoff").map(|v| parse_one("cutoff", v)).transpose()?;
        let oracle = match get("oracle").unwrap_or("off") {
            "off" => None,
            "on" => match cutoff {
                Some(c) => Some(c),
                None => return err("'oracle = on' needs 'cutoff'"),
            },
            other => return err(format!("'oracle' must be on or off, got '{other}'")),
        };

        Ok(SweepConfig {
            r,
            thermal,
            model,
            omega,
            lambda,
            phi,
            format,
            seed,
            oracle,
            explicit: raw.into_keys().collect(),
        })
    }
}
