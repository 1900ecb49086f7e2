//! Sweep configuration: flat `key = value` text with `#` comments.
//!
//! Units: sizes in bytes, bandwidth in bytes/s, CPU workload in percent,
//! delay tolerance in milliseconds (or `inf`), energy in joules, time in
//! seconds.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use thiserror::Error;

use super::cost::{CostModel, CostShape, ResultSizeModel};
use crate::model::PowerProfile;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Factor {
    InputSize,
    Bandwidth,
    CpuWorkload,
    DelayTolerance,
}

impl Factor {
    pub fn name(self) -> &'static str {
        match self {
            Factor::InputSize => "input_size",
            Factor::Bandwidth => "bandwidth",
            Factor::CpuWorkload => "cpu_workload",
            Factor::DelayTolerance => "delay_tolerance",
        }
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Factor {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "input_size" => Ok(Self::InputSize),
            "bandwidth" => Ok(Self::Bandwidth),
            "cpu_workload" => Ok(Self::CpuWorkload),
            "delay_tolerance" => Ok(Self::DelayTolerance),
            other => Err(format!(
                "unknown factor '{other}' (expected input_size|bandwidth|cpu_workload|delay_tolerance)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Defaults {
    pub input_size: u64,
    pub cpu_workload: f64,
    pub bandwidth: f64,
    /// Milliseconds; `None` is infinite.
    pub delay_tolerance_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub application: String,
    pub factor: Factor,
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
    pub defaults: Defaults,
    pub profile: PowerProfile,
    pub speedup_n: f64,
    pub cost: CostModel,
    pub overhead_energy: f64,
    pub overhead_time: f64,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("missing config key '{0}'")]
    MissingKey(&'static str),
    #[error("unknown config key '{0}'")]
    UnknownKey(String),
    #[error("config key '{key}': {msg}")]
    BadValue { key: String, msg: String },
    #[error("invalid config: {0}")]
    Invalid(String),
    #[error("cannot read config {path}: {msg}")]
    Io { path: String, msg: String },
}

const KEYS: &[&str] = &[
    "application",
    "factor",
    "range_lo",
    "range_hi",
    "steps",
    "default_input_size",
    "default_cpu_workload",
    "default_bandwidth",
    "default_delay_tolerance",
    "p_exec",
    "p_idle",
    "p_send",
    "p_receive",
    "speedup_n",
    "cost_shape",
    "cost_exponent",
    "cost_anchor_size",
    "cost_anchor_cpu",
    "cost_anchor_time",
    "cost_cpu_sensitivity",
    "result_size",
    "overhead_energy",
    "overhead_time",
];

/// Parses `key = value` lines. Blank lines and `#` comments are skipped;
/// duplicate keys are an error.
pub fn parse_key_values(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let syntax = |msg: &str| ConfigError::Syntax {
            line: i + 1,
            msg: msg.to_string(),
        };
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| syntax("expected 'key = value'"))?;
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() {
            return Err(syntax("empty key"));
        }
        if map.insert(k.to_string(), v.to_string()).is_some() {
            return Err(syntax(&format!("duplicate key '{k}'")));
        }
    }
    Ok(map)
}

struct Fields(BTreeMap<String, String>);

impl Fields {
    fn str(&self, key: &'static str) -> Result<&str, ConfigError> {
        self.0
            .get(key)
            .map(String::as_str)
            .ok_or(ConfigError::MissingKey(key))
    }

    fn parse<T: FromStr>(&self, key: &'static str) -> Result<T, ConfigError>
    where
        T::Err: fmt::Display,
    {
        self.str(key)?
            .parse::<T>()
            .map_err(|e| ConfigError::BadValue {
                key: key.to_string(),
                msg: e.to_string(),
            })
    }

    fn num(&self, key: &'static str) -> Result<f64, ConfigError> {
        let v: f64 = self.parse(key)?;
        if !v.is_finite() {
            return Err(bad(key, "must be finite"));
        }
        Ok(v)
    }
}

fn bad(key: &str, msg: impl Into<String>) -> ConfigError {
    ConfigError::BadValue {
        key: key.to_string(),
        msg: msg.into(),
    }
}

fn parse_result_size(v: &str) -> Result<ResultSizeModel, ConfigError> {
    let err = || {
        bad(
            "result_size",
            format!("'{v}' (expected input | scaled:<f> | constant:<bytes>)"),
        )
    };
    match v.split_once(':') {
        None if v == "input" => Ok(ResultSizeModel::SameAsInput),
        Some(("scaled", f)) => f
            .trim()
            .parse()
            .map(ResultSizeModel::Scaled)
            .map_err(|_| err()),
        Some(("constant", b)) => b
            .trim()
            .parse()
            .map(ResultSizeModel::Constant)
            .map_err(|_| err()),
        _ => Err(err()),
    }
}

impl SweepConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: path.display().to_string(),
            msg: e.to_string(),
        })?;
        text.parse()
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |m: String| Err(ConfigError::Invalid(m));
        if self.application.is_empty() {
            return invalid("application is empty".into());
        }
        if !(self.lo < self.hi) {
            return invalid(format!(
                "range_lo {} must be below range_hi {}",
                self.lo, self.hi
            ));
        }
        if self.steps < 2 {
            return invalid(format!("steps must be at least 2, got {}", self.steps));
        }
        self.profile
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        if !(self.speedup_n.is_finite() && self.speedup_n >= 1.0) {
            return invalid(format!("speedup_n must be >= 1, got {}", self.speedup_n));
        }
        self.cost
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        if !(self.overhead_energy >= 0.0 && self.overhead_time >= 0.0) {
            return invalid("overheads must be non-negative".into());
        }
        let d = &self.defaults;
        if !self.cost.cpu_in_domain(d.cpu_workload) {
            return invalid(format!(
                "default_cpu_workload {} outside [0, 100)",
                d.cpu_workload
            ));
        }
        if !(d.bandwidth > 0.0) {
            return invalid("default_bandwidth must be positive".into());
        }
        if let Some(ms) = d.delay_tolerance_ms {
            if !(ms > 0.0) {
                return invalid("default_delay_tolerance must be positive or inf".into());
            }
        }
        let range_ok = match self.factor {
            Factor::InputSize | Factor::Bandwidth => self.lo >= 0.0,
            Factor::CpuWorkload => self.lo >= 0.0 && self.cost.cpu_in_domain(self.hi),
            Factor::DelayTolerance => self.lo > 0.0,
        };
        if !range_ok {
            return invalid(format!(
                "range [{}, {}] outside the domain of {}",
                self.lo, self.hi, self.factor
            ));
        }
        Ok(())
    }

    /// Inclusive, linearly spaced grid. A zero bandwidth is clamped to the
    /// grid step; input sizes are rounded to whole bytes.
    pub fn grid(&self) -> Vec<f64> {
        let last = self.steps - 1;
        let step = (self.hi - self.lo) / last as f64;
        (0..self.steps)
            .map(|i| {
                let v = if i == last {
                    self.hi
                } else {
                    self.lo + step * i as f64
                };
                match self.factor {
                    Factor::InputSize => v.round(),
                    Factor::Bandwidth if v <= 0.0 => step,
                    _ => v,
                }
            })
            .collect()
    }
}

impl FromStr for SweepConfig {
    type Err = ConfigError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let map = parse_key_values(text)?;
        if let Some(k) = map.keys().find(|k| !KEYS.contains(&k.as_str())) {
            return Err(ConfigError::UnknownKey(k.clone()));
        }
        let f = Fields(map);
        let shape = match f.str("cost_shape")? {
            "nlogn" => CostShape::NLogN,
            "power" => CostShape::Power(f.num("cost_exponent")?),
            "linear" => CostShape::Power(1.0),
            other => {
                return Err(bad(
                    "cost_shape",
                    format!("'{other}' (expected nlogn|power|linear)"),
                ))
            }
        };
        let delay = match f.str("default_delay_tolerance")? {
            "inf" | "infinite" => None,
            _ => Some(f.num("default_delay_tolerance")?),
        };
        let profile = PowerProfile {
            p_exec: f.num("p_exec")?,
            p_idle: f.num("p_idle")?,
            p_send: f.num("p_send")?,
            p_receive: f.num("p_receive")?,
        };
        let cfg = SweepConfig {
            application: f.str("application")?.to_string(),
            factor: f.parse("factor")?,
            lo: f.num("range_lo")?,
            hi: f.num("range_hi")?,
            steps: f.parse("steps")?,
            defaults: Defaults {
                input_size: f.parse("default_input_size")?,
                cpu_workload: f.num("default_cpu_workload")?,
                bandwidth: f.num("default_bandwidth")?,
                delay_tolerance_ms: delay,
            },
            profile,
            speedup_n: f.num("speedup_n")?,
            cost: CostModel {
                shape,
                anchor_size: f.num("cost_anchor_size")?,
                anchor_cpu: f.num("cost_anchor_cpu")?,
                anchor_time: f.num("cost_anchor_time")?,
                cpu_sensitivity: f.num("cost_cpu_sensitivity")?,
                result_size: parse_result_size(f.str("result_size")?)?,
            },
            overhead_energy: f.num("overhead_energy")?,
            overhead_time: f.num("overhead_time")?,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}
