//! Device settings for `decide` and `run`: built-in defaults, overlaid by a
//! `key = value` file, overlaid by flags.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Duration;

use anyhow::{bail, Context, Result};

use offload_core::engine::FallbackPolicy;
use offload_core::model::PowerProfile;
use offload_core::predictors::DEFAULT_EMA_PERIODS;
use offload_core::runtime::client::DEFAULT_TIMEOUT;

#[derive(Debug, Clone)]
pub struct DeviceConfig {
    pub profile: PowerProfile,
    pub speedup_n: f64,
    pub ema_periods: u32,
    pub monitor_samples: usize,
    pub monitor_period: Duration,
    pub insufficient_history: FallbackPolicy,
    pub history: PathBuf,
    pub timeout: Duration,
}

impl Default for DeviceConfig {
    fn default() -> Self {
        Self {
            profile: PowerProfile {
                p_exec: 0.9,
                p_idle: 0.3,
                p_send: 1.3,
                p_receive: 1.0,
            },
            speedup_n: 1.12,
            ema_periods: DEFAULT_EMA_PERIODS,
            monitor_samples: 1,
            monitor_period: Duration::from_millis(200),
            insufficient_history: FallbackPolicy::Local,
            history: PathBuf::from("history.log"),
            timeout: DEFAULT_TIMEOUT,
        }
    }
}

fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T>
where
    T::Err: std::error::Error + Send + Sync + 'static,
{
    v.parse::<T>()
        .with_context(|| format!("config key '{key}'"))
}

impl DeviceConfig {
    pub fn apply(&mut self, kv: &BTreeMap<String, String>) -> Result<()> {
        for (k, v) in kv {
            match k.as_str() {
                "p_exec" => self.profile.p_exec = num(k, v)?,
                "p_idle" => self.profile.p_idle = num(k, v)?,
                "p_send" => self.profile.p_send = num(k, v)?,
                "p_receive" => self.profile.p_receive = num(k, v)?,
                "speedup_n" => self.speedup_n = num(k, v)?,
                "ema_periods" => self.ema_periods = num(k, v)?,
                "monitor_samples" => self.monitor_samples = num::<usize>(k, v)?.max(1),
                "monitor_period_ms" => self.monitor_period = Duration::from_millis(num(k, v)?),
                "insufficient_history" => {
                    self.insufficient_history = v.parse().map_err(anyhow::Error::msg)?
                }
                "history" => self.history = PathBuf::from(v),
                "timeout_s" => {
                    let s: f64 = num(k, v)?;
                    if !(s.is_finite() && s > 0.0) {
                        bail!("config key 'timeout_s' must be positive");
                    }
                    self.timeout = Duration::from_secs_f64(s);
                }
                other => bail!("unknown config key '{other}'"),
            }
        }
        Ok(())
    }
}
