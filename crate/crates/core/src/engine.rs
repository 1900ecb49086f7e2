//! Offloading decision workflow.
//!
//! 1. Predict the local execution time from the history log.
//! 2. If the user's delay tolerance is below that time, offload.
//! 3. Compute the local energy.
//! 4. Compute the cloud energy with `T_idle = T_exec / n`.
//! 5. Offload only when the cloud path is strictly cheaper.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::history::HistoryRecord;
use crate::model::{self, EnergyLedger, ModelError, PowerProfile, TransferSpec, REL_TOL};
use crate::predictors::{self, EmaState, PredictError, TimeQuery};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DecisionError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Predict(#[from] PredictError),
    #[error("predictor output {0} is not finite")]
    NonFinitePrediction(&'static str),
    #[error("delay tolerance must be strictly positive")]
    NonPositiveDelay,
    #[error("{0} predictor has no samples")]
    PredictorNotReady(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Local,
    Offload,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Local => "local",
            Verdict::Offload => "offload",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Reason {
    DelayOverride,
    EnergyComparison,
    InsufficientHistory,
}

impl fmt::Display for Reason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Reason::DelayOverride => "delay_override",
            Reason::EnergyComparison => "energy_comparison",
            Reason::InsufficientHistory => "insufficient_history",
        })
    }
}

/// Seconds, or no constraint at all.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DelayTolerance {
    Finite(f64),
    Infinite,
}

impl DelayTolerance {
    pub fn finite(seconds: f64) -> Result<Self, DecisionError> {
        if seconds.is_finite() && seconds > 0.0 {
            Ok(Self::Finite(seconds))
        } else {
            Err(DecisionError::NonPositiveDelay)
        }
    }

    fn validate(&self) -> Result<(), DecisionError> {
        match *self {
            Self::Finite(s) => Self::finite(s).map(|_| ()),
            Self::Infinite => Ok(()),
        }
    }
}

impl FromStr for DelayTolerance {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("inf") || s.eq_ignore_ascii_case("infinite") {
            return Ok(Self::Infinite);
        }
        let v: f64 = s
            .parse()
            .map_err(|_| format!("invalid delay tolerance '{s}'"))?;
        Self::finite(v).map_err(|e| e.to_string())
    }
}

impl fmt::Display for DelayTolerance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(s) => write!(f, "{s}"),
            Self::Infinite => f.write_str("inf"),
        }
    }
}

/// What the engine needs to know about a task: who it is and how many bytes
/// cross the link in each direction.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskDescriptor {
    pub application: String,
    /// Bytes uploaded; the task's input payload size.
    pub input_size: u64,
    /// Bytes downloaded; the (estimated) result size.
    pub result_size: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecisionRequest {
    pub task: TaskDescriptor,
    pub delay_tolerance: DelayTolerance,
    pub power_profile: PowerProfile,
    pub speedup_n: f64,
}

/// Predictor values frozen at decision entry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvironmentSnapshot {
    /// Percent.
    pub cpu_workload: f64,
    /// Bytes/second.
    pub send_bandwidth: f64,
    /// Bytes/second.
    pub receive_bandwidth: f64,
}

impl EnvironmentSnapshot {
    /// Same smoothed bandwidth for both directions.
    pub fn from_predictors(cpu: &EmaState, bandwidth: &EmaState) -> Result<Self, DecisionError> {
        let cpu = cpu
            .current()
            .ok_or(DecisionError::PredictorNotReady("cpu"))?;
        let bw = bandwidth
            .current()
            .ok_or(DecisionError::PredictorNotReady("bandwidth"))?;
        Ok(Self {
            cpu_workload: cpu,
            send_bandwidth: bw,
            receive_bandwidth: bw,
        })
    }

    pub fn with_receive_bandwidth(mut self, bandwidth: f64) -> Self {
        self.receive_bandwidth = bandwidth;
        self
    }

    fn validate(&self) -> Result<(), DecisionError> {
        if !self.cpu_workload.is_finite() {
            return Err(DecisionError::NonFinitePrediction("cpu workload"));
        }
        if !self.send_bandwidth.is_finite() || !self.receive_bandwidth.is_finite() {
            return Err(DecisionError::NonFinitePrediction("bandwidth"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decision {
    pub verdict: Verdict,
    pub reason: Reason,
    /// Absent only when the history was insufficient to predict `T_exec`.
    pub ledger: Option<EnergyLedger>,
    pub predicted_t_exec: Option<f64>,
    pub predicted_bandwidth: f64,
    pub predicted_cpu: f64,
}

impl fmt::Display for Decision {
    /// One `key=value` record on a single line.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "verdict={} reason={} predicted_cpu={} predicted_bandwidth={}",
            self.verdict, self.reason, self.predicted_cpu, self.predicted_bandwidth
        )?;
        match &self.ledger {
            Some(l) => write!(
                f,
                " t_exec={} t_send={} t_idle={} t_receive={} t_cloud={} e_local={} e_send={} \
                 e_idle={} e_receive={} e_cloud={} e_tradeoff={} e0_prime={} e_prime={}",
                l.t_exec,
                l.t_send,
                l.t_idle,
                l.t_receive,
                l.t_cloud(),
                l.e_local,
                l.e_send,
                l.e_idle,
                l.e_receive,
                l.e_cloud,
                l.e_tradeoff,
                l.e0_prime,
                l.e_prime
            ),
            None => f.write_str(" t_exec=unknown"),
        }
    }
}

/// What to do when the log cannot predict `T_exec`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FallbackPolicy {
    /// Run locally; the run also grows the log.
    #[default]
    Local,
    Offload,
    Error,
}

impl FromStr for FallbackPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "local" => Ok(Self::Local),
            "remote" | "offload" => Ok(Self::Offload),
            "error" => Ok(Self::Error),
            other => Err(format!(
                "invalid insufficient-history policy '{other}' (expected local|remote|error)"
            )),
        }
    }
}

/// True when `e_cloud` is strictly below `e_local` beyond the comparison tolerance.
pub fn cloud_is_cheaper(e_local: f64, e_cloud: f64) -> bool {
    e_local - e_cloud > REL_TOL * e_local.abs().max(e_cloud.abs())
}

#[derive(Debug, Clone, Copy, Default)]
pub struct DecisionEngine {
    pub fallback: FallbackPolicy,
}

impl DecisionEngine {
    pub fn new(fallback: FallbackPolicy) -> Self {
        Self { fallback }
    }

    /// Runs the full workflow against a snapshot of the history log.
    pub fn decide(
        &self,
        request: &DecisionRequest,
        env: &EnvironmentSnapshot,
        log: &[HistoryRecord],
    ) -> Result<Decision, DecisionError> {
        env.validate()?;
        let query = TimeQuery {
            application: request.task.application.clone(),
            input_size: request.task.input_size,
            avg_cpu_workload: env.cpu_workload.clamp(0.0, 100.0),
        };
        match predictors::predict_execution_time(log, &query) {
            Ok(t_exec) => self.decide_with_prediction(request, env, t_exec),
            Err(PredictError::InsufficientHistory { .. })
                if self.fallback != FallbackPolicy::Error =>
            {
                request.delay_tolerance.validate()?;
                request.power_profile.validate()?;
                let verdict = match self.fallback {
                    FallbackPolicy::Offload => Verdict::Offload,
                    _ => Verdict::Local,
                };
                Ok(Decision {
                    verdict,
                    reason: Reason::InsufficientHistory,
                    ledger: None,
                    predicted_t_exec: None,
                    predicted_bandwidth: env.send_bandwidth,
                    predicted_cpu: env.cpu_workload,
                })
            }
            Err(e) => Err(e.into()),
        }
    }

    /// Steps 2 to 5, given an already predicted local execution time.
    pub fn decide_with_prediction(
        &self,
        request: &DecisionRequest,
        env: &EnvironmentSnapshot,
        t_exec: f64,
    ) -> Result<Decision, DecisionError> {
        env.validate()?;
        request.delay_tolerance.validate()?;
        if !t_exec.is_finite() {
            return Err(DecisionError::NonFinitePrediction("execution time"));
        }
        let transfer = TransferSpec::new(
            request.task.input_size as f64,
            request.task.result_size as f64,
            env.send_bandwidth,
            env.receive_bandwidth,
        )?;
        let ledger =
            model::energy_ledger(&request.power_profile, t_exec, request.speedup_n, &transfer)?;

        let (verdict, reason) = match request.delay_tolerance {
            DelayTolerance::Finite(limit) if limit < t_exec => {
                (Verdict::Offload, Reason::DelayOverride)
            }
            _ if cloud_is_cheaper(ledger.e_local, ledger.e_cloud) => {
                (Verdict::Offload, Reason::EnergyComparison)
            }
            _ => (Verdict::Local, Reason::EnergyComparison),
        };
        Ok(Decision {
            verdict,
            reason,
            ledger: Some(ledger),
            predicted_t_exec: Some(t_exec),
            predicted_bandwidth: env.send_bandwidth,
            predicted_cpu: env.cpu_workload,
        })
    }
}

/// Two identical records at the query point, so the nearest-2 predictor
/// returns `t_exec` exactly. Empty when `t_exec` is not a valid record time.
pub fn pinned_history(
    application: &str,
    input_size: u64,
    cpu: f64,
    t_exec: f64,
) -> Vec<HistoryRecord> {
    match HistoryRecord::new(application, input_size, cpu.clamp(0.0, 100.0), t_exec) {
        Ok(r) => vec![r.clone(), r],
        Err(_) => Vec::new(),
    }
}
