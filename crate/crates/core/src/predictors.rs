//! Exponential moving average smoothing and history-based execution-time
//! prediction.

use thiserror::Error;

use crate::history::HistoryRecord;

/// Smoothing periods used when nothing else is configured.
pub const DEFAULT_EMA_PERIODS: u32 = 10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PredictError {
    #[error("sample must be finite")]
    NonFiniteSample,
    #[error("EMA period count must be at least 1")]
    ZeroPeriods,
    #[error("EMA has not observed a sample yet")]
    Uninitialized,
    #[error("insufficient history for {application}: {found} record(s), need at least 2")]
    InsufficientHistory { application: String, found: usize },
    #[error("invalid query: {0}")]
    InvalidQuery(&'static str),
}

/// `2 / (N + 1)`.
pub fn smoothing_coefficient(n_periods: u32) -> f64 {
    2.0 / (f64::from(n_periods) + 1.0)
}

/// Recursive EMA accumulator. The first sample seeds the average directly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmaState {
    current: f64,
    n_periods: u32,
    alpha: f64,
    initialized: bool,
}

impl EmaState {
    /// An accumulator that has not seen any sample.
    pub fn new(n_periods: u32) -> Result<Self, PredictError> {
        if n_periods == 0 {
            return Err(PredictError::ZeroPeriods);
        }
        Ok(Self {
            current: f64::NAN,
            n_periods,
            alpha: smoothing_coefficient(n_periods),
            initialized: false,
        })
    }

    pub fn init(n_periods: u32, first_sample: f64) -> Result<Self, PredictError> {
        let mut state = Self::new(n_periods)?;
        state.seed(first_sample)?;
        Ok(state)
    }

    fn seed(&mut self, sample: f64) -> Result<(), PredictError> {
        if !sample.is_finite() {
            return Err(PredictError::NonFiniteSample);
        }
        self.current = sample;
        self.initialized = true;
        Ok(())
    }

    /// Folds in one sample. Order-sensitive.
    pub fn update(&mut self, sample: f64) -> Result<f64, PredictError> {
        if !self.initialized {
            return Err(PredictError::Uninitialized);
        }
        if !sample.is_finite() {
            return Err(PredictError::NonFiniteSample);
        }
        self.current = self.alpha * sample + (1.0 - self.alpha) * self.current;
        Ok(self.current)
    }

    /// Seeds on the first call, updates afterwards.
    pub fn observe(&mut self, sample: f64) -> Result<f64, PredictError> {
        if self.initialized {
            self.update(sample)
        } else {
            self.seed(sample)?;
            Ok(self.current)
        }
    }

    pub fn current(&self) -> Option<f64> {
        self.initialized.then_some(self.current)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn n_periods(&self) -> u32 {
        self.n_periods
    }

    pub fn is_initialized(&self) -> bool {
        self.initialized
    }
}

/// One monitor reading.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvironmentSample {
    /// Monotonic seconds.
    pub timestamp: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeQuery {
    pub application: String,
    pub input_size: u64,
    pub avg_cpu_workload: f64,
}

/// Mean execution time of the two records nearest to the query.
///
/// Distance is Euclidean in the (input size, CPU workload) plane, each axis
/// min-max normalized over the application's records. An axis on which all
/// records agree contributes nothing. Equal distances go to the earlier record.
pub fn predict_execution_time(
    records: &[HistoryRecord],
    query: &TimeQuery,
) -> Result<f64, PredictError> {
    if !(query.avg_cpu_workload.is_finite() && (0.0..=100.0).contains(&query.avg_cpu_workload)) {
        return Err(PredictError::InvalidQuery(
            "cpu workload must lie in [0, 100]",
        ));
    }
    let matching: Vec<&HistoryRecord> = records
        .iter()
        .filter(|r| r.application == query.application)
        .collect();
    if matching.len() < 2 {
        return Err(PredictError::InsufficientHistory {
            application: query.application.clone(),
            found: matching.len(),
        });
    }

    let (mut size_lo, mut size_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut cpu_lo, mut cpu_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for r in &matching {
        let s = r.input_size as f64;
        size_lo = size_lo.min(s);
        size_hi = size_hi.max(s);
        cpu_lo = cpu_lo.min(r.avg_cpu_workload);
        cpu_hi = cpu_hi.max(r.avg_cpu_workload);
    }
    let size_span = size_hi - size_lo;
    let cpu_span = cpu_hi - cpu_lo;
    let axis = |value: f64, target: f64, span: f64| {
        if span > 0.0 {
            (value - target) / span
        } else {
            0.0
        }
    };
    let qs = query.input_size as f64;
    let distance = |r: &HistoryRecord| {
        let ds = axis(r.input_size as f64, qs, size_span);
        let dc = axis(r.avg_cpu_workload, query.avg_cpu_workload, cpu_span);
        ds * ds + dc * dc
    };

    // Single pass keeping the two best (distance, index) pairs.
    let mut best: [(f64, usize); 2] = [(f64::INFINITY, usize::MAX); 2];
    for (idx, r) in matching.iter().enumerate() {
        let d = distance(r);
        if d < best[0].0 {
            best[1] = best[0];
            best[0] = (d, idx);
        } else if d < best[1].0 {
            best[1] = (d, idx);
        }
    }
    let first = matching[best[0].1].execution_time;
    let second = matching[best[1].1].execution_time;
    Ok((first + second) / 2.0)
}
