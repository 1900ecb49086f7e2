//! Environment monitors feeding the EMA predictors.

use std::net::TcpStream;
use std::path::PathBuf;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, Mutex, MutexGuard};
use std::thread::{self, JoinHandle};
use std::time::{Duration, Instant};

use thiserror::Error;

use super::protocol::{self, Frame, FrameKind};
use super::workloads::AppId;
use crate::predictors::{EmaState, EnvironmentSample, PredictError};

#[derive(Debug, Error)]
pub enum ProbeError {
    #[error("probe I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("probe: {0}")]
    Invalid(String),
    #[error(transparent)]
    Predict(#[from] PredictError),
}

/// One raw measurement per call.
pub trait Probe: Send {
    fn measure(&mut self) -> Result<f64, ProbeError>;
}

/// Replays a fixed sequence, cycling at the end.
#[derive(Debug, Clone)]
pub struct SyntheticProbe {
    values: Vec<f64>,
    next: usize,
}

impl SyntheticProbe {
    pub fn new(values: Vec<f64>) -> Result<Self, ProbeError> {
        if values.is_empty() {
            return Err(ProbeError::Invalid(
                "synthetic probe needs at least one value".into(),
            ));
        }
        Ok(Self { values, next: 0 })
    }

    pub fn constant(value: f64) -> Self {
        Self {
            values: vec![value],
            next: 0,
        }
    }
}

impl Probe for SyntheticProbe {
    fn measure(&mut self) -> Result<f64, ProbeError> {
        let v = self.values[self.next];
        self.next = (self.next + 1) % self.values.len();
        Ok(v)
    }
}

/// System-wide CPU busy percentage from `/proc/stat` deltas.
#[derive(Debug, Clone)]
pub struct ProcStatCpuProbe {
    path: PathBuf,
    prev: Option<(u64, u64)>,
    warmup: Duration,
}

impl Default for ProcStatCpuProbe {
    fn default() -> Self {
        Self::new("/proc/stat")
    }
}

impl ProcStatCpuProbe {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        Self {
            path: path.into(),
            prev: None,
            warmup: Duration::from_millis(100),
        }
    }

    /// Returns (idle, total) jiffies from the aggregate `cpu` line.
    fn read(&self) -> Result<(u64, u64), ProbeError> {
        let text = std::fs::read_to_string(&self.path)?;
        let line = text
            .lines()
            .find(|l| l.starts_with("cpu "))
            .ok_or_else(|| ProbeError::Invalid("no aggregate cpu line".into()))?;
        let fields: Vec<u64> = line
            .split_whitespace()
            .skip(1)
            .map(|f| f.parse::<u64>())
            .collect::<Result<_, _>>()
            .map_err(|e| ProbeError::Invalid(format!("cpu line: {e}")))?;
        if fields.len() < 4 {
            return Err(ProbeError::Invalid("cpu line has too few fields".into()));
        }
        // idle + iowait
        let idle = fields[3] + fields.get(4).copied().unwrap_or(0);
        Ok((idle, fields.iter().sum()))
    }
}

impl Probe for ProcStatCpuProbe {
    fn measure(&mut self) -> Result<f64, ProbeError> {
        let prev = match self.prev {
            Some(p) => p,
            None => {
                let p = self.read()?;
                thread::sleep(self.warmup);
                p
            }
        };
        let cur = self.read()?;
        self.prev = Some(cur);
        let total = cur.1.saturating_sub(prev.1);
        if total == 0 {
            return Ok(0.0);
        }
        let idle = cur.0.saturating_sub(prev.0).min(total);
        Ok(100.0 * (total - idle) as f64 / total as f64)
    }
}

/// Round-trip throughput to the remote execution manager, measured by
/// shipping a wordcount payload and timing the reply.
#[derive(Debug, Clone)]
pub struct TcpThroughputProbe {
    pub endpoint: String,
    pub payload_size: usize,
    pub timeout: Duration,
}

impl TcpThroughputProbe {
    pub fn new(endpoint: impl Into<String>, payload_size: usize) -> Self {
        Self {
            endpoint: endpoint.into(),
            payload_size,
            timeout: Duration::from_secs(10),
        }
    }
}

impl Probe for TcpThroughputProbe {
    fn measure(&mut self) -> Result<f64, ProbeError> {
        let payload = vec![b'x'; self.payload_size.max(1)];
        let start = Instant::now();
        let mut stream = TcpStream::connect(&self.endpoint)?;
        stream.set_read_timeout(Some(self.timeout))?;
        stream.set_write_timeout(Some(self.timeout))?;
        let frame = Frame::request(AppId::Wordcount.wire_id(), payload);
        protocol::write_frame(&mut stream, &frame)?;
        let reply = protocol::read_frame(&mut stream, protocol::DEFAULT_MAX_PAYLOAD)
            .map_err(|e| ProbeError::Invalid(e.to_string()))?;
        let elapsed = start.elapsed().as_secs_f64();
        if reply.kind != FrameKind::Response {
            return Err(ProbeError::Invalid(format!(
                "server replied: {}",
                reply.reason()
            )));
        }
        let bytes = (frame.encoded_len() + reply.encoded_len()) as f64;
        Ok(bytes / elapsed.max(1e-9))
    }
}

/// EMA state shared between a monitor thread and its readers.
#[derive(Debug, Clone)]
pub struct SharedEma(Arc<Mutex<EmaState>>);

impl SharedEma {
    pub fn new(n_periods: u32) -> Result<Self, PredictError> {
        Ok(Self(Arc::new(Mutex::new(EmaState::new(n_periods)?))))
    }

    /// Already initialized with `first_sample`.
    pub fn with_value(n_periods: u32, first_sample: f64) -> Result<Self, PredictError> {
        Ok(Self(Arc::new(Mutex::new(EmaState::init(
            n_periods,
            first_sample,
        )?))))
    }

    fn lock(&self) -> MutexGuard<'_, EmaState> {
        // The state is a pair of floats; a panic mid-update cannot leave it torn.
        self.0.lock().unwrap_or_else(|e| e.into_inner())
    }

    pub fn observe(&self, sample: f64) -> Result<f64, PredictError> {
        self.lock().observe(sample)
    }

    pub fn current(&self) -> Option<f64> {
        self.lock().current()
    }

    pub fn snapshot(&self) -> EmaState {
        *self.lock()
    }
}

/// Samples a probe at a fixed period and feeds an EMA.
pub struct Monitor<P: Probe> {
    probe: P,
    ema: SharedEma,
    period: Duration,
    epoch: Instant,
    last_timestamp: Option<f64>,
}

pub const DEFAULT_PERIOD: Duration = Duration::from_secs(1);

impl<P: Probe> Monitor<P> {
    pub fn new(probe: P, ema: SharedEma) -> Self {
        Self {
            probe,
            ema,
            period: DEFAULT_PERIOD,
            epoch: Instant::now(),
            last_timestamp: None,
        }
    }

    pub fn with_period(mut self, period: Duration) -> Self {
        self.period = period;
        self
    }

    pub fn ema(&self) -> &SharedEma {
        &self.ema
    }

    /// Takes one measurement, folds it into the EMA and returns it.
    pub fn sample_once(&mut self) -> Result<EnvironmentSample, ProbeError> {
        let value = self.probe.measure()?;
        let mut timestamp = self.epoch.elapsed().as_secs_f64();
        if let Some(last) = self.last_timestamp {
            if timestamp <= last {
                timestamp = next_after(last);
            }
        }
        self.ema.observe(value)?;
        self.last_timestamp = Some(timestamp);
        Ok(EnvironmentSample { timestamp, value })
    }

    /// Takes `count` samples, sleeping one period between them.
    pub fn sample_n(&mut self, count: usize) -> Result<Vec<EnvironmentSample>, ProbeError> {
        let mut out = Vec::with_capacity(count);
        for i in 0..count {
            if i > 0 {
                thread::sleep(self.period);
            }
            out.push(self.sample_once()?);
        }
        Ok(out)
    }
}

impl<P: Probe + 'static> Monitor<P> {
    /// Samples in the background until the handle is stopped. Failed
    /// measurements are skipped.
    pub fn spawn(mut self) -> MonitorHandle {
        let stop = Arc::new(AtomicBool::new(false));
        let flag = Arc::clone(&stop);
        let ema = self.ema.clone();
        let join = thread::spawn(move || {
            while !flag.load(Ordering::Relaxed) {
                let _ = self.sample_once();
                let deadline = Instant::now() + self.period;
                while !flag.load(Ordering::Relaxed) && Instant::now() < deadline {
                    thread::sleep(Duration::from_millis(5).min(self.period));
                }
            }
        });
        MonitorHandle {
            stop,
            join: Some(join),
            ema,
        }
    }
}

pub struct MonitorHandle {
    stop: Arc<AtomicBool>,
    join: Option<JoinHandle<()>>,
    ema: SharedEma,
}

impl MonitorHandle {
    pub fn ema(&self) -> &SharedEma {
        &self.ema
    }

    pub fn stop(mut self) {
        self.halt();
    }

    fn halt(&mut self) {
        self.stop.store(true, Ordering::Relaxed);
        if let Some(j) = self.join.take() {
            let _ = j.join();
        }
    }
}

impl Drop for MonitorHandle {
    fn drop(&mut self) {
        self.halt();
    }
}

fn next_after(x: f64) -> f64 {
    // x is a non-negative finite timestamp.
    f64::from_bits(x.to_bits() + 1)
}
