//! Executable half of the system: workloads, the local and remote execution
//! managers, the wire protocol and the offloading proxy.

pub mod client;
pub mod local;
pub mod monitor;
pub mod protocol;
pub mod proxy;
pub mod server;
pub mod workloads;

use std::fmt;

pub use workloads::{AppId, WorkloadError, WorkloadRegistry};

use crate::engine::TaskDescriptor;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaskSpec {
    pub application: AppId,
    pub input_payload: Vec<u8>,
}

impl TaskSpec {
    pub fn new(application: AppId, input_payload: Vec<u8>) -> Self {
        Self {
            application,
            input_payload,
        }
    }

    pub fn input_size(&self) -> u64 {
        self.input_payload.len() as u64
    }

    /// Size-only view for the decision engine, with the result size taken
    /// from the workload's estimate table.
    pub fn descriptor(&self) -> TaskDescriptor {
        TaskDescriptor {
            application: self.application.name().to_string(),
            input_size: self.input_size(),
            result_size: self.application.estimate_result_size(&self.input_payload),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    Local,
    Remote,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Location::Local => "local",
            Location::Remote => "remote",
        })
    }
}

impl std::str::FromStr for Location {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "local" => Ok(Self::Local),
            "remote" => Ok(Self::Remote),
            other => Err(format!(
                "invalid location '{other}' (expected local|remote)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TaskResult {
    pub application: AppId,
    pub output_payload: Vec<u8>,
    /// Seconds, measured by the caller.
    pub wall_time: f64,
    pub executed_at: Location,
}
