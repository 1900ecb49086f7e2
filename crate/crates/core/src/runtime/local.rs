//! Local execution manager. All history appends go through here.

use std::time::Instant;

use thiserror::Error;

use super::monitor::SharedEma;
use super::{Location, TaskResult, TaskSpec, WorkloadError, WorkloadRegistry};
use crate::history::{HistoryError, HistoryLog, HistoryRecord};

#[derive(Debug, Error)]
pub enum LocalError {
    #[error(transparent)]
    Workload(#[from] WorkloadError),
    #[error(transparent)]
    History(#[from] HistoryError),
    #[error("cpu monitor has no samples")]
    CpuUnavailable,
}

#[derive(Debug, Clone)]
pub struct LocalExecutor {
    registry: WorkloadRegistry,
}

impl Default for LocalExecutor {
    fn default() -> Self {
        Self::new(WorkloadRegistry::standard())
    }
}

impl LocalExecutor {
    pub fn new(registry: WorkloadRegistry) -> Self {
        Self { registry }
    }

    /// Runs the task in-process and logs it with the monitor's smoothed CPU
    /// workload. Failed runs leave the log untouched.
    pub fn run_local(
        &self,
        task: &TaskSpec,
        cpu_monitor: &SharedEma,
        log: &mut HistoryLog,
    ) -> Result<TaskResult, LocalError> {
        let cpu = cpu_monitor.current().ok_or(LocalError::CpuUnavailable)?;
        self.run_local_at(task, cpu, log)
    }

    /// As [`run_local`](Self::run_local) with an explicit CPU workload.
    pub fn run_local_at(
        &self,
        task: &TaskSpec,
        cpu_workload: f64,
        log: &mut HistoryLog,
    ) -> Result<TaskResult, LocalError> {
        let start = Instant::now();
        let output = self
            .registry
            .execute(task.application, &task.input_payload)?;
        // Timer resolution can round a tiny run to zero, which is not a valid record time.
        let wall_time = start.elapsed().as_secs_f64().max(1e-9);
        log.append(HistoryRecord::new(
            task.application.name(),
            task.input_size(),
            cpu_workload.clamp(0.0, 100.0),
            wall_time,
        )?)?;
        Ok(TaskResult {
            application: task.application,
            output_payload: output,
            wall_time,
            executed_at: Location::Local,
        })
    }
}
