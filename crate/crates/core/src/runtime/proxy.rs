//! Offloading proxy: routes a task locally or remotely, by decision or by force.

use thiserror::Error;

use super::client::{RemoteClient, RemoteError};
use super::local::{LocalError, LocalExecutor};
use super::monitor::SharedEma;
use super::{Location, TaskResult, TaskSpec};
use crate::engine::{
    Decision, DecisionEngine, DecisionError, DecisionRequest, DelayTolerance, EnvironmentSnapshot,
    Verdict,
};
use crate::history::HistoryLog;
use crate::model::PowerProfile;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Routing {
    Decide(DelayTolerance),
    Force(Location),
}

#[derive(Debug, Error)]
pub enum DispatchError {
    #[error(transparent)]
    Decision(#[from] DecisionError),
    #[error(transparent)]
    Local(#[from] LocalError),
    #[error(transparent)]
    Remote(#[from] RemoteError),
    #[error("task routed to the remote side but no endpoint is configured")]
    NoEndpoint,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DispatchOutcome {
    /// Absent when the route was forced.
    pub decision: Option<Decision>,
    pub result: TaskResult,
    /// The remote call failed and the task was rerun locally.
    pub fell_back: Option<String>,
}

#[derive(Debug, Clone)]
pub struct Dispatcher {
    pub local: LocalExecutor,
    pub remote: Option<RemoteClient>,
    pub engine: DecisionEngine,
    pub profile: PowerProfile,
    pub speedup_n: f64,
    pub cpu: SharedEma,
    pub bandwidth: SharedEma,
    /// Rerun locally when the remote call fails.
    pub fallback_local: bool,
}

impl Dispatcher {
    /// Picks where the task runs, consulting the engine unless forced.
    pub fn route(
        &self,
        task: &TaskSpec,
        routing: Routing,
        log: &HistoryLog,
    ) -> Result<(Option<Decision>, Location), DispatchError> {
        let delay_tolerance = match routing {
            Routing::Force(loc) => return Ok((None, loc)),
            Routing::Decide(d) => d,
        };
        let env =
            EnvironmentSnapshot::from_predictors(&self.cpu.snapshot(), &self.bandwidth.snapshot())?;
        let request = DecisionRequest {
            task: task.descriptor(),
            delay_tolerance,
            power_profile: self.profile,
            speedup_n: self.speedup_n,
        };
        let d = self
            .engine
            .decide(&request, &env, &log.snapshot(task.application.name()))?;
        let target = match d.verdict {
            Verdict::Local => Location::Local,
            Verdict::Offload => Location::Remote,
        };
        Ok((Some(d), target))
    }

    /// Runs the task at `target`. Returns the result and, when the remote
    /// call failed and the local fallback ran instead, the remote error text.
    pub fn execute(
        &self,
        task: &TaskSpec,
        target: Location,
        log: &mut HistoryLog,
    ) -> Result<(TaskResult, Option<String>), DispatchError> {
        if target == Location::Local {
            return Ok((self.local.run_local(task, &self.cpu, log)?, None));
        }
        let remote = match &self.remote {
            Some(r) => r.run_remote(task).map_err(DispatchError::from),
            None => Err(DispatchError::NoEndpoint),
        };
        match remote {
            Ok(result) => Ok((result, None)),
            Err(e) if self.fallback_local => {
                let result = self.local.run_local(task, &self.cpu, log)?;
                Ok((result, Some(e.to_string())))
            }
            Err(e) => Err(e),
        }
    }

    pub fn dispatch(
        &self,
        task: &TaskSpec,
        routing: Routing,
        log: &mut HistoryLog,
    ) -> Result<DispatchOutcome, DispatchError> {
        let (decision, target) = self.route(task, routing, log)?;
        let (result, fell_back) = self.execute(task, target, log)?;
        Ok(DispatchOutcome {
            decision,
            result,
            fell_back,
        })
    }
}
