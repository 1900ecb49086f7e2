//! Offloading proxy transport: ships a task to the remote execution manager.

use std::io;
use std::net::{TcpStream, ToSocketAddrs};
use std::time::{Duration, Instant};

use thiserror::Error;

use super::protocol::{self, Frame, FrameKind, ProtocolError, DEFAULT_MAX_PAYLOAD};
use super::{Location, TaskResult, TaskSpec};

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(60);

#[derive(Debug, Error)]
pub enum RemoteError {
    #[error("cannot connect to {endpoint}: {cause}")]
    Connect { endpoint: String, cause: io::Error },
    #[error("transport error: {0}")]
    Transport(ProtocolError),
    #[error("remote response timed out after {0:?}")]
    Timeout(Duration),
    #[error("server error: {0}")]
    Server(String),
    #[error("unexpected {0:?} frame from server")]
    UnexpectedFrame(FrameKind),
}

#[derive(Debug, Clone)]
pub struct RemoteClient {
    pub endpoint: String,
    pub timeout: Duration,
    pub max_payload: u64,
}

impl RemoteClient {
    pub fn new(endpoint: impl Into<String>) -> Self {
        Self {
            endpoint: endpoint.into(),
            timeout: DEFAULT_TIMEOUT,
            max_payload: DEFAULT_MAX_PAYLOAD,
        }
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.timeout = timeout;
        self
    }

    fn connect(&self) -> Result<TcpStream, RemoteError> {
        let err = |cause| RemoteError::Connect {
            endpoint: self.endpoint.clone(),
            cause,
        };
        let addrs = self.endpoint.to_socket_addrs().map_err(err)?;
        let mut last = io::Error::new(
            io::ErrorKind::AddrNotAvailable,
            "address resolved to nothing",
        );
        for addr in addrs {
            match TcpStream::connect_timeout(&addr, self.timeout) {
                Ok(s) => return Ok(s),
                Err(e) => last = e,
            }
        }
        Err(err(last))
    }

    /// Sends one request frame and blocks for the reply.
    pub fn run_remote(&self, task: &TaskSpec) -> Result<TaskResult, RemoteError> {
        let start = Instant::now();
        let mut stream = self.connect()?;
        let transport = |e: io::Error| self.classify(ProtocolError::Io(e));
        stream
            .set_read_timeout(Some(self.timeout))
            .map_err(transport)?;
        stream
            .set_write_timeout(Some(self.timeout))
            .map_err(transport)?;
        let _ = stream.set_nodelay(true);

        let request = Frame::request(task.application.wire_id(), task.input_payload.clone());
        protocol::write_frame(&mut stream, &request).map_err(transport)?;
        let reply =
            protocol::read_frame(&mut stream, self.max_payload).map_err(|e| self.classify(e))?;
        match reply.kind {
            FrameKind::Response => Ok(TaskResult {
                application: task.application,
                output_payload: reply.payload,
                wall_time: start.elapsed().as_secs_f64(),
                executed_at: Location::Remote,
            }),
            FrameKind::Error => Err(RemoteError::Server(reply.reason())),
            kind => Err(RemoteError::UnexpectedFrame(kind)),
        }
    }

    fn classify(&self, e: ProtocolError) -> RemoteError {
        match e {
            ProtocolError::Io(io)
                if matches!(
                    io.kind(),
                    io::ErrorKind::WouldBlock | io::ErrorKind::TimedOut
                ) =>
            {
                RemoteError::Timeout(self.timeout)
            }
            other => RemoteError::Transport(other),
        }
    }
}
