//! Remote execution manager: one thread per connection, frames handled in
//! order within a connection.

use std::io;
use std::net::{SocketAddr, TcpListener, TcpStream, ToSocketAddrs};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::thread::{self, JoinHandle};
use std::time::{Duration, Instant};

use super::protocol::{self, Frame, FrameKind, ProtocolError, DEFAULT_MAX_PAYLOAD};
use super::workloads::{AppId, WorkloadRegistry};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ServerConfig {
    pub max_payload: u64,
    /// When set, each execution is stretched to `pace ×` its measured time.
    pub pace: Option<f64>,
}

impl Default for ServerConfig {
    fn default() -> Self {
        Self {
            max_payload: DEFAULT_MAX_PAYLOAD,
            pace: None,
        }
    }
}

pub struct Server {
    listener: TcpListener,
    registry: Arc<WorkloadRegistry>,
    config: ServerConfig,
}

impl Server {
    pub fn bind(
        addr: impl ToSocketAddrs,
        registry: WorkloadRegistry,
        config: ServerConfig,
    ) -> io::Result<Self> {
        if let Some(p) = config.pace {
            if !(p.is_finite() && p >= 1.0) {
                return Err(io::Error::new(
                    io::ErrorKind::InvalidInput,
                    "pace must be a finite factor >= 1",
                ));
            }
        }
        Ok(Self {
            listener: TcpListener::bind(addr)?,
            registry: Arc::new(registry),
            config,
        })
    }

    pub fn local_addr(&self) -> io::Result<SocketAddr> {
        self.listener.local_addr()
    }

    /// Serves until the process exits.
    pub fn run(self) -> io::Result<()> {
        let never = Arc::new(AtomicBool::new(false));
        self.accept_loop(&never)
    }

    /// Serves on a background thread.
    pub fn spawn(self) -> io::Result<ServerHandle> {
        let addr = self.local_addr()?;
        let stop = Arc::new(AtomicBool::new(false));
        let flag = Arc::clone(&stop);
        let join = thread::spawn(move || {
            let _ = self.accept_loop(&flag);
        });
        Ok(ServerHandle {
            addr,
            stop,
            join: Some(join),
        })
    }

    fn accept_loop(&self, stop: &AtomicBool) -> io::Result<()> {
        for conn in self.listener.incoming() {
            if stop.load(Ordering::SeqCst) {
                break;
            }
            match conn {
                Ok(stream) => {
                    let registry = Arc::clone(&self.registry);
                    let config = self.config;
                    thread::spawn(move || handle_connection(stream, &registry, config));
                }
                Err(e) if e.kind() == io::ErrorKind::Interrupted => {}
                // Transient accept failures (e.g. fd exhaustion) must not kill the server.
                Err(_) => thread::sleep(Duration::from_millis(10)),
            }
        }
        Ok(())
    }
}

pub struct ServerHandle {
    addr: SocketAddr,
    stop: Arc<AtomicBool>,
    join: Option<JoinHandle<()>>,
}

impl ServerHandle {
    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    /// Stops accepting; connections already open finish on their own threads.
    pub fn shutdown(mut self) {
        self.halt();
    }

    fn halt(&mut self) {
        self.stop.store(true, Ordering::SeqCst);
        // Wake the blocking accept.
        let _ = TcpStream::connect_timeout(&self.addr, Duration::from_secs(1));
        if let Some(j) = self.join.take() {
            let _ = j.join();
        }
    }
}

impl Drop for ServerHandle {
    fn drop(&mut self) {
        self.halt();
    }
}

fn handle_connection(mut stream: TcpStream, registry: &WorkloadRegistry, config: ServerConfig) {
    let _ = stream.set_nodelay(true);
    loop {
        let frame = match protocol::read_frame(&mut stream, config.max_payload) {
            Ok(f) => f,
            Err(ProtocolError::Frame(e)) => {
                let _ = protocol::write_frame(&mut stream, &Frame::error(0, &e.to_string()));
                return;
            }
            Err(ProtocolError::Closed | ProtocolError::Io(_)) => return,
        };
        let reply = respond(&frame, registry, config);
        if protocol::write_frame(&mut stream, &reply).is_err() {
            return;
        }
    }
}

fn respond(frame: &Frame, registry: &WorkloadRegistry, config: ServerConfig) -> Frame {
    let id = frame.application_id;
    if frame.kind != FrameKind::Request {
        return Frame::error(id, "expected a request frame");
    }
    let Some(workload) = AppId::from_wire(id).and_then(|_| registry.get(id)) else {
        return Frame::error(id, "unknown application");
    };
    let start = Instant::now();
    let result = workload.execute(&frame.payload);
    if let Some(pace) = config.pace {
        let spent = start.elapsed();
        thread::sleep(spent.mul_f64(pace - 1.0));
    }
    match result {
        Ok(out) => Frame::response(id, out),
        Err(e) => Frame::error(id, &e.to_string()),
    }
}
