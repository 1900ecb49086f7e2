//! Statically registered workloads, identical on device and server.

pub mod facefinder;
pub mod pathfinder;
pub mod sort;
pub mod wordcount;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WorkloadError {
    #[error("{app}: malformed input: {reason}")]
    Parse { app: &'static str, reason: String },
    #[error("{0}")]
    Execution(String),
    #[error("unknown application")]
    UnknownApplication,
}

impl WorkloadError {
    pub fn parse(app: &'static str, reason: impl Into<String>) -> Self {
        Self::Parse {
            app,
            reason: reason.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum AppId {
    Sort = 1,
    Pathfinder = 2,
    Wordcount = 3,
    Facefinder = 4,
}

impl AppId {
    pub const ALL: [AppId; 4] = [
        AppId::Sort,
        AppId::Pathfinder,
        AppId::Wordcount,
        AppId::Facefinder,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AppId::Sort => "sort",
            AppId::Pathfinder => "pathfinder",
            AppId::Wordcount => "wordcount",
            AppId::Facefinder => "facefinder",
        }
    }

    pub fn wire_id(self) -> u8 {
        self as u8
    }

    pub fn from_wire(id: u8) -> Option<Self> {
        Self::ALL.into_iter().find(|a| a.wire_id() == id)
    }

    /// Result bytes expected for an input of `input_size` bytes when only the
    /// size is known. Pathfinder assumes 64 input bytes per node.
    pub fn estimate_result_size_from_len(self, input_size: u64) -> u64 {
        match self {
            AppId::Sort => input_size,
            AppId::Pathfinder => 32 * (input_size / PATHFINDER_INPUT_BYTES_PER_NODE),
            AppId::Wordcount | AppId::Facefinder => 24,
        }
    }

    /// Result bytes expected for this payload.
    pub fn estimate_result_size(self, input: &[u8]) -> u64 {
        match self {
            AppId::Pathfinder => match pathfinder::declared_nodes(input) {
                Some(v) => 32 * v,
                None => self.estimate_result_size_from_len(input.len() as u64),
            },
            _ => self.estimate_result_size_from_len(input.len() as u64),
        }
    }
}

/// Input bytes per graph node assumed when only a pathfinder payload size is known.
pub const PATHFINDER_INPUT_BYTES_PER_NODE: u64 = 64;

impl fmt::Display for AppId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AppId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|a| a.name() == s.trim())
            .ok_or_else(|| {
                format!("unknown application '{s}' (expected sort|pathfinder|wordcount|facefinder)")
            })
    }
}

pub trait Workload: Send + Sync {
    fn app(&self) -> AppId;
    fn execute(&self, input: &[u8]) -> Result<Vec<u8>, WorkloadError>;
}

struct Builtin(AppId);

impl Workload for Builtin {
    fn app(&self) -> AppId {
        self.0
    }

    fn execute(&self, input: &[u8]) -> Result<Vec<u8>, WorkloadError> {
        match self.0 {
            AppId::Sort => sort::run(input),
            AppId::Pathfinder => pathfinder::run(input),
            AppId::Wordcount => wordcount::run(input),
            AppId::Facefinder => facefinder::run(input),
        }
    }
}

/// Workloads addressable by wire id.
#[derive(Clone, Default)]
pub struct WorkloadRegistry {
    workloads: BTreeMap<u8, Arc<dyn Workload>>,
}

impl fmt::Debug for WorkloadRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries(self.workloads.values().map(|w| w.app()))
            .finish()
    }
}

impl WorkloadRegistry {
    /// All four built-in workloads.
    pub fn standard() -> Self {
        let mut r = Self::default();
        for app in AppId::ALL {
            r.register(Arc::new(Builtin(app)));
        }
        r
    }

    pub fn register(&mut self, workload: Arc<dyn Workload>) {
        self.workloads.insert(workload.app().wire_id(), workload);
    }

    pub fn get(&self, id: u8) -> Option<&Arc<dyn Workload>> {
        self.workloads.get(&id)
    }

    pub fn execute(&self, app: AppId, input: &[u8]) -> Result<Vec<u8>, WorkloadError> {
        self.get(app.wire_id())
            .ok_or(WorkloadError::UnknownApplication)?
            .execute(input)
    }
}

/// Random payload of roughly `size` bytes in the application's input format.
pub fn generate_input<R: Rng + ?Sized>(app: AppId, size: usize, rng: &mut R) -> Vec<u8> {
    match app {
        AppId::Sort => {
            let mut out = String::with_capacity(size + 12);
            while out.len() < size {
                out.push_str(&rng.gen::<i32>().to_string());
                out.push('\n');
            }
            out.into_bytes()
        }
        AppId::Pathfinder => {
            let nodes = ((size as u64 / PATHFINDER_INPUT_BYTES_PER_NODE).max(2)) as usize;
            let edges = nodes * 4;
            random_graph(nodes, edges, 0..1000, rng)
        }
        AppId::Wordcount => {
            const ALPHABET: &[u8] = b"abcdefghijklmnopqrstuvwxyz";
            let mut out = Vec::with_capacity(size);
            while out.len() < size {
                let word = rng.gen_range(1..10);
                for _ in 0..word {
                    out.push(ALPHABET[rng.gen_range(0..ALPHABET.len())]);
                }
                out.push(match rng.gen_range(0..8) {
                    0 => b'\n',
                    1 => b'\t',
                    _ => b' ',
                });
            }
            out.truncate(size);
            out
        }
        AppId::Facefinder => {
            let pixels = size.saturating_sub(8).max(1);
            let width = ((pixels as f64).sqrt() as usize).max(1);
            let height = (pixels / width).max(1);
            let mut img = facefinder::Image {
                width,
                height,
                pixels: (0..width * height).map(|_| rng.gen_range(0..120)).collect(),
            };
            let blobs = (width * height / 2048).max(1);
            for _ in 0..blobs {
                if width < facefinder::WINDOW || height < facefinder::WINDOW {
                    break;
                }
                let x0 = rng.gen_range(0..=width - facefinder::WINDOW);
                let y0 = rng.gen_range(0..=height - facefinder::WINDOW);
                let v = rng.gen_range(170..=255);
                for y in y0..y0 + facefinder::WINDOW {
                    for x in x0..x0 + facefinder::WINDOW {
                        img.pixels[y * width + x] = v;
                    }
                }
            }
            img.encode()
        }
    }
}

/// Random pathfinder input with `edges` edges whose weights are drawn from `weights`.
pub fn random_graph<R: Rng + ?Sized>(
    nodes: usize,
    edges: usize,
    weights: std::ops::Range<i64>,
    rng: &mut R,
) -> Vec<u8> {
    let source = rng.gen_range(0..nodes);
    let mut out = format!("{nodes} {edges} {source}\n");
    for _ in 0..edges {
        let u = rng.gen_range(0..nodes);
        let v = rng.gen_range(0..nodes);
        let w = rng.gen_range(weights.clone());
        out.push_str(&format!("{u} {v} {w}\n"));
    }
    out.into_bytes()
}
