//! Append-only execution history log.
//!
//! One record per line: `application,input_size,cpu_workload,execution_time`.
//! Floats use Rust's shortest round-trip formatting, so a record read back is
//! bit-identical to the one written. A trailing line without its newline is a
//! torn write; it is dropped (and truncated away) when the log is opened.

use std::fs::{File, OpenOptions};
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HistoryError {
    #[error("invalid history record: {0}")]
    InvalidRecord(String),
    #[error("corrupt history log {path}: line {line}: {reason}")]
    Corrupt {
        path: PathBuf,
        line: usize,
        reason: String,
    },
    #[error("history log I/O error on {path}: {cause}")]
    Io { path: PathBuf, cause: io::Error },
}

pub type Result<T> = std::result::Result<T, HistoryError>;

#[derive(Debug, Clone, PartialEq)]
pub struct HistoryRecord {
    pub application: String,
    /// Bytes.
    pub input_size: u64,
    /// Percent, `[0, 100]`.
    pub avg_cpu_workload: f64,
    /// Seconds, strictly positive.
    pub execution_time: f64,
}

impl HistoryRecord {
    pub fn new(
        application: impl Into<String>,
        input_size: u64,
        avg_cpu_workload: f64,
        execution_time: f64,
    ) -> Result<Self> {
        let record = Self {
            application: application.into(),
            input_size,
            avg_cpu_workload,
            execution_time,
        };
        record.validate()?;
        Ok(record)
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |msg: &str| Err(HistoryError::InvalidRecord(msg.to_string()));
        if self.application.is_empty() {
            return invalid("application identifier is empty");
        }
        if self
            .application
            .chars()
            .any(|c| c == ',' || c == '\n' || c == '\r')
        {
            return invalid("application identifier contains a separator");
        }
        if !(self.avg_cpu_workload.is_finite() && (0.0..=100.0).contains(&self.avg_cpu_workload)) {
            return invalid("cpu workload must lie in [0, 100]");
        }
        if !(self.execution_time.is_finite() && self.execution_time > 0.0) {
            return invalid("execution time must be strictly positive");
        }
        Ok(())
    }

    pub fn to_line(&self) -> String {
        format!(
            "{},{},{},{}\n",
            self.application, self.input_size, self.avg_cpu_workload, self.execution_time
        )
    }

    pub fn parse_line(line: &str) -> std::result::Result<Self, String> {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(format!("expected 4 fields, found {}", fields.len()));
        }
        let input_size = fields[1]
            .parse::<u64>()
            .map_err(|e| format!("input_size: {e}"))?;
        let cpu = fields[2]
            .parse::<f64>()
            .map_err(|e| format!("cpu_workload: {e}"))?;
        let time = fields[3]
            .parse::<f64>()
            .map_err(|e| format!("execution_time: {e}"))?;
        Self::new(fields[0], input_size, cpu, time).map_err(|e| e.to_string())
    }
}

/// Execution log, optionally backed by a file.
#[derive(Debug, Default)]
pub struct HistoryLog {
    records: Vec<HistoryRecord>,
    source_path: Option<PathBuf>,
    file: Option<File>,
}

impl HistoryLog {
    pub fn in_memory() -> Self {
        Self::default()
    }

    pub fn from_records(records: Vec<HistoryRecord>) -> Result<Self> {
        for r in &records {
            r.validate()?;
        }
        Ok(Self {
            records,
            ..Self::default()
        })
    }

    /// Opens (creating if missing) a file-backed log and loads its records.
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let io_err = |cause| HistoryError::Io {
            path: path.clone(),
            cause,
        };
        let mut file = OpenOptions::new()
            .read(true)
            .append(true)
            .create(true)
            .open(&path)
            .map_err(io_err)?;
        let mut text = String::new();
        file.read_to_string(&mut text).map_err(io_err)?;

        let complete = match text.rfind('\n') {
            Some(idx) => idx + 1,
            None => 0,
        };
        if complete < text.len() {
            file.set_len(complete as u64).map_err(io_err)?;
        }

        let mut records = Vec::new();
        for (idx, line) in text[..complete].lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let record =
                HistoryRecord::parse_line(line).map_err(|reason| HistoryError::Corrupt {
                    path: path.clone(),
                    line: idx + 1,
                    reason,
                })?;
            records.push(record);
        }
        Ok(Self {
            records,
            source_path: Some(path),
            file: Some(file),
        })
    }

    pub fn source_path(&self) -> Option<&Path> {
        self.source_path.as_deref()
    }

    /// Validates, persists, then publishes the record.
    pub fn append(&mut self, record: HistoryRecord) -> Result<()> {
        record.validate()?;
        if let Some(file) = self.file.as_mut() {
            let path = self.source_path.clone().unwrap_or_default();
            let line = record.to_line();
            file.write_all(line.as_bytes())
                .and_then(|_| file.sync_data())
                .map_err(|cause| HistoryError::Io { path, cause })?;
        }
        self.records.push(record);
        Ok(())
    }

    pub fn records(&self) -> &[HistoryRecord] {
        &self.records
    }

    /// Records of one application, in insertion order.
    pub fn snapshot(&self, application: &str) -> Vec<HistoryRecord> {
        self.records
            .iter()
            .filter(|r| r.application == application)
            .cloned()
            .collect()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rec(app: &str, size: u64, cpu: f64, t: f64) -> HistoryRecord {
        HistoryRecord::new(app, size, cpu, t).unwrap()
    }

    #[test]
    fn append_then_snapshot_in_memory() {
        let mut log = HistoryLog::in_memory();
        log.append(rec("sort", 10, 5.0, 0.1)).unwrap();
        log.append(rec("wordcount", 10, 5.0, 0.2)).unwrap();
        log.append(rec("sort", 20, 5.0, 0.3)).unwrap();
        let snap = log.snapshot("sort");
        assert_eq!(snap.len(), 2);
        assert_eq!(snap[1].execution_time, 0.3);
        assert!(log.snapshot("pathfinder").is_empty());
    }

    #[test]
    fn empty_store_yields_nothing() {
        let dir = tempfile::tempdir().unwrap();
        let log = HistoryLog::open(dir.path().join("h.log")).unwrap();
        assert!(log.snapshot("sort").is_empty());
        assert!(log.is_empty());
    }

    #[test]
    fn rejects_invalid_records() {
        assert!(HistoryRecord::new("sort", 1, 10.0, 0.0).is_err());
        assert!(HistoryRecord::new("sort", 1, 10.0, -1.0).is_err());
        assert!(HistoryRecord::new("", 1, 10.0, 1.0).is_err());
        assert!(HistoryRecord::new("a,b", 1, 10.0, 1.0).is_err());
        assert!(HistoryRecord::new("sort", 1, 100.5, 1.0).is_err());

        let mut log = HistoryLog::in_memory();
        let bad = HistoryRecord {
            application: "sort".into(),
            input_size: 1,
            avg_cpu_workload: 1.0,
            execution_time: 0.0,
        };
        assert!(log.append(bad).is_err());
        assert!(log.is_empty());
    }

    #[test]
    fn thousand_appends_preserve_order() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("h.log");
        {
            let mut log = HistoryLog::open(&path).unwrap();
            for i in 0..1000u64 {
                log.append(rec("sort", i, 50.0, (i + 1) as f64 * 0.001))
                    .unwrap();
            }
        }
        let log = HistoryLog::open(&path).unwrap();
        let snap = log.snapshot("sort");
        assert_eq!(snap.len(), 1000);
        for (i, r) in snap.iter().enumerate() {
            assert_eq!(r.input_size, i as u64);
        }
    }

    #[test]
    fn torn_trailing_record_is_dropped() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("h.log");
        std::fs::write(&path, "sort,1,2,0.5\nsort,2,3,0.7\nsort,3,4").unwrap();
        let mut log = HistoryLog::open(&path).unwrap();
        assert_eq!(log.len(), 2);
        log.append(rec("sort", 9, 9.0, 9.0)).unwrap();
        drop(log);
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text, "sort,1,2,0.5\nsort,2,3,0.7\nsort,9,9,9\n");
    }

    #[test]
    fn corrupt_interior_line_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("h.log");
        std::fs::write(&path, "sort,1,2,0.5\nsort,x,3,0.7\n").unwrap();
        match HistoryLog::open(&path) {
            Err(HistoryError::Corrupt { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected corruption error, got {other:?}"),
        }
    }

    proptest! {
        #[test]
        fn file_round_trip_is_bit_exact(
            entries in proptest::collection::vec(
                (0u64..u64::MAX, 0.0f64..=100.0, 1e-12f64..1e9),
                1..50,
            )
        ) {
            let dir = tempfile::tempdir().unwrap();
            let path = dir.path().join("h.log");
            let written: Vec<HistoryRecord> = entries
                .iter()
                .map(|&(s, c, t)| rec("facefinder", s, c, t))
                .collect();
            {
                let mut log = HistoryLog::open(&path).unwrap();
                for r in &written {
                    log.append(r.clone()).unwrap();
                }
            }
            let read = HistoryLog::open(&path).unwrap().snapshot("facefinder");
            prop_assert_eq!(read.len(), written.len());
            for (a, b) in read.iter().zip(&written) {
                prop_assert_eq!(a.input_size, b.input_size);
                prop_assert_eq!(a.avg_cpu_workload.to_bits(), b.avg_cpu_workload.to_bits());
                prop_assert_eq!(a.execution_time.to_bits(), b.execution_time.to_bits());
            }
        }
    }
}
