//! Analytic parameter sweeps over the energy model: one factor varies, the
//! others stay at their defaults, and each grid point yields a local, a cloud
//! and an offloading row.

pub mod config;
pub mod cost;

use std::fmt;
use std::io::{self, Write};

use thiserror::Error;

pub use config::{ConfigError, Defaults, Factor, SweepConfig};
pub use cost::{CostModel, CostShape, ResultSizeModel};

use crate::engine::{
    pinned_history, DecisionEngine, DecisionError, DecisionRequest, DelayTolerance,
    EnvironmentSnapshot, Reason, TaskDescriptor, Verdict,
};
use crate::model::{self, ModelError, TransferSpec};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Decision(#[from] DecisionError),
    #[error("no break-even in range: {0}")]
    NoBreakeven(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Local,
    Cloud,
    Offloading,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Local => "local",
            Mode::Cloud => "cloud",
            Mode::Offloading => "offloading",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub factor: Factor,
    /// In config units (delay tolerance in milliseconds).
    pub factor_value: f64,
    pub mode: Mode,
    pub energy: f64,
    pub time: f64,
    /// Offloading rows only.
    pub reason: Option<Reason>,
    pub verdict: Option<Verdict>,
}

#[derive(Debug, Clone, Copy)]
struct Point {
    input_size: f64,
    cpu: f64,
    bandwidth: f64,
    delay: DelayTolerance,
}

fn delay_from_ms(ms: Option<f64>) -> Result<DelayTolerance, DecisionError> {
    match ms {
        Some(ms) => DelayTolerance::finite(ms / 1000.0),
        None => Ok(DelayTolerance::Infinite),
    }
}

impl SweepConfig {
    fn point(&self, x: f64) -> Result<Point, DecisionError> {
        let d = &self.defaults;
        let mut p = Point {
            input_size: d.input_size as f64,
            cpu: d.cpu_workload,
            bandwidth: d.bandwidth,
            delay: delay_from_ms(d.delay_tolerance_ms)?,
        };
        match self.factor {
            Factor::InputSize => p.input_size = x,
            Factor::Bandwidth => p.bandwidth = x,
            Factor::CpuWorkload => p.cpu = x,
            Factor::DelayTolerance => p.delay = delay_from_ms(Some(x))?,
        }
        Ok(p)
    }

    fn request(&self, input_size: u64, delay: DelayTolerance) -> DecisionRequest {
        DecisionRequest {
            task: TaskDescriptor {
                application: self.application.clone(),
                input_size,
                result_size: self.cost.d_receive(input_size),
            },
            delay_tolerance: delay,
            power_profile: self.profile,
            speedup_n: self.speedup_n,
        }
    }

    /// `E_local − E_cloud` as the decision engine sees it, with
    /// `T_idle = t(s, w)/n` at the point's own CPU workload.
    pub fn tradeoff_at(&self, x: f64) -> Result<(f64, f64), SimError> {
        let p = self.point(x)?;
        let t = self.cost.t_exec(p.input_size, p.cpu);
        let transfer = TransferSpec::symmetric(
            p.input_size,
            self.cost.result_size.bytes_f64(p.input_size),
            p.bandwidth,
        )?;
        let l = model::energy_ledger(&self.profile, t, self.speedup_n, &transfer)?;
        Ok((l.e_tradeoff, l.e_local))
    }
}

/// Three rows per grid point (local, cloud, offloading), factor-ascending.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRow>, SimError> {
    cfg.validate()?;
    let engine = DecisionEngine::default();
    let mut rows = Vec::with_capacity(cfg.steps * 3);
    for x in cfg.grid() {
        let p = cfg.point(x)?;
        let s = p.input_size as u64;
        let t_local = cfg.cost.t_exec(p.input_size, p.cpu);
        // The remote side is not slowed by device load.
        let cloud_cpu = match cfg.factor {
            Factor::CpuWorkload => cfg.defaults.cpu_workload,
            _ => p.cpu,
        };
        let t_remote = cfg.cost.t_exec(p.input_size, cloud_cpu);
        let transfer =
            TransferSpec::symmetric(p.input_size, cfg.cost.d_receive(s) as f64, p.bandwidth)?;
        let cloud = model::cloud_energy(
            &cfg.profile,
            &transfer,
            model::idle_time_max(t_remote, cfg.speedup_n)?,
        )?;
        let local = (model::local_energy(&cfg.profile, t_local)?, t_local);
        let remote = (cloud.e_cloud, cloud.t_send + cloud.t_idle + cloud.t_receive);

        let env = EnvironmentSnapshot {
            cpu_workload: p.cpu,
            send_bandwidth: p.bandwidth,
            receive_bandwidth: p.bandwidth,
        };
        let log = pinned_history(&cfg.application, s, p.cpu, t_local);
        let decision = engine.decide(&cfg.request(s, p.delay), &env, &log)?;
        let chosen = match decision.verdict {
            Verdict::Local => local,
            Verdict::Offload => remote,
        };

        let row = |mode, (energy, time): (f64, f64)| SweepRow {
            factor: cfg.factor,
            factor_value: x,
            mode,
            energy,
            time,
            reason: None,
            verdict: None,
        };
        rows.push(row(Mode::Local, local));
        rows.push(row(Mode::Cloud, remote));
        rows.push(SweepRow {
            reason: Some(decision.reason),
            verdict: Some(decision.verdict),
            ..row(
                Mode::Offloading,
                (chosen.0 + cfg.overhead_energy, chosen.1 + cfg.overhead_time),
            )
        });
    }
    Ok(rows)
}

const BREAKEVEN_REL_TOL: f64 = 1e-6;

/// Factor value where local and cloud energy are equal, by bisection over
/// the configured range.
pub fn find_breakeven(cfg: &SweepConfig) -> Result<f64, SimError> {
    cfg.validate()?;
    if cfg.factor == Factor::DelayTolerance {
        return Err(SimError::NoBreakeven(
            "energy does not depend on the delay tolerance".into(),
        ));
    }
    let grid = cfg.grid();
    let (mut lo, mut hi) = (grid[0], cfg.hi);
    let (f_lo, e_lo) = cfg.tradeoff_at(lo)?;
    let (f_hi, e_hi) = cfg.tradeoff_at(hi)?;
    let near_zero = |f: f64, e: f64| f.abs() <= model::REL_TOL * e.abs();
    match (near_zero(f_lo, e_lo), near_zero(f_hi, e_hi)) {
        (true, true) => {
            return Err(SimError::NoBreakeven(
                "local and cloud energy coincide".into(),
            ))
        }
        (true, false) => return Ok(lo),
        (false, true) => return Ok(hi),
        _ => {}
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(SimError::NoBreakeven(format!(
            "{} is {} across [{lo}, {hi}]",
            "E_local - E_cloud",
            if f_lo > 0.0 { "positive" } else { "negative" }
        )));
    }
    let lo_sign = f_lo.signum();
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let (f, e) = cfg.tradeoff_at(mid)?;
        let narrow = hi - lo <= BREAKEVEN_REL_TOL * mid.abs();
        if narrow && f.abs() <= BREAKEVEN_REL_TOL * e.abs() || f == 0.0 {
            return Ok(mid);
        }
        if f.signum() == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `%.9g`-style rendering.
pub fn format_sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..9).contains(&exp) {
        let decimals = (8 - exp) as usize;
        trim_fraction(&format!("{x:.decimals$}")).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_fraction(mantissa), exp.abs())
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub const CSV_HEADER: &str = "factor,factor_value,mode,energy_j,time_s,reason";

pub fn write_csv<W: Write>(rows: &[SweepRow], out: &mut W) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.factor,
            format_sig9(r.factor_value),
            r.mode,
            format_sig9(r.energy),
            format_sig9(r.time),
            r.reason.map(|r| r.to_string()).unwrap_or_default()
        )?;
    }
    Ok(())
}

pub fn to_csv(rows: &[SweepRow]) -> String {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("CSV is ASCII")
}
