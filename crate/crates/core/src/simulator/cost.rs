//! Parametric local execution time, anchored at one measured point.
//!
//! ```text
//! t(s, w) = T_a · g(s)/g(s_a) · (1 − γ·w_a/100)/(1 − γ·w/100)
//! ```
//!
//! with `g(s) = s·log2(s+1)` or `g(s) = s^p`. At the anchor `(s_a, w_a)` the
//! result is `T_a` exactly.

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CostShape {
    NLogN,
    Power(f64),
}

impl CostShape {
    pub fn g(self, s: f64) -> f64 {
        match self {
            CostShape::NLogN => s * (s + 1.0).log2(),
            CostShape::Power(p) => s.powf(p),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ResultSizeModel {
    SameAsInput,
    /// `factor × input` bytes, rounded.
    Scaled(f64),
    Constant(u64),
}

impl ResultSizeModel {
    pub fn bytes(self, input_size: u64) -> u64 {
        self.bytes_f64(input_size as f64).round() as u64
    }

    /// Unrounded, for continuous input sizes.
    pub fn bytes_f64(self, input_size: f64) -> f64 {
        match self {
            ResultSizeModel::SameAsInput => input_size,
            ResultSizeModel::Scaled(f) => f * input_size,
            ResultSizeModel::Constant(b) => b as f64,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("invalid cost model: {0}")]
pub struct CostModelError(pub String);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostModel {
    pub shape: CostShape,
    /// Bytes.
    pub anchor_size: f64,
    /// Percent.
    pub anchor_cpu: f64,
    /// Seconds at the anchor.
    pub anchor_time: f64,
    /// CPU sensitivity γ in (0, 1].
    pub cpu_sensitivity: f64,
    pub result_size: ResultSizeModel,
}

impl CostModel {
    /// Rejects parameters for which `t` is not strictly increasing in both
    /// arguments over its domain.
    pub fn validate(&self) -> Result<(), CostModelError> {
        let bad = |m: String| Err(CostModelError(m));
        if let CostShape::Power(p) = self.shape {
            if !(p.is_finite() && p > 0.0) {
                return bad(format!("exponent must be positive, got {p}"));
            }
        }
        if !(self.anchor_size.is_finite() && self.anchor_size > 0.0) {
            return bad(format!(
                "anchor size must be positive, got {}",
                self.anchor_size
            ));
        }
        if !(self.anchor_time.is_finite() && self.anchor_time > 0.0) {
            return bad(format!(
                "anchor time must be positive, got {}",
                self.anchor_time
            ));
        }
        let gamma = self.cpu_sensitivity;
        if !(gamma.is_finite() && gamma > 0.0 && gamma <= 1.0) {
            return bad(format!("cpu sensitivity must lie in (0, 1], got {gamma}"));
        }
        if !self.cpu_in_domain(self.anchor_cpu) {
            return bad(format!(
                "anchor cpu {} outside the model's domain",
                self.anchor_cpu
            ));
        }
        if let ResultSizeModel::Scaled(f) = self.result_size {
            if !(f.is_finite() && f >= 0.0) {
                return bad(format!("result size factor must be non-negative, got {f}"));
            }
        }
        Ok(())
    }

    pub fn cpu_in_domain(&self, w: f64) -> bool {
        (0.0..100.0).contains(&w) || (w == 100.0 && self.cpu_sensitivity < 1.0)
    }

    pub fn t_exec(&self, input_size: f64, cpu_workload: f64) -> f64 {
        let size = self.shape.g(input_size) / self.shape.g(self.anchor_size);
        let load = (1.0 - self.cpu_sensitivity * self.anchor_cpu / 100.0)
            / (1.0 - self.cpu_sensitivity * cpu_workload / 100.0);
        self.anchor_time * size * load
    }

    pub fn d_receive(&self, input_size: u64) -> u64 {
        self.result_size.bytes(input_size)
    }
}
