//! Energy-driven computation offloading for battery-powered devices.
//!
//! The [`engine`] decides per task whether running on a remote server costs
//! the device less energy than running locally, from an execution [`history`]
//! log and smoothed environment readings ([`predictors`]). The [`runtime`]
//! executes the decision; the [`simulator`] sweeps the [`model`] analytically.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod engine;
pub mod history;
pub mod model;
pub mod predictors;
pub mod runtime;
pub mod simulator;

pub use engine::{Decision, DecisionEngine, DecisionRequest, DelayTolerance, Verdict};
pub use history::{HistoryLog, HistoryRecord};
pub use model::{EnergyLedger, PowerProfile};
