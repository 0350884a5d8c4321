//! Event log, behavioural record extraction, descriptive statistics and
//! rank tests for questionnaire analysis.

mod assessment;
mod bp;
mod event;
mod log;
pub mod stats;

pub use assessment::*;
pub use bp::*;
pub use event::*;
pub use log::*;
pub use stats::{
    describe, format_mean_sd, rank_sum, wilcoxon_signed_rank, SignedRank, StatsResult, TestMethod,
    WilcoxonMode,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TelemetryError {
    #[error("event at t={t} precedes last recorded t={last}")]
    ClockRegression { last: f64, t: f64 },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{0}")]
    Io(String),
    #[error("session is incomplete: {0}")]
    IncompleteSession(String),
    #[error("no values given")]
    EmptyInput,
    #[error("standard deviation needs at least two values")]
    InsufficientForSd,
    #[error("paired samples differ in length ({x} vs {y})")]
    LengthMismatch { x: usize, y: usize },
    #[error("exact mode supports at most {max} non-zero differences, got {n}")]
    ExactTooLarge { n: usize, max: usize },
    #[error("invalid response: {0}")]
    InvalidResponse(String),
}
