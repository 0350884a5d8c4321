//! Shaking signal generation and the per-tick rigid-body update.
//!
//! Every floor in a simulated region is shaken as one kinematic body. Riders
//! are resolved bottom-up along their support chains with a pairwise Coulomb
//! impulse (see [`friction`]), then checked for overturning and for sliding
//! off their carrier.

pub mod friction;
mod signal;
mod step;

pub use friction::{friction_update, topple_check, topple_threshold, ContactForce, Regime};
pub use signal::*;
pub use step::*;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuakeError {
    #[error("invalid quake parameters: {0}")]
    InvalidParams(String),
    #[error("invalid signal: {0}")]
    InvalidSignal(String),
    #[error("t = {t} is not on the tick grid (dt = {dt})")]
    NotOnTickGrid { t: f64, dt: f64 },
}
