//! Session lifecycle: configuration, the fixed-tick loop, snapshots for the
//! client and the websocket service.

mod config;
mod engine;
mod pilot;
mod protocol;
mod script;
mod snapshot;

pub use config::*;
pub use engine::*;
pub use pilot::*;
pub use protocol::*;
pub use script::*;
pub use snapshot::*;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SessionError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("the session has ended")]
    SessionEnded,
    #[error("unknown command: {0}")]
    UnknownCommand(String),
    #[error("no terminal choice has been made yet")]
    NotTerminal,
    #[error("route from `{from}` to `{to}` not found")]
    NoRoute { from: String, to: String },
    #[error("internal error: {0}")]
    Internal(String),
}
