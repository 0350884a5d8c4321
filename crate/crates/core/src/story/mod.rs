//! Phase machine, action catalog, scenario files and the training debrief.

mod catalog;
mod phase;
mod report;
mod scenario;
mod state;

pub use catalog::*;
pub use phase::*;
pub use report::*;
pub use scenario::*;
pub use state::*;
