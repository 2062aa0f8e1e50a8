//! Run files, reports and certificates for the `retrieval` command.

pub mod cert;
pub mod input;
pub mod runner;
pub mod suites;
pub mod verify;

pub use input::{parse_input, RunConfig};
pub use runner::{run, Report, RunOptions};
