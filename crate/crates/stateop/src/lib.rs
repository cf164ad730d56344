//! Command-line front end for checking state operators, conditional
//! expectations and the properties that relate them.

pub mod commands;
pub mod input;
pub mod report;
pub mod suite;

pub use commands::{run, Command, RunConfig};
pub use report::{Format, Output, Status};
