//! Command-line front end for the `wdm-revenue` solver: instance files,
//! command dispatch, output formats and the table reproduction harness.

pub mod commands;
pub mod error;
pub mod instance_file;
pub mod output;
pub mod reproduce;
pub mod run;

pub use error::{exit, CliError};
pub use instance_file::{load_str, InstanceFile, LoadedInstance, ParseError};
pub use output::{payload_text, Format, OutputRecord, Render};
