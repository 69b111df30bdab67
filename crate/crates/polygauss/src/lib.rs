//! File formats, the `check` pipeline and command implementations behind
//! the `polygauss` binary.

pub mod cli;
pub mod error;
pub mod numfmt;
pub mod pipeline;
pub mod spec;

pub use error::CliError;
pub use pipeline::{check, verify, CheckOptions, PipelineReport, Verdict};
pub use spec::KernelSpec;
