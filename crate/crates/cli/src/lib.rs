//! Command-line front end: JSON jobs in, JSON reports (and optional SVG
//! renderings) out.

pub mod job;
pub mod report;
pub mod svg;

pub use job::{Job, JobError, JobSpec, Precision, Task};
pub use report::{run, run_json, run_spec, ErrorEntry, Report, EXIT_CERTIFICATION, EXIT_INVALID_INPUT, EXIT_OK};
