//! Experiment driver for the cascading structures: synthetic input
//! generators, instrumented measurements with CSV/JSON reports, and the
//! oracle checks behind the `nn-check` and `graph-check` commands.

pub mod dist;
pub mod experiments;
pub mod report;
pub mod runner;
pub mod workload;

pub use dist::Distribution;
pub use report::{Format, Record, Report};
