//! Command-line verifier built on `dpcheck-core`: parallel exploration,
//! reports, DOT export and the `dpcheck` binary.

pub mod cli;
pub mod dot;
pub mod parallel;
pub mod qgrid;
pub mod report;
pub mod run;
