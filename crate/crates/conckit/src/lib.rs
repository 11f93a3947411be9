//! Verification harness, report formats and the command-line front end for
//! `conckit-core`.

pub mod cli;
pub mod format;
pub mod harness;
pub mod model;
pub mod report;
pub mod suites;
