//! Scenario files, experiment drivers and output formats for the
//! spatial-domain trajectory planner in `toss-core`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod harness;
pub mod metrics;
pub mod output;
pub mod road;
pub mod run;
pub mod scenario;
pub mod units;

pub use toss_core;
