//! Batch front end: run configurations, paired comparisons and temporal
//! convergence studies, with CSV diagnostics.

pub mod commands;
pub mod config;
pub mod runner;
