//! Command-line tooling around `foldnet_core`: SVG nets, JSON reports and
//! corpus benchmarks.

pub mod bench;
pub mod commands;
pub mod report;
pub mod svg;
