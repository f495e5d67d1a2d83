//! Configuration, pipelines and exports behind the `isolab` binary.

pub mod config;
pub mod export;
pub mod run;
pub mod scenarios;
