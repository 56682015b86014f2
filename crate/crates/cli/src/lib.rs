//! Configuration, report emission and command drivers behind the `qfreud`
//! binary.

pub mod commands;
pub mod config;
pub mod report;
