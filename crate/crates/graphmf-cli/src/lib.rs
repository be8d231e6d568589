//! Report schema shared between the `graphmf` binary and its tests.

pub mod report;
