//! File formats, benchmark harness and statistics for the granular-ball
//! least-squares twin SVM family.

pub mod bench;
pub mod config;
pub mod io;
pub mod report;
