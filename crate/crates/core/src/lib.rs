//! Grid-graph detailed routing with rip-up and reroute, two routing
//! environments (net ordering and single-net routing), a TCP session
//! protocol for remote agents, and benchmark reporting.

pub mod cli;
pub mod design_io;
pub mod drc;
pub mod env;
pub mod grid;
pub mod heuristics;
pub mod metrics;
pub mod protocol;
pub mod report;
pub mod router;
