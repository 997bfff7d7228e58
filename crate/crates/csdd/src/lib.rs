//! File formats, command-line front end and experiment runner for
//! credal sentential decision diagrams. The algorithms live in
//! `csdd-core`; this crate reads and writes their inputs and outputs.

pub mod cli;
pub mod io;
pub mod report;
pub mod runner;
pub mod vars;
