//! Credal sentential decision diagrams.
//!
//! A CSDD is an SDD whose decision nodes and `⊤` terminals carry interval
//! credal sets instead of point distributions. This crate holds the circuit
//! machinery, credal sets, parameter learning, and the inference routines
//! (marginals, MAP, conditional bounds, robustness). It is `no_std` and only
//! needs `alloc`; file formats and the command line live in the `csdd` crate.

#![no_std]

extern crate alloc;

pub mod circuit;
pub mod credal;
pub mod error;
pub mod experiment;
pub mod fixtures;
pub mod infer;
pub mod learn;
pub mod params;
pub mod random;

pub use error::{Error, Result};
