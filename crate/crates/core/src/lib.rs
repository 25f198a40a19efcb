//! Exact large-`N` traces of collective spin-½ polynomials and their
//! single-mode thermal oscillator counterparts.

pub mod error;
pub mod exact;
pub mod spin;

pub use error::{Error, Result};
pub mod boson;
pub mod moments;
pub mod thermal;
pub mod bridge;
pub mod xy;
pub mod cli;
