//! Odd pair numbers of set families: constructions, bounds, and exact search.

pub mod bounds;
pub mod cli;
pub mod constructions;
pub mod decomposition;
pub mod error;
pub mod family;
pub mod gf2;
mod mis;
pub mod report;
pub mod search;
pub mod spectral;

pub use error::{Error, Result};
