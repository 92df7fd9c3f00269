//! Random digraph processes, oriented Hamilton cycles, and the constructive embedding
//! pipeline built on pseudorandom digraphs.

pub mod adapter;
pub mod badset;
pub mod bitset;
pub mod coupling;
pub mod cover;
pub mod embedding;
pub mod error;
pub mod expander;
pub mod experiments;
pub mod extend;
pub mod graph;
pub mod landmarks;
pub mod matching;
pub mod models;
pub mod oracle;
pub mod params;
pub mod pseudo;
pub mod pattern;
pub mod pipeline;
pub mod posa;
pub mod process;
mod refute;
pub mod rng;

pub use error::{Error, Result};
