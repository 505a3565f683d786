//! Local-polynomial machinery on labeled graphs: distributed machines,
//! local second-order logic, certificate games, reductions and pictures.

pub mod acceptance;
pub mod arbiter;
pub mod boolean;
pub mod error;
pub mod graph;
pub mod io;
pub mod logic;
pub mod oracles;
pub mod pictures;
pub mod reductions;
pub mod runtime;
pub mod structure;

pub use error::{Error, Result};
pub use graph::{LabeledGraph, Polynomial};
pub use structure::{Element, Structure};
