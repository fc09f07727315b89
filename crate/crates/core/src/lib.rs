pub mod cli;
pub mod codecs;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod lattice;
pub mod rng;
pub mod stability;

pub use error::{Error, Result};
pub use lattice::{Boundary, Configuration, Lattice, LatticeKind};
