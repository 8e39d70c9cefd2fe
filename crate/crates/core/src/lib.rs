//! Set sequences with embeddings, boxes over them, and the numerical tools
//! for extremal entropy, volume, [k]-graphons and containers.

pub mod boxes;
pub mod combinatorics;
pub mod containers;
pub mod error;
pub mod extremal;
pub mod kgraphon;
pub mod properties;
pub mod rng;
pub mod sampling;
pub mod ssee;
pub mod volume;

pub use error::{Error, Result};
pub use ssee::{CoordId, Embedding, Family};
