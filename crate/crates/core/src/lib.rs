//! Periodic `d`-regular bipartite lattices built from the root unit graph by
//! fiber-uniform 2-lifts, with exact subgraph census, lift certification,
//! the sixth monomer-dimer coefficient and straight-line embeddings.

pub mod census;
pub mod certify;
pub mod cycles;
pub mod embed;
pub mod entropy;
pub mod error;
pub mod graph;
pub mod rational;
pub mod voltage;

pub use error::{Error, Result};
