//! Z2 topology of frustration in nearest-neighbour Ising spin glasses on
//! finite cubical lattices.
//!
//! Layers, bottom-up: [`gf2`] linear algebra, the cubical [`complex`],
//! coupling [`disorder`], [`topology`] (homology, duality maps, exactness
//! checks), exact [`ground_state`] search and [`percolation`] statistics.
//! [`corpus`] holds the named instances used by the verifiers.

pub mod complex;
pub mod corpus;
pub mod disorder;
pub mod error;
pub mod gf2;
pub mod ground_state;
mod matching;
pub mod percolation;
pub mod rng;
pub mod topology;
pub mod union_find;

pub use complex::{BoundaryCondition, Cell, CellComplex, Chain, Lattice, Subcomplex};
pub use error::{Error, Result};
pub use gf2::{BitVector, Echelon, Gf2Matrix};
