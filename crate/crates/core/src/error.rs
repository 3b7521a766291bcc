use thiserror::Error;

use crate::complex::Chain;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("chain dimension {got} not allowed here ({expected})")]
    Dimension { got: usize, expected: &'static str },

    #[error("chain has {got} cells but the complex has {expected} cells of dimension {dim}")]
    ChainLength {
        dim: usize,
        got: usize,
        expected: usize,
    },

    #[error("cell set is not closed under taking faces (dimension {dim}, cell {cell})")]
    NotFaceClosed { dim: usize, cell: usize },

    #[error("subcomplex is not contained in the ambient network")]
    NotSubcomplex,

    #[error("input chain is not a cycle")]
    NotACycle,

    #[error("chain has cells outside the selected network")]
    OutsideNetwork,

    #[error("invalid probability {0}; expected 0 <= x <= 1")]
    InvalidProbability(f64),

    #[error("invalid coupling magnitude {0}; expected J0 > 0")]
    InvalidMagnitude(f64),

    #[error("size mismatch: {what} has {got} entries, expected {expected}")]
    SizeMismatch {
        what: &'static str,
        got: usize,
        expected: usize,
    },

    #[error("plaquette {0} of the unfrustration network is frustrated")]
    FrustratedPlaquette(usize),

    #[error("cocycle condition violated on cell {cell} of dimension {dim}")]
    CocycleViolated { dim: usize, cell: usize },

    #[error("frustrated loop found during propagation ({} bonds)", witness.count())]
    FrustrationDetected { witness: Chain },

    #[error("bond region is not connected")]
    Disconnected,

    #[error("{sites} sites exceed the brute-force cap of {cap}")]
    CapExceeded { sites: usize, cap: usize },

    #[error("{bonds} bonds exceed the exact-enumeration cap of {cap}")]
    BondCapExceeded { bonds: usize, cap: usize },

    #[error("no hypersurface in the lattice has the requested boundary")]
    NoSpanningWall,

    #[error("loop bounds no surface in the lattice, so its linking parity is not defined")]
    NoSpanningSurface,

    #[error("the operation requires a {0}-dimensional lattice")]
    WrongDimension(usize),

    #[error("malformed input: {0}")]
    Malformed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
