//! Dense GF(2) linear algebra (bit-packed) and its block-circulant
//! specialization, plus plain permutations.

mod binmat;
mod block;
mod perm;

pub use binmat::{BinMatrix, BitVec, Rref};
pub use block::BlockCirculantMatrix;
pub use perm::Permutation;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LinalgError {
    #[error("dimension mismatch: {left} vs {right} in {operation}")]
    DimensionMismatch {
        operation: &'static str,
        left: String,
        right: String,
    },
    #[error("block ({block_row}, {block_col}) is not circulant")]
    NotBlockCirculant { block_row: usize, block_col: usize },
    #[error("matrix is singular")]
    Singular,
    #[error("determinant expansion implemented for at most {limit} block rows, got {got}")]
    UnsupportedBlockCount { limit: usize, got: usize },
    #[error(transparent)]
    Poly(#[from] crate::poly::PolyError),
}
