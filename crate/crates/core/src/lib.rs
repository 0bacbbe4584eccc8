//! Workbench for structural cryptanalysis of two quasi-cyclic McEliece
//! variants: a scheme built from shift-orbit subcodes of a primitive BCH
//! code, and a scheme built from sparse quasi-cyclic LDPC codes hidden by
//! dense circulant transformations.
//!
//! Everything is built on the ring `R_p = F2[x]/(x^p - 1)`: circulant
//! `p x p` binary matrices correspond one-to-one to ring elements, and
//! block matrices of circulants correspond to matrices over `R_p`. The
//! attacks exploit that correspondence to reduce key recovery to small
//! linear systems, low-weight codeword searches, and sparse polynomial
//! factorizations.

pub mod bch;
pub mod isd;
pub mod linalg;
pub mod poly;
pub mod prob;
pub mod qcbch;
pub mod qcldpc;
pub mod rng;
pub mod word;

/// Key-recovery attacks against the two schemes.
pub mod attack {
    pub mod qcbch;
    pub mod qcldpc;
}

mod bits;
mod f2x;
