//! HL-code construction, majority-logic decoding, and a McEliece-type
//! public-key cryptosystem built on top of them.
//!
//! An HL-code of parameter `m` (even, at least 4) is a binary
//! `(2^m, 2^{m-1}, 2^{m/2})` linear code. Its generator matrix starts out
//! like a Reed-Muller matrix (the all-ones row, the `m` "binary counting"
//! rows, and all their products up to degree `m/2 - 1`) and is completed
//! with degree-`m/2` products chosen through a random complement-free set.
//! Decoding recovers the message coefficients degree by degree, from the
//! highest down, by majority vote over precomputed redundancy relations.
//!
//! Module map:
//! - [`bits`]: packed bit vectors and the popcount/parity kernels.
//! - [`rowmap`]: generator-row to index-tuple bookkeeping.
//! - [`hlcode`]: code parameters, complement-free sets, generator matrices.
//! - [`relations`]: redundancy-relation masks and their precomputation cache.
//! - [`decoder`]: the multilevel majority-logic decoder.
//! - [`gf2`]: dense GF(2) matrices, inverses, and column permutations.
//! - [`dhh`]: key generation, encryption, decryption, and key files.
//! - [`bench`](mod@crate::bench): wall-clock timing harness backing the
//!   CLI `bench` command.

use std::path::PathBuf;

pub mod bench;
pub mod bits;
pub mod decoder;
pub mod dhh;
mod fileio;
pub mod gf2;
pub mod hlcode;
pub mod relations;
pub mod rowmap;

pub use bits::BitWord;
pub use decoder::{decode, decode_level, DecodeOutcome, LevelResult};
pub use dhh::{Ciphertext, Precomputed, PrivateKey, PublicKey};
pub use hlcode::{CodeParams, ComplementFreeSet, GeneratorMatrix};
pub use relations::{MaskCache, RelationDictionary, RelationSet};
pub use rowmap::IndexTuple;

/// Errors shared across the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("bit length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("invalid bit length {0}: must be a positive power of two")]
    InvalidLength(usize),
    #[error("bit index {0} out of range: must lie in 1..=63")]
    BitIndexOutOfRange(usize),
    #[error("invalid code parameter m = {0}: must be even and at least 4")]
    InvalidCodeParameter(u32),
    #[error("row {row} out of range: valid rows are 0..{k}")]
    RowOutOfRange { row: usize, k: usize },
    #[error("row 0 is the all-ones row and carries no index tuple")]
    ConstantRow,
    #[error("combination index {index} out of range: {count} tuples of this degree")]
    CombinationOutOfRange { index: usize, count: usize },
    #[error("tuple indices must be strictly increasing and at least 1")]
    MalformedTuple,
    #[error("row {row} lies in the random block but no complement-free set was supplied")]
    MissingComplementFreeSet { row: usize },
    #[error("complement-free set rejected: {0}")]
    InvalidComplementFreeSet(&'static str),
    #[error("row range {start}..={end} is not a valid coefficient range for k = {k}")]
    InvalidRowRange { start: usize, end: usize, k: usize },
    #[error("generator matrix is not complete")]
    IncompleteMatrix,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(&'static str),
    #[error("relation dictionary covers {actual} coefficient rows, expected {expected}")]
    IncompleteRelations { expected: usize, actual: usize },
    #[error("no redundancy relations of degree {0} in the dictionary")]
    MissingDegree(usize),
    #[error("majority tie while deciding coefficient a_{row} (degree {degree})")]
    DecodeTie { row: usize, degree: usize },
    #[error("weight tie while deciding the constant coefficient a_0")]
    DecodeConstantTie,
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("bad magic: expected {expected:?}, found {found:?}")]
    BadMagic { expected: [u8; 4], found: [u8; 4] },
    #[error("corrupt file: {0}")]
    CorruptFile(String),
    #[error("content hash mismatch: private key file is corrupt or was tampered with")]
    HashMismatch,
    #[error(
        "precomputed artifacts for m = {m} not found under {dir}: \
         run `hlcrypt precompute --m {m} --out {dir}` first"
    )]
    MissingPrecompute { m: u32, dir: PathBuf },
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
