use num_bigint::BigInt;
use thiserror::Error;

/// Errors raised by the exact-arithmetic routines of this crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("zero has no square class")]
    ZeroSquareClass,

    #[error("{0} is not prime")]
    NotPrime(BigInt),

    #[error("factoring {n} exceeds the trial-division bound {bound}")]
    FactorBoundExceeded { n: BigInt, bound: u64 },

    #[error("zero polynomial")]
    ZeroPolynomial,

    #[error("diagonalization requires symmetric form")]
    NotSymmetric,

    #[error("split off radical first")]
    Degenerate,

    #[error("symplectic reduction requires a skew form")]
    NotSkew,

    #[error("skew form violates nondegeneracy: {0}")]
    SkewDegenerate(String),

    #[error("gram matrix is not {0}-symmetric")]
    SymmetryMismatch(&'static str),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("field mismatch: {0}")]
    FieldMismatch(String),

    #[error("use rank parity directly")]
    UseRankParity,

    #[error("entry is zero modulo {0}")]
    ZeroEntry(BigInt),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid self-dual complex: {0}")]
    InvalidComplex(String),

    #[error("witness not verified: {0}")]
    UnverifiedWitness(String),

    #[error("subspace is neither nondegenerate nor totally isotropic; extract the radical of the restriction first")]
    MixedSubspace,

    #[error("invalid Hodge structure: {0}")]
    InvalidHodge(String),

    #[error("not a polarization: {0}")]
    NotPolarization(String),

    #[error("invalid Hodge diamond: {0}")]
    InvalidDiamond(String),

    #[error("duplicate primitive piece j = {0}")]
    DuplicatePiece(u32),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("internal consistency failure: {0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, Error>;
