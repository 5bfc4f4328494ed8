use thiserror::Error;

/// Errors raised by the lattice, form and catalog operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("lattice is degenerate (determinant 0)")]
    DegenerateLattice,
    #[error("sublattice basis is degenerate")]
    DegenerateSublattice,
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not symmetric at ({0}, {1})")]
    NotSymmetric(usize, usize),
    #[error("vector is not in the dual lattice")]
    NotInDual,
    #[error("twist factor must be nonzero")]
    ZeroTwist,
    #[error("lattice is not even (odd diagonal entry at {0})")]
    OddLattice(usize),
    #[error("group order {order} exceeds the exhaustive bound {bound}")]
    TooLarge { order: u64, bound: u64 },
    #[error("no even binary forms of discriminant {0} (need d = 0 or 3 mod 4)")]
    EmptyResult(i64),
    #[error("discriminant must be nonzero")]
    ZeroDiscriminant,
    #[error("no reduced form of discriminant {0} has the requested discriminant form")]
    NoMatch(i64),
    #[error("{count} reduced forms of discriminant {d} share the discriminant form")]
    Ambiguous { d: i64, count: usize },
    #[error("modular search for p = {p}, e = {e} exceeds the budget of {budget} residues")]
    SearchTooLarge { p: u64, e: u32, budget: u64 },
    #[error("expected signature {expected:?}, found {found:?}")]
    WrongSignature {
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("invalid finite quadratic form: {0}")]
    InvalidForm(String),
    #[error("not a positive definite even binary form: {0}")]
    InvalidBinaryForm(String),
    #[error("arithmetic overflow")]
    Overflow,
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
