use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Errors raised by the core operations.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("invalid key: {0}")]
    InvalidKey(String),
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("fixed points are complex (t² < 4d); the ratios diverge")]
    ComplexFixedPoints,
    #[error("ratio orbit hits zero at index {index}")]
    DivisionByZeroInOrbit { index: usize },
    #[error("initial ratio must be non-zero")]
    ZeroInitialRatio,
    #[error("coding matrix has a zero sequence entry; the row-ratio interval is undefined")]
    ZeroSequenceEntry,
    #[error("column ratio has a zero denominator")]
    ZeroDenominator,
    #[error("symbol {0:?} is not in the alphabet")]
    UnknownSymbol(char),
    #[error("symbol index {0} is outside the alphabet")]
    SymbolOutOfRange(u64),
    #[error("ciphertext does not decrypt to an integral plaintext")]
    NonIntegralPlaintext,
    #[error("ciphertext decrypts to a negative plaintext entry")]
    NegativePlaintext,
    #[error("linear Diophantine equation has no integer solution")]
    NoSolution,
    #[error("malformed input: {0}")]
    Malformed(String),
}

impl Error {
    /// Stable machine-readable category, used by the CLI for exit diagnostics.
    pub fn category(&self) -> &'static str {
        match self {
            Error::SingularMatrix => "singular-matrix",
            Error::InvalidKey(_) => "invalid-key",
            Error::InvalidPermutation(_) => "invalid-permutation",
            Error::ComplexFixedPoints => "complex-fixed-points",
            Error::DivisionByZeroInOrbit { .. } => "division-by-zero-in-orbit",
            Error::ZeroInitialRatio => "zero-initial-ratio",
            Error::ZeroSequenceEntry => "zero-sequence-entry",
            Error::ZeroDenominator => "zero-denominator",
            Error::UnknownSymbol(_) => "unknown-symbol",
            Error::SymbolOutOfRange(_) => "symbol-out-of-range",
            Error::NonIntegralPlaintext => "non-integral-plaintext",
            Error::NegativePlaintext => "negative-plaintext",
            Error::NoSolution => "no-diophantine-solution",
            Error::Malformed(_) => "malformed-input",
        }
    }
}
