use alloc::string::String;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("no primes in [{h0}, {h}]")]
    EmptyPrimeSet { h0: u64, h: u64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
    #[error("zero vector")]
    ZeroVector,
    #[error("enumeration budget exceeded in {what}: {count} items against a limit of {limit}")]
    Budget { what: &'static str, count: u64, limit: u64 },
    #[error("graph is disconnected")]
    Disconnected,
    #[error("vertex {0} has in-degree 0")]
    ZeroInDegree(usize),
    #[error("row {0} is identically zero")]
    ZeroRow(usize),
    #[error("column {column} has {count} non-zero entries, more than kappa = {kappa}")]
    ColumnTooDense { column: usize, count: usize, kappa: usize },
    #[error("matrix is singular")]
    Singular,
    #[error("modulus {0} is not square-free")]
    NotSquareFree(u64),
    #[error("decode error at position {position}: {reason}")]
    Decode { position: usize, reason: &'static str },
    #[error("class {0} is not coloured")]
    MissingClass(usize),
    #[error("g(empty set) must equal 1")]
    GEmptyNotOne,
}

pub type Result<T> = core::result::Result<T, Error>;
