use thiserror::Error;

/// Errors across the crate. Malformed inputs and violated preconditions are
/// reported here; an invalid-but-well-formed twin pair is not an error (see
/// [`crate::perm::verify_twins`]).
#[derive(Debug, Error)]
pub enum Error {
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("duplicate value {value}")]
    DuplicateValue { value: u32 },

    #[error("value {value} outside [1, {bound}]")]
    ValueOutOfBounds { value: u32, bound: u32 },

    #[error("length {len} exceeds ground bound {bound}")]
    LengthExceedsBound { len: usize, bound: u32 },

    #[error("positions not strictly increasing at index {index}")]
    PositionsNotIncreasing { index: usize },

    #[error("position {position} out of range for host of length {len}")]
    PositionOutOfRange { position: u32, len: usize },

    #[error("inputs are not permutations of the same symbol set")]
    SymbolSetMismatch,

    #[error("input of length {len} is shorter than the {needed}-element window")]
    WindowUnderflow { len: usize, needed: usize },

    #[error("derivation step violated: {step}")]
    DerivationViolated { step: String },

    #[error("common subpermutation of length {len} falls below the cube-root bound for {m} symbols")]
    CubeRootBoundViolated { m: usize, len: usize },

    #[error("matched cell ({i}, {j}) holds fewer than two points")]
    CellUnderfilled { i: u32, j: u32 },

    #[error("node budget of {limit} exhausted after {visited} nodes")]
    BudgetExhausted { limit: u64, visited: u64 },

    #[error("input length {len} exceeds the exact-search cap of {cap}")]
    ExactSearchCapExceeded { len: usize, cap: usize },

    #[error("invalid generator spec: {reason}")]
    InvalidSpec { reason: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
