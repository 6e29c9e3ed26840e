use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported field modulus {0}: expected one of 2, 3, 5, 7")]
    UnsupportedModulus(u8),

    #[error("field mismatch: F_{left} vs F_{right}")]
    FieldMismatch { left: u8, right: u8 },

    #[error("shape mismatch: expected {expected_rows}x{expected_cols}, got {rows}x{cols}")]
    ShapeMismatch {
        expected_rows: usize,
        expected_cols: usize,
        rows: usize,
        cols: usize,
    },

    #[error("operation requires a square matrix, got {rows}x{cols}")]
    NonSquare { rows: usize, cols: usize },

    #[error("entry index ({i}, {j}) out of range for a {rows}x{cols} matrix (1-based)")]
    EntryIndexOutOfRange {
        i: usize,
        j: usize,
        rows: usize,
        cols: usize,
    },

    #[error("row index {i} out of range 1..={rows}")]
    RowIndexOutOfRange { i: usize, rows: usize },

    #[error("column count {r} out of range 1..={cols}")]
    ColumnCountOutOfRange { r: usize, cols: usize },

    #[error("rank {r} out of range 0..={max}")]
    RankOutOfRange { r: usize, max: usize },

    #[error("matrix must be invertible")]
    SingularMatrix,

    #[error("enumeration requires {required} element visits but the budget is {budget} (raise --budget or RANKSPAN_BUDGET)")]
    BudgetExceeded { required: u128, budget: u64 },

    #[error("no zero-row index exists: R_i(V) is nonzero for every row i (precondition violation or refutation)")]
    NoZeroRowIndex,

    #[error("no triangularizing permutation found by exhaustive search (counterexample event)")]
    TriangularizationNotFound,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
