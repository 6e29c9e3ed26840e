//! Exact computational algebra for linear and affine subspaces of n×p matrices
//! over small prime fields, with exhaustive and seeded-randomized verification
//! of rank-stratum spanning theorems, the zero-spectrum dimension bound, and
//! affine minimum-rank bounds. Every check emits a machine-checkable verdict.

pub mod affine;
pub mod error;
pub mod ffmat;
pub mod grassmann;
pub mod io;
pub mod nilspec;
pub mod strata;
pub mod subspace;
pub mod verdict;
pub mod verify;

pub use error::{Error, Result};
pub use ffmat::{Fq, FqMat};
pub use subspace::MatSubspace;
pub use verdict::{Status, Verdict};

/// Default cap on element visits for enumeration-based checks.
pub const DEFAULT_BUDGET: u64 = 1 << 24;
