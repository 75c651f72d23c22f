//! Numerical tolerances shared by every module.
//!
//! All validation gates in the crate read from here so a tolerance is never
//! duplicated with a slightly different value somewhere else.

/// Largest `|M[i,j] - conj(M[j,i])|` accepted from a Hermitian matrix.
pub const HERMITICITY: f64 = 1e-10;

/// Largest `|U'U - 1|` entry accepted from a unitary matrix.
pub const UNITARITY: f64 = 1e-10;

/// Allowed deviation of a state norm from one.
pub const STATE_NORM: f64 = 1e-12;

/// Allowed deviation of a density-operator trace from one.
pub const TRACE: f64 = 1e-10;

/// Most negative eigenvalue accepted from a positive-semidefinite operator.
pub const EIGENVALUE_FLOOR: f64 = -1e-10;

/// Largest probability mass a truncated coherent state may leave above the
/// Fock cutoff.
pub const COHERENT_TAIL: f64 = 1e-10;

/// Detection branches below this probability are dropped from protocol runs.
/// The value sits far below any physical branch weight but above the
/// `~1e-31` dirt produced by rounding in phase factors, so enumeration stays
/// deterministic without carrying dead branches.
pub const BRANCH_PRUNE: f64 = 1e-24;

/// Population allowed on an atomic level that an operation requires empty.
pub const LEVEL_EMPTY: f64 = 1e-12;
