use thiserror::Error;

/// Errors reported by the analysis routines.
///
/// Every public entry point validates its inputs and returns one of these
/// instead of panicking; panics are reserved for broken internal invariants.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A probability-like argument fell outside its allowed range.
    #[error("{name} = {value} out of range ({requirement})")]
    OutOfRange {
        name: &'static str,
        value: f64,
        requirement: &'static str,
    },

    /// A repetition length or code dimension must be an odd positive integer.
    #[error("{name} = {value} must be an odd positive integer")]
    NotOddPositive { name: &'static str, value: u64 },

    /// A count or length that must be strictly positive was zero.
    #[error("{name} must be at least {min}, got {value}")]
    TooSmall {
        name: &'static str,
        value: u64,
        min: u64,
    },

    /// Problem size exceeds a hard enumeration cap.
    #[error("{name} = {value} exceeds the supported cap {cap}")]
    ExceedsCap {
        name: &'static str,
        value: u64,
        cap: u64,
    },

    /// Grid dimensions do not match the code shape.
    #[error("grid is {got_rows}x{got_cols} but the code shape requires {want_rows}x{want_cols}")]
    ShapeMismatch {
        got_rows: usize,
        got_cols: usize,
        want_rows: usize,
        want_cols: usize,
    },

    /// The geometric series in the failure-rate bound does not converge.
    #[error("failure-rate bound diverges: 4*mu^2*exp(2*beta/m)*p*(1-p) = {argument} >= 1")]
    DivergentBound { argument: f64 },

    /// The integer search window contains no admissible dimensions.
    #[error("search window is empty: {detail}")]
    EmptyWindow { detail: String },

    /// An internal consistency check failed; indicates a bug, not bad input.
    #[error("internal assertion failed: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
