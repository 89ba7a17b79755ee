//! Crate error type and result alias.

use thiserror::Error;

/// Everything that can go wrong while validating inputs or running a
/// decision procedure.
#[derive(Debug, Error)]
pub enum Error {
    /// A coordinate was negative or non-finite.
    #[error("invalid coordinate at index {index}: {value}")]
    InvalidCoordinate { index: usize, value: String },

    /// A probability vector's total mass exceeds 1 beyond tolerance.
    #[error("total mass {mass} exceeds 1 beyond tolerance")]
    MassExceedsOne { mass: String },

    /// An expansion would produce more coordinates than the configured cap.
    #[error("expanded dimension {required} exceeds cap {cap}")]
    DimensionCap { required: String, cap: u64 },

    /// A compressed spectrum would hold more distinct entries than the cap.
    #[error("spectrum would need {required} multiset entries, cap is {cap}")]
    SpectrumCap { required: String, cap: u64 },

    /// `p = 0` is outside the admissible exponent range.
    #[error("p = 0 is not an admissible exponent")]
    ZeroExponent,

    /// An `eps` argument fell outside its admissible open interval.
    #[error("eps = {eps} outside admissible range (0, {limit})")]
    EpsilonRange { eps: String, limit: String },

    /// A tail location `t` fell outside the admissible window.
    #[error("t = {t} outside admissible window [{lo}, {hi})")]
    TailWindow { t: String, lo: String, hi: String },

    /// A documented precondition of the called operation does not hold.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// Every `p` in the canonical grid must satisfy the norm inequality
    /// before a copy search or approximation can succeed; some `p` failed.
    #[error("lp-norm obstruction at p = {p}: {x_norm} > {y_norm}")]
    NormObstruction { p: f64, x_norm: f64, y_norm: f64 },

    /// A copy-count sweep reached its bound without finding a witness.
    #[error("no admissible copy count up to n = {n_max}{}", hint_suffix(.hint))]
    CopySearchExhausted { n_max: u32, hint: Option<u32> },

    /// Malformed input (CLI arguments, instance files, parameter maps).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The exact-backend re-run of a positive verdict disagreed.
    #[error("exact verification disagreed: {0}")]
    VerificationFailed(String),
}

fn hint_suffix(hint: &Option<u32>) -> String {
    match hint {
        Some(n) => format!(" (tail asymptotics suggest n ~ {n})"),
        None => String::new(),
    }
}

pub type Result<T> = std::result::Result<T, Error>;
