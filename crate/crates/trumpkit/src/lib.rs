//! Decision procedures and constructive witnesses for the ordering
//! relations on finitely supported probability vectors: majorization
//! (`≺`), weak submajorization (`≺_w`), multi-copy dominance
//! (`x^{⊗n} ≺ y^{⊗n}`), and catalytic dominance (`x ⊗ z ≺ y ⊗ z`).
//!
//! The centerpiece is the constructive equivalence between ℓp-norm
//! dominance and approximability: whenever `‖x‖_p ≤ ‖y‖_p` holds for
//! every `p ≥ 1`, [`closure::approximate`] produces, for any ε, a
//! vector `x_ε` with `‖x − x_ε‖₁ = ε` together with a copy count n
//! and a verified certificate `x_ε^{⊗n} ≺ y^{⊗n}`; [`catalysis`]
//! turns any such power relation into an explicit catalyst. Tensor
//! powers are never expanded coordinate-by-coordinate — all
//! comparisons run on run-length-compressed spectra whose
//! multiplicities are exact big integers, so dimensions like
//! `(d + D)^{48}` with astronomically large dust counts D stay cheap.
//!
//! Everything is generic over the scalar: `f64`/`f32` for fast
//! tolerance-based verdicts, `BigRational` for exact certificates.
//! The crate-root aliases pick the common instantiations.

pub mod catalysis;
pub mod cli;
pub mod closure;
pub mod criteria;
pub mod emit;
pub mod error;
pub mod ldp;
pub mod majorize;
pub mod multicopy;
pub mod scalar;
pub mod vecspace;

pub use error::{Error, Result};

/// Probability vector over `f64`, the default working backend.
pub type Prob = vecspace::ProbVector<f64>;

/// Probability vector over `f32`.
pub type Prob32 = vecspace::ProbVector<f32>;

/// Probability vector over exact rationals; verdicts need no
/// tolerance and double as certificates.
pub type ProbExact = vecspace::ProbVector<num_rational::BigRational>;

/// Compressed value spectrum over `f64`.
pub type Spectrum = vecspace::WeightedSpectrum<f64>;

/// Compressed value spectrum over exact rationals.
pub type SpectrumExact = vecspace::WeightedSpectrum<num_rational::BigRational>;
