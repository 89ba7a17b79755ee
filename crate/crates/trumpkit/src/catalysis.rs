//! Catalytic dominance: verification against a supplied catalyst and
//! the block-sum construction that turns any multi-copy witness into a
//! catalyst.
//!
//! If `x^{⊗n} ≺ y^{⊗n}` then
//! `z = x^{⊗(n-1)} ⊕ x^{⊗(n-2)}⊗y ⊕ … ⊕ y^{⊗(n-1)}`
//! is a catalyst for x ≺ y: both `x⊗z` and `y⊗z` decompose as the
//! power term plus the same remainder
//! `W = x^{⊗(n-1)}⊗y ⊕ … ⊕ x⊗y^{⊗(n-1)}`, so the power relation
//! transfers. The catalyst is deliberately left unnormalized (mass n
//! for unit-mass inputs): normalization is irrelevant to the verdict
//! and keeping the raw block sum makes the remainder identity exact.

use crate::error::{Error, Result};
use crate::majorize::{canonical_p_grid, majorizes, schur_test, MajorizationVerdict, SchurReport};
use crate::scalar::{eq_within, le_within, Scalar};
use crate::vecspace::{ProbVector, DEFAULT_EXPANDED_CAP};

/// A catalyst together with the verdict it produces.
///
/// `normalized` records whether `z` has unit mass; the construction
/// returns unnormalized catalysts and the flag makes that explicit.
#[derive(Debug, Clone)]
pub struct CatalystWitness<T> {
    pub n: u32,
    pub z: ProbVector<T>,
    pub verdict: MajorizationVerdict,
    pub normalized: bool,
}

/// Decides `x ⊗ z ≺ y ⊗ z` for a supplied catalyst `z`. The scale of
/// `z` is irrelevant to the verdict; `z` must have at least one
/// positive coordinate.
pub fn verify_catalysis<T: Scalar>(
    x: &ProbVector<T>,
    y: &ProbVector<T>,
    z: &ProbVector<T>,
    tol: &T,
) -> Result<MajorizationVerdict> {
    verify_catalysis_capped(x, y, z, tol, DEFAULT_EXPANDED_CAP)
}

pub fn verify_catalysis_capped<T: Scalar>(
    x: &ProbVector<T>,
    y: &ProbVector<T>,
    z: &ProbVector<T>,
    tol: &T,
    cap: u64,
) -> Result<MajorizationVerdict> {
    if z.support_size() == 0 {
        return Err(Error::Precondition(
            "catalyst must have a positive coordinate".into(),
        ));
    }
    let xz = x.tensor_capped(z, cap)?;
    let yz = y.tensor_capped(z, cap)?;
    Ok(majorizes(&xz, &yz, tol))
}

/// Expanded `v^{⊗k}` with `v^{⊗0} = (1)`.
fn tensor_power<T: Scalar>(v: &ProbVector<T>, k: u32, cap: u64) -> Result<ProbVector<T>> {
    let mut acc = ProbVector::weights(vec![T::one()])?;
    for _ in 0..k {
        acc = acc.tensor_capped(v, cap)?;
    }
    Ok(acc)
}

/// Builds the block-sum catalyst from a multi-copy witness at order n
/// and verifies it. Preconditions: n >= 1 and `x^{⊗n} ≺ y^{⊗n}`
/// (weak form for deficient x) — callers normally obtain n from
/// [`crate::multicopy::find_min_copies`].
pub fn build_catalyst<T: Scalar>(
    x: &ProbVector<T>,
    y: &ProbVector<T>,
    n: u32,
    tol: &T,
) -> Result<CatalystWitness<T>> {
    build_catalyst_capped(x, y, n, tol, DEFAULT_EXPANDED_CAP)
}

pub fn build_catalyst_capped<T: Scalar>(
    x: &ProbVector<T>,
    y: &ProbVector<T>,
    n: u32,
    tol: &T,
    cap: u64,
) -> Result<CatalystWitness<T>> {
    if n == 0 {
        return Err(Error::InvalidInput("witness order n must be positive".into()));
    }
    let power = crate::multicopy::mlocc_check(x, y, n, tol)?;
    if !power.holds {
        return Err(Error::Precondition(format!(
            "x^⊗{n} does not majorize into y^⊗{n}; no catalyst can be built at this order"
        )));
    }
    let mut z = ProbVector::weights(Vec::new())?;
    for k in 0..n {
        let block = tensor_power(x, n - 1 - k, cap)?.tensor_capped(&tensor_power(y, k, cap)?, cap)?;
        z = z.direct_sum(&block);
        if z.len() as u64 > cap {
            return Err(Error::DimensionCap {
                required: z.len().to_string(),
                cap,
            });
        }
    }
    let verdict = verify_catalysis_capped(x, y, &z, tol, cap)?;
    let normalized = eq_within(&z.mass(), &T::one(), &T::default_tolerance());
    Ok(CatalystWitness {
        n,
        z,
        verdict,
        normalized,
    })
}

/// Checks the remainder identity behind the construction at order n:
/// `x⊗z = x^{⊗n} ⊕ W` and `y⊗z = y^{⊗n} ⊕ W` as multisets, with
/// `W = ⊕_{j=1}^{n-1} x^{⊗(n-j)}⊗y^{⊗j}`. With the exact backend and
/// zero tolerance this is exact multiset subtraction.
pub fn w_identity<T: Scalar>(
    x: &ProbVector<T>,
    y: &ProbVector<T>,
    n: u32,
    tol: &T,
) -> Result<bool> {
    w_identity_capped(x, y, n, tol, DEFAULT_EXPANDED_CAP)
}

pub fn w_identity_capped<T: Scalar>(
    x: &ProbVector<T>,
    y: &ProbVector<T>,
    n: u32,
    tol: &T,
    cap: u64,
) -> Result<bool> {
    if n == 0 {
        return Err(Error::InvalidInput("witness order n must be positive".into()));
    }
    let mut z = ProbVector::weights(Vec::new())?;
    let mut w = ProbVector::weights(Vec::new())?;
    for k in 0..n {
        z = z.direct_sum(&tensor_power(x, n - 1 - k, cap)?.tensor_capped(&tensor_power(y, k, cap)?, cap)?);
    }
    for j in 1..n {
        w = w.direct_sum(&tensor_power(x, n - j, cap)?.tensor_capped(&tensor_power(y, j, cap)?, cap)?);
    }
    let xn = tensor_power(x, n, cap)?;
    let yn = tensor_power(y, n, cap)?;
    let left_x = x.tensor_capped(&z, cap)?;
    let left_y = y.tensor_capped(&z, cap)?;
    Ok(multiset_eq(&left_x, &xn.direct_sum(&w), tol)
        && multiset_eq(&left_y, &yn.direct_sum(&w), tol))
}

/// Multiset equality of the positive coordinates, up to tolerance on
/// each matched pair (exact when the tolerance is zero).
fn multiset_eq<T: Scalar>(a: &ProbVector<T>, b: &ProbVector<T>, tol: &T) -> bool {
    let mut av: Vec<&T> = a.coords().iter().filter(|c| !c.is_zero()).collect();
    let mut bv: Vec<&T> = b.coords().iter().filter(|c| !c.is_zero()).collect();
    if av.len() != bv.len() {
        return false;
    }
    av.sort_by(|p, q| q.partial_cmp(p).expect("validated coordinates"));
    bv.sort_by(|p, q| q.partial_cmp(p).expect("validated coordinates"));
    av.iter().zip(bv.iter()).all(|(p, q)| eq_within(*p, *q, tol))
}

/// Truncated geometric catalyst: `(1-α)/(1-α^K) · (1, α, …, α^{K-1})`,
/// normalized to unit mass. Requires `0 < α < 1` and `K >= 1`.
pub fn geometric_catalyst<T: Scalar>(alpha: &T, k: u32) -> Result<ProbVector<T>> {
    if k == 0 {
        return Err(Error::InvalidInput("geometric catalyst needs K >= 1".into()));
    }
    if alpha.is_zero() || alpha.is_negative() || *alpha >= T::one() {
        return Err(Error::Precondition(format!(
            "geometric ratio must satisfy 0 < α < 1, got {alpha}"
        )));
    }
    let scale = (T::one() - alpha.clone()) / (T::one() - alpha.pow_u32(k));
    let mut coords = Vec::with_capacity(k as usize);
    let mut power = T::one();
    for _ in 0..k {
        coords.push(scale.clone() * power.clone());
        power = power * alpha.clone();
    }
    ProbVector::new(coords)
}

/// Necessary-condition report for catalytic dominance of `x` by `y`.
///
/// The minima are the d-th largest coordinates after padding both
/// vectors to their common trimmed dimension d, zeros included: the
/// condition `x_d >= y_d` is necessary for membership in the
/// fixed-dimension catalytic closure, and is vacuous when y's d-th
/// coordinate is 0. A failing ℓp row excludes membership in the full
/// (any-dimension) closure.
#[derive(Debug, Clone)]
pub struct ObstructionReport {
    pub common_dim: usize,
    pub x_last: f64,
    pub y_last: f64,
    /// x_d < y_d: not in the closure of the fixed-dimension catalytic
    /// orbit of y.
    pub min_obstructed: bool,
    pub x_max: f64,
    pub y_max: f64,
    /// x_max > y_max: the p = ∞ comparison already fails.
    pub max_obstructed: bool,
    pub schur: SchurReport,
    /// Some ℓp row fails: not in the closure of the catalytic orbit in
    /// any dimension.
    pub closure_excluded: bool,
}

pub fn catalysis_obstructions<T: Scalar>(
    x: &ProbVector<T>,
    y: &ProbVector<T>,
    tol: &T,
) -> ObstructionReport {
    let d = x.trimmed_len().max(y.trimmed_len());
    let x_last_t = x.padded_min(d);
    let y_last_t = y.padded_min(d);
    let min_obstructed = !le_within(&y_last_t, &x_last_t, tol);
    let xf = x.to_f64();
    let yf = y.to_f64();
    let x_max = xf.max_coord().copied().unwrap_or(0.0);
    let y_max = yf.max_coord().copied().unwrap_or(0.0);
    let grid = canonical_p_grid(&xf, &yf);
    let schur = schur_test(&xf, &yf, &grid, &1e-9);
    let max_obstructed = x_max > y_max + 1e-9 * y_max.abs().max(1.0);
    let closure_excluded = !schur.all_ok;
    ObstructionReport {
        common_dim: d,
        x_last: x_last_t.to_f64_lossy(),
        y_last: y_last_t.to_f64_lossy(),
        min_obstructed,
        x_max,
        y_max,
        max_obstructed,
        schur,
        closure_excluded,
    }
}
