//! The constructive approximation: given ℓp dominance of x by y,
//! produce a nearby vector that a finite tensor power genuinely
//! majorizes into y's power.
//!
//! The pipeline mirrors the three-step construction: *shave* ε/(2d_x)
//! off every positive coordinate of x (making all the norm inequalities
//! strict), *sweep* for a copy count n with `x'^{⊗n} ≺_w y^{⊗n}`, then
//! *pad* x' with D copies of a dust value δ (δ·D = ε/2) small enough
//! that the dust never disturbs the top of the power spectrum. The
//! result x_ε = x' ⊕ δ^{⊕D} satisfies `x_ε^{⊗n} ≺ y^{⊗n}` exactly and
//! `‖x − x_ε‖₁ = ε`.
//!
//! D is frequently astronomical; the padded vector is therefore kept
//! symbolic (head + dust run) and its powers are compared purely in
//! compressed spectral form.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::ldp;
use crate::majorize::{
    canonical_p_grid, majorizes_spectra, schur_test, submajorizes_spectra, MajorizationVerdict,
};
use crate::multicopy::power_spectrum_capped;
use crate::scalar::{eq_within, Scalar};
use crate::vecspace::{
    ProbVector, RawEntry, WeightedSpectrum, DEFAULT_SPECTRUM_CAP,
};

/// A run of `count` equal coordinates of value `value`, kept symbolic.
#[derive(Debug, Clone)]
pub struct DustPadding<T> {
    pub value: T,
    pub count: BigUint,
}

/// `head ⊕ dust^{⊕count}` without materializing the dust run.
#[derive(Debug, Clone)]
pub struct PaddedVector<T> {
    pub head: ProbVector<T>,
    pub dust: DustPadding<T>,
}

impl<T: Scalar> PaddedVector<T> {
    pub fn mass(&self) -> T {
        self.head.mass() + self.dust.value.mul_count(&self.dust.count)
    }

    /// Expanded coordinate count (head length plus dust count).
    pub fn total_len(&self) -> BigUint {
        BigUint::from(self.head.len()) + &self.dust.count
    }

    /// Materializes the padded vector; only possible for small D.
    pub fn expand(&self, cap: u64) -> Result<ProbVector<T>> {
        let total = self.total_len();
        if total > BigUint::from(cap) {
            return Err(Error::DimensionCap {
                required: total.to_string(),
                cap,
            });
        }
        let reps = usize::try_from(&self.dust.count).expect("under cap");
        let dust = ProbVector::weights(vec![self.dust.value.clone(); reps])?;
        Ok(self.head.direct_sum(&dust))
    }

    /// Compressed spectrum of `(head ⊕ dust^{⊕D})^{⊗n}`, grouped by
    /// dust degree: the block at degree j consists of the entries of
    /// `head^{⊗(n-j)}`, each value multiplied by δ^j, each
    /// multiplicity by `C(n,j)·D^j`. Masses are computed in grouped
    /// form `mass · C(n,j) · (δD)^j`, which stays in float range even
    /// when δ^j underflows and D^j is astronomical.
    pub fn power_spectrum(&self, n: u32, cap: u64) -> Result<WeightedSpectrum<T>> {
        if n == 0 {
            return Err(Error::InvalidInput("copy count n must be positive".into()));
        }
        let delta = &self.dust.value;
        let log_delta = delta.ln_lossy();
        let dust_count_t = T::from_biguint(&self.dust.count);
        let dust_block_mass = delta.clone() * dust_count_t; // δ·D, moderate by construction
        let mut raw: Vec<RawEntry<T>> = Vec::new();
        for j in 0..=n {
            let head_power = n - j;
            let head_spec = if head_power == 0 {
                WeightedSpectrum::unit()
            } else {
                power_spectrum_capped(&self.head, head_power, cap)?.spectrum
            };
            let binom = binomial(n, j);
            let binom_t = T::from_biguint(&binom);
            let dust_factor = dust_block_mass.pow_u32(j); // (δD)^j
            let delta_pow = delta.pow_u32(j); // may underflow in float; log key below is authoritative
            let count_factor = &binom * self.dust.count.pow(j);
            for e in head_spec.entries() {
                let value = e.value.clone() * delta_pow.clone();
                let log_value = e.log_value + f64::from(j) * log_delta;
                let count = &e.count * &count_factor;
                let mass = e.mass.clone() * binom_t.clone() * dust_factor.clone();
                raw.push(RawEntry {
                    value,
                    log_value,
                    count,
                    mass,
                });
                if raw.len() as u64 > cap {
                    return Err(Error::SpectrumCap {
                        required: format!("more than {}", raw.len()),
                        cap,
                    });
                }
            }
        }
        Ok(WeightedSpectrum::from_raw_entries(raw))
    }
}

fn binomial(n: u32, k: u32) -> BigUint {
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// Subtracts ε/(2·d_x) from every strictly positive coordinate, where
/// d_x is the support size. Requires `0 < ε < 2·d_x·x_min` so the
/// result stays strictly positive on the support; its mass is
/// `mass(x) − ε/2`, and all non-strict ℓp inequalities against any
/// fixed y become strict.
pub fn shave<T: Scalar>(x: &ProbVector<T>, eps: &T) -> Result<ProbVector<T>> {
    let support = x.support_size();
    let Some(x_min) = x.min_positive() else {
        return Err(Error::Precondition(
            "cannot shave a vector with empty support".into(),
        ));
    };
    let d_x = T::from_f64_lossy(support as f64).expect("support fits");
    let limit = (T::one() + T::one()) * d_x.clone() * x_min.clone();
    if eps.is_zero() || eps.is_negative() || *eps >= limit {
        return Err(Error::EpsilonRange {
            eps: eps.to_string(),
            limit: limit.to_string(),
        });
    }
    let cut = eps.clone() / ((T::one() + T::one()) * d_x);
    let coords = x
        .coords()
        .iter()
        .map(|c| {
            if c.is_zero() {
                T::zero()
            } else {
                c.clone() - cut.clone()
            }
        })
        .collect();
    ProbVector::new(coords)
}

/// Output of [`pad_with_dust`]: the dust value δ, its multiplicity D,
/// the symbolic padded vector, and the verified power verdict.
#[derive(Debug, Clone)]
pub struct PadOutcome<T> {
    pub delta: T,
    pub dust_count: BigUint,
    pub x_eps: PaddedVector<T>,
    pub verdict: MajorizationVerdict,
}

/// Pads `x'` with `D` coordinates of value `δ = (ε/2)/D`, taking the
/// largest δ of that form satisfying the dust bound
/// `δ·(x'_max)^{n-1} <= min((x'_min)^n, (y_min)^n)`, and re-verifies
/// `x_ε^{⊗n} ≺ y^{⊗n}` on compressed spectra. Requires the weak power
/// relation `x'^{⊗n} ≺_w y^{⊗n}` (it is re-checked).
pub fn pad_with_dust<T: Scalar>(
    x_prime: &ProbVector<T>,
    y: &ProbVector<T>,
    n: u32,
    eps: &T,
    tol: &T,
) -> Result<PadOutcome<T>> {
    pad_with_dust_capped(x_prime, y, n, eps, tol, DEFAULT_SPECTRUM_CAP)
}

pub fn pad_with_dust_capped<T: Scalar>(
    x_prime: &ProbVector<T>,
    y: &ProbVector<T>,
    n: u32,
    eps: &T,
    tol: &T,
    cap: u64,
) -> Result<PadOutcome<T>> {
    if n == 0 {
        return Err(Error::InvalidInput("copy count n must be positive".into()));
    }
    if eps.is_zero() || eps.is_negative() {
        return Err(Error::EpsilonRange {
            eps: eps.to_string(),
            limit: "∞".into(),
        });
    }
    let (Some(xp_min), Some(xp_max), Some(y_min)) =
        (x_prime.min_positive(), x_prime.max_coord(), y.min_positive())
    else {
        return Err(Error::Precondition(
            "padding needs positive support on both vectors".into(),
        ));
    };
    let py = power_spectrum_capped(y, n, cap)?.spectrum;
    let px = power_spectrum_capped(x_prime, n, cap)?.spectrum;
    let weak = submajorizes_spectra(&px, &py, tol);
    if !weak.holds {
        return Err(Error::Precondition(format!(
            "x'^⊗{n} is not weakly majorized by y^⊗{n} (violation at {:?})",
            weak.first_violation
        )));
    }

    let xp_min_n = xp_min.pow_u32(n);
    let y_min_n = y_min.pow_u32(n);
    let numerator = if xp_min_n < y_min_n { xp_min_n } else { y_min_n };
    let delta_bound = numerator / xp_max.pow_u32(n - 1);
    let half_eps = eps.clone() / (T::one() + T::one());
    let Some(mut dust_count) = (half_eps.clone() / delta_bound.clone()).ceil_to_biguint() else {
        return Err(Error::Precondition(
            "dust bound underflowed the float range; use the exact backend for this n".into(),
        ));
    };
    if dust_count.is_zero() {
        dust_count = BigUint::one();
    }
    // Float ceilings can land a hair below the true quotient; nudge D
    // up until δ = (ε/2)/D actually satisfies the bound.
    let mut delta = half_eps.clone() / T::from_biguint(&dust_count);
    while delta > delta_bound {
        dust_count += BigUint::one();
        delta = half_eps.clone() / T::from_biguint(&dust_count);
    }

    let x_eps = PaddedVector {
        head: x_prime.clone(),
        dust: DustPadding {
            value: delta.clone(),
            count: dust_count.clone(),
        },
    };
    let padded_spec = x_eps.power_spectrum(n, cap)?;
    let verdict = majorizes_spectra(&padded_spec, &py, tol);
    Ok(PadOutcome {
        delta,
        dust_count,
        x_eps,
        verdict,
    })
}

/// Full witness returned by [`approximate`].
#[derive(Debug, Clone)]
pub struct ApproximationResult<T> {
    pub x_prime: ProbVector<T>,
    pub n: u32,
    pub delta: T,
    pub dust_count: BigUint,
    pub x_eps: PaddedVector<T>,
    pub l1_error: T,
    pub verdict: MajorizationVerdict,
    /// Verdicts of the copy counts that failed before `n`.
    pub attempts: Vec<(u32, MajorizationVerdict)>,
}

/// The (c)⇒(a) construction: assuming every canonical-grid ℓp
/// comparison passes, chains shave → copy-count sweep → dust padding
/// into a verified witness with `‖x − x_ε‖₁ = ε`. `x` and `y` must be
/// unit-mass probability vectors.
pub fn approximate<T: Scalar>(
    x: &ProbVector<T>,
    y: &ProbVector<T>,
    eps: &T,
    n_max: u32,
    tol: &T,
) -> Result<ApproximationResult<T>> {
    approximate_capped(x, y, eps, n_max, tol, DEFAULT_SPECTRUM_CAP)
}

pub fn approximate_capped<T: Scalar>(
    x: &ProbVector<T>,
    y: &ProbVector<T>,
    eps: &T,
    n_max: u32,
    tol: &T,
    cap: u64,
) -> Result<ApproximationResult<T>> {
    if n_max == 0 {
        return Err(Error::InvalidInput("nMax must be positive".into()));
    }
    let one = T::one();
    if !eq_within(&x.mass(), &one, tol) || !eq_within(&y.mass(), &one, tol) {
        return Err(Error::Precondition(
            "approximation requires unit-mass probability vectors".into(),
        ));
    }
    // Condition (c): the ℓp filter on the canonical grid, evaluated in
    // float arithmetic (it is a gate, not a certificate).
    let xf = x.to_f64();
    let yf = y.to_f64();
    let grid = canonical_p_grid(&xf, &yf);
    let report = schur_test(&xf, &yf, &grid, &f64::default_tolerance());
    if let Some(row) = report.first_failure() {
        return Err(Error::NormObstruction {
            p: row.p,
            x_norm: row.x_norm,
            y_norm: row.y_norm,
        });
    }

    let x_prime = shave(x, eps)?;
    let mut attempts: Vec<(u32, MajorizationVerdict)> = Vec::new();
    for n in 1..=n_max {
        let px = power_spectrum_capped(&x_prime, n, cap)?.spectrum;
        let py = power_spectrum_capped(y, n, cap)?.spectrum;
        let weak = submajorizes_spectra(&px, &py, tol);
        if !weak.holds {
            attempts.push((n, weak));
            continue;
        }
        let outcome = pad_with_dust_capped(&x_prime, y, n, eps, tol, cap)?;
        if !outcome.verdict.holds {
            attempts.push((n, outcome.verdict));
            continue;
        }
        let l1_error =
            (x.mass() - x_prime.mass()) + outcome.delta.mul_count(&outcome.dust_count);
        return Ok(ApproximationResult {
            x_prime,
            n,
            delta: outcome.delta,
            dust_count: outcome.dust_count,
            x_eps: outcome.x_eps,
            l1_error,
            verdict: outcome.verdict,
            attempts,
        });
    }

    // Ask the tail asymptotics for a rough n, as a hint in the error.
    let hint = copy_count_hint(&shave(&xf, &eps.to_f64_lossy()).unwrap_or(xf), &yf, n_max);
    Err(Error::CopySearchExhausted { n_max, hint })
}

pub(crate) fn copy_count_hint(x_prime: &ProbVector<f64>, y: &ProbVector<f64>, n_max: u32) -> Option<u32> {
    let t_grid = ldp::default_t_grid(x_prime, y);
    let mut n_grid = Vec::new();
    let mut n = n_max.saturating_mul(2);
    while n <= 512 && n_grid.len() < 8 {
        n_grid.push(n);
        n = n.saturating_mul(2);
    }
    ldp::predict_copies(x_prime, y, &n_grid, &t_grid)
        .ok()
        .flatten()
}
