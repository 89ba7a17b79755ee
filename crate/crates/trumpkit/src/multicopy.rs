//! Tensor powers in compressed form and the multi-copy (MLOCC)
//! dominance tests built on them.
//!
//! The n-th tensor power of a vector with s distinct positive values
//! w_1 > … > w_s (multiplicities r_i) has spectrum
//! `Π w_i^{k_i}` with multiplicity `multinomial(n; k) · Π r_i^{k_i}`,
//! one entry per composition k of n into s parts. The compressed
//! representation therefore holds at most C(n+s-1, s-1) entries while
//! the expanded dimension d^n may be astronomical; multiplicities are
//! big integers throughout.

use num_bigint::BigUint;
use num_traits::One;

use crate::error::{Error, Result};
use crate::majorize::{
    canonical_p_grid, majorizes_spectra, schur_test, submajorizes_spectra, MajorizationVerdict,
    SchurReport,
};
use crate::scalar::{eq_within, Scalar};
use crate::vecspace::{
    stable_mass, ProbVector, RawEntry, WeightedSpectrum, DEFAULT_SPECTRUM_CAP,
};

/// A tensor power `base^{⊗n}` in compressed spectral form.
#[derive(Debug, Clone)]
pub struct PowerSpectrum<T> {
    pub base: ProbVector<T>,
    pub n: u32,
    pub spectrum: WeightedSpectrum<T>,
}

/// Number of compositions of n into s nonnegative parts,
/// C(n+s-1, s-1), saturating at `u128::MAX` on overflow.
fn composition_count(n: u32, s: u32) -> u128 {
    if s == 0 {
        return if n == 0 { 1 } else { 0 };
    }
    // C(n+s-1, s-1) multiplicatively, keeping intermediate results exact.
    let top = u128::from(n) + u128::from(s) - 1;
    let k = u128::from(s) - 1;
    let k = k.min(top - k);
    let mut acc: u128 = 1;
    for i in 1..=k {
        acc = match acc.checked_mul(top - k + i) {
            Some(v) => v / i,
            None => return u128::MAX,
        };
    }
    acc
}

fn factorials(n: u32) -> Vec<BigUint> {
    let mut f = Vec::with_capacity(n as usize + 1);
    f.push(BigUint::one());
    for i in 1..=n {
        let next = f.last().expect("nonempty") * BigUint::from(i);
        f.push(next);
    }
    f
}

/// Compressed spectrum of `x^{⊗n}` under an explicit entry cap.
pub fn power_spectrum_capped<T: Scalar>(
    x: &ProbVector<T>,
    n: u32,
    cap: u64,
) -> Result<PowerSpectrum<T>> {
    if n == 0 {
        return Err(Error::InvalidInput("copy count n must be positive".into()));
    }
    let base_spectrum = WeightedSpectrum::from_vector(x);
    let s = base_spectrum.len() as u32;
    let mult = composition_count(n, s);
    if mult > u128::from(cap) {
        return Err(Error::SpectrumCap {
            required: mult.to_string(),
            cap,
        });
    }
    let groups: Vec<(T, f64, BigUint)> = base_spectrum
        .entries()
        .iter()
        .map(|e| (e.value.clone(), e.log_value, e.count.clone()))
        .collect();
    let fact = factorials(n);
    let mut raw: Vec<RawEntry<T>> = Vec::with_capacity(mult as usize);
    let mut k = vec![0u32; groups.len()];
    enumerate_compositions(n, 0, &mut k, &mut |k| {
        raw.push(composition_entry(&groups, &fact, n, k));
    });
    let spectrum = WeightedSpectrum::from_raw_entries(raw);
    debug_assert_eq!(
        *spectrum.total_count(),
        BigUint::from(x.support_size()).pow(n),
        "power spectrum multiplicity must be support^n"
    );
    Ok(PowerSpectrum {
        base: x.clone(),
        n,
        spectrum,
    })
}

/// Compressed spectrum of `x^{⊗n}` under the default entry cap.
pub fn power_spectrum<T: Scalar>(x: &ProbVector<T>, n: u32) -> Result<PowerSpectrum<T>> {
    power_spectrum_capped(x, n, DEFAULT_SPECTRUM_CAP)
}

/// Visits every composition of `n` into `k.len()` parts, largest-first
/// in the leading slot (reverse-lexicographic), calling `visit` with
/// each filled composition.
fn enumerate_compositions(n: u32, slot: usize, k: &mut [u32], visit: &mut impl FnMut(&[u32])) {
    if slot + 1 == k.len() {
        k[slot] = n;
        visit(k);
        return;
    }
    if k.is_empty() {
        if n == 0 {
            visit(k);
        }
        return;
    }
    for take in (0..=n).rev() {
        k[slot] = take;
        enumerate_compositions(n - take, slot + 1, k, visit);
    }
}

fn composition_entry<T: Scalar>(
    groups: &[(T, f64, BigUint)],
    fact: &[BigUint],
    n: u32,
    k: &[u32],
) -> RawEntry<T> {
    let mut value = T::one();
    let mut log_value = 0.0f64;
    let mut count = fact[n as usize].clone();
    for (i, &ki) in k.iter().enumerate() {
        if ki == 0 {
            continue;
        }
        let (w, log_w, r) = &groups[i];
        value = value * w.pow_u32(ki);
        log_value += f64::from(ki) * log_w;
        count /= &fact[ki as usize];
        count *= r.pow(ki);
    }
    let mass = stable_mass(&value, log_value, &count);
    RawEntry {
        value,
        log_value,
        count,
        mass,
    }
}

/// Multi-copy dominance at a fixed copy count: `x^{⊗n} ≺ y^{⊗n}` when
/// the masses agree (within tolerance), `x^{⊗n} ≺_w y^{⊗n}` when `x`
/// is deficient. Decided entirely on compressed spectra.
pub fn mlocc_check<T: Scalar>(
    x: &ProbVector<T>,
    y: &ProbVector<T>,
    n: u32,
    tol: &T,
) -> Result<MajorizationVerdict> {
    mlocc_check_capped(x, y, n, tol, DEFAULT_SPECTRUM_CAP)
}

pub fn mlocc_check_capped<T: Scalar>(
    x: &ProbVector<T>,
    y: &ProbVector<T>,
    n: u32,
    tol: &T,
    cap: u64,
) -> Result<MajorizationVerdict> {
    let px = power_spectrum_capped(x, n, cap)?;
    let py = power_spectrum_capped(y, n, cap)?;
    let verdict = if eq_within(&x.mass(), &y.mass(), tol) {
        majorizes_spectra(&px.spectrum, &py.spectrum, tol)
    } else {
        submajorizes_spectra(&px.spectrum, &py.spectrum, tol)
    };
    Ok(verdict)
}

/// Outcome of a copy-count search.
#[derive(Debug, Clone)]
pub enum CopySearchOutcome {
    /// Smallest n in [1, n_max] whose power check holds.
    Found { n: u32, verdict: MajorizationVerdict },
    /// An ℓp-norm comparison failed, so no n can ever work.
    NormObstruction { report: SchurReport },
    /// Every n up to the bound failed; the last verdict is kept for
    /// diagnostics. `hint` may carry a tail-asymptotics estimate filled
    /// in by callers with access to the LDP machinery.
    Exhausted {
        n_max: u32,
        last_verdict: Option<MajorizationVerdict>,
        hint: Option<u32>,
    },
}

impl CopySearchOutcome {
    pub fn found_n(&self) -> Option<u32> {
        match self {
            CopySearchOutcome::Found { n, .. } => Some(*n),
            _ => None,
        }
    }
}

/// Smallest copy count n <= n_max with `x^{⊗n} ≺ y^{⊗n}` (weak form
/// for deficient x). Runs the ℓp filter first: a strict norm failure
/// certifies that no copy count can ever succeed, so the sweep is
/// skipped. By construction the result is 1 exactly when x ≺ y.
pub fn find_min_copies<T: Scalar>(
    x: &ProbVector<T>,
    y: &ProbVector<T>,
    n_max: u32,
    tol: &T,
) -> Result<CopySearchOutcome> {
    find_min_copies_capped(x, y, n_max, tol, DEFAULT_SPECTRUM_CAP)
}

pub fn find_min_copies_capped<T: Scalar>(
    x: &ProbVector<T>,
    y: &ProbVector<T>,
    n_max: u32,
    tol: &T,
    cap: u64,
) -> Result<CopySearchOutcome> {
    // The filter is evaluated in float arithmetic regardless of the
    // backend: it only ever rules candidates out, and boundary cases it
    // lets through are settled by the exact sweep below.
    let xf = x.to_f64();
    let yf = y.to_f64();
    let grid = canonical_p_grid(&xf, &yf);
    let report = schur_test(&xf, &yf, &grid, &f64::default_tolerance());
    if !report.all_ok {
        return Ok(CopySearchOutcome::NormObstruction { report });
    }
    let mut last_verdict = None;
    for n in 1..=n_max {
        let verdict = mlocc_check_capped(x, y, n, tol, cap).map_err(|e| match e {
            Error::SpectrumCap { required, cap } => Error::Precondition(format!(
                "spectrum cap exceeded at n = {n}: would need {required} entries, cap {cap}"
            )),
            other => other,
        })?;
        if verdict.holds {
            return Ok(CopySearchOutcome::Found { n, verdict });
        }
        last_verdict = Some(verdict);
    }
    Ok(CopySearchOutcome::Exhausted {
        n_max,
        last_verdict,
        hint: None,
    })
}
