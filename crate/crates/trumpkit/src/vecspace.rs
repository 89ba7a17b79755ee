//! Probability vectors and run-length-compressed weighted spectra.
//!
//! A [`ProbVector`] is a finitely supported nonnegative vector with
//! total mass at most 1; vectors with mass strictly below 1 are legal
//! ("deficient") and arise from shaving. Trailing zeros never matter:
//! two vectors differing only by appended zeros compare equal, which is
//! the canonical inclusion of dimension d into dimension d+1.
//!
//! A [`WeightedSpectrum`] stores the multiset of positive coordinates
//! as (value, multiplicity) runs with big-integer multiplicities, so
//! tensor powers whose expanded dimension is astronomical remain
//! manipulable. Every entry also carries its natural log; the float
//! backend orders and merges entries by log value (relative tolerance
//! `1e-12`), which keeps ordering stable even when extreme dust values
//! underflow `f64`, while the exact backend orders and merges by exact
//! value equality.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{RealScalar, Scalar};

/// Expanded-coordinate cap for materializing tensor products.
pub const DEFAULT_EXPANDED_CAP: u64 = 10_000_000;

/// Cap on distinct multiset entries a compressed power spectrum may hold.
pub const DEFAULT_SPECTRUM_CAP: u64 = 5_000_000;

/// Default bound for copy-count sweeps.
pub const DEFAULT_N_MAX: u32 = 12;

/// Finitely supported nonnegative vector; mass at most 1 when built
/// with [`ProbVector::new`], arbitrary nonnegative mass when built with
/// [`ProbVector::weights`] (catalysts, singular-value vectors).
#[derive(Debug, Clone)]
pub struct ProbVector<T> {
    coords: Vec<T>,
}

impl<T: Scalar> ProbVector<T> {
    /// Validates a probability vector: coordinates nonnegative and
    /// finite, total mass at most `1` up to the backend tolerance.
    pub fn new(coords: Vec<T>) -> Result<Self> {
        let v = Self::weights(coords)?;
        let mass = v.mass();
        let limit = T::one() + T::default_tolerance();
        if mass > limit {
            return Err(Error::MassExceedsOne {
                mass: mass.to_string(),
            });
        }
        Ok(v)
    }

    /// Validates only nonnegativity; the mass may be anything. Used for
    /// unnormalized catalysts and Ky Fan inputs.
    pub fn weights(coords: Vec<T>) -> Result<Self> {
        for (index, c) in coords.iter().enumerate() {
            if !c.is_valid() || c.is_negative() {
                return Err(Error::InvalidCoordinate {
                    index,
                    value: c.to_string(),
                });
            }
        }
        Ok(Self { coords })
    }

    /// Builds a probability vector from `f64` literals.
    pub fn from_f64s(values: &[f64]) -> Result<Self> {
        let coords = values
            .iter()
            .enumerate()
            .map(|(index, &v)| {
                T::from_f64_lossy(v).ok_or(Error::InvalidCoordinate {
                    index,
                    value: v.to_string(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(coords)
    }

    pub fn coords(&self) -> &[T] {
        &self.coords
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    /// Length with trailing zeros stripped (the canonical dimension).
    pub fn trimmed_len(&self) -> usize {
        let mut n = self.coords.len();
        while n > 0 && self.coords[n - 1].is_zero() {
            n -= 1;
        }
        n
    }

    /// Number of strictly positive coordinates.
    pub fn support_size(&self) -> usize {
        self.coords.iter().filter(|c| !c.is_zero()).count()
    }

    pub fn mass(&self) -> T {
        let mut acc = T::zero();
        for c in &self.coords {
            acc = acc + c.clone();
        }
        acc
    }

    /// Largest coordinate, if any coordinate is positive.
    pub fn max_coord(&self) -> Option<&T> {
        self.coords
            .iter()
            .filter(|c| !c.is_zero())
            .max_by(|a, b| a.partial_cmp(b).expect("validated coordinates"))
    }

    /// Smallest strictly positive coordinate.
    pub fn min_positive(&self) -> Option<&T> {
        self.coords
            .iter()
            .filter(|c| !c.is_zero())
            .min_by(|a, b| a.partial_cmp(b).expect("validated coordinates"))
    }

    /// The d-th largest coordinate counting zeros, where d is the
    /// common trimmed dimension of `self` and `other`. This is the
    /// "smallest coordinate" relevant to fixed-dimension obstructions:
    /// it is zero whenever the vector has fewer positive coordinates
    /// than the partner needs.
    pub fn padded_min(&self, common_dim: usize) -> T {
        if common_dim == 0 {
            return T::zero();
        }
        let sorted = self.sorted_desc();
        sorted
            .coords
            .get(common_dim - 1)
            .cloned()
            .unwrap_or_else(T::zero)
    }

    /// Coordinates in nonincreasing order (the decreasing rearrangement).
    pub fn sorted_desc(&self) -> Self {
        let mut coords = self.coords.clone();
        coords.sort_by(|a, b| b.partial_cmp(a).expect("validated coordinates"));
        Self { coords }
    }

    /// Tensor product, output in nonincreasing order. Guards the
    /// expanded dimension against `cap`.
    pub fn tensor_capped(&self, other: &Self, cap: u64) -> Result<Self> {
        let required = self.coords.len() as u128 * other.coords.len() as u128;
        if required > u128::from(cap) {
            return Err(Error::DimensionCap {
                required: required.to_string(),
                cap,
            });
        }
        let mut coords = Vec::with_capacity(required as usize);
        for a in &self.coords {
            for b in &other.coords {
                coords.push(a.clone() * b.clone());
            }
        }
        coords.sort_by(|a, b| b.partial_cmp(a).expect("validated coordinates"));
        Ok(Self { coords })
    }

    /// Tensor product under the default expanded-dimension cap.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        self.tensor_capped(other, DEFAULT_EXPANDED_CAP)
    }

    /// Direct sum: plain concatenation, no reordering.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let mut coords = self.coords.clone();
        coords.extend(other.coords.iter().cloned());
        Self { coords }
    }

    /// Pointwise scaling by a positive factor.
    pub fn scaled(&self, factor: &T) -> Result<Self> {
        if factor.is_negative() || factor.is_zero() || !factor.is_valid() {
            return Err(Error::Precondition(format!(
                "scale factor must be positive, got {factor}"
            )));
        }
        Self::weights(self.coords.iter().map(|c| c.clone() * factor.clone()).collect())
    }

    /// Rescales to total mass 1. Errors on the zero vector.
    pub fn normalized(&self) -> Result<Self> {
        let mass = self.mass();
        if mass.is_zero() {
            return Err(Error::Precondition(
                "cannot normalize the zero vector".into(),
            ));
        }
        Self::weights(self.coords.iter().map(|c| c.clone() / mass.clone()).collect())
    }

    /// Exact lift: every finite float coordinate becomes the dyadic
    /// rational it denotes.
    pub fn to_exact(&self) -> ProbVector<BigRational> {
        ProbVector {
            coords: self.coords.iter().map(Scalar::to_exact).collect(),
        }
    }

    /// Nearest-`f64` view for diagnostics and analytic filters.
    pub fn to_f64(&self) -> ProbVector<f64> {
        ProbVector {
            coords: self.coords.iter().map(Scalar::to_f64_lossy).collect(),
        }
    }
}

impl<T: Scalar> PartialEq for ProbVector<T> {
    /// Equality modulo trailing zeros (the canonical inclusion).
    fn eq(&self, other: &Self) -> bool {
        let a = &self.coords[..self.trimmed_len()];
        let b = &other.coords[..other.trimmed_len()];
        a == b
    }
}

/// ℓp norm value together with the positive-support size used for it.
#[derive(Debug, Clone, PartialEq)]
pub struct LpNorm<T> {
    pub value: T,
    pub support: usize,
}

/// The ℓp norm `(Σ x_i^p)^{1/p}` over the strictly positive
/// coordinates, for `p ∈ ℝ \ {0}` or `p = ∞` (then the max
/// coordinate). For `p < 1` this is not a norm but is the quantity the
/// dominance conditions compare; restricting to positive coordinates
/// makes it finite for `p < 0`.
pub fn lp_norm_detailed<T: RealScalar>(v: &ProbVector<T>, p: T) -> Result<LpNorm<T>> {
    if p.is_nan() {
        return Err(Error::InvalidInput("p is NaN".into()));
    }
    if p.is_zero() {
        return Err(Error::ZeroExponent);
    }
    let support = v.support_size();
    if p == T::infinity() {
        let value = v.max_coord().cloned().unwrap_or_else(T::zero);
        return Ok(LpNorm { value, support });
    }
    if p == T::neg_infinity() {
        return Err(Error::InvalidInput("p = -inf is not supported".into()));
    }
    if support == 0 {
        if p > T::zero() {
            return Ok(LpNorm {
                value: T::zero(),
                support,
            });
        }
        return Err(Error::Precondition(
            "p < 0 needs at least one positive coordinate".into(),
        ));
    }
    let mut sum = T::zero();
    for c in v.coords() {
        if !c.is_zero() {
            sum = sum + c.powf(p);
        }
    }
    Ok(LpNorm {
        value: sum.powf(T::one() / p),
        support,
    })
}

/// See [`lp_norm_detailed`]; returns just the value.
pub fn lp_norm<T: RealScalar>(v: &ProbVector<T>, p: T) -> Result<T> {
    lp_norm_detailed(v, p).map(|n| n.value)
}

/// The exponent threshold `log d / (log y_max - log x_max)` above which
/// the ℓp comparison of `x` against `y` is decided by the largest
/// coordinates alone. `unconstrained` is set when the formula puts no
/// finite constraint (x_max >= y_max, or a degenerate vector).
#[derive(Debug, Clone, PartialEq)]
pub struct PMax<T> {
    pub value: T,
    pub unconstrained: bool,
}

pub fn p_max<T: RealScalar>(x: &ProbVector<T>, y: &ProbVector<T>) -> PMax<T> {
    let d = x.trimmed_len().max(y.trimmed_len());
    let (Some(x_max), Some(y_max)) = (x.max_coord(), y.max_coord()) else {
        return PMax {
            value: T::infinity(),
            unconstrained: true,
        };
    };
    if *x_max >= *y_max || d == 0 {
        return PMax {
            value: T::infinity(),
            unconstrained: true,
        };
    }
    let d_t = T::from_f64_lossy(d as f64).expect("dimension fits");
    PMax {
        value: d_t.ln() / (y_max.ln() - x_max.ln()),
        unconstrained: false,
    }
}

/// One run of equal coordinates in a compressed spectrum: `count`
/// copies of `value`, contributing total `mass = value * count`.
///
/// `log_value` is the natural log, carried separately because in the
/// float backend extreme products (dust powers) underflow `value`
/// while their log and mass stay meaningful.
#[derive(Debug, Clone)]
pub struct SpectrumEntry<T> {
    pub value: T,
    pub log_value: f64,
    pub count: BigUint,
    pub mass: T,
}

impl<T: Scalar> SpectrumEntry<T> {
    /// Mass of `k <= count` copies of this run's value, recovering from
    /// the log key when the float value itself has underflowed.
    pub fn mass_of_sub_count(&self, k: &BigUint) -> T {
        stable_mass(&self.value, self.log_value, k)
    }
}

/// `value * count`, falling back to the log key when the float value
/// has underflowed to zero while the true product is representable.
pub fn stable_mass<T: Scalar>(value: &T, log_value: f64, count: &BigUint) -> T {
    let direct = value.mul_count(count);
    if !T::EXACT && direct.is_zero() && !count.is_zero() && log_value > f64::NEG_INFINITY {
        let recovered = (log_value + crate::scalar::biguint_ln(count)).exp();
        return T::from_f64_lossy(recovered).unwrap_or_else(T::zero);
    }
    direct
}

/// Multiset of positive values, run-length compressed, ordered by
/// strictly decreasing value.
#[derive(Debug, Clone)]
pub struct WeightedSpectrum<T> {
    entries: Vec<SpectrumEntry<T>>,
    total_count: BigUint,
    total_mass: T,
}

/// Unmerged input to [`WeightedSpectrum::from_raw_entries`].
#[derive(Debug, Clone)]
pub struct RawEntry<T> {
    pub value: T,
    pub log_value: f64,
    pub count: BigUint,
    pub mass: T,
}

impl<T: Scalar> RawEntry<T> {
    /// Raw entry with log and mass derived from value and count.
    pub fn simple(value: T, count: BigUint) -> Self {
        let log_value = value.ln_lossy();
        let mass = value.mul_count(&count);
        Self {
            value,
            log_value,
            count,
            mass,
        }
    }
}

impl<T: Scalar> WeightedSpectrum<T> {
    /// Spectrum of a vector: zeros stripped, equal values grouped.
    pub fn from_vector(v: &ProbVector<T>) -> Self {
        let raw = v
            .coords()
            .iter()
            .filter(|c| !c.is_zero())
            .map(|c| RawEntry::simple(c.clone(), BigUint::one()))
            .collect();
        Self::from_raw_entries(raw)
    }

    /// The spectrum of the empty tensor power: a single value 1 with
    /// multiplicity 1.
    pub fn unit() -> Self {
        Self::from_raw_entries(vec![RawEntry::simple(T::one(), BigUint::one())])
    }

    /// Sorts raw entries by decreasing value and merges runs that
    /// denote the same value: exact equality in the exact backend,
    /// log agreement within [`Scalar::merge_log_tol`] in the float
    /// backend. Masses add, so bookkeeping stays consistent with the
    /// inputs even when merged values differ in their last float bits.
    pub fn from_raw_entries(mut raw: Vec<RawEntry<T>>) -> Self {
        // A run is genuinely zero only when its log key is -inf; a float
        // value that underflowed to 0.0 with a finite log key stays.
        raw.retain(|e| !e.count.is_zero() && e.log_value > f64::NEG_INFINITY);
        if T::EXACT {
            raw.sort_by(|a, b| b.value.partial_cmp(&a.value).expect("ordered scalars"));
        } else {
            raw.sort_by(|a, b| {
                b.log_value
                    .partial_cmp(&a.log_value)
                    .expect("finite log values")
            });
        }
        let mut entries: Vec<SpectrumEntry<T>> = Vec::new();
        let merge_tol = T::merge_log_tol();
        for e in raw {
            let mergeable = entries.last().is_some_and(|head| {
                if T::EXACT {
                    head.value == e.value
                } else {
                    head.log_value - e.log_value <= merge_tol * head.log_value.abs().max(1.0)
                }
            });
            if mergeable {
                let head = entries.last_mut().expect("nonempty");
                head.count += &e.count;
                head.mass = head.mass.clone() + e.mass;
            } else {
                entries.push(SpectrumEntry {
                    value: e.value,
                    log_value: e.log_value,
                    count: e.count,
                    mass: e.mass,
                });
            }
        }
        let mut total_count = BigUint::zero();
        let mut total_mass = T::zero();
        for e in &entries {
            total_count += &e.count;
            total_mass = total_mass + e.mass.clone();
        }
        Self {
            entries,
            total_count,
            total_mass,
        }
    }

    pub fn entries(&self) -> &[SpectrumEntry<T>] {
        &self.entries
    }

    /// Number of distinct runs.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Total multiplicity (the expanded dimension, zeros excluded).
    pub fn total_count(&self) -> &BigUint {
        &self.total_count
    }

    pub fn total_mass(&self) -> &T {
        &self.total_mass
    }

    /// Materializes the expanded multiset in nonincreasing order.
    pub fn expand(&self, cap: u64) -> Result<ProbVector<T>> {
        if self.total_count > BigUint::from(cap) {
            return Err(Error::DimensionCap {
                required: self.total_count.to_string(),
                cap,
            });
        }
        let mut coords = Vec::new();
        for e in &self.entries {
            let reps = usize::try_from(&e.count).expect("count under cap");
            coords.extend(std::iter::repeat_n(e.value.clone(), reps));
        }
        ProbVector::weights(coords)
    }

    /// Tail mass at threshold `u` in the value domain:
    /// `Σ_{value >= u} value * count`. Exact in the exact backend.
    pub fn tail_mass(&self, u: &T) -> T {
        let mut acc = T::zero();
        for e in &self.entries {
            if e.value < *u {
                break;
            }
            acc = acc + e.mass.clone();
        }
        acc
    }

    /// Tail mass with the threshold given in log space, inclusive up to
    /// `slack`: `Σ_{log_value >= log_u - slack} mass`. This is the
    /// robust form for the float backend, where boundary atoms must not
    /// flip out of the tail because of rounding in `exp`.
    pub fn tail_mass_log(&self, log_u: f64, slack: f64) -> T {
        let mut acc = T::zero();
        for e in &self.entries {
            if e.log_value < log_u - slack {
                break;
            }
            acc = acc + e.mass.clone();
        }
        acc
    }
}

/// Prefix sums over a spectrum, supporting "sum of the k largest" for
/// big-integer k with interpolation inside a run and saturation beyond
/// the total count.
pub struct CumulativeView<'a, T> {
    entries: &'a [SpectrumEntry<T>],
    cum_count: Vec<BigUint>,
    cum_mass: Vec<T>,
    total_count: BigUint,
    total_mass: T,
}

impl<'a, T: Scalar> CumulativeView<'a, T> {
    pub fn new(spec: &'a WeightedSpectrum<T>) -> Self {
        let mut cum_count = Vec::with_capacity(spec.len());
        let mut cum_mass = Vec::with_capacity(spec.len());
        let mut cc = BigUint::zero();
        let mut cm = T::zero();
        for e in spec.entries() {
            cc += &e.count;
            cm = cm + e.mass.clone();
            cum_count.push(cc.clone());
            cum_mass.push(cm.clone());
        }
        Self {
            entries: spec.entries(),
            cum_count,
            cum_mass,
            total_count: spec.total_count().clone(),
            total_mass: spec.total_mass().clone(),
        }
    }

    /// Cumulative counts at run boundaries — the canonical breakpoints
    /// of the piecewise-linear "sum of k largest" function.
    pub fn breakpoints(&self) -> &[BigUint] {
        &self.cum_count
    }

    pub fn total_count(&self) -> &BigUint {
        &self.total_count
    }

    pub fn total_mass(&self) -> &T {
        &self.total_mass
    }

    /// Sum of the `k` largest values (counting multiplicity);
    /// `total_mass` for any `k >= total_count`.
    pub fn sum_top(&self, k: &BigUint) -> T {
        if k.is_zero() {
            return T::zero();
        }
        if *k >= self.total_count {
            return self.total_mass.clone();
        }
        // First run whose cumulative count reaches k.
        let idx = self.cum_count.partition_point(|c| c < k);
        let prev_count = if idx == 0 {
            BigUint::zero()
        } else {
            self.cum_count[idx - 1].clone()
        };
        let prev_mass = if idx == 0 {
            T::zero()
        } else {
            self.cum_mass[idx - 1].clone()
        };
        let inside = k - &prev_count;
        prev_mass + self.entries[idx].mass_of_sub_count(&inside)
    }
}
