//! Large-deviation analytics for tensor-power tails: cumulant
//! generating functions, the Cramér transform, the limit tail profiles
//! `f` and `g`, exact finite-`n` tails, and a heuristic copy-count
//! predictor.
//!
//! A positive vector x is viewed as the log-scale measure
//! `μ_x = Σ x_i δ_{log x_i}`, normalized by placing the missing mass
//! `p = 1 − Σ x_i` at −∞. Sums of independent draws from μ_x are
//! exactly the tensor powers of x, so tail probabilities
//! `P(X_1 + … + X_n ≥ nt)` are finite spectral sums, and their n-th
//! roots converge to a limit profile governed by the Cramér rate
//! function `Λ*`. Comparing the limit profiles of two vectors predicts
//! how many copies a submajorization relation needs — a hint, never a
//! certificate.

use crate::error::{Error, Result};
use crate::scalar::{RealScalar, Scalar};
use crate::vecspace::ProbVector;
use crate::multicopy::power_spectrum_capped;
use crate::vecspace::DEFAULT_SPECTRUM_CAP;

/// λ values at which cumulant dominance `Λ_X(λ) < Λ_Y(λ)` is sampled.
/// λ = 0 is checked non-strictly on the side (two unit-mass vectors
/// always tie there).
pub const LAMBDA_GRID: [f64; 11] = [
    0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0, 256.0,
];

/// Number of points in [`default_t_grid`].
pub const DEFAULT_T_POINTS: usize = 129;

/// A point mass in log scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom<T> {
    /// log x_i
    pub location: T,
    /// x_i
    pub mass: T,
}

/// The measure `μ_x = Σ x_i δ_{log x_i}` together with the deficiency
/// `p` parked at −∞, so that total mass (including −∞) is the mass of
/// a normalized instance.
#[derive(Debug, Clone)]
pub struct LogMeasure<T> {
    atoms: Vec<Atom<T>>,
    deficiency: T,
}

impl<T: RealScalar> LogMeasure<T> {
    pub fn atoms(&self) -> &[Atom<T>] {
        &self.atoms
    }

    /// Mass at −∞: `1 − Σ x_i`, clamped at 0.
    pub fn deficiency(&self) -> T {
        self.deficiency
    }

    /// Σ atom masses = 1 − p.
    pub fn finite_mass(&self) -> T {
        self.atoms
            .iter()
            .fold(T::zero(), |acc, a| acc + a.mass)
    }

    /// `Λ(λ) = log Σ m_i e^{λ ℓ_i}`, evaluated by log-sum-exp so that
    /// large λ cannot underflow the individual terms.
    pub fn cumulant(&self, lambda: T) -> T {
        let terms: Vec<T> = self
            .atoms
            .iter()
            .map(|a| a.mass.ln() + lambda * a.location)
            .collect();
        log_sum_exp(&terms)
    }

    /// `Λ'(λ) = Σ m_i ℓ_i e^{λ ℓ_i} / Σ m_i e^{λ ℓ_i}`, the mean of
    /// the λ-tilted measure; strictly increasing from the conditional
    /// mean at λ = 0 towards [`sup`](Self::sup).
    pub fn cumulant_derivative(&self, lambda: T) -> T {
        let shift = self
            .atoms
            .iter()
            .map(|a| lambda * a.location)
            .fold(T::neg_infinity(), T::max);
        let mut num = T::zero();
        let mut den = T::zero();
        for a in &self.atoms {
            let w = a.mass * (lambda * a.location - shift).exp();
            num = num + w * a.location;
            den = den + w;
        }
        num / den
    }

    /// `E(X | X ≠ −∞)`.
    pub fn mean(&self) -> T {
        let mut num = T::zero();
        let mut den = T::zero();
        for a in &self.atoms {
            num = num + a.mass * a.location;
            den = den + a.mass;
        }
        num / den
    }

    /// `M_X = log ‖x‖_∞`, the essential supremum.
    pub fn sup(&self) -> T {
        self.atoms
            .iter()
            .map(|a| a.location)
            .fold(T::neg_infinity(), T::max)
    }

    /// μ-mass of the atom sitting exactly at the supremum.
    pub fn mass_at_sup(&self) -> T {
        let sup = self.sup();
        self.atoms
            .iter()
            .filter(|a| a.location == sup)
            .fold(T::zero(), |acc, a| acc + a.mass)
    }
}

fn log_sum_exp<T: RealScalar>(terms: &[T]) -> T {
    let m = terms.iter().copied().fold(T::neg_infinity(), T::max);
    if !m.is_finite() {
        return T::neg_infinity();
    }
    let sum = terms
        .iter()
        .fold(T::zero(), |acc, &t| acc + (t - m).exp());
    m + sum.ln()
}

/// Builds the log-scale measure of `x`. Fails on empty support.
pub fn log_measure<T: RealScalar>(x: &ProbVector<T>) -> Result<LogMeasure<T>> {
    let atoms: Vec<Atom<T>> = x
        .coords()
        .iter()
        .filter(|c| !c.is_zero())
        .map(|c| Atom {
            location: c.ln(),
            mass: *c,
        })
        .collect();
    if atoms.is_empty() {
        return Err(Error::Precondition(
            "log measure needs a positive coordinate".into(),
        ));
    }
    let deficiency = (T::one() - x.mass()).max(T::zero());
    Ok(LogMeasure { atoms, deficiency })
}

/// `Λ_X(λ) = log Σ x_i^{λ+1} = log ‖x‖_{λ+1}^{λ+1}`.
pub fn cumulant<T: RealScalar>(x: &ProbVector<T>, lambda: T) -> Result<T> {
    Ok(log_measure(x)?.cumulant(lambda))
}

/// Value and maximizer of the Cramér supremum `sup_{λ≥0} λt − Λ(λ)`.
#[derive(Debug, Clone, Copy)]
pub struct CramerPoint<T> {
    pub value: T,
    pub maximizer: T,
}

const LAMBDA_CAP_START: f64 = 256.0;
const LAMBDA_CAP_LIMIT: f64 = 1_073_741_824.0; // 2^30
const LAMBDA_TOL: f64 = 1e-10;
const BISECT_ITER_LIMIT: u32 = 200;

fn cramer_on_measure<T: RealScalar>(m: &LogMeasure<T>, t: T) -> CramerPoint<T> {
    let mean = m.mean();
    if t <= mean {
        // λ ↦ λt − Λ(λ) is nonincreasing on λ ≥ 0; max at λ = 0.
        return CramerPoint {
            value: -m.cumulant(T::zero()),
            maximizer: T::zero(),
        };
    }
    let mut lo = T::zero();
    let mut hi = T::from_f64_lossy(LAMBDA_CAP_START).expect("representable");
    let cap = T::from_f64_lossy(LAMBDA_CAP_LIMIT).expect("representable");
    // Λ' is strictly increasing with limit sup(X) > t, so doubling
    // brackets the stationary point; the hard cap guards against t so
    // close to the supremum that float Λ' saturates early.
    while m.cumulant_derivative(hi) < t && hi < cap {
        hi = hi + hi;
    }
    let tol = T::from_f64_lossy(LAMBDA_TOL).expect("representable");
    let two = T::one() + T::one();
    for _ in 0..BISECT_ITER_LIMIT {
        if hi - lo <= tol {
            break;
        }
        let mid = (lo + hi) / two;
        if m.cumulant_derivative(mid) < t {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let maximizer = (lo + hi) / two;
    CramerPoint {
        value: maximizer * t - m.cumulant(maximizer),
        maximizer,
    }
}

/// Cramér transform `Λ*(t) = sup_{λ ≥ 0} λt − Λ_X(λ)`, computed by
/// bisection on the strictly increasing derivative `Λ'`. For
/// `t ≤ E(X | X ≠ −∞)` the supremum sits at λ = 0 and equals
/// `−Λ(0) = −log mass(x)`. Locations at or above `M_X = log ‖x‖_∞`
/// are rejected, except the degenerate constant measure where the mean
/// and the supremum coincide.
pub fn cramer_transform<T: RealScalar>(x: &ProbVector<T>, t: T) -> Result<CramerPoint<T>> {
    let m = log_measure(x)?;
    let sup = m.sup();
    if t >= sup && !(t == m.mean()) {
        return Err(Error::TailWindow {
            t: format!("{t}"),
            lo: "-inf".into(),
            hi: format!("{sup}"),
        });
    }
    Ok(cramer_on_measure(&m, t))
}

/// Tabulated limit profiles of `f_n(t) = P(ΣX ≥ nt)^{1/n}` and its
/// counterpart for y.
#[derive(Debug, Clone)]
pub struct LdpProfile<T> {
    pub t_grid: Vec<T>,
    pub f_values: Vec<T>,
    pub g_values: Vec<T>,
    pub mean_x: T,
    pub mean_y: T,
    pub sup_x: T,
    pub sup_y: T,
    /// Whether `Λ_X < Λ_Y` held at every positive sampled λ (ties
    /// allowed at λ = 0); when true, f < g below `sup_y`.
    pub lambda_dominates: bool,
}

/// 129 evenly spaced locations spanning
/// `[min log-coordinate − 1, M_Y + 0.1]`, the window where the
/// profiles do all their moving.
pub fn default_t_grid<T: RealScalar>(x: &ProbVector<T>, y: &ProbVector<T>) -> Vec<T> {
    let min_loc = x
        .coords()
        .iter()
        .chain(y.coords())
        .filter(|c| !c.is_zero())
        .map(|c| c.ln())
        .fold(T::infinity(), T::min);
    let sup_y = y
        .coords()
        .iter()
        .filter(|c| !c.is_zero())
        .map(|c| c.ln())
        .fold(T::neg_infinity(), T::max);
    let lo = min_loc - T::one();
    let hi = sup_y + T::from_f64_lossy(0.1).expect("representable");
    let steps = T::from_f64_lossy((DEFAULT_T_POINTS - 1) as f64).expect("representable");
    (0..DEFAULT_T_POINTS)
        .map(|i| {
            let i_t = T::from_f64_lossy(i as f64).expect("representable");
            lo + (hi - lo) * i_t / steps
        })
        .collect()
}

/// Limit of `f_n(t)` for the measure of a single vector: 0 above the
/// supremum, the atom mass exactly at it, `e^{−Λ*(t)}` strictly
/// between the mean and the supremum, and the finite mass `1 − p` at
/// or below the mean.
fn limit_value<T: RealScalar>(m: &LogMeasure<T>, t: T) -> T {
    let sup = m.sup();
    if t > sup {
        T::zero()
    } else if t == sup {
        m.mass_at_sup()
    } else if t <= m.mean() {
        m.finite_mass()
    } else {
        (-cramer_on_measure(m, t).value).exp()
    }
}

fn lambda_dominates_measures<T: RealScalar>(mx: &LogMeasure<T>, my: &LogMeasure<T>) -> bool {
    let slack = T::from_f64_lossy(1e-12).expect("representable");
    let zero = T::zero();
    if mx.cumulant(zero) > my.cumulant(zero) + slack {
        return false;
    }
    LAMBDA_GRID.iter().all(|&l| {
        let lam = T::from_f64_lossy(l).expect("representable");
        mx.cumulant(lam) < my.cumulant(lam)
    })
}

/// Samples `Λ_X < Λ_Y` over [`LAMBDA_GRID`] (non-strict at λ = 0).
pub fn lambda_dominates<T: RealScalar>(x: &ProbVector<T>, y: &ProbVector<T>) -> Result<bool> {
    Ok(lambda_dominates_measures(&log_measure(x)?, &log_measure(y)?))
}

/// Tabulates the limit profiles f (for x, possibly deficient) and g
/// (for y, which must carry unit mass) over `t_grid`.
pub fn limit_profiles<T: RealScalar>(
    x: &ProbVector<T>,
    y: &ProbVector<T>,
    t_grid: &[T],
) -> Result<LdpProfile<T>> {
    let mx = log_measure(x)?;
    let my = log_measure(y)?;
    let tol = T::default_tolerance();
    if (my.finite_mass() - T::one()).abs() > tol {
        return Err(Error::Precondition(
            "limit profiles require unit mass on the dominating vector".into(),
        ));
    }
    let f_values = t_grid.iter().map(|&t| limit_value(&mx, t)).collect();
    let g_values = t_grid.iter().map(|&t| limit_value(&my, t)).collect();
    Ok(LdpProfile {
        t_grid: t_grid.to_vec(),
        f_values,
        g_values,
        mean_x: mx.mean(),
        mean_y: my.mean(),
        sup_x: mx.sup(),
        sup_y: my.sup(),
        lambda_dominates: lambda_dominates_measures(&mx, &my),
    })
}

/// `P(X_1 + … + X_n ≥ nt)`: the exact tail mass of the n-fold
/// convolution `μ_x^{*n}`, read off the compressed power spectrum
/// (convolving the measures is tensoring the vectors). A slack of
/// `1e-9` relative to `|nt|` keeps atoms sitting exactly on the
/// threshold inside the tail despite float log jitter.
pub fn finite_tail<T: RealScalar>(x: &ProbVector<T>, n: u32, t: T) -> Result<T> {
    finite_tail_capped(x, n, t, DEFAULT_SPECTRUM_CAP)
}

pub fn finite_tail_capped<T: RealScalar>(
    x: &ProbVector<T>,
    n: u32,
    t: T,
    cap: u64,
) -> Result<T> {
    let spectrum = power_spectrum_capped(x, n, cap)?.spectrum;
    let log_u = t.to_f64_lossy() * f64::from(n);
    let slack = 1e-9 * log_u.abs().max(1.0);
    Ok(spectrum.tail_mass_log(log_u, slack))
}

/// Value-scale variant: total spectral mass of `x^{⊗n}` at values
/// `≥ threshold`. In the exact backend this is an exact rational and
/// agrees with brute-force tuple enumeration verbatim.
pub fn finite_tail_at_value<T: Scalar>(x: &ProbVector<T>, n: u32, threshold: &T) -> Result<T> {
    finite_tail_at_value_capped(x, n, threshold, DEFAULT_SPECTRUM_CAP)
}

pub fn finite_tail_at_value_capped<T: Scalar>(
    x: &ProbVector<T>,
    n: u32,
    threshold: &T,
    cap: u64,
) -> Result<T> {
    let spectrum = power_spectrum_capped(x, n, cap)?.spectrum;
    Ok(spectrum.tail_mass(threshold))
}

/// The variable conditioned to be finite: same atom locations, masses
/// rescaled by `1/(1−p)`, no deficiency. Its cumulant obeys
/// `Λ̂ = Λ − log(1−p)` and its rate function `Λ̂* = Λ* + log(1−p)`.
#[derive(Debug, Clone)]
pub struct ConditionedView<T> {
    pub measure: LogMeasure<T>,
    /// Deficiency of the original vector.
    pub deficiency: T,
}

impl<T: RealScalar> ConditionedView<T> {
    /// `Λ̂(λ)`, the shifted cumulant.
    pub fn cumulant(&self, lambda: T) -> T {
        self.measure.cumulant(lambda)
    }
}

/// Conditions `x`'s measure on being finite. Fails on empty support.
pub fn conditioned_view<T: RealScalar>(x: &ProbVector<T>) -> Result<ConditionedView<T>> {
    let m = log_measure(x)?;
    let finite = m.finite_mass();
    let atoms = m
        .atoms()
        .iter()
        .map(|a| Atom {
            location: a.location,
            mass: a.mass / finite,
        })
        .collect();
    Ok(ConditionedView {
        measure: LogMeasure {
            atoms,
            deficiency: T::zero(),
        },
        deficiency: m.deficiency(),
    })
}

/// Smallest n in `n_grid` whose exact tail curves satisfy
/// `f_n(t) ≤ g_n(t)` across `t_grid`, compared on the probability
/// scale (n-th roots preserve the order and would manufacture −∞
/// exponents at zero tails). Requires sampled cumulant dominance;
/// failed preconditions and blown spectrum caps both yield `None` —
/// this is a predictor, not a certificate, and it is allowed to shrug.
pub fn predict_copies<T: RealScalar>(
    x: &ProbVector<T>,
    y: &ProbVector<T>,
    n_grid: &[u32],
    t_grid: &[T],
) -> Result<Option<u32>> {
    if !lambda_dominates(x, y)? {
        return Ok(None);
    }
    for &n in n_grid {
        if n == 0 {
            continue;
        }
        let spectra = power_spectrum_capped(x, n, DEFAULT_SPECTRUM_CAP)
            .and_then(|sx| Ok((sx, power_spectrum_capped(y, n, DEFAULT_SPECTRUM_CAP)?)));
        let (sx, sy) = match spectra {
            Ok(pair) => pair,
            Err(Error::SpectrumCap { .. }) | Err(Error::DimensionCap { .. }) => return Ok(None),
            Err(e) => return Err(e),
        };
        let dominated = t_grid.iter().all(|&t| {
            let log_u = t.to_f64_lossy() * f64::from(n);
            let slack = 1e-9 * log_u.abs().max(1.0);
            let fx = sx.spectrum.tail_mass_log(log_u, slack);
            let gy = sy.spectrum.tail_mass_log(log_u, slack);
            let jitter = T::from_f64_lossy(1e-12).expect("representable");
            fx <= gy + jitter * gy.max(T::one())
        });
        if dominated {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closure::shave;
    use crate::vecspace::lp_norm;
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use proptest::prelude::*;

    fn pv(values: &[f64]) -> ProbVector<f64> {
        ProbVector::from_f64s(values).expect("valid test vector")
    }

    fn rational(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn cumulant_basics() {
        // Λ(0) = log mass: 0 for unit mass, log(1−p) when deficient.
        let x = pv(&[0.5, 0.25, 0.25]);
        assert!(cumulant(&x, 0.0).unwrap().abs() < 1e-15);
        let deficient = pv(&[0.3, 0.2]);
        assert!((cumulant(&deficient, 0.0).unwrap() - 0.5f64.ln()).abs() < 1e-15);
        // Uniform pair at λ = 1: 2·0.25 = 0.5.
        let u = pv(&[0.5, 0.5]);
        assert!((cumulant(&u, 1.0).unwrap() - 0.5f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn cumulant_matches_lp_norm_identity() {
        // Λ(λ) = (λ+1)·log ‖x‖_{λ+1}, an exact cross-module identity.
        let x = pv(&[0.45, 0.3, 0.15, 0.1]);
        for lambda in [0.0, 0.3, 1.0, 2.5, 7.0, 31.0] {
            let lhs = cumulant(&x, lambda).unwrap();
            let rhs = (lambda + 1.0) * lp_norm(&x, lambda + 1.0).unwrap().ln();
            assert!((lhs - rhs).abs() < 1e-12, "λ = {lambda}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn cramer_at_the_mean_and_degenerate() {
        let x = pv(&[0.5, 0.25, 0.25]);
        let mean = log_measure(&x).unwrap().mean();
        let p = cramer_transform(&x, mean).unwrap();
        assert!(p.value.abs() < 1e-15);
        assert_eq!(p.maximizer, 0.0);
        // Constant variable: mean = sup, rate 0 at the single location.
        let u = pv(&[0.5, 0.5]);
        let p = cramer_transform(&u, 0.5f64.ln()).unwrap();
        assert!(p.value.abs() < 1e-15);
    }

    #[test]
    fn cramer_inside_the_window() {
        // Bisection against an independent dense λ-scan oracle.
        let x = pv(&[0.75, 0.25]);
        let p = cramer_transform(&x, -0.4).unwrap();
        assert!((p.value - 0.070031227886).abs() < 1e-9, "value {}", p.value);
        assert!((p.maximizer - 0.9776052).abs() < 1e-5);
        // Below the mean the supremum over λ ≥ 0 sits at 0.
        let below = cramer_transform(&x, -0.6).unwrap();
        assert!(below.value.abs() < 1e-12);
        assert_eq!(below.maximizer, 0.0);
        // At or above the essential supremum the tail window is empty.
        assert!(matches!(
            cramer_transform(&x, -0.2),
            Err(Error::TailWindow { .. })
        ));
    }

    #[test]
    fn cramer_is_nonnegative_and_convex_for_unit_mass() {
        let x = pv(&[0.75, 0.25]);
        let m = log_measure(&x).unwrap();
        let (mean, sup) = (m.mean(), m.sup());
        let pts = 40;
        let vals: Vec<f64> = (0..pts)
            .map(|i| {
                let t = mean + (sup - mean) * (i as f64 + 0.5) / (pts as f64 + 1.0);
                cramer_transform(&x, t).unwrap().value
            })
            .collect();
        for w in vals.windows(3) {
            assert!(w[0] >= -1e-12);
            // Convexity: midpoint below the chord.
            assert!(w[1] <= (w[0] + w[2]) / 2.0 + 1e-9);
        }
    }

    #[test]
    fn profiles_shaved_pair_dominate() {
        let x = pv(&[0.4, 0.4, 0.2]);
        let y = pv(&[0.5, 0.25, 0.25]);
        let xp = shave(&x, &0.02).unwrap();
        let grid = default_t_grid(&xp, &y);
        assert_eq!(grid.len(), DEFAULT_T_POINTS);
        let profile = limit_profiles(&xp, &y, &grid).unwrap();
        assert!(profile.lambda_dominates);
        // Left end: f → 1−p, g → 1.
        assert!((profile.f_values[0] - 0.99).abs() < 1e-12);
        assert!((profile.g_values[0] - 1.0).abs() < 1e-12);
        for (i, t) in grid.iter().enumerate() {
            // f vanishes beyond M_X and stays strictly below g until M_Y.
            if *t > profile.sup_x {
                assert_eq!(profile.f_values[i], 0.0);
            }
            if *t < profile.sup_y - 1e-9 {
                assert!(
                    profile.f_values[i] < profile.g_values[i] + 1e-15,
                    "f ≥ g at t = {t}"
                );
            }
            // Both profiles are nonincreasing along the grid.
            if i > 0 {
                assert!(profile.f_values[i] <= profile.f_values[i - 1] + 1e-12);
                assert!(profile.g_values[i] <= profile.g_values[i - 1] + 1e-12);
            }
        }
    }

    #[test]
    fn profile_hits_the_atom_mass_at_the_supremum() {
        let x = pv(&[0.4, 0.4, 0.2]);
        let y = pv(&[0.5, 0.25, 0.25]);
        let sup = 0.4f64.ln();
        let profile = limit_profiles(&x, &y, &[sup, sup + 0.01]).unwrap();
        assert!((profile.f_values[0] - 0.8).abs() < 1e-15);
        assert_eq!(profile.f_values[1], 0.0);
    }

    #[test]
    fn finite_tail_single_copy_counts_atoms() {
        let x = pv(&[0.5, 0.3]);
        assert!((finite_tail(&x, 1, 0.4f64.ln()).unwrap() - 0.5).abs() < 1e-15);
        assert!((finite_tail(&x, 1, 0.2f64.ln()).unwrap() - 0.8).abs() < 1e-15);
        assert!(finite_tail(&x, 1, 0.6f64.ln()).unwrap().abs() < 1e-15);
        // All mass of (0.5,0.5)^⊗2 sits exactly at 2·log 0.5.
        let u = pv(&[0.5, 0.5]);
        assert!((finite_tail(&u, 2, 0.5f64.ln()).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn finite_tail_exact_matches_hand_enumeration() {
        // x = (1/3, 1/6), n = 3, threshold 1/100: the qualifying
        // products are (1/3)^3 and the three arrangements of
        // (1/3)^2·(1/6), totalling 1/27 + 3/54 = 5/54.
        let x = ProbVector::new(vec![rational(1, 3), rational(1, 6)]).unwrap();
        let tail = finite_tail_at_value(&x, 3, &rational(1, 100)).unwrap();
        assert_eq!(tail, rational(5, 54));
        // Threshold just above (1/3)^3 keeps only the top atom.
        let tail_top = finite_tail_at_value(&x, 3, &rational(1, 28)).unwrap();
        assert_eq!(tail_top, rational(1, 27));
    }

    #[test]
    fn finite_tail_deficiency_rescaling_identity() {
        // P(ΣX ≥ tn) = (1−p)^n · P(ΣX' ≥ n(t − log(1−p))) where X' is
        // the variable of x/(1−p): conditioning shifts locations by
        // −log(1−p) and removes the deficiency.
        let x = pv(&[0.3, 0.2]);
        let scaled = pv(&[0.6, 0.4]);
        let log_half = 0.5f64.ln();
        for n in 1..=3u32 {
            for t in [-2.0, -1.55, -1.3, -1.05, -0.8] {
                let lhs = finite_tail(&x, n, t).unwrap();
                let rhs =
                    0.5f64.powi(n as i32) * finite_tail(&scaled, n, t - log_half).unwrap();
                assert!(
                    (lhs - rhs).abs() <= 1e-12 * rhs.max(1.0),
                    "n = {n}, t = {t}: {lhs} vs {rhs}"
                );
            }
        }
        // The same identity in exact arithmetic on the value scale:
        // doubling the vector multiplies every n-fold product by 2^n.
        let xr = ProbVector::new(vec![rational(3, 10), rational(1, 5)]).unwrap();
        let scaled_r = ProbVector::new(vec![rational(3, 5), rational(2, 5)]).unwrap();
        let u = rational(1, 40);
        let n = 2u32;
        let lhs = finite_tail_at_value(&xr, n, &u).unwrap();
        let rhs = rational(1, 4) * finite_tail_at_value(&scaled_r, n, &rational(1, 10)).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn conditioned_view_identities() {
        // Unit mass: the identity transform.
        let x = pv(&[0.5, 0.5]);
        let v = conditioned_view(&x).unwrap();
        assert_eq!(v.deficiency, 0.0);
        assert_eq!(v.measure.atoms()[0].mass, 0.5);
        // Deficient: Λ̂(0) = 0 while Λ(0) = log(1−p), and the shift is
        // uniform in λ.
        let d = pv(&[0.3, 0.2]);
        let v = conditioned_view(&d).unwrap();
        assert_eq!(v.deficiency, 0.5);
        assert!(v.cumulant(0.0).abs() < 1e-15);
        assert_eq!(v.measure.atoms()[0].location, 0.3f64.ln());
        let shift = 0.5f64.ln();
        for lambda in [0.0, 0.5, 2.0, 9.0] {
            let lhs = v.cumulant(lambda);
            let rhs = cumulant(&d, lambda).unwrap() - shift;
            assert!((lhs - rhs).abs() < 1e-12);
        }
    }

    #[test]
    fn finite_tails_approach_the_limit_profile() {
        // Pointwise |f_n − f| shrinks with n; frozen locations where
        // the decrease is strict (near the supremum the finite tails
        // plateau and only move for much larger n).
        let x = pv(&[0.4, 0.4, 0.2]);
        let xp = shave(&x, &0.02).unwrap();
        let m = log_measure(&xp).unwrap();
        for t in [-1.5, -1.3, -1.2] {
            let f = super::limit_value(&m, t);
            let errs: Vec<f64> = [2u32, 4, 8]
                .iter()
                .map(|&n| {
                    (finite_tail(&xp, n, t).unwrap().powf(1.0 / f64::from(n)) - f).abs()
                })
                .collect();
            assert!(errs[0] > errs[1] && errs[1] > errs[2], "t = {t}: {errs:?}");
        }
    }

    #[test]
    fn predict_copies_examples() {
        // Tail-dominated majorization pair: one copy suffices.
        let u = pv(&[0.25, 0.25, 0.25, 0.25]);
        let y = pv(&[0.5, 0.25, 0.25]);
        let grid = default_t_grid(&u, &y);
        assert_eq!(predict_copies(&u, &y, &[1, 2, 3], &grid).unwrap(), Some(1));
        // Shaved catalytic pair: the tail curves cross until n = 3
        // (regression value — the heuristic may overshoot the true
        // copy count, which is what "never a certificate" means).
        let x = pv(&[0.4, 0.36, 0.14, 0.1]);
        let xp = shave(&x, &0.02).unwrap();
        let grid = default_t_grid(&xp, &y);
        let predicted = predict_copies(&xp, &y, &[1, 2, 3, 4, 5, 6, 7, 8], &grid).unwrap();
        assert_eq!(predicted, Some(3));
        // Exhausted grid: absent, not an error.
        assert_eq!(predict_copies(&xp, &y, &[1, 2], &grid).unwrap(), None);
        // Failed cumulant dominance: absent.
        let a = pv(&[0.6, 0.4]);
        let b = pv(&[0.5, 0.5]);
        let grid = default_t_grid(&a, &b);
        assert_eq!(predict_copies(&a, &b, &[1, 2, 3], &grid).unwrap(), None);
    }

    #[test]
    fn predict_agrees_with_the_true_copy_count_on_the_regression_pair() {
        // Heuristic, so agreement is a regression observation rather
        // than a theorem; on the shaved Daftuar pair both land on 3.
        let x = pv(&[0.4, 0.4, 0.2]);
        let y = pv(&[0.5, 0.25, 0.25]);
        let xp = shave(&x, &0.02).unwrap();
        let grid = default_t_grid(&xp, &y);
        let predicted = predict_copies(&xp, &y, &[1, 2, 3, 4, 5, 6], &grid).unwrap();
        assert_eq!(predicted, Some(3));
    }

    proptest! {
        /// Midpoint convexity of Λ in λ.
        #[test]
        fn cumulant_is_convex(
            raw in proptest::collection::vec(0.01f64..1.0, 2..5),
            a in 0.0f64..16.0,
            b in 0.0f64..16.0,
        ) {
            let s: f64 = raw.iter().sum();
            let x = ProbVector::<f64>::weights(raw.iter().map(|v| v / s).collect()).unwrap();
            let mid = cumulant(&x, (a + b) / 2.0).unwrap();
            let chord = (cumulant(&x, a).unwrap() + cumulant(&x, b).unwrap()) / 2.0;
            prop_assert!(mid <= chord + 1e-12);
        }

        /// The cumulant/lp-norm identity on random inputs.
        #[test]
        fn cumulant_lp_identity_random(
            raw in proptest::collection::vec(0.01f64..1.0, 1..6),
            lambda in 0.0f64..32.0,
        ) {
            let s: f64 = raw.iter().sum();
            let x = ProbVector::<f64>::weights(raw.iter().map(|v| v / s).collect()).unwrap();
            let lhs = cumulant(&x, lambda).unwrap();
            let rhs = (lambda + 1.0) * lp_norm(&x, lambda + 1.0).unwrap().ln();
            prop_assert!((lhs - rhs).abs() < 1e-12);
        }

        /// finite_tail is nonincreasing in t and matches brute-force
        /// tuple enumeration.
        #[test]
        fn finite_tail_matches_brute_force(
            raw in proptest::collection::vec(0.05f64..1.0, 2..4),
            n in 1u32..4,
            t in -3.0f64..0.0,
        ) {
            let s: f64 = raw.iter().sum::<f64>() * 1.05; // slightly deficient
            let x = ProbVector::<f64>::weights(raw.iter().map(|v| v / s).collect()).unwrap();
            let tail = finite_tail(&x, n, t).unwrap();
            let slack = 1e-9 * (t * f64::from(n)).abs().max(1.0);
            let mut brute = 0.0;
            let coords = x.coords();
            let d = coords.len();
            let mut idx = vec![0usize; n as usize];
            loop {
                let log_sum: f64 = idx.iter().map(|&i| coords[i].ln()).sum();
                if log_sum >= t * f64::from(n) - slack {
                    brute += idx.iter().map(|&i| coords[i]).product::<f64>();
                }
                let mut k = 0;
                while k < idx.len() {
                    idx[k] += 1;
                    if idx[k] < d { break; }
                    idx[k] = 0;
                    k += 1;
                }
                if k == idx.len() { break; }
            }
            prop_assert!((tail - brute).abs() < 1e-9);
            let smaller = finite_tail(&x, n, t - 0.3).unwrap();
            prop_assert!(smaller + 1e-15 >= tail);
        }
    }
}
