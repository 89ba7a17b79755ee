//! Condition reports for the three-family norm conjecture, Rényi
//! entropies, and Ky Fan norms on singular-value vectors.
//!
//! The conjecture's three families compare ℓp norms of x and y over
//! exponent grids: `‖x‖_p ≤ ‖y‖_p` for p ≥ 1, and `‖x‖_p ≥ ‖y‖_p`
//! both for 0 < p ≤ 1 and for p < 0. Negative exponents only see the
//! positive support, so reports disclose support sizes and flag pairs
//! whose supports differ — zero coordinates dominate the p < 1
//! behaviour and the comparison becomes convention-dependent.
//!
//! Rényi entropies `H_p = log₂(Σ x_i^p)/(1−p)` repackage the same
//! inequalities: every family condition at p is equivalent to
//! `sgn(p)·H_p(x) ≥ sgn(p)·H_p(y)`.

use crate::error::{Error, Result};
use crate::majorize::{canonical_p_grid, schur_test, submajorizes, MajorizationVerdict};
use crate::scalar::{le_within, RealScalar, Scalar};
use crate::vecspace::{lp_norm, ProbVector};

/// Default exponent grid for the `0 < p ≤ 1` family.
pub const COND2_DEFAULT_GRID: [f64; 4] = [0.25, 0.5, 0.75, 1.0];

/// Default exponent grid for the `p < 0` family.
pub const COND3_DEFAULT_GRID: [f64; 5] = [-8.0, -4.0, -2.0, -1.0, -0.5];

/// One norm comparison at a single exponent; `ok` is oriented per the
/// family the row belongs to.
#[derive(Debug, Clone, Copy)]
pub struct ConditionRow {
    pub p: f64,
    pub x_norm: f64,
    pub y_norm: f64,
    pub ok: bool,
}

/// Overall classification of a conjecture report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerdictClass {
    /// All three families hold on their grids.
    PassesAll,
    /// The p ≥ 1 family fails: x is certifiably outside the closure.
    Fails1,
    /// The p ≥ 1 family holds but a reversed family fails.
    Fails2Or3,
    /// Positive supports differ in size, so the p < 1 families are
    /// support-sensitive and not adjudicated.
    DegenerateSupport,
}

/// Per-family tables plus the support disclosure. A failing first
/// family is a genuine exclusion certificate; nothing here ever claims
/// membership.
#[derive(Debug, Clone)]
pub struct ConjectureReport {
    pub cond1: bool,
    pub cond2: bool,
    pub cond3: bool,
    pub rows1: Vec<ConditionRow>,
    pub rows2: Vec<ConditionRow>,
    pub rows3: Vec<ConditionRow>,
    pub support_x: usize,
    pub support_y: usize,
    /// True when the positive-support sizes differ.
    pub support_sensitive: bool,
    pub class: VerdictClass,
}

/// Evaluates the three families on the canonical p ≥ 1 grid and the
/// default reversed grids.
pub fn conjecture_report<T: RealScalar>(x: &ProbVector<T>, y: &ProbVector<T>) -> ConjectureReport {
    let grid1 = canonical_p_grid(x, y);
    let lift = |g: &[f64]| -> Vec<T> {
        g.iter()
            .map(|&p| T::from_f64_lossy(p).expect("representable"))
            .collect()
    };
    conjecture_report_on(
        x,
        y,
        &grid1,
        &lift(&COND2_DEFAULT_GRID),
        &lift(&COND3_DEFAULT_GRID),
    )
}

/// Same with caller-chosen grids; `grid2` must hold exponents in
/// (0, 1], `grid3` negative exponents.
pub fn conjecture_report_on<T: RealScalar>(
    x: &ProbVector<T>,
    y: &ProbVector<T>,
    grid1: &[T],
    grid2: &[T],
    grid3: &[T],
) -> ConjectureReport {
    let tol = T::default_tolerance();
    let support_x = x.support_size();
    let support_y = y.support_size();
    let support_sensitive = support_x != support_y;

    let schur = schur_test(x, y, grid1, &tol);
    let rows1: Vec<ConditionRow> = schur
        .rows
        .iter()
        .map(|r| ConditionRow {
            p: r.p,
            x_norm: r.x_norm,
            y_norm: r.y_norm,
            ok: r.ok,
        })
        .collect();
    let cond1 = schur.all_ok;

    // Reversed families: ‖x‖_p ≥ ‖y‖_p. Negative exponents need a
    // nonempty positive support on both sides; rows are omitted (and
    // the family left vacuously true) when that fails.
    let reversed = |grid: &[T], negative: bool| -> Vec<ConditionRow> {
        if negative && (support_x == 0 || support_y == 0) {
            return Vec::new();
        }
        grid.iter()
            .filter_map(|&p| {
                let (xn, yn) = (lp_norm(x, p).ok()?, lp_norm(y, p).ok()?);
                Some(ConditionRow {
                    p: p.to_f64_lossy(),
                    x_norm: xn.to_f64_lossy(),
                    y_norm: yn.to_f64_lossy(),
                    ok: le_within(&yn, &xn, &tol),
                })
            })
            .collect()
    };
    let rows2 = reversed(grid2, false);
    let rows3 = reversed(grid3, true);
    let cond2 = rows2.iter().all(|r| r.ok);
    let cond3 = rows3.iter().all(|r| r.ok);

    let class = if !cond1 {
        VerdictClass::Fails1
    } else if support_sensitive {
        VerdictClass::DegenerateSupport
    } else if !(cond2 && cond3) {
        VerdictClass::Fails2Or3
    } else {
        VerdictClass::PassesAll
    };

    ConjectureReport {
        cond1,
        cond2,
        cond3,
        rows1,
        rows2,
        rows3,
        support_x,
        support_y,
        support_sensitive,
        class,
    }
}

/// Rényi entropy in bits over the positive support:
/// `H_p = log₂(Σ x_i^p)/(1−p)` for p ∉ {0, 1}, the Shannon entropy at
/// p = 1, and `−log₂ x_max` / `−log₂ x_min` at p = ±∞. Rejects p = 0,
/// where the formula degenerates to the support size.
pub fn renyi_entropy<T: RealScalar>(x: &ProbVector<T>, p: T) -> Result<T> {
    if p.is_nan() {
        return Err(Error::InvalidInput("p is NaN".into()));
    }
    if p.is_zero() {
        return Err(Error::ZeroExponent);
    }
    let positive: Vec<T> = x.coords().iter().copied().filter(|c| !c.is_zero()).collect();
    if positive.is_empty() {
        return Err(Error::Precondition(
            "Rényi entropy needs a positive coordinate".into(),
        ));
    }
    let ln2 = T::from_f64_lossy(std::f64::consts::LN_2).expect("representable");
    if p.is_infinite() {
        let pick = positive
            .iter()
            .copied()
            .fold(if p > T::zero() { T::zero() } else { T::infinity() }, |acc, c| {
                if p > T::zero() {
                    acc.max(c)
                } else {
                    acc.min(c)
                }
            });
        return Ok(-(pick.ln() / ln2));
    }
    if p == T::one() {
        let sum = positive
            .iter()
            .fold(T::zero(), |acc, &c| acc + c * c.ln());
        return Ok(-(sum / ln2));
    }
    let sum = positive.iter().fold(T::zero(), |acc, &c| acc + c.powf(p));
    Ok(sum.ln() / ln2 / (T::one() - p))
}

/// Ky Fan norm: the sum of the `k` largest entries. `k` beyond the
/// dimension saturates at the total mass (zero padding adds nothing).
pub fn kyfan_norm<T: Scalar>(s: &ProbVector<T>, k: usize) -> T {
    let sorted = s.sorted_desc();
    sorted
        .coords()
        .iter()
        .take(k)
        .fold(T::zero(), |acc, c| acc + c.clone())
}

/// Ky Fan dominance at every order k simultaneously — by definition
/// exactly weak submajorization of the singular-value vectors.
pub fn kyfan_dominates<T: Scalar>(
    sa: &ProbVector<T>,
    sb: &ProbVector<T>,
    tol: &T,
) -> MajorizationVerdict {
    submajorizes(sa, sb, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multicopy::find_min_copies;
    use num_bigint::BigUint;
    use proptest::prelude::*;

    fn pv(values: &[f64]) -> ProbVector<f64> {
        ProbVector::from_f64s(values).expect("valid test vector")
    }

    const TOL: f64 = 1e-9;

    #[test]
    fn renyi_examples() {
        let u = pv(&[0.25, 0.25, 0.25, 0.25]);
        for p in [0.5, 2.0, -1.0, -4.0, f64::INFINITY] {
            assert!(
                (renyi_entropy(&u, p).unwrap() - 2.0).abs() < 1e-12,
                "uniform at p = {p}"
            );
        }
        let half = pv(&[0.5, 0.5]);
        assert!((renyi_entropy(&half, 1.0).unwrap() - 1.0).abs() < 1e-15);
        let x = pv(&[0.5, 0.25, 0.25]);
        let h2 = renyi_entropy(&x, 2.0).unwrap();
        assert!((h2 - 1.4150374992788437).abs() < 1e-12); // −log2(0.375)
        assert!(matches!(renyi_entropy(&x, 0.0), Err(Error::ZeroExponent)));
        // Min-entropy and its negative-order mirror.
        assert!((renyi_entropy(&x, f64::INFINITY).unwrap() - 1.0).abs() < 1e-15);
        assert!((renyi_entropy(&x, f64::NEG_INFINITY).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn renyi_shannon_is_the_p_to_one_limit() {
        for x in [pv(&[0.5, 0.25, 0.25]), pv(&[0.7, 0.2, 0.1])] {
            let h1 = renyi_entropy(&x, 1.0).unwrap();
            for p in [1.0 - 1e-6, 1.0 + 1e-6] {
                assert!((renyi_entropy(&x, p).unwrap() - h1).abs() < 1e-4);
            }
        }
    }

    #[test]
    fn renyi_nonincreasing_in_p() {
        let grid = [
            f64::NEG_INFINITY,
            -8.0,
            -4.0,
            -2.0,
            -1.0,
            -0.5,
            0.25,
            0.5,
            0.75,
            1.0,
            1.5,
            2.0,
            4.0,
            8.0,
            f64::INFINITY,
        ];
        let x = pv(&[0.5, 0.25, 0.25]);
        let hs: Vec<f64> = grid.iter().map(|&p| renyi_entropy(&x, p).unwrap()).collect();
        for w in hs.windows(2) {
            assert!(w[1] <= w[0] + 1e-12, "entropy increased: {w:?}");
        }
    }

    #[test]
    fn conjecture_equal_vectors_pass_everything() {
        let x = pv(&[0.5, 0.3, 0.2]);
        let r = conjecture_report(&x, &x);
        assert!(r.cond1 && r.cond2 && r.cond3);
        assert_eq!(r.class, VerdictClass::PassesAll);
        assert!(!r.support_sensitive);
        for row in r.rows1.iter().chain(&r.rows2).chain(&r.rows3) {
            assert!(row.ok);
            assert!((row.x_norm - row.y_norm).abs() < 1e-12);
        }
    }

    #[test]
    fn conjecture_daftuar_pattern() {
        let x = pv(&[0.4, 0.4, 0.2]);
        let y = pv(&[0.5, 0.25, 0.25]);
        let r = conjecture_report(&x, &y);
        assert!(r.cond1);
        assert!(r.cond2);
        assert!(!r.cond3);
        assert_eq!(r.class, VerdictClass::Fails2Or3);
        assert_eq!((r.support_x, r.support_y), (3, 3));
        // The p < 0 family fails at the steep exponents and recovers
        // towards 0: −8, −4, −2 fail; −1 ties; −0.5 holds.
        let oks: Vec<bool> = r.rows3.iter().map(|row| row.ok).collect();
        assert_eq!(oks, [false, false, false, true, true]);
        let row_m2 = &r.rows3[2];
        assert!((row_m2.x_norm - 0.16329931618554522).abs() < 1e-12);
        assert!((row_m2.y_norm - 1.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn conjecture_point_mass_fails_family_one() {
        let x = pv(&[1.0, 0.0]);
        let y = pv(&[0.5, 0.5]);
        let r = conjecture_report(&x, &y);
        assert!(!r.cond1);
        assert_eq!(r.class, VerdictClass::Fails1);
        assert!(r.support_sensitive);
        let inf_row = r.rows1.iter().find(|row| row.p.is_infinite()).unwrap();
        assert!(!inf_row.ok);
        assert_eq!((inf_row.x_norm, inf_row.y_norm), (1.0, 0.5));
    }

    #[test]
    fn conjecture_support_mismatch_is_degenerate() {
        // Majorization holds and every family passes its rows, but the
        // supports differ, so the p < 1 families are not adjudicated.
        let x = pv(&[0.25, 0.25, 0.25, 0.25]);
        let y = pv(&[0.5, 0.25, 0.25]);
        let r = conjecture_report(&x, &y);
        assert!(r.cond1);
        assert!(r.support_sensitive);
        assert_eq!(r.class, VerdictClass::DegenerateSupport);
    }

    #[test]
    fn conditions_match_the_entropy_reformulation() {
        // Every family row at p ∉ {0, 1} is equivalent to
        // sgn(p)·H_p(x) ≥ sgn(p)·H_p(y).
        let pairs = [
            (pv(&[0.4, 0.4, 0.2]), pv(&[0.5, 0.25, 0.25])),
            (pv(&[0.5, 0.3, 0.2]), pv(&[0.5, 0.3, 0.2])),
            (pv(&[0.35, 0.35, 0.3]), pv(&[0.6, 0.25, 0.15])),
        ];
        for (x, y) in pairs {
            let r = conjecture_report(&x, &y);
            for row in r.rows1.iter().chain(&r.rows2).chain(&r.rows3) {
                if row.p == 1.0 {
                    continue;
                }
                let hx = renyi_entropy(&x, row.p).unwrap();
                let hy = renyi_entropy(&y, row.p).unwrap();
                let by_entropy = row.p.signum() * (hx - hy) >= -1e-9;
                assert_eq!(row.ok, by_entropy, "p = {}", row.p);
            }
        }
    }

    #[test]
    fn kyfan_examples() {
        let s = pv(&[0.5, 0.3, 0.2]);
        assert!((kyfan_norm(&s, 1) - 0.5).abs() < 1e-15);
        assert!((kyfan_norm(&s, 2) - 0.8).abs() < 1e-15);
        assert!((kyfan_norm(&s, 3) - 1.0).abs() < 1e-15);
        assert!((kyfan_norm(&s, 10) - 1.0).abs() < 1e-15);
        assert_eq!(kyfan_norm(&s, 0), 0.0);
        // Unsorted input is sorted internally.
        let shuffled = pv(&[0.2, 0.5, 0.3]);
        assert!((kyfan_norm(&shuffled, 2) - 0.8).abs() < 1e-15);
    }

    #[test]
    fn kyfan_dominance_is_weak_submajorization() {
        let s = pv(&[0.4, 0.4, 0.2]);
        assert!(kyfan_dominates(&s, &s, &TOL).holds);
        let t = pv(&[0.5, 0.25, 0.25]);
        let v = kyfan_dominates(&s, &t, &TOL);
        assert!(!v.holds);
        assert_eq!(v.first_violation, Some(BigUint::from(2u32)));
    }

    #[test]
    fn copy_search_feeds_kyfan_dominance() {
        // End to end at the singular-value level: the copy search finds
        // n, and the tensor powers then weakly submajorize — Ky Fan
        // dominance at every order.
        let x = pv(&[0.4, 0.4, 0.1, 0.1]);
        let y = pv(&[0.5, 0.25, 0.25]);
        let n = find_min_copies(&x, &y, 6, &TOL)
            .unwrap()
            .found_n()
            .expect("three copies suffice");
        assert_eq!(n, 3);
        let (mut xn, mut yn) = (x.clone(), y.clone());
        for _ in 1..n {
            xn = xn.tensor(&x).unwrap();
            yn = yn.tensor(&y).unwrap();
        }
        assert!(kyfan_dominates(&xn, &yn, &TOL).holds);
    }

    proptest! {
        /// Dominance verdict ⇔ all Ky Fan norm comparisons.
        #[test]
        fn kyfan_equivalence_random(
            a in proptest::collection::vec(0.0f64..1.0, 1..6),
            b in proptest::collection::vec(0.0f64..1.0, 1..6),
        ) {
            let sa = ProbVector::<f64>::weights(a).unwrap();
            let sb = ProbVector::<f64>::weights(b).unwrap();
            let dominated = kyfan_dominates(&sa, &sb, &TOL).holds;
            let dim = sa.len().max(sb.len());
            let by_norms = (1..=dim).all(|k| {
                kyfan_norm(&sa, k) <= kyfan_norm(&sb, k) + 1e-9
            });
            prop_assert_eq!(dominated, by_norms);
        }

        /// Entropy is nonincreasing in p for random full-support x.
        #[test]
        fn renyi_monotone_random(
            raw in proptest::collection::vec(0.01f64..1.0, 2..6),
            a in -6.0f64..8.0,
            b in -6.0f64..8.0,
        ) {
            prop_assume!(a.abs() > 1e-3 && b.abs() > 1e-3);
            // Stay off the p = 1 singularity, where float cancellation
            // in log Σ x^p dwarfs the true entropy gap.
            prop_assume!((a - 1.0).abs() > 1e-2 && (b - 1.0).abs() > 1e-2);
            let s: f64 = raw.iter().sum();
            let x = ProbVector::<f64>::weights(raw.iter().map(|v| v / s).collect()).unwrap();
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            let h_lo = renyi_entropy(&x, lo).unwrap();
            let h_hi = renyi_entropy(&x, hi).unwrap();
            prop_assert!(h_hi <= h_lo + 1e-9);
        }
    }
}
