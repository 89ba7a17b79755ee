//! Majorization and submajorization tests, on vectors and on
//! compressed spectra, plus the necessary-condition filters built from
//! order statistics and ℓp norms.
//!
//! `x` is submajorized by `y` (x ≺_w y) when every prefix sum of the
//! decreasing rearrangement of `x` is at most the corresponding prefix
//! sum for `y`; majorization (x ≺ y) additionally requires equal total
//! mass. Verdicts report the first violating prefix length and the gap
//! there, so a failed check is a checkable certificate, not just a
//! boolean.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::scalar::{eq_within, le_within, RealScalar, Scalar};
use crate::vecspace::{lp_norm, p_max, CumulativeView, ProbVector, WeightedSpectrum};

/// Outcome of a (sub)majorization test.
///
/// `first_violation` is the smallest prefix length `k` (1-based,
/// counting multiplicity) whose prefix-sum inequality fails, `None`
/// when the prefix condition holds everywhere. `gap` is the float view
/// of the violation size at that `k` (for a mass-only failure, the
/// mass difference). Ties within tolerance count as satisfied.
#[derive(Debug, Clone, PartialEq)]
pub struct MajorizationVerdict {
    pub holds: bool,
    pub first_violation: Option<BigUint>,
    pub gap: f64,
    pub mass_equal: bool,
}

impl MajorizationVerdict {
    fn pass(mass_equal: bool) -> Self {
        Self {
            holds: true,
            first_violation: None,
            gap: 0.0,
            mass_equal,
        }
    }
}

/// Weak majorization x ≺_w y by direct prefix-sum scan of the
/// decreasing rearrangements. This is the reference implementation the
/// compressed path is checked against; it never routes through
/// spectra.
pub fn submajorizes<T: Scalar>(x: &ProbVector<T>, y: &ProbVector<T>, tol: &T) -> MajorizationVerdict {
    verdict_from_scan(x, y, tol, false)
}

/// Majorization x ≺ y: the prefix condition plus equal total mass.
pub fn majorizes<T: Scalar>(x: &ProbVector<T>, y: &ProbVector<T>, tol: &T) -> MajorizationVerdict {
    verdict_from_scan(x, y, tol, true)
}

fn verdict_from_scan<T: Scalar>(
    x: &ProbVector<T>,
    y: &ProbVector<T>,
    tol: &T,
    need_mass_equal: bool,
) -> MajorizationVerdict {
    let xs = x.sorted_desc();
    let ys = y.sorted_desc();
    let mass_equal = eq_within(&x.mass(), &y.mass(), tol);
    let d = xs.len().max(ys.len());
    let mut px = T::zero();
    let mut py = T::zero();
    for k in 0..d {
        if let Some(c) = xs.coords().get(k) {
            px = px + c.clone();
        }
        if let Some(c) = ys.coords().get(k) {
            py = py + c.clone();
        }
        if !le_within(&px, &py, tol) {
            return MajorizationVerdict {
                holds: false,
                first_violation: Some(BigUint::from(k + 1)),
                gap: (px.clone() - py.clone()).to_f64_lossy(),
                mass_equal,
            };
        }
    }
    if need_mass_equal && !mass_equal {
        return MajorizationVerdict {
            holds: false,
            first_violation: None,
            gap: (x.mass() - y.mass()).abs().to_f64_lossy(),
            mass_equal,
        };
    }
    MajorizationVerdict::pass(mass_equal)
}

/// Weak majorization on compressed spectra without expanding them.
///
/// The "sum of the k largest" functions are concave piecewise-linear in
/// k with breakpoints exactly at cumulative run counts, so their
/// difference is linear between adjacent breakpoints of the union and
/// it suffices to test the union breakpoints. When a breakpoint fails,
/// the first violating integer k is recovered by binary search inside
/// the preceding segment.
pub fn submajorizes_spectra<T: Scalar>(
    xs: &WeightedSpectrum<T>,
    ys: &WeightedSpectrum<T>,
    tol: &T,
) -> MajorizationVerdict {
    spectra_verdict(xs, ys, tol, false)
}

/// Majorization on compressed spectra: prefix condition plus equal
/// total mass.
pub fn majorizes_spectra<T: Scalar>(
    xs: &WeightedSpectrum<T>,
    ys: &WeightedSpectrum<T>,
    tol: &T,
) -> MajorizationVerdict {
    spectra_verdict(xs, ys, tol, true)
}

fn spectra_verdict<T: Scalar>(
    xs: &WeightedSpectrum<T>,
    ys: &WeightedSpectrum<T>,
    tol: &T,
    need_mass_equal: bool,
) -> MajorizationVerdict {
    let cx = CumulativeView::new(xs);
    let cy = CumulativeView::new(ys);
    let mass_equal = eq_within(cx.total_mass(), cy.total_mass(), tol);

    // Union of breakpoints, ascending. Beyond both totals the sums
    // saturate, so the largest relevant k is max(total_x, total_y).
    let mut breakpoints: Vec<BigUint> = cx
        .breakpoints()
        .iter()
        .chain(cy.breakpoints().iter())
        .cloned()
        .collect();
    breakpoints.sort();
    breakpoints.dedup();

    let mut prev_ok = BigUint::zero();
    for bp in &breakpoints {
        let fx = cx.sum_top(bp);
        let fy = cy.sum_top(bp);
        if !le_within(&fx, &fy, tol) {
            let first = first_violation_in(&cx, &cy, tol, &prev_ok, bp);
            let gx = cx.sum_top(&first);
            let gy = cy.sum_top(&first);
            return MajorizationVerdict {
                holds: false,
                first_violation: Some(first),
                gap: (gx - gy).to_f64_lossy(),
                mass_equal,
            };
        }
        prev_ok = bp.clone();
    }

    if need_mass_equal && !mass_equal {
        return MajorizationVerdict {
            holds: false,
            first_violation: None,
            gap: (cx.total_mass().clone() - cy.total_mass().clone())
                .abs()
                .to_f64_lossy(),
            mass_equal,
        };
    }
    MajorizationVerdict::pass(mass_equal)
}

/// Smallest integer k in (lo, hi] violating the prefix inequality,
/// given that lo satisfies it and hi does not. The difference is
/// linear on the segment, so the violating set is an upper interval
/// and binary search applies.
fn first_violation_in<T: Scalar>(
    cx: &CumulativeView<'_, T>,
    cy: &CumulativeView<'_, T>,
    tol: &T,
    lo: &BigUint,
    hi: &BigUint,
) -> BigUint {
    let mut lo = lo.clone();
    let mut hi = hi.clone();
    let one = BigUint::one();
    while &hi - &lo > one {
        let mid = (&lo + &hi) >> 1;
        let fx = cx.sum_top(&mid);
        let fy = cy.sum_top(&mid);
        if le_within(&fx, &fy, tol) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// Tail-measure dominance: for every threshold u > 0, the mass `x`
/// carries on coordinates at least u is at most the mass `y` carries
/// there. Sufficient (but not necessary) for x ≺_w y; it suffices to
/// test thresholds at the distinct coordinate values.
pub fn tail_dominates<T: Scalar>(x: &ProbVector<T>, y: &ProbVector<T>, tol: &T) -> bool {
    let sx = WeightedSpectrum::from_vector(x);
    let sy = WeightedSpectrum::from_vector(y);
    let mut thresholds: Vec<&T> = sx
        .entries()
        .iter()
        .chain(sy.entries().iter())
        .map(|e| &e.value)
        .collect();
    thresholds.sort_by(|a, b| b.partial_cmp(a).expect("validated coordinates"));
    for u in thresholds {
        if !le_within(&sx.tail_mass(u), &sy.tail_mass(u), tol) {
            return false;
        }
    }
    true
}

/// One row of a [`SchurReport`]: the ℓp comparison at a single p.
#[derive(Debug, Clone, PartialEq)]
pub struct SchurRow {
    pub p: f64,
    pub x_norm: f64,
    pub y_norm: f64,
    pub ok: bool,
}

/// ℓp-norm comparisons of x against y over a grid of exponents p >= 1.
/// Each failing row is a certificate that x is not in the
/// multi-copy/catalytic closure of y; all rows passing is the
/// necessary filter the search procedures insist on.
#[derive(Debug, Clone, PartialEq)]
pub struct SchurReport {
    pub rows: Vec<SchurRow>,
    pub all_ok: bool,
}

impl SchurReport {
    /// First failing row, if any.
    pub fn first_failure(&self) -> Option<&SchurRow> {
        self.rows.iter().find(|r| !r.ok)
    }
}

/// Evaluates `‖x‖_p <= ‖y‖_p` over the given exponent grid. The norms
/// are nonincreasing in every variable majorization moves mass along,
/// so any strict failure rules the dominance relations out.
pub fn schur_test<T: RealScalar>(
    x: &ProbVector<T>,
    y: &ProbVector<T>,
    p_grid: &[T],
    tol: &T,
) -> SchurReport {
    let mut rows = Vec::with_capacity(p_grid.len());
    let mut all_ok = true;
    for &p in p_grid {
        let xn = lp_norm(x, p).unwrap_or_else(|_| T::nan());
        let yn = lp_norm(y, p).unwrap_or_else(|_| T::nan());
        let ok = xn.is_valid() && yn.is_valid() && le_within(&xn, &yn, tol);
        all_ok &= ok;
        rows.push(SchurRow {
            p: p.to_f64_lossy(),
            x_norm: xn.to_f64_lossy(),
            y_norm: yn.to_f64_lossy(),
            ok,
        });
    }
    SchurReport { rows, all_ok }
}

/// The canonical exponent grid for condition-(c) checks: fixed points
/// {1, 1.25, 1.5, 2, 3, 4, 6, 8, 16, 32}, the pair-specific threshold
/// p_max when finite and larger than 1, and ∞.
pub fn canonical_p_grid<T: RealScalar>(x: &ProbVector<T>, y: &ProbVector<T>) -> Vec<T> {
    let mut grid: Vec<f64> = vec![1.0, 1.25, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0, 16.0, 32.0];
    let pm = p_max(x, y);
    if !pm.unconstrained {
        let v = pm.value.to_f64_lossy();
        if v.is_finite() && v > 1.0 && grid.iter().all(|&g| (g - v).abs() > 1e-12) {
            grid.push(v);
            grid.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        }
    }
    let mut out: Vec<T> = grid
        .into_iter()
        .map(|p| T::from_f64_lossy(p).expect("finite grid point"))
        .collect();
    out.push(T::infinity());
    out
}
