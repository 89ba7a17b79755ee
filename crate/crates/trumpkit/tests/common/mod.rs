//! Shared generators and independent oracles for the integration suite.
//!
//! The oracles here deliberately re-derive results from first principles
//! (sort + prefix scan, full tensor-power expansion, brute-force tuple
//! enumeration) so that the library's compressed implementations are checked
//! against something that cannot share their bugs.

#![allow(dead_code)] // compiled once per test target; not every target uses every helper

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use trumpkit::scalar::Scalar;
use trumpkit::vecspace::ProbVector;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Random unit-mass vector: normalized exponential weights.
pub fn random_unit(rng: &mut ChaCha8Rng, d: usize) -> ProbVector<f64> {
    let w: Vec<f64> = (0..d).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let s: f64 = w.iter().sum();
    ProbVector::new(w.into_iter().map(|v| v / s).collect()).expect("unit vector")
}

/// Random deficient vector: a unit vector scaled by a factor in `[lo, hi)`.
pub fn random_subunit(rng: &mut ChaCha8Rng, d: usize, lo: f64, hi: f64) -> ProbVector<f64> {
    let c = rng.gen_range(lo..hi);
    let u = random_unit(rng, d);
    ProbVector::new(u.coords().iter().map(|v| v * c).collect()).expect("subunit vector")
}

/// Random unit-mass rational vector: an integer composition `w_i / q`.
pub fn random_unit_exact(rng: &mut ChaCha8Rng, d: usize) -> ProbVector<BigRational> {
    let w: Vec<i64> = (0..d).map(|_| rng.gen_range(1..=24)).collect();
    let q: i64 = w.iter().sum();
    ProbVector::new(w.into_iter().map(|n| rational(n, q)).collect()).expect("unit vector")
}

/// Random deficient rational vector: composition over a denominator with slack.
pub fn random_subunit_exact(rng: &mut ChaCha8Rng, d: usize) -> ProbVector<BigRational> {
    let w: Vec<i64> = (0..d).map(|_| rng.gen_range(1..=24)).collect();
    let q: i64 = w.iter().sum::<i64>() + rng.gen_range(1..=16);
    ProbVector::new(w.into_iter().map(|n| rational(n, q)).collect()).expect("subunit vector")
}

/// Applies `moves` random Robin Hood transfers to `y`, each moving part of the
/// gap between two coordinates from the richer to the poorer.  Every transfer
/// is a T-transform, so the result is majorized by `y` (and has equal mass).
pub fn robin_hood(rng: &mut ChaCha8Rng, y: &ProbVector<f64>, moves: usize) -> ProbVector<f64> {
    let mut a = y.coords().to_vec();
    for _ in 0..moves {
        let i = rng.gen_range(0..a.len());
        let j = rng.gen_range(0..a.len());
        if i == j {
            continue;
        }
        let (hi, lo) = if a[i] >= a[j] { (i, j) } else { (j, i) };
        // Transfer strictly less than half the gap so the pair never swaps order.
        let t = 0.5 * rng.gen_range(0.1..0.9);
        let delta = (a[hi] - a[lo]) * t;
        a[hi] -= delta;
        a[lo] += delta;
    }
    ProbVector::new(a).expect("robin hood keeps coordinates valid")
}

/// Exact-arithmetic Robin Hood transfers: moves `m/16` of the gap, `m <= 7`.
pub fn robin_hood_exact(
    rng: &mut ChaCha8Rng,
    y: &ProbVector<BigRational>,
    moves: usize,
) -> ProbVector<BigRational> {
    let mut a = y.coords().to_vec();
    for _ in 0..moves {
        let i = rng.gen_range(0..a.len());
        let j = rng.gen_range(0..a.len());
        if i == j {
            continue;
        }
        let (hi, lo) = if a[i] >= a[j] { (i, j) } else { (j, i) };
        let t = rational(rng.gen_range(1..=7), 16);
        let delta = (a[hi].clone() - a[lo].clone()) * t;
        a[hi] -= delta.clone();
        a[lo] += delta;
    }
    ProbVector::new(a).expect("robin hood keeps coordinates valid")
}

/// Result of the independent prefix-scan oracle.
pub struct NaiveScan {
    pub holds: bool,
    /// 1-based index of the first violated prefix, if any.
    pub first_violation: Option<usize>,
    /// Smallest absolute prefix gap seen across all indices.
    pub min_gap: f64,
}

/// Weak-majorization oracle: sort descending, compare prefix sums directly.
pub fn naive_submajorizes(x: &[f64], y: &[f64], tol: f64) -> NaiveScan {
    let mut xs = x.to_vec();
    let mut ys = y.to_vec();
    xs.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
    ys.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
    let k_max = xs.len().max(ys.len());
    let mut px = 0.0;
    let mut py = 0.0;
    let mut holds = true;
    let mut first_violation = None;
    let mut min_gap = f64::INFINITY;
    for k in 0..k_max {
        px += xs.get(k).copied().unwrap_or(0.0);
        py += ys.get(k).copied().unwrap_or(0.0);
        min_gap = min_gap.min((px - py).abs());
        if holds && px > py + tol {
            holds = false;
            first_violation = Some(k + 1);
        }
    }
    NaiveScan {
        holds,
        first_violation,
        min_gap,
    }
}

/// Exact weak-majorization oracle over rational coordinates.
pub fn naive_submajorizes_exact(
    x: &[BigRational],
    y: &[BigRational],
) -> (bool, Option<usize>) {
    let mut xs = x.to_vec();
    let mut ys = y.to_vec();
    xs.sort_by(|a, b| b.cmp(a));
    ys.sort_by(|a, b| b.cmp(a));
    let k_max = xs.len().max(ys.len());
    let zero = BigRational::from(BigInt::from(0));
    let mut px = zero.clone();
    let mut py = zero.clone();
    for k in 0..k_max {
        px += xs.get(k).cloned().unwrap_or_else(|| zero.clone());
        py += ys.get(k).cloned().unwrap_or_else(|| zero.clone());
        if px > py {
            return (false, Some(k + 1));
        }
    }
    (true, None)
}

/// Fully expanded n-fold tensor power, built by repeated pairwise products.
pub fn tensor_power<T: Scalar>(v: &ProbVector<T>, n: u32) -> ProbVector<T> {
    let mut acc = ProbVector::weights(vec![T::one()]).expect("unit seed");
    for _ in 0..n {
        acc = acc.tensor(v).expect("tensor within caps");
    }
    acc
}

/// Brute-force tail mass of the n-fold product distribution: sums the product
/// weight of every index tuple whose coordinate product is >= `threshold`.
pub fn brute_force_tail<T: Scalar>(v: &ProbVector<T>, n: u32, threshold: &T) -> T {
    let coords = v.coords();
    if coords.is_empty() && n > 0 {
        return T::zero(); // no tuples to sum
    }
    let mut total = T::zero();
    let mut idx = vec![0usize; n as usize];
    loop {
        let mut prod = T::one();
        for &i in &idx {
            prod = prod * coords[i].clone();
        }
        if prod >= *threshold {
            total = total + prod;
        }
        // Mixed-radix increment over index tuples.
        let mut pos = 0;
        loop {
            if pos == idx.len() {
                return total;
            }
            idx[pos] += 1;
            if idx[pos] < coords.len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}
