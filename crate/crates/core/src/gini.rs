//! Degree-based Gini indices.
//!
//! The topological index of a graph of order `n` with degrees `D_i` is
//!
//! ```text
//!            sum_{i <= j} |D_j - D_i|
//!   G(H) = ----------------------------
//!            n^2 * (sum_i D_i / n)
//! ```
//!
//! Everything here works on [`DegreeMultiset`] so trees with `10^5` nodes
//! cost only as much as their number of distinct degrees.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::types::DegreeMultiset;

/// Sum of `|D_j - D_i|` over unordered node pairs.
///
/// Uses the sorted-prefix identity: a degree `d` held by `c` nodes
/// contributes `c * (d * below_count - below_sum)` against all smaller
/// degrees.
pub fn pairwise_abs_diff_sum(degrees: &DegreeMultiset) -> u128 {
    let mut below_count: u128 = 0;
    let mut below_sum: u128 = 0;
    let mut total: u128 = 0;
    for (d, c) in degrees.iter() {
        let (d, c) = (u128::from(d), u128::from(c));
        total += c * (d * below_count - below_sum);
        below_count += c;
        below_sum += c * d;
    }
    total
}

/// [`pairwise_abs_diff_sum`] as a real.
pub fn sum_abs_pairwise_diffs(degrees: &DegreeMultiset) -> f64 {
    pairwise_abs_diff_sum(degrees) as f64
}

/// Topological degree Gini index.
pub fn degree_gini(degrees: &DegreeMultiset) -> Result<f64> {
    let n = degrees.order();
    let total = degrees.degree_sum();
    if n == 0 || total == 0 {
        return Err(Error::UndefinedIndex);
    }
    // n^2 * (total / n) == n * total
    let denom = u128::from(n) * u128::from(total);
    Ok(pairwise_abs_diff_sum(degrees) as f64 / denom as f64)
}

/// Closed form of [`degree_gini`] for a binary tree with `n1`, `n2`, `n3`
/// nodes of degree 1, 2 and 3.
///
/// Realizability of the triple as a binary tree is not checked. The result
/// is bit-identical to `degree_gini` on `{1: n1, 2: n2, 3: n3}`.
pub fn binary_gini(n1: u64, n2: u64, n3: u64) -> Result<f64> {
    let (a, b, c) = (u128::from(n1), u128::from(n2), u128::from(n3));
    let n = a + b + c;
    let total = a + 2 * b + 3 * c;
    if total == 0 {
        return Err(Error::UndefinedIndex);
    }
    let numer = a * b + b * c + 2 * a * c;
    Ok(numer as f64 / (n * total) as f64)
}

/// Per-graph ingredients of the class-relative index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GraphSample {
    pub abs_diff_sum: f64,
    pub order: u64,
    pub degree_sum: u64,
}

impl GraphSample {
    pub fn from_degrees(degrees: &DegreeMultiset) -> Self {
        Self {
            abs_diff_sum: sum_abs_pairwise_diffs(degrees),
            order: degrees.order(),
            degree_sum: degrees.degree_sum(),
        }
    }
}

/// Plug-in estimate of the class-relative degree Gini index: the mean
/// pairwise-difference sum over `(mean order)^2 * mean(degree_sum / order)`.
///
/// A ratio of means, so it carries an `O(1/R)` bias in the replicate count.
pub fn class_gini_estimate(samples: &[GraphSample]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptySamples);
    }
    if samples.iter().any(|s| s.order == 0) {
        return Err(invalid("every sample needs order >= 1"));
    }
    if samples.iter().all(|s| s.degree_sum == 0) {
        return Err(Error::UndefinedIndex);
    }
    let r = samples.len() as f64;
    let mean_numer = samples.iter().map(|s| s.abs_diff_sum).sum::<f64>() / r;
    let mean_order = samples.iter().map(|s| s.order as f64).sum::<f64>() / r;
    let mean_degree =
        samples.iter().map(|s| s.degree_sum as f64 / s.order as f64).sum::<f64>() / r;
    Ok(mean_numer / (mean_order * mean_order * mean_degree))
}

/// Wealth Gini of a caterpillar spine for one realization:
/// `sum_{i,j} |W_i - W_j| / (2 s n)` with `n` the total attachments.
pub fn wealth_gini(wealth: &[u64], total: u64) -> Result<f64> {
    if total == 0 {
        return Err(invalid("wealth Gini needs at least one attachment"));
    }
    if wealth.is_empty() {
        return Err(invalid("spine length must be at least 1"));
    }
    let s = wealth.len() as u128;
    let unordered = pairwise_abs_diff_sum(&DegreeMultiset::from_degrees(wealth.iter().copied()));
    // ordered pairs double the unordered sum
    Ok((2 * unordered) as f64 / (2 * s * u128::from(total)) as f64)
}

/// Limiting proportions of degree-1, degree-2 and degree-3 nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitProfile {
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
}

impl LimitProfile {
    pub fn new(p1: f64, p2: f64, p3: f64) -> Result<Self> {
        let ok = [p1, p2, p3].iter().all(|p| p.is_finite() && *p >= 0.0)
            && (p1 + p2 + p3 - 1.0).abs() <= 1e-12;
        if !ok {
            return Err(invalid(format!("not a probability triple: ({p1}, {p2}, {p3})")));
        }
        Ok(Self { p1, p2, p3 })
    }
}

/// Gini index implied by limiting degree proportions of a binary tree.
pub fn limit_gini(profile: &LimitProfile) -> f64 {
    let LimitProfile { p1, p2, p3 } = *profile;
    (p1 * p2 + p2 * p3 + 2.0 * p1 * p3) / (p1 + 2.0 * p2 + 3.0 * p3)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ms(pairs: &[(u64, u64)]) -> DegreeMultiset {
        DegreeMultiset::from_counts(pairs.iter().copied())
    }

    #[test]
    fn pairwise_examples() {
        assert_eq!(sum_abs_pairwise_diffs(&ms(&[(1, 3)])), 0.0);
        assert_eq!(sum_abs_pairwise_diffs(&ms(&[(3, 1), (1, 3)])), 6.0);
        assert_eq!(sum_abs_pairwise_diffs(&ms(&[(1, 2), (2, 1)])), 2.0);
    }

    #[test]
    fn degree_gini_examples() {
        assert_eq!(degree_gini(&ms(&[(1, 2)])).unwrap(), 0.0);
        assert_eq!(degree_gini(&ms(&[(3, 1), (1, 3)])).unwrap(), 0.25);
        assert!((degree_gini(&ms(&[(1, 2), (2, 1)])).unwrap() - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn isolated_node_is_undefined() {
        assert_eq!(degree_gini(&ms(&[(0, 1)])), Err(Error::UndefinedIndex));
        assert_eq!(degree_gini(&DegreeMultiset::new()), Err(Error::UndefinedIndex));
    }

    #[test]
    fn binary_examples() {
        assert!((binary_gini(2, 1, 0).unwrap() - 1.0 / 6.0).abs() < 1e-15);
        assert_eq!(binary_gini(3, 0, 1).unwrap(), 0.25);
        assert!((binary_gini(2, 2, 0).unwrap() - 1.0 / 6.0).abs() < 1e-15);
        assert_eq!(binary_gini(0, 0, 0), Err(Error::UndefinedIndex));
    }

    #[test]
    fn class_estimate_examples() {
        let a = GraphSample { abs_diff_sum: 2.0, order: 3, degree_sum: 4 };
        let b = GraphSample { abs_diff_sum: 6.0, order: 4, degree_sum: 6 };
        assert!((class_gini_estimate(&[a]).unwrap() - 1.0 / 6.0).abs() < 1e-15);
        assert!((class_gini_estimate(&[a, a]).unwrap() - 1.0 / 6.0).abs() < 1e-15);
        // 4 / (3.5^2 * (1.5 + 4/3) / 2)
        let expected = 4.0 / (12.25 * (1.5 + 4.0 / 3.0) / 2.0);
        assert!((class_gini_estimate(&[b, a]).unwrap() - expected).abs() < 1e-15);
        assert!((expected - 0.23049).abs() < 1e-5);
    }

    #[test]
    fn class_estimate_errors() {
        assert_eq!(class_gini_estimate(&[]), Err(Error::EmptySamples));
        let zero = GraphSample { abs_diff_sum: 0.0, order: 1, degree_sum: 0 };
        assert_eq!(class_gini_estimate(&[zero, zero]), Err(Error::UndefinedIndex));
        let bad = GraphSample { abs_diff_sum: 0.0, order: 0, degree_sum: 0 };
        assert!(class_gini_estimate(&[bad]).is_err());
    }

    #[test]
    fn wealth_examples() {
        assert_eq!(wealth_gini(&[4, 4, 4], 12).unwrap(), 0.0);
        assert_eq!(wealth_gini(&[10, 0], 10).unwrap(), 0.5);
        assert_eq!(wealth_gini(&[7], 7).unwrap(), 0.0);
        assert!(wealth_gini(&[0, 0], 0).is_err());
    }

    #[test]
    fn limit_examples() {
        let bst = LimitProfile::new(1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0).unwrap();
        assert!((limit_gini(&bst) - 2.0 / 9.0).abs() < 1e-15);

        let r5 = 5f64.sqrt();
        let pyr = LimitProfile::new((3.0 - r5) / 2.0, r5 - 2.0, (3.0 - r5) / 2.0).unwrap();
        assert!((limit_gini(&pyr) - (r5 - 2.0)).abs() < 1e-12);
        assert!((limit_gini(&pyr) - 0.236068).abs() < 1e-6);

        let leaves = LimitProfile::new(1.0, 0.0, 0.0).unwrap();
        assert_eq!(limit_gini(&leaves), 0.0);
    }

    #[test]
    fn profile_must_sum_to_one() {
        assert!(LimitProfile::new(0.5, 0.5, 0.5).is_err());
        assert!(LimitProfile::new(-0.1, 0.6, 0.5).is_err());
    }
}
