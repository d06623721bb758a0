use serde::Serialize;

use crate::scalar::{count, lit, Scalar};

use super::correlation::mid_ranks;
use super::special::normal_two_sided;
use super::StatsError;

/// Largest combined sample size for which the exact null distribution is used.
pub const EXACT_LIMIT: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum UMethod {
    Exact,
    /// Normal approximation with tie-corrected variance and continuity correction.
    Normal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MannWhitney<T> {
    /// `#{(i, j): a_i > b_j} + 0.5 · #{ties}`
    pub u: T,
    pub p: T,
    pub method: UMethod,
}

/// Two-sided Mann–Whitney U test of `a` against `b`.
///
/// Tie-free samples with `|a| + |b| <= EXACT_LIMIT` use the exact null
/// distribution; the p-value is the doubled smaller tail, capped at 1.
pub fn mann_whitney<T: Scalar>(a: &[T], b: &[T]) -> Result<MannWhitney<T>, StatsError> {
    if a.is_empty() || b.is_empty() {
        return Err(StatsError::EmptyGroup);
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(StatsError::DegenerateInput("non-finite value".into()));
    }
    let u = u_statistic(a, b);
    let pooled: Vec<T> = a.iter().chain(b).copied().collect();
    let tie_groups = tie_group_sizes(&pooled);
    let has_ties = tie_groups.iter().any(|&t| t > 1);
    let n1 = a.len();
    let n2 = b.len();

    if !has_ties && n1 + n2 <= EXACT_LIMIT {
        // u is an integer here
        let u_int = u.to_usize().expect("integral U");
        let p = exact_two_sided_p(u_int, n1, n2);
        return Ok(MannWhitney { u, p: lit(p), method: UMethod::Exact });
    }

    let n = n1 + n2;
    let n1f: T = count(n1);
    let n2f: T = count(n2);
    let nf: T = count(n);
    let mean = n1f * n2f / lit(2.0);
    let tie_term: T = tie_groups
        .iter()
        .map(|&t| {
            let t: T = count(t);
            t * t * t - t
        })
        .sum();
    let var = n1f * n2f / lit(12.0) * ((nf + T::one()) - tie_term / (nf * (nf - T::one())));
    let p = if var <= T::zero() {
        T::one()
    } else {
        let z = ((u - mean).abs() - lit(0.5)).max(T::zero()) / var.sqrt();
        normal_two_sided(z)
    };
    Ok(MannWhitney { u, p, method: UMethod::Normal })
}

/// `#{(i, j): a_i > b_j} + 0.5 · #{a_i == b_j}`
pub fn u_statistic<T: Scalar>(a: &[T], b: &[T]) -> T {
    let mut twice = 0usize;
    for &x in a {
        for &y in b {
            if x > y {
                twice += 2;
            } else if x == y {
                twice += 1;
            }
        }
    }
    count::<T>(twice) / lit(2.0)
}

fn tie_group_sizes<T: Scalar>(values: &[T]) -> Vec<usize> {
    let ranks = mid_ranks(values);
    let mut sorted: Vec<T> = ranks;
    sorted.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let mut groups = Vec::new();
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i + 1;
        while j < sorted.len() && sorted[j] == sorted[i] {
            j += 1;
        }
        groups.push(j - i);
        i = j;
    }
    groups
}

/// Null distribution of U for group sizes `(n1, n2)` as raw counts.
///
/// Built by dynamic programming over rank sums: `ways[k][s]` counts the
/// k-subsets of the ranks seen so far with rank sum `s`. Entry `u` of the
/// result counts the assignments where the first group's U equals `u`;
/// the counts sum to `C(n1 + n2, n1)`.
pub fn u_null_counts(n1: usize, n2: usize) -> Vec<u128> {
    let n = n1 + n2;
    let max_sum = n * (n + 1) / 2;
    let mut ways = vec![vec![0u128; max_sum + 1]; n1 + 1];
    ways[0][0] = 1;
    for rank in 1..=n {
        for k in (1..=n1.min(rank)).rev() {
            for s in (rank..=max_sum).rev() {
                let add = ways[k - 1][s - rank];
                if add != 0 {
                    ways[k][s] += add;
                }
            }
        }
    }
    let offset = n1 * (n1 + 1) / 2;
    let mut counts = vec![0u128; n1 * n2 + 1];
    for (s, &w) in ways[n1].iter().enumerate().skip(offset) {
        if w != 0 {
            counts[s - offset] += w;
        }
    }
    counts
}

/// Exact two-sided p: `min(1, 2 · min(P(U ≤ u), P(U ≥ u)))`.
pub fn exact_two_sided_p(u: usize, n1: usize, n2: usize) -> f64 {
    let counts = u_null_counts(n1, n2);
    let total: u128 = counts.iter().sum();
    let lower: u128 = counts[..=u.min(n1 * n2)].iter().sum();
    let upper: u128 = counts[u.min(n1 * n2)..].iter().sum();
    let tail = lower.min(upper);
    (2.0 * tail as f64 / total as f64).min(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_exact_case() {
        // C(4,2) = 6 assignments, only one gives U = 4
        let r = mann_whitney(&[3.0, 4.0], &[1.0, 2.0]).unwrap();
        assert_eq!(r.u, 4.0);
        assert_eq!(r.method, UMethod::Exact);
        assert!((r.p - 1.0f64 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn null_counts_are_symmetric_and_complete() {
        let c = u_null_counts(5, 5);
        assert_eq!(c.iter().sum::<u128>(), 252);
        let rev: Vec<u128> = c.iter().rev().copied().collect();
        assert_eq!(c, rev);
    }

    #[test]
    fn ties_fall_back_to_normal() {
        let r = mann_whitney(&[1.0, 2.0, 2.0], &[2.0, 3.0, 4.0]).unwrap();
        assert_eq!(r.method, UMethod::Normal);
        assert_eq!(r.u, 1.0);
        // scipy.stats.mannwhitneyu(..., method="asymptotic")
        assert!((r.p - 0.164_159_728_478_515_23f64).abs() < 1e-12);
    }

    #[test]
    fn large_sample_matches_reference_normal_approximation() {
        let a = [1.5, 2.0, 2.0, 7.0, 8.0, 9.0, 10.0, 11.0, 12.0, 13.0, 14.0, 15.0, 16.0];
        let b = [2.0, 3.0, 4.0, 5.0, 6.0, 6.0, 17.0, 18.0, 19.0, 20.0, 21.0, 22.0, 23.0, 24.0];
        let r = mann_whitney(&a, &b).unwrap();
        assert_eq!(r.u, 61.0);
        assert!((r.p - 0.151_967_789_140_794_95f64).abs() < 1e-12);
    }

    #[test]
    fn all_tied_gives_p_one() {
        let r = mann_whitney(&[1.0, 1.0], &[1.0, 1.0]).unwrap();
        assert_eq!(r.u, 2.0);
        assert_eq!(r.p, 1.0);
    }

    #[test]
    fn empty_group_is_an_error() {
        assert!(matches!(mann_whitney::<f64>(&[], &[1.0]), Err(StatsError::EmptyGroup)));
    }
}
