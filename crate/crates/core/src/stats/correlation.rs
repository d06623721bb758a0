use std::cmp::Ordering;

use crate::scalar::{count, lit, Scalar};

use super::special::student_t_two_sided;
use super::StatsError;

/// Sample Pearson correlation with a two-sided Student-t p-value (df = n − 2).
pub fn pearson<T: Scalar>(x: &[T], y: &[T]) -> Result<(T, T), StatsError> {
    check_pair(x, y)?;
    let n = x.len();
    let nf: T = count(n);
    let mx = x.iter().copied().sum::<T>() / nf;
    let my = y.iter().copied().sum::<T>() / nf;
    let mut sxy = T::zero();
    let mut sxx = T::zero();
    let mut syy = T::zero();
    for (&a, &b) in x.iter().zip(y) {
        let dx = a - mx;
        let dy = b - my;
        sxy = sxy + dx * dy;
        sxx = sxx + dx * dx;
        syy = syy + dy * dy;
    }
    if sxx <= T::zero() || syy <= T::zero() {
        return Err(StatsError::DegenerateInput("zero variance".into()));
    }
    let r = (sxy / (sxx.sqrt() * syy.sqrt())).max(-T::one()).min(T::one());
    Ok((r, correlation_p_value(r, n)))
}

/// Spearman rank correlation: Pearson over mid-ranks, same t-approximation.
pub fn spearman<T: Scalar>(x: &[T], y: &[T]) -> Result<(T, T), StatsError> {
    check_pair(x, y)?;
    pearson(&mid_ranks(x), &mid_ranks(y))
}

/// 1-based ranks with tied values sharing the mean of their positions.
pub fn mid_ranks<T: Scalar>(values: &[T]) -> Vec<T> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap_or(Ordering::Equal));
    let mut ranks = vec![T::zero(); values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && values[order[j]] == values[order[i]] {
            j += 1;
        }
        // positions i+1 ..= j share rank (i + 1 + j) / 2
        let rank = lit::<T>((i + 1 + j) as f64 / 2.0);
        for &k in &order[i..j] {
            ranks[k] = rank;
        }
        i = j;
    }
    ranks
}

fn correlation_p_value<T: Scalar>(r: T, n: usize) -> T {
    let df: T = count(n - 2);
    let denom = T::one() - r * r;
    if denom <= T::zero() {
        return T::zero();
    }
    let t = r * (df / denom).sqrt();
    student_t_two_sided(t, df)
}

fn check_pair<T: Scalar>(x: &[T], y: &[T]) -> Result<(), StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 3 {
        return Err(StatsError::DegenerateInput(format!("n = {} < 3", x.len())));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(StatsError::DegenerateInput("non-finite value".into()));
    }
    Ok(())
}
