//! Descriptive statistics and the two-sided Wilcoxon rank-sum test, both
//! implemented in-repo so reported p-values are bit-stable.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Summary of the runtimes of one experiment cell. Quartiles use linear
/// interpolation between order statistics (the "type 7" convention).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub mean: f64,
    /// Sample standard deviation (n-1 denominator); 0 when only one value.
    pub std: f64,
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
    pub count: usize,
    pub capped_count: usize,
}

/// Statistics over the uncapped runtimes of a cell; `None` when every run
/// was capped (the empty-cell marker).
pub fn summarize_values(values: &[f64], capped_count: usize) -> Option<SummaryStats> {
    if values.is_empty() {
        return None;
    }
    let count = values.len();
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("runtimes are finite"));
    let mean = sorted.iter().sum::<f64>() / count as f64;
    let std = if count > 1 {
        let ss = sorted.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>();
        (ss / (count - 1) as f64).sqrt()
    } else {
        0.0
    };
    Some(SummaryStats {
        mean,
        std,
        median: quantile_type7(&sorted, 0.5),
        q1: quantile_type7(&sorted, 0.25),
        q3: quantile_type7(&sorted, 0.75),
        count,
        capped_count,
    })
}

/// Linear interpolation between order statistics: position `(n-1)q`.
fn quantile_type7(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let frac = h - lo as f64;
    if frac == 0.0 || lo + 1 >= sorted.len() {
        sorted[lo]
    } else {
        sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
    }
}

/// Two-sided Mann-Whitney/Wilcoxon rank-sum p-value.
///
/// Exact enumeration of the rank-sum distribution when the pooled sample has
/// at most 20 observations and no ties; otherwise the normal approximation
/// with midranks, tie correction and continuity correction.
pub fn wilcoxon_rank_sum(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySample(
            "rank-sum test requires non-empty samples".into(),
        ));
    }
    for &v in a.iter().chain(b) {
        if !v.is_finite() {
            return Err(Error::InvalidInput(
                "rank-sum test requires finite values".into(),
            ));
        }
    }
    let n = a.len() + b.len();
    if n <= 20 && !has_ties(a, b) {
        Ok(exact_p_value(a, b))
    } else {
        Ok(approx_p_value(a, b))
    }
}

fn has_ties(a: &[f64], b: &[f64]) -> bool {
    let mut pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    pooled.sort_by(|x, y| x.partial_cmp(y).expect("finite"));
    pooled.windows(2).any(|w| w[0] == w[1])
}

/// Exact two-sided p-value: the probability, over all equally likely rank
/// assignments, of a rank sum at least as far from its mean as observed.
/// Counts subsets by dynamic programming; counts stay exact in f64 for the
/// pooled sizes where this branch applies.
fn exact_p_value(a: &[f64], b: &[f64]) -> f64 {
    let na = a.len();
    let n = na + b.len();
    let w = rank_sum_of_first(a, b) as u64;

    let max_sum = n * (n + 1) / 2;
    // ways[k][s]: number of k-subsets of {1..n} with rank sum s.
    let mut ways = vec![vec![0.0f64; max_sum + 1]; na + 1];
    ways[0][0] = 1.0;
    for value in 1..=n {
        for k in (1..=na.min(value)).rev() {
            for s in (value..=max_sum).rev() {
                let add = ways[k - 1][s - value];
                if add != 0.0 {
                    ways[k][s] += add;
                }
            }
        }
    }
    let total: f64 = ways[na].iter().sum();
    // Distances doubled to stay in integers: 2*mean = na*(n+1).
    let center2 = (na * (n + 1)) as i64;
    let observed = (2 * w as i64 - center2).abs();
    let mut extreme = 0.0;
    for (s, &count) in ways[na].iter().enumerate() {
        if (2 * s as i64 - center2).abs() >= observed {
            extreme += count;
        }
    }
    extreme / total
}

/// Rank sum of sample `a` in the pooled ordering; midranks for ties.
fn rank_sum_of_first(a: &[f64], b: &[f64]) -> f64 {
    let mut pooled: Vec<(f64, bool)> = a
        .iter()
        .map(|&v| (v, true))
        .chain(b.iter().map(|&v| (v, false)))
        .collect();
    pooled.sort_by(|x, y| x.0.partial_cmp(&y.0).expect("finite"));
    let mut sum = 0.0;
    let mut i = 0;
    while i < pooled.len() {
        let mut j = i;
        while j < pooled.len() && pooled[j].0 == pooled[i].0 {
            j += 1;
        }
        // Ranks are 1-based; the group [i, j) shares the average rank.
        let midrank = (i + 1 + j) as f64 / 2.0;
        for entry in &pooled[i..j] {
            if entry.1 {
                sum += midrank;
            }
        }
        i = j;
    }
    sum
}

fn approx_p_value(a: &[f64], b: &[f64]) -> f64 {
    let na = a.len() as f64;
    let nb = b.len() as f64;
    let n = na + nb;
    let w = rank_sum_of_first(a, b);
    let mean = na * (n + 1.0) / 2.0;

    let mut pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    pooled.sort_by(|x, y| x.partial_cmp(y).expect("finite"));
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < pooled.len() {
        let mut j = i;
        while j < pooled.len() && pooled[j] == pooled[i] {
            j += 1;
        }
        let t = (j - i) as f64;
        tie_term += t * t * t - t;
        i = j;
    }
    let variance = na * nb / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    if variance <= 0.0 {
        // Every pooled value identical: no evidence of separation.
        return 1.0;
    }
    let z = ((w - mean).abs() - 0.5).max(0.0) / variance.sqrt();
    // Two-sided: 2 * (1 - Phi(z)) = erfc(z / sqrt(2)).
    libm::erfc(z / std::f64::consts::SQRT_2).clamp(0.0, 1.0)
}
