//! Max-ranks, tie statistics and rank-indexed weight tables.
//!
//! Ranks follow the convention `R_i = #{j : Y_j <= Y_i}`, so tied values all
//! share the largest rank of their group and the maxima always have rank `n`.

use serde::Serialize;

use crate::error::{ensure_finite, ensure_len, Error, Result};
use crate::sum::CompensatedSum;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankInfo {
    ranks: Vec<usize>,
    n: usize,
    n_max: usize,
    c_min: usize,
    n0: usize,
    distinct_rank_values: Vec<usize>,
}

impl RankInfo {
    /// Ranks in input order, each in `1..=n`.
    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of observations attaining the maximum.
    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// 1 if the minimum is attained exactly once, else 0.
    pub fn c_min(&self) -> usize {
        self.c_min
    }

    /// Tie correction `n_max + c_min`; equals 2 when all values are distinct.
    pub fn n0(&self) -> usize {
        self.n0
    }

    pub fn distinct_rank_values(&self) -> &[usize] {
        &self.distinct_rank_values
    }

    /// True when the general estimator is undefined (`n0 == n`).
    pub fn is_degenerate(&self) -> bool {
        self.n0 >= self.n
    }

    pub fn weight_table(&self) -> WeightTable {
        WeightTable::from_ranks(self.n, &self.ranks)
    }
}

/// Computes max-ranks and the tie census of `y`.
pub fn compute_ranks(y: &[f64]) -> Result<RankInfo> {
    ensure_len(y.len(), 1)?;
    ensure_finite(y, "response")?;
    let n = y.len();

    let mut order: Vec<usize> = (0..n).collect();
    // Finite values only, so partial_cmp never fails.
    order.sort_unstable_by(|&a, &b| y[a].partial_cmp(&y[b]).unwrap());

    let mut ranks = vec![0usize; n];
    let mut distinct = Vec::new();
    let mut group_sizes = Vec::new();
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && y[order[end]] == y[order[start]] {
            end += 1;
        }
        for &idx in &order[start..end] {
            ranks[idx] = end;
        }
        distinct.push(end);
        group_sizes.push(end - start);
        start = end;
    }

    let n_max = *group_sizes.last().expect("n >= 1");
    let c_min = usize::from(group_sizes[0] == 1);
    Ok(RankInfo {
        ranks,
        n,
        n_max,
        c_min,
        n0: n_max + c_min,
        distinct_rank_values: distinct,
    })
}

/// Weight `1/((r-1)(n-r))` attached to rank `r`; zero at the extreme ranks.
#[inline]
pub fn rank_weight(r: usize, n: usize) -> f64 {
    if r <= 1 || r >= n {
        0.0
    } else {
        1.0 / (((r - 1) as u64 * (n - r) as u64) as f64)
    }
}

/// Per-rank weights and prefix sums of the weighted rank mass.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightTable {
    n: usize,
    weights: Vec<f64>,
    prefix: Vec<f64>,
}

impl WeightTable {
    /// Builds the table for a rank vector whose entries lie in `1..=n`.
    pub fn from_ranks(n: usize, ranks: &[usize]) -> Self {
        let mut counts = vec![0u64; n + 1];
        for &r in ranks {
            counts[r] += 1;
        }
        Self::from_counts(n, &counts)
    }

    /// Table for a permutation of `1..=n` (each rank occurs once).
    pub fn for_permutation(n: usize) -> Self {
        let mut counts = vec![1u64; n + 1];
        counts[0] = 0;
        Self::from_counts(n, &counts)
    }

    fn from_counts(n: usize, counts: &[u64]) -> Self {
        let weights: Vec<f64> = (0..=n).map(|r| rank_weight(r, n)).collect();
        let mut prefix = vec![0.0; n + 1];
        let mut acc = CompensatedSum::new();
        for r in 1..=n {
            if counts[r] > 0 {
                acc.add(counts[r] as f64 * weights[r]);
            }
            prefix[r] = acc.value();
        }
        Self { n, weights, prefix }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Weight of rank `r` (index 0 is unused and zero).
    pub fn weight(&self, r: usize) -> f64 {
        self.weights[r]
    }

    /// Cumulative weighted mass of ranks `1..=r`.
    pub fn prefix(&self, r: usize) -> f64 {
        self.prefix[r]
    }

    pub fn total(&self) -> f64 {
        self.prefix[self.n]
    }

    /// Sum of `weights[R_j]` over observations with `lo <= R_j <= hi`, in O(1).
    pub fn weighted_rank_mass(&self, lo: usize, hi: usize) -> Result<f64> {
        if lo == 0 || hi > self.n {
            return Err(Error::Input(format!(
                "rank interval [{lo}, {hi}] outside 1..={}",
                self.n
            )));
        }
        if lo > hi {
            return Err(Error::Input(format!("empty rank interval [{lo}, {hi}]")));
        }
        Ok(self.prefix[hi] - self.prefix[lo - 1])
    }
}

/// Evaluates `sum_r counts[r] / ((r-1)(n-r))` with compensated summation.
///
/// Both the fast and the brute-force estimators reduce to integer per-rank
/// interval counts, and both finish here, so equal counts give equal bits.
pub(crate) fn weighted_count_sum(counts: &[u64], n: usize) -> f64 {
    let mut acc = CompensatedSum::new();
    for (r, &c) in counts.iter().enumerate() {
        if c > 0 && r > 1 && r < n {
            acc.add(c as f64 * rank_weight(r, n));
        }
    }
    acc.value()
}
