use crate::coefficient::{cover_counts, in_closed, CoefficientResult, Method};
use crate::error::{ensure_finite, ensure_len, Error, Result};
use crate::neighbors::tie_key;
use crate::ranks::{compute_ranks, weighted_count_sum};

pub(crate) fn check_pair(y: &[f64], x: &[f64], min_n: usize) -> Result<()> {
    if y.len() != x.len() {
        return Err(Error::Input(format!(
            "response has {} values but covariate has {}",
            y.len(),
            x.len()
        )));
    }
    ensure_len(y.len(), min_n)?;
    ensure_finite(y, "response")?;
    ensure_finite(x, "covariate")
}

/// Max-ranks of `y` listed in increasing order of `x`, ties in `x` broken
/// uniformly at random by `seed`. Also returns the number of observations
/// whose `x` value is shared with another observation.
pub fn ordered_ranks(y: &[f64], x: &[f64], seed: u64) -> Result<(Vec<usize>, usize)> {
    check_pair(y, x, 1)?;
    let n = y.len();
    let info = compute_ranks(y)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_unstable_by(|&a, &b| {
        x[a].partial_cmp(&x[b])
            .unwrap()
            .then_with(|| tie_key(seed, n, a).cmp(&tie_key(seed, n, b)))
            .then(a.cmp(&b))
    });
    let mut tied = 0;
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && x[order[end]] == x[order[start]] {
            end += 1;
        }
        if end - start > 1 {
            tied += end - start;
        }
        start = end;
    }
    let ranks = order.iter().map(|&i| info.ranks()[i]).collect();
    Ok((ranks, tied))
}

fn is_constant(r: &[usize]) -> bool {
    r.iter().all(|&v| v == r.len())
}

/// Simple estimator from ranks already arranged in covariate order.
///
/// Interval `K_i` joins consecutive ranks `r_i, r_{i+1}`; rank `r_j` is
/// counted against every interval except the two it is an endpoint of by
/// position (`K_j` and `K_{j-1}`).
pub fn nu_1dim_from_ranks(r: &[usize]) -> f64 {
    let n = r.len();
    let cover = cover_counts(n, r.windows(2).map(|w| (w[0], w[1])));
    let mut per_rank = vec![0u64; n + 1];
    for (j, &rj) in r.iter().enumerate() {
        if rj == 1 || rj == n {
            continue;
        }
        let own = i64::from(j + 1 < n) + i64::from(j >= 1);
        let c = cover[rj] - own;
        debug_assert!(c >= 0);
        per_rank[rj] += c as u64;
    }
    1.0 - 0.5 * weighted_count_sum(&per_rank, n)
}

/// Literal double loop over `(j, i)`; brute-force check of
/// [`nu_1dim_from_ranks`].
pub fn nu_1dim_oracle_from_ranks(r: &[usize]) -> f64 {
    let n = r.len();
    let mut per_rank = vec![0u64; n + 1];
    for j in 0..n {
        if r[j] == 1 || r[j] == n {
            continue;
        }
        // 0-based interval i spans positions i and i + 1.
        for i in 0..n - 1 {
            if i == j || i + 1 == j {
                continue;
            }
            if in_closed(r[j], r[i], r[i + 1]) {
                per_rank[r[j]] += 1;
            }
        }
    }
    1.0 - 0.5 * weighted_count_sum(&per_rank, n)
}

fn evaluate(y: &[f64], x: &[f64], seed: u64, oracle: bool) -> Result<CoefficientResult> {
    check_pair(y, x, 4)?;
    let (r, tied) = ordered_ranks(y, x, seed)?;
    if is_constant(&r) {
        return Err(Error::DegenerateResponse(
            "all response values are equal".into(),
        ));
    }
    let value = if oracle {
        nu_1dim_oracle_from_ranks(&r)
    } else {
        nu_1dim_from_ranks(&r)
    };
    Ok(CoefficientResult {
        value,
        method: Method::Nu1d,
        n: r.len(),
        n0: None,
        seed,
        replicates: 1,
        tie_events: tied,
        oracle_checked: oracle,
    })
}

/// Simple integrated R² estimator for a single covariate, O(n log n).
pub fn nu_1dim(y: &[f64], x: &[f64], seed: u64) -> Result<CoefficientResult> {
    evaluate(y, x, seed, false)
}

pub fn nu_1dim_oracle(y: &[f64], x: &[f64], seed: u64) -> Result<CoefficientResult> {
    evaluate(y, x, seed, true)
}
