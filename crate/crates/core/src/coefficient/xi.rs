use crate::coefficient::one_dim::{check_pair, ordered_ranks};
use crate::coefficient::{CoefficientResult, Method};
use crate::error::{Error, Result};

/// Interval form of ξ: `1 - 3/(n²-1) · Σ_i #{j ≠ i : r_j ∈ K_i}`.
pub fn xi_from_ranks(r: &[usize]) -> f64 {
    let n = r.len();
    let mut prefix = vec![0u64; n + 1];
    for &v in r {
        prefix[v] += 1;
    }
    for v in 1..=n {
        prefix[v] += prefix[v - 1];
    }
    let total: u64 = r
        .windows(2)
        .map(|w| {
            let (lo, hi) = if w[0] <= w[1] {
                (w[0], w[1])
            } else {
                (w[1], w[0])
            };
            prefix[hi] - prefix[lo - 1] - 1
        })
        .sum();
    let n = n as u64;
    1.0 - (3 * total) as f64 / (n * n - 1) as f64
}

/// Rank-difference form with Chatterjee's tie correction,
/// `1 - n Σ|r_{i+1} - r_i| / (2 Σ l_i (n - l_i))` where `l_i = #{j : y_j >= y_i}`.
/// Equals [`xi_from_ranks`] when all ranks are distinct.
pub fn xi_rank_difference_from_ranks(r: &[usize]) -> f64 {
    let n = r.len();
    let mut multiplicity = vec![0u64; n + 1];
    for &v in r {
        multiplicity[v] += 1;
    }
    let jumps: u64 = r.windows(2).map(|w| w[0].abs_diff(w[1]) as u64).sum();
    let denom: u64 = r
        .iter()
        .map(|&v| {
            let below = v as u64 - multiplicity[v];
            let l = n as u64 - below;
            l * (n as u64 - l)
        })
        .sum();
    1.0 - (n as u64 * jumps) as f64 / (2 * denom) as f64
}

fn constant(r: &[usize]) -> bool {
    r.iter().all(|&v| v == r.len())
}

fn evaluate(y: &[f64], x: &[f64], seed: u64, f: fn(&[usize]) -> f64) -> Result<CoefficientResult> {
    check_pair(y, x, 2)?;
    let (r, tied) = ordered_ranks(y, x, seed)?;
    if constant(&r) {
        return Err(Error::DegenerateResponse(
            "all response values are equal".into(),
        ));
    }
    Ok(CoefficientResult {
        value: f(&r),
        method: Method::Xi,
        n: r.len(),
        n0: None,
        seed,
        replicates: 1,
        tie_events: tied,
        oracle_checked: false,
    })
}

/// Chatterjee's ξ in interval form.
pub fn xi_coefficient(y: &[f64], x: &[f64], seed: u64) -> Result<CoefficientResult> {
    evaluate(y, x, seed, xi_from_ranks)
}

/// Chatterjee's ξ in rank-difference form (tie-corrected).
pub fn xi_rank_difference(y: &[f64], x: &[f64], seed: u64) -> Result<CoefficientResult> {
    evaluate(y, x, seed, xi_rank_difference_from_ranks)
}
