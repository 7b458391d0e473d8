use crate::coefficient::{average_replicates, cover_counts, in_closed, CoefficientResult, Method};
use crate::error::{ensure_len, Error, Result};
use crate::neighbors::{
    build_neighbor_table_with, exhaustive_neighbor_order, NeighborConfig, NeighborTable,
};
use crate::ranks::{compute_ranks, weighted_count_sum, RankInfo};
use crate::sample::Sample;
use crate::sum::CompensatedSum;

fn prepare(sample: &Sample) -> Result<RankInfo> {
    ensure_len(sample.n(), 3)?;
    if sample.p() == 0 {
        return Err(Error::Input("no covariates".into()));
    }
    let info = compute_ranks(sample.y())?;
    if info.is_degenerate() {
        return Err(Error::DegenerateResponse(format!(
            "n0 = {} equals n = {}; unable to provide an estimator",
            info.n0(),
            info.n()
        )));
    }
    Ok(info)
}

fn finish(n: usize, n0: usize, per_rank: &[u64]) -> f64 {
    let s = weighted_count_sum(per_rank, n);
    1.0 - 0.5 * s * ((n - 1) as f64 / (n - n0) as f64)
}

/// Integrated R² estimate for arbitrary covariate dimension.
pub fn nu_general(sample: &Sample, seed: u64) -> Result<CoefficientResult> {
    nu_general_with(sample, seed, &NeighborConfig::default())
}

pub fn nu_general_with(
    sample: &Sample,
    seed: u64,
    config: &NeighborConfig,
) -> Result<CoefficientResult> {
    let info = prepare(sample)?;
    let table = build_neighbor_table_with(sample.x(), seed, config)?;
    Ok(CoefficientResult {
        value: nu_from_parts(info.ranks(), info.n0(), &table),
        method: Method::Nu,
        n: info.n(),
        n0: Some(info.n0()),
        seed,
        replicates: 1,
        tie_events: table.tie_events(),
        oracle_checked: false,
    })
}

/// Average of `m` runs with independent tie-breaking seeds.
pub fn nu_general_replicated(sample: &Sample, seed: u64, m: usize) -> Result<CoefficientResult> {
    average_replicates(seed, m, |s| nu_general(sample, s))
}

/// Estimator value from response ranks and a precomputed neighbour table.
///
/// For row `i` with base interval `B_i` spanned by `R_i` and `R_nn1(i)`, every
/// `j` outside `{i, nn1(i)}` sees `B_i`; `j = nn1(i)` instead sees the interval
/// to `R_nn2(i)`. Cover counts of the base intervals come from a difference
/// array, then the endpoint self-terms are removed and the `j = nn1(i)`
/// replacements added back. Permutation tests call this directly with
/// permuted ranks and a fixed table.
pub fn nu_from_parts(ranks: &[usize], n0: usize, table: &NeighborTable) -> f64 {
    let n = ranks.len();
    debug_assert_eq!(table.len(), n);
    let nn1 = table.nn1();
    let nn2 = table.nn2();
    let cover = cover_counts(n, (0..n).map(|i| (ranks[i], ranks[nn1[i]])));

    let mut adjust = vec![0i64; n];
    for i in 0..n {
        let j = nn1[i];
        adjust[j] -= 1;
        if in_closed(ranks[j], ranks[i], ranks[nn2[i]]) {
            adjust[j] += 1;
        }
    }

    let mut per_rank = vec![0u64; n + 1];
    for j in 0..n {
        let r = ranks[j];
        if r == 1 || r == n {
            continue;
        }
        let c = cover[r] - 1 + adjust[j];
        debug_assert!(c >= 0);
        per_rank[r] += c as u64;
    }
    finish(n, n0, &per_rank)
}

/// Brute-force evaluation: literal double loop over `(j, i)` with the excluded
/// nearest neighbour found by exhaustive sorting of all distances. O(n² p).
pub fn nu_general_oracle(sample: &Sample, seed: u64) -> Result<CoefficientResult> {
    let info = prepare(sample)?;
    let n = info.n();
    let r = info.ranks();
    let x = sample.x();
    let orders: Vec<Vec<usize>> = (0..n)
        .map(|i| exhaustive_neighbor_order(x, i, seed))
        .collect();

    let mut per_rank = vec![0u64; n + 1];
    for j in 0..n {
        if r[j] == 1 || r[j] == n {
            continue;
        }
        for i in (0..n).filter(|&i| i != j) {
            let k = *orders[i].iter().find(|&&k| k != j).expect("n >= 3");
            if in_closed(r[j], r[i], r[k]) {
                per_rank[r[j]] += 1;
            }
        }
    }

    let table = build_neighbor_table_with(x, seed, &NeighborConfig::scan())?;
    Ok(CoefficientResult {
        value: finish(n, info.n0(), &per_rank),
        method: Method::Nu,
        n,
        n0: Some(info.n0()),
        seed,
        replicates: 1,
        tie_events: table.tie_events(),
        oracle_checked: true,
    })
}

/// Same estimator evaluated as a sum over rows of weighted interval masses
/// (prefix sums over rank values). Agrees with [`nu_general`] up to floating
/// point reassociation.
pub fn nu_general_by_interval_mass(sample: &Sample, seed: u64) -> Result<f64> {
    let info = prepare(sample)?;
    let table = build_neighbor_table_with(sample.x(), seed, &NeighborConfig::default())?;
    let weights = info.weight_table();
    let r = info.ranks();
    let n = info.n();

    let mut acc = CompensatedSum::new();
    for i in 0..n {
        let j1 = table.nn1()[i];
        let (lo, hi) = if r[i] <= r[j1] {
            (r[i], r[j1])
        } else {
            (r[j1], r[i])
        };
        acc.add(weights.weighted_rank_mass(lo, hi)?);
        acc.add(-weights.weight(r[i]));
        acc.add(-weights.weight(r[j1]));
        if in_closed(r[j1], r[i], r[table.nn2()[i]]) {
            acc.add(weights.weight(r[j1]));
        }
    }
    Ok(1.0 - 0.5 * acc.value() * ((n - 1) as f64 / (n - info.n0()) as f64))
}
