//! Independence tests and multiple-testing adjustment.

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::Serialize;
use statrs::function::erf::erfc;

use crate::coefficient::{nu_1dim_from_ranks, nu_from_parts, ordered_ranks, xi_from_ranks, Method};
use crate::error::{ensure_len, Error, Result};
use crate::neighbors::build_neighbor_table;
use crate::ranks::compute_ranks;
use crate::rng::{derive_seed, rng_from_seed};
use crate::sample::Sample;

/// Permutation count used by the power experiments.
pub const DEFAULT_PERMUTATIONS: usize = 1000;

/// Smallest sample size accepted by the normal approximation.
pub const ASYMPTOTIC_MIN_N: usize = 20;

/// `π²/3 − 3`, the limit of `n · Var` of the simple estimator under independence.
pub const NULL_VARIANCE_LIMIT: f64 = std::f64::consts::PI * std::f64::consts::PI / 3.0 - 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TestMode {
    Permutation,
    /// Normal approximation of the simple estimator. Asymptotic normality is
    /// conjectured, not proven.
    AsymptoticConjectured,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PermutationTestResult {
    pub statistic: f64,
    pub method: Method,
    pub p_value: f64,
    /// Number of permutations `B`; 0 in asymptotic mode.
    pub permutations: usize,
    pub seed: u64,
    /// `2/n` for the simple estimator.
    pub null_mean_theoretical: Option<f64>,
    pub mode: TestMode,
    pub n: usize,
}

/// Statistic as a function of the response ranks, with the covariate side
/// (neighbour table or covariate ordering) fixed.
enum FixedDesign {
    General {
        n0: usize,
        table: crate::neighbors::NeighborTable,
    },
    Ordered(Method),
}

impl FixedDesign {
    fn eval(&self, ranks: &[usize]) -> f64 {
        match self {
            FixedDesign::General { n0, table } => nu_from_parts(ranks, *n0, table),
            FixedDesign::Ordered(Method::Xi) => xi_from_ranks(ranks),
            FixedDesign::Ordered(_) => nu_1dim_from_ranks(ranks),
        }
    }
}

fn univariate(sample: &Sample, method: Method) -> Result<Vec<f64>> {
    if sample.p() != 1 {
        return Err(Error::Input(format!(
            "method {method} needs exactly one covariate, got {}",
            sample.p()
        )));
    }
    Ok(sample.column(0))
}

/// Observed ranks (in the order the statistic consumes them) and the fixed design.
fn setup(sample: &Sample, method: Method, seed: u64) -> Result<(Vec<usize>, FixedDesign)> {
    match method {
        Method::Nu => {
            ensure_len(sample.n(), 3)?;
            if sample.p() == 0 {
                return Err(Error::Input("no covariates".into()));
            }
            let info = compute_ranks(sample.y())?;
            if info.is_degenerate() {
                return Err(Error::DegenerateResponse(format!(
                    "n0 = {} equals n = {}",
                    info.n0(),
                    info.n()
                )));
            }
            let table = build_neighbor_table(sample.x(), seed)?;
            Ok((
                info.ranks().to_vec(),
                FixedDesign::General {
                    n0: info.n0(),
                    table,
                },
            ))
        }
        Method::Nu1d | Method::Xi => {
            let x = univariate(sample, method)?;
            // Validates sizes and degeneracy exactly as the point estimate does.
            match method {
                Method::Xi => crate::coefficient::xi_coefficient(sample.y(), &x, seed)?,
                _ => crate::coefficient::nu_1dim(sample.y(), &x, seed)?,
            };
            let (r, _) = ordered_ranks(sample.y(), &x, seed)?;
            Ok((r, FixedDesign::Ordered(method)))
        }
    }
}

/// Statistics of `b` seeded permutations of the response against the fixed
/// covariates. Permutation `k` is drawn from its own stream, so the result
/// does not depend on the thread count.
pub fn permutation_statistics(
    sample: &Sample,
    method: Method,
    b: usize,
    seed: u64,
) -> Result<(f64, Vec<f64>)> {
    if b == 0 {
        return Err(Error::Input("need at least one permutation".into()));
    }
    let (ranks, design) = setup(sample, method, seed)?;
    let observed = design.eval(&ranks);
    let stats = (0..b)
        .into_par_iter()
        .map_init(
            || ranks.clone(),
            |buf, k| {
                buf.copy_from_slice(&ranks);
                let mut rng = rng_from_seed(derive_seed(seed, &[0x7065_726d, k as u64]));
                buf.shuffle(&mut rng);
                design.eval(buf)
            },
        )
        .collect();
    Ok((observed, stats))
}

/// One-sided permutation test, `p = (1 + #{stat_b ≥ stat}) / (B + 1)`.
pub fn permutation_test(
    sample: &Sample,
    method: Method,
    b: usize,
    seed: u64,
) -> Result<PermutationTestResult> {
    let (statistic, stats) = permutation_statistics(sample, method, b, seed)?;
    let exceed = stats.iter().filter(|&&s| s >= statistic).count();
    let n = sample.n();
    Ok(PermutationTestResult {
        statistic,
        method,
        p_value: (1 + exceed) as f64 / (b + 1) as f64,
        permutations: b,
        seed,
        null_mean_theoretical: (method == Method::Nu1d).then(|| 2.0 / n as f64),
        mode: TestMode::Permutation,
        n,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NullParams {
    pub mean: f64,
    pub variance: f64,
}

/// Null mean `2/n` (exact) and variance `(π²/3 − 3)/n` (asymptotic) of the
/// simple estimator. Meaningful for `n ≥ 4`.
pub fn asymptotic_null_params(n: usize) -> NullParams {
    let n = n as f64;
    NullParams {
        mean: 2.0 / n,
        variance: NULL_VARIANCE_LIMIT / n,
    }
}

/// Upper-tail normal p-value of the simple estimator value `stat` at size `n`.
pub fn asymptotic_p_value(stat: f64, n: usize) -> f64 {
    let NullParams { mean, variance } = asymptotic_null_params(n);
    let z = (stat - mean) / variance.sqrt();
    0.5 * erfc(z / std::f64::consts::SQRT_2)
}

/// Normal-approximation test of the simple estimator; requires `n ≥ 20`.
pub fn asymptotic_test(y: &[f64], x: &[f64], seed: u64) -> Result<PermutationTestResult> {
    ensure_len(y.len(), ASYMPTOTIC_MIN_N)?;
    let r = crate::coefficient::nu_1dim(y, x, seed)?;
    Ok(PermutationTestResult {
        statistic: r.value,
        method: Method::Nu1d,
        p_value: asymptotic_p_value(r.value, r.n),
        permutations: 0,
        seed,
        null_mean_theoretical: Some(2.0 / r.n as f64),
        mode: TestMode::AsymptoticConjectured,
        n: r.n,
    })
}

/// Exact null distribution of the simple estimator: its value on every one
/// of the `n!` rank orders (Heap's algorithm). Limited to `4 ≤ n ≤ 10`.
pub fn exact_null_values_1dim(n: usize) -> Result<Vec<f64>> {
    if !(4..=10).contains(&n) {
        return Err(Error::Input(format!(
            "exact enumeration needs 4 <= n <= 10, got {n}"
        )));
    }
    let mut r: Vec<usize> = (1..=n).collect();
    let mut c = vec![0usize; n];
    let mut out = vec![nu_1dim_from_ranks(&r)];
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                r.swap(0, i);
            } else {
                r.swap(c[i], i);
            }
            out.push(nu_1dim_from_ranks(&r));
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    Ok(out)
}

/// Benjamini–Hochberg step-up adjusted p-values (q-values), in input order.
pub fn bh_adjust(p_values: &[f64]) -> Result<Vec<f64>> {
    if let Some(bad) = p_values.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::Input(format!("p-value {bad} outside [0, 1]")));
    }
    let m = p_values.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| p_values[a].total_cmp(&p_values[b]).then(a.cmp(&b)));
    let mut q = vec![0.0; m];
    let mut running = 1.0f64;
    for (rank, &i) in order.iter().enumerate().rev() {
        // The ratio m / rank is at least 1 after rounding, so q never drops below p.
        running = running.min(m as f64 / (rank + 1) as f64 * p_values[i]);
        q[i] = running.min(1.0);
    }
    Ok(q)
}
