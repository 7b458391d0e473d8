//! The integrated R² estimators and Chatterjee's ξ.
//!
//! All three statistics reduce to counting, for each response rank, how many
//! rank intervals contain it. The fast paths count with a difference array in
//! O(n) after sorting (and, for the general estimator, after the neighbour
//! search); the brute-force oracles count with literal double loops. Both
//! produce the same integer counts and share the final weighted reduction, so
//! they agree bit for bit.

mod general;
mod one_dim;
mod xi;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::replicate_seed;
use crate::sample::Sample;

pub use general::{
    nu_from_parts, nu_general, nu_general_by_interval_mass, nu_general_oracle,
    nu_general_replicated, nu_general_with,
};
pub use one_dim::{
    nu_1dim, nu_1dim_from_ranks, nu_1dim_oracle, nu_1dim_oracle_from_ranks, ordered_ranks,
};
pub use xi::{xi_coefficient, xi_from_ranks, xi_rank_difference, xi_rank_difference_from_ranks};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// General nearest-neighbour estimator, any number of covariates.
    Nu,
    /// Simple estimator for a single covariate.
    Nu1d,
    /// Chatterjee's ξ, single covariate.
    Xi,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Nu, Method::Nu1d, Method::Xi];

    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Nu => "nu",
            Method::Nu1d => "nu1d",
            Method::Xi => "xi",
        }
    }

    /// Whether the method only accepts a single covariate.
    pub fn is_univariate(&self) -> bool {
        !matches!(self, Method::Nu)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "nu" => Ok(Method::Nu),
            "nu1d" | "nu_1dim" | "nu1" => Ok(Method::Nu1d),
            "xi" => Ok(Method::Xi),
            other => Err(Error::Input(format!("unknown method `{other}`"))),
        }
    }
}

/// Value of a coefficient together with the provenance needed to reproduce it.
///
/// `value` is reported raw; finite-sample estimates can leave `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientResult {
    pub value: f64,
    pub method: Method,
    pub n: usize,
    /// Tie correction, general estimator only.
    pub n0: Option<usize>,
    pub seed: u64,
    /// Number of tie-breaking replicates averaged into `value`.
    pub replicates: usize,
    /// Rows whose neighbour (or position, for the 1-d forms) was decided by a tie.
    pub tie_events: usize,
    pub oracle_checked: bool,
}

/// Average of `m` seeded runs of `f`; replicate 0 uses `seed` itself.
pub(crate) fn average_replicates<F>(seed: u64, m: usize, f: F) -> Result<CoefficientResult>
where
    F: Fn(u64) -> Result<CoefficientResult>,
{
    if m == 0 {
        return Err(Error::Input("replicate count must be at least 1".into()));
    }
    let runs = (0..m)
        .map(|k| f(replicate_seed(seed, k)))
        .collect::<Result<Vec<_>>>()?;
    let mut out = runs[0].clone();
    out.value = runs.iter().map(|r| r.value).sum::<f64>() / m as f64;
    out.tie_events = runs.iter().map(|r| r.tie_events).sum();
    out.seed = seed;
    out.replicates = m;
    Ok(out)
}

/// `nu_1dim` averaged over `m` tie-breaking replicates.
pub fn nu_1dim_replicated(y: &[f64], x: &[f64], seed: u64, m: usize) -> Result<CoefficientResult> {
    average_replicates(seed, m, |s| nu_1dim(y, x, s))
}

/// `xi_coefficient` averaged over `m` tie-breaking replicates.
pub fn xi_replicated(y: &[f64], x: &[f64], seed: u64, m: usize) -> Result<CoefficientResult> {
    average_replicates(seed, m, |s| xi_coefficient(y, x, s))
}

/// Dispatches on `method`, averaging `replicates` tie-breaking runs.
/// The univariate methods require exactly one covariate column.
pub fn coefficient(
    sample: &Sample,
    method: Method,
    seed: u64,
    replicates: usize,
) -> Result<CoefficientResult> {
    if method.is_univariate() && sample.p() != 1 {
        return Err(Error::Input(format!(
            "method {method} needs exactly one covariate, got {}",
            sample.p()
        )));
    }
    match method {
        Method::Nu => nu_general_replicated(sample, seed, replicates),
        Method::Nu1d => nu_1dim_replicated(sample.y(), &sample.column(0), seed, replicates),
        Method::Xi => xi_replicated(sample.y(), &sample.column(0), seed, replicates),
    }
}

/// Per-rank weights of the simple estimator and of ξ, and whether ξ weighs
/// rank `r` at least as heavily.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeightComparison {
    pub w_nu: f64,
    pub w_xi: f64,
    pub in_ln: bool,
}

pub fn weight_comparison(n: usize, r: usize) -> Result<WeightComparison> {
    if n < 5 {
        return Err(Error::InsufficientSample { needed: 5, got: n });
    }
    if r <= 1 || r >= n {
        return Err(Error::Input(format!(
            "rank {r} must lie strictly between 1 and n = {n}"
        )));
    }
    let (n64, r64) = (n as u64, r as u64);
    let inner = (r64 - 1) * (n64 - r64);
    Ok(WeightComparison {
        w_nu: 1.0 / (2 * inner) as f64,
        w_xi: 3.0 / (n64 * n64 - 1) as f64,
        // w_xi >= w_nu  <=>  6 (r-1)(n-r) >= n^2 - 1, decided in integers.
        in_ln: 6 * inner >= n64 * n64 - 1,
    })
}

/// Closed interval `L_n` of ranks where ξ's weight is at least ν's.
pub fn ln_interval(n: usize) -> (f64, f64) {
    let n = n as f64;
    let half = ((n - 1.0) * (n - 5.0) / 3.0).sqrt();
    ((n + 1.0 - half) / 2.0, (n + 1.0 + half) / 2.0)
}

/// Difference-array cover counts: `cover[r]` is the number of closed
/// intervals `[lo, hi]` containing rank `r` (`1..=n`).
pub(crate) fn cover_counts(n: usize, intervals: impl Iterator<Item = (usize, usize)>) -> Vec<i64> {
    let mut diff = vec![0i64; n + 2];
    for (a, b) in intervals {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        diff[lo] += 1;
        diff[hi + 1] -= 1;
    }
    let mut cover = vec![0i64; n + 1];
    let mut run = 0;
    for r in 1..=n {
        run += diff[r];
        cover[r] = run;
    }
    cover
}

#[inline]
pub(crate) fn in_closed(v: usize, a: usize, b: usize) -> bool {
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    lo <= v && v <= hi
}
