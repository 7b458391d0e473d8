//! Discrepancy between permutations induced by the simple estimator, and
//! classical permutation metrics.
//!
//! Permutations are one-based: a permutation of length `n` lists each of
//! `1..=n` exactly once. Composition is `(στ)(i) = σ(τ(i))`.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sum::CompensatedSum;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(mapping: Vec<usize>) -> Result<Self> {
        let n = mapping.len();
        let mut seen = vec![false; n + 1];
        for &v in &mapping {
            if v == 0 || v > n || seen[v] {
                return Err(Error::Input(format!(
                    "{mapping:?} is not a permutation of 1..={n}"
                )));
            }
            seen[v] = true;
        }
        Ok(Self(mapping))
    }

    pub fn identity(n: usize) -> Self {
        Self((1..=n).collect())
    }

    pub fn reversal(n: usize) -> Self {
        Self((1..=n).rev().collect())
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut v: Vec<usize> = (1..=n).collect();
        v.shuffle(rng);
        Self(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    /// Image of the one-based index `i`.
    pub fn apply(&self, i: usize) -> usize {
        self.0[i - 1]
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.len()];
        for (i, &v) in self.0.iter().enumerate() {
            inv[v - 1] = i + 1;
        }
        Self(inv)
    }

    /// `self ∘ other`, i.e. `i ↦ self(other(i))`.
    pub fn compose(&self, other: &Permutation) -> Result<Self> {
        same_len(self, other)?;
        Ok(Self(other.0.iter().map(|&v| self.0[v - 1]).collect()))
    }

    /// Every permutation of `1..=n` in Heap's order.
    pub fn all(n: usize) -> Vec<Permutation> {
        let mut a: Vec<usize> = (1..=n).collect();
        let mut out = vec![Self(a.clone())];
        let mut c = vec![0usize; n];
        let mut i = 0;
        while i < n {
            if c[i] < i {
                if i % 2 == 0 {
                    a.swap(0, i);
                } else {
                    a.swap(c[i], i);
                }
                out.push(Self(a.clone()));
                c[i] += 1;
                i = 0;
            } else {
                c[i] = 0;
                i += 1;
            }
        }
        out
    }
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = Error;

    fn try_from(v: Vec<usize>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Self {
        p.0
    }
}

impl FromStr for Permutation {
    type Err = Error;

    /// Accepts comma- or whitespace-separated one-based values, optionally
    /// wrapped in parentheses or brackets: `"2,1,3"`, `"(2 1 3)"`.
    fn from_str(s: &str) -> Result<Self> {
        let inner = s
            .trim()
            .trim_start_matches(['(', '['])
            .trim_end_matches([')', ']']);
        let values = inner
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|_| Error::Input(format!("`{t}` is not a positive integer")))
            })
            .collect::<Result<Vec<_>>>()?;
        if values.is_empty() {
            return Err(Error::Input("empty permutation".into()));
        }
        Self::new(values)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

fn same_len(a: &Permutation, b: &Permutation) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::Input(format!(
            "permutations have lengths {} and {}",
            a.len(),
            b.len()
        )));
    }
    Ok(())
}

fn check_pair(sigma: &Permutation, pi: &Permutation) -> Result<()> {
    same_len(sigma, pi)?;
    if sigma.len() < 2 {
        return Err(Error::InsufficientSample {
            needed: 2,
            got: sigma.len(),
        });
    }
    Ok(())
}

/// The sequence `σ⁻¹π(1), …, σ⁻¹π(n)`.
fn relative(sigma: &Permutation, pi: &Permutation) -> Vec<usize> {
    let inv = sigma.inverse();
    pi.0.iter().map(|&v| inv.0[v - 1]).collect()
}

/// Discrepancy `d_ν(σ, π)`.
///
/// With `a = σ⁻¹π`, each consecutive pair `(a_i, a_{i+1})` contributes half
/// the weight `1/((ℓ−1)(n−ℓ))` of every rank `ℓ` strictly between its ends.
/// Strict betweenness makes `1 − d_ν(σ, π)` equal the simple estimator of
/// data whose covariate order is `π` and response order is `σ`, and gives
/// `d_ν(σ, σ) = 0`. O(n) after a prefix-sum table over ranks.
pub fn d_nu(sigma: &Permutation, pi: &Permutation) -> Result<f64> {
    check_pair(sigma, pi)?;
    let n = sigma.len();
    let a = relative(sigma, pi);
    let mut prefix = vec![0.0f64; n + 1];
    let mut run = CompensatedSum::new();
    for (l, slot) in prefix.iter_mut().enumerate().take(n).skip(2) {
        run.add(1.0 / ((l - 1) * (n - l)) as f64);
        *slot = run.value();
    }
    if n >= 2 {
        prefix[n] = prefix[n - 1];
    }
    let mut total = CompensatedSum::new();
    for w in a.windows(2) {
        let (lo, hi) = if w[0] < w[1] {
            (w[0], w[1])
        } else {
            (w[1], w[0])
        };
        if hi > lo + 1 {
            total.add(prefix[hi - 1] - prefix[lo]);
        }
    }
    Ok(0.5 * total.value())
}

/// Exact rational value of `d_ν`, by the literal double sum.
pub fn d_nu_exact(sigma: &Permutation, pi: &Permutation) -> Result<Ratio<i128>> {
    check_pair(sigma, pi)?;
    let n = sigma.len();
    let a = relative(sigma, pi);
    let mut total = Ratio::from_integer(0i128);
    for l in 2..n {
        for w in a.windows(2) {
            let (lo, hi) = if w[0] < w[1] {
                (w[0], w[1])
            } else {
                (w[1], w[0])
            };
            if lo < l && l < hi {
                total += Ratio::new(1, ((l - 1) * (n - l)) as i128);
            }
        }
    }
    Ok(total / 2)
}

/// `(d_ν(σ, π) + d_ν(π, σ)) / 2`.
pub fn d_nu_symmetric(sigma: &Permutation, pi: &Permutation) -> Result<f64> {
    Ok((d_nu(sigma, pi)? + d_nu(pi, sigma)?) / 2.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassicalMetric {
    /// `Σ |σ(i) − π(i)|`.
    Footrule,
    /// `Σ (σ(i) − π(i))²`.
    SpearmanRhoSq,
    /// Fewest adjacent transpositions taking `π` to `σ`.
    Kendall,
    /// Fewest transpositions taking `π` to `σ`.
    Cayley,
    /// `#{i : σ(i) ≠ π(i)}`.
    Hamming,
    /// `n − LIS(σπ⁻¹)`.
    Ulam,
}

impl ClassicalMetric {
    pub const ALL: [ClassicalMetric; 6] = [
        ClassicalMetric::Footrule,
        ClassicalMetric::SpearmanRhoSq,
        ClassicalMetric::Kendall,
        ClassicalMetric::Cayley,
        ClassicalMetric::Hamming,
        ClassicalMetric::Ulam,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ClassicalMetric::Footrule => "footrule",
            ClassicalMetric::SpearmanRhoSq => "spearman_rho_sq",
            ClassicalMetric::Kendall => "kendall",
            ClassicalMetric::Cayley => "cayley",
            ClassicalMetric::Hamming => "hamming",
            ClassicalMetric::Ulam => "ulam",
        }
    }
}

impl FromStr for ClassicalMetric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.to_ascii_lowercase().replace('-', "_");
        ClassicalMetric::ALL
            .into_iter()
            .find(|m| m.name() == key)
            .ok_or_else(|| Error::Input(format!("unknown metric `{s}`")))
    }
}

impl fmt::Display for ClassicalMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub fn classical_metric(
    metric: ClassicalMetric,
    sigma: &Permutation,
    pi: &Permutation,
) -> Result<f64> {
    same_len(sigma, pi)?;
    let pairs = sigma.0.iter().zip(&pi.0);
    let v = match metric {
        ClassicalMetric::Footrule => pairs.map(|(&s, &p)| s.abs_diff(p) as u64).sum::<u64>(),
        ClassicalMetric::SpearmanRhoSq => pairs
            .map(|(&s, &p)| (s.abs_diff(p) as u64).pow(2))
            .sum::<u64>(),
        ClassicalMetric::Hamming => pairs.filter(|(s, p)| s != p).count() as u64,
        ClassicalMetric::Kendall => inversions(&relative(sigma, pi)),
        ClassicalMetric::Cayley => {
            let rho = sigma.compose(&pi.inverse())?;
            (rho.len() - cycle_count(&rho)) as u64
        }
        ClassicalMetric::Ulam => {
            let rho = sigma.compose(&pi.inverse())?;
            (rho.len() - longest_increasing(&rho.0)) as u64
        }
    };
    Ok(v as f64)
}

/// Number of pairs `i < j` with `a_i > a_j`, by merge sort.
pub fn inversions(a: &[usize]) -> u64 {
    fn sort(v: &mut [usize], buf: &mut [usize]) -> u64 {
        let n = v.len();
        if n < 2 {
            return 0;
        }
        let mid = n / 2;
        let mut count = sort(&mut v[..mid], &mut buf[..mid]) + sort(&mut v[mid..], &mut buf[mid..]);
        let (mut i, mut j, mut k) = (0, mid, 0);
        while i < mid && j < n {
            if v[i] <= v[j] {
                buf[k] = v[i];
                i += 1;
            } else {
                buf[k] = v[j];
                count += (mid - i) as u64;
                j += 1;
            }
            k += 1;
        }
        buf[k..k + mid - i].copy_from_slice(&v[i..mid]);
        k += mid - i;
        buf[k..k + n - j].copy_from_slice(&v[j..n]);
        v.copy_from_slice(&buf[..n]);
        count
    }
    let mut v = a.to_vec();
    let mut buf = vec![0; v.len()];
    sort(&mut v, &mut buf)
}

fn cycle_count(p: &Permutation) -> usize {
    let n = p.len();
    let mut seen = vec![false; n];
    let mut cycles = 0;
    for start in 0..n {
        if seen[start] {
            continue;
        }
        cycles += 1;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = p.0[i] - 1;
        }
    }
    cycles
}

/// Length of the longest strictly increasing subsequence (patience sorting).
pub fn longest_increasing(a: &[usize]) -> usize {
    let mut tails: Vec<usize> = Vec::new();
    for &v in a {
        match tails.binary_search(&v) {
            Ok(_) => {}
            Err(pos) if pos == tails.len() => tails.push(v),
            Err(pos) => tails[pos] = v,
        }
    }
    tails.len()
}

/// Orderings `(σ, π)` of paired data: `Y_{σ(1)} < … < Y_{σ(n)}` and
/// `X_{π(1)} < … < X_{π(n)}`. Both coordinates must be free of ties.
pub fn permutations_from_sample(y: &[f64], x: &[f64]) -> Result<(Permutation, Permutation)> {
    if y.len() != x.len() {
        return Err(Error::Input("response and covariate lengths differ".into()));
    }
    let order = |v: &[f64], what: &str| -> Result<Permutation> {
        crate::error::ensure_finite(v, what)?;
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
        if idx.windows(2).any(|w| v[w[0]] == v[w[1]]) {
            return Err(Error::Input(format!("{what} has tied values")));
        }
        Ok(Permutation(idx.into_iter().map(|i| i + 1).collect()))
    };
    Ok((order(y, "response")?, order(x, "covariate")?))
}
