//! Forward ordering of covariates by the general estimator.

use rayon::prelude::*;
use serde::Serialize;

use crate::coefficient::nu_general;
use crate::error::{ensure_len, Error, Result};
use crate::ranks::compute_ranks;
use crate::rng::derive_seed;
use crate::sample::Sample;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    /// The best single covariate scored ≤ 0; nothing is selected.
    NonpositiveFirstScore,
    /// The best extension did not improve on the current subset.
    NoImprovement,
    /// Every covariate was added.
    ExhaustedAll,
    /// The step budget ran out before any other rule fired.
    StepLimit,
}

/// The candidate that triggered [`StopReason::NoImprovement`] or
/// [`StopReason::NonpositiveFirstScore`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RejectedStep {
    pub index: usize,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelectionPath {
    /// Zero-based covariate indices in the order they were added.
    pub chosen: Vec<usize>,
    /// Estimator value of the subset after each accepted step.
    pub scores: Vec<f64>,
    pub stop_reason: StopReason,
    pub seed: u64,
    pub rejected: Option<RejectedStep>,
}

/// Seed of candidate `candidate` at step `step` (both zero-based). Depends on
/// nothing else, so scores do not depend on evaluation order.
pub fn step_seed(seed: u64, step: usize, candidate: usize) -> u64 {
    derive_seed(seed, &[step as u64, candidate as u64])
}

fn check(sample: &Sample) -> Result<()> {
    ensure_len(sample.n(), 3)?;
    if sample.p() == 0 {
        return Err(Error::Input("no covariates to select from".into()));
    }
    let info = compute_ranks(sample.y())?;
    if info.is_degenerate() {
        return Err(Error::DegenerateResponse(format!(
            "n0 = {} equals n = {}",
            info.n0(),
            info.n()
        )));
    }
    Ok(())
}

/// Scores every remaining candidate in parallel, then picks the maximum.
/// Ties go to the lowest column index.
fn best_extension(
    sample: &Sample,
    chosen: &[usize],
    step: usize,
    seed: u64,
) -> Result<Option<(usize, f64)>> {
    let remaining: Vec<usize> = (0..sample.p()).filter(|c| !chosen.contains(c)).collect();
    let scores = remaining
        .par_iter()
        .map(|&c| {
            let mut cols = chosen.to_vec();
            cols.push(c);
            let sub = sample.select_columns(&cols)?;
            nu_general(&sub, step_seed(seed, step, c)).map(|r| r.value)
        })
        .collect::<Result<Vec<f64>>>()?;
    let mut best: Option<(usize, f64)> = None;
    for (&c, &s) in remaining.iter().zip(&scores) {
        if best.is_none_or(|(_, b)| s > b) {
            best = Some((c, s));
        }
    }
    Ok(best)
}

fn run(sample: &Sample, seed: u64, max_steps: usize, stop: bool) -> Result<SelectionPath> {
    check(sample)?;
    let mut chosen = Vec::new();
    let mut scores: Vec<f64> = Vec::new();
    let mut rejected = None;
    let stop_reason = loop {
        if chosen.len() == sample.p() {
            break StopReason::ExhaustedAll;
        }
        if chosen.len() == max_steps {
            break StopReason::StepLimit;
        }
        let step = chosen.len();
        let (c, s) = best_extension(sample, &chosen, step, seed)?.expect("candidates remain");
        if stop {
            if step == 0 && s <= 0.0 {
                rejected = Some(RejectedStep { index: c, score: s });
                break StopReason::NonpositiveFirstScore;
            }
            if let Some(&last) = scores.last() {
                if s <= last {
                    rejected = Some(RejectedStep { index: c, score: s });
                    break StopReason::NoImprovement;
                }
            }
        }
        chosen.push(c);
        scores.push(s);
    };
    Ok(SelectionPath {
        chosen,
        scores,
        stop_reason,
        seed,
        rejected,
    })
}

/// Greedy forward selection with the first-non-improvement stopping rule.
///
/// `max_steps` (default `p`) caps the number of accepted covariates; hitting
/// it reports [`StopReason::StepLimit`].
pub fn ford_select(sample: &Sample, seed: u64, max_steps: Option<usize>) -> Result<SelectionPath> {
    run(sample, seed, max_steps.unwrap_or(usize::MAX), true)
}

/// The same greedy sequence carried through all `p` covariates.
pub fn ford_full_ordering(sample: &Sample, seed: u64) -> Result<SelectionPath> {
    run(sample, seed, usize::MAX, false)
}

/// The first `k` covariates of [`ford_full_ordering`], without computing
/// the rest.
pub fn ford_ordering_prefix(sample: &Sample, seed: u64, k: usize) -> Result<SelectionPath> {
    run(sample, seed, k, false)
}
