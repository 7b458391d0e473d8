use std::time::Instant;

use rayon::prelude::*;

use crate::coefficient::{coefficient, Method};
use crate::error::{Error, Result};
use crate::ford::ford_select;
use crate::inference::{asymptotic_null_params, permutation_test, NULL_VARIANCE_LIMIT};
use crate::population::nu_product_uniform;
use crate::rng::derive_seed;
use crate::simulation::models::{generate, Model, ModelSpec};
use crate::simulation::report::{ExperimentReport, ReportRow};

/// Smallest histogram resolution emitted by [`null_moment_study`].
pub const MIN_HISTOGRAM_BINS: usize = 30;

/// Seed of replicate `rep` of a design cell identified by `cell`.
pub fn replicate_seed_for(seed: u64, cell: &[u64], rep: usize) -> u64 {
    let mut path = cell.to_vec();
    path.push(rep as u64);
    derive_seed(seed, &path)
}

fn model_id(m: Model) -> u64 {
    Model::ALL.iter().position(|&k| k == m).unwrap() as u64
}

fn method_id(m: Method) -> u64 {
    Method::ALL.iter().position(|&k| k == m).unwrap() as u64
}

/// `reps` independent values of `method` on fresh samples from `spec`.
/// Replicate `k` draws its sample with seed `replicate_seed_for(seed, [], k)`
/// and breaks ties with the same seed.
pub fn coefficient_replicates(
    spec: &ModelSpec,
    method: Method,
    reps: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    if reps == 0 {
        return Err(Error::Input("reps must be at least 1".into()));
    }
    spec.validate()?;
    (0..reps)
        .into_par_iter()
        .map(|k| {
            let s = replicate_seed_for(seed, &[], k);
            let sample = generate(&spec.with_seed(s))?;
            coefficient(&sample, method, s, 1).map(|r| r.value)
        })
        .collect()
}

/// Mean, sample variance, and standard error of the mean.
pub fn summarize(values: &[f64]) -> (f64, f64, f64) {
    let k = values.len() as f64;
    let mean = values.iter().sum::<f64>() / k;
    let var = if values.len() > 1 {
        values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0)
    } else {
        0.0
    };
    (mean, var, (var / k).sqrt())
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len();
    if m % 2 == 1 {
        v[m / 2]
    } else {
        0.5 * (v[m / 2 - 1] + v[m / 2])
    }
}

/// Standard error of the sample variance, from the fourth central moment.
fn variance_se(values: &[f64], mean: f64, var: f64) -> f64 {
    let k = values.len() as f64;
    let m4 = values.iter().map(|v| (v - mean).powi(4)).sum::<f64>() / k;
    ((m4 - var * var).max(0.0) / k).sqrt()
}

fn histogram_rows(
    report: &mut ExperimentReport,
    values: &[f64],
    bins: usize,
    model: &str,
    n: usize,
    method: &str,
) {
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let width = if hi > lo {
        (hi - lo) / bins as f64
    } else {
        1.0
    };
    let mut counts = vec![0usize; bins];
    for &v in values {
        let b = (((v - lo) / width) as usize).min(bins - 1);
        counts[b] += 1;
    }
    for (b, &c) in counts.iter().enumerate() {
        let left = lo + b as f64 * width;
        report.push(
            ReportRow::new(model, n, 0.0, method, "hist_count")
                .value(c as f64, 0.0, values.len())
                .bin(left, left + width),
        );
    }
}

/// Null distribution of the simple estimator for independent uniforms:
/// mean and variance against `2/n` and `(π²/3 − 3)/n`, plus a histogram.
pub fn null_moment_study(
    n: usize,
    reps: usize,
    seed: u64,
    bins: usize,
) -> Result<ExperimentReport> {
    if bins < MIN_HISTOGRAM_BINS {
        return Err(Error::Input(format!(
            "histogram needs at least {MIN_HISTOGRAM_BINS} bins, got {bins}"
        )));
    }
    let spec = ModelSpec::new(Model::Independent, n, seed);
    let values = coefficient_replicates(&spec, Method::Nu1d, reps, seed)?;
    let (mean, var, se) = summarize(&values);
    let vse = variance_se(&values, mean, var);
    let theory = asymptotic_null_params(n);
    let model = Model::Independent.name();
    let method = Method::Nu1d.as_str();
    let row = |metric: &str| ReportRow::new(model, n, 0.0, method, metric);
    let mut report = ExperimentReport::new("null");
    report.push(row("mean").value(mean, se, reps));
    report.push(
        row("mean_theory")
            .value(theory.mean, 0.0, reps)
            .note("exact"),
    );
    report.push(row("variance").value(var, vse, reps));
    report.push(row("n_variance").value(n as f64 * var, n as f64 * vse, reps));
    report.push(
        row("n_variance_theory")
            .value(NULL_VARIANCE_LIMIT, 0.0, reps)
            .note("asymptotic"),
    );
    histogram_rows(&mut report, &values, bins, model, n, method);
    Ok(report)
}

/// The simple estimator on `Y = XZ`: mean and standard deviation over
/// replicates, next to the quadrature value of the population coefficient.
pub fn product_uniform_study(n: usize, reps: usize, seed: u64) -> Result<ExperimentReport> {
    let spec = ModelSpec::new(Model::ProductUniform, n, seed);
    let values = coefficient_replicates(&spec, Method::Nu1d, reps, seed)?;
    let (mean, var, se) = summarize(&values);
    let target = nu_product_uniform()?;
    let model = Model::ProductUniform.name();
    let method = Method::Nu1d.as_str();
    let mut report = ExperimentReport::new("dependence");
    report.push(ReportRow::new(model, n, 0.0, method, "mean").value(mean, se, reps));
    report.push(ReportRow::new(model, n, 0.0, method, "sd").value(
        var.sqrt(),
        variance_se(&values, mean, var) / (2.0 * var.sqrt()),
        reps,
    ));
    report.push(
        ReportRow::new(model, n, 0.0, "population", "nu")
            .value(target.value, target.abs_error_bound, 1)
            .note("quadrature"),
    );
    Ok(report)
}

/// Design of a power experiment.
#[derive(Debug, Clone)]
pub struct PowerDesign {
    pub models: Vec<Model>,
    pub lambdas: Vec<f64>,
    pub n: usize,
    pub reps: usize,
    /// Permutations per test.
    pub b: usize,
    pub alpha: f64,
    pub methods: Vec<Method>,
}

impl Default for PowerDesign {
    fn default() -> Self {
        Self {
            models: Model::POWER.to_vec(),
            lambdas: (0..=10).map(|k| k as f64 / 10.0).collect(),
            n: 100,
            reps: 500,
            b: 1000,
            alpha: 0.05,
            methods: Method::ALL.to_vec(),
        }
    }
}

/// Rejection frequency of the permutation test for every
/// `(model, λ, method)`. All methods see the same samples.
pub fn power_study(design: &PowerDesign, seed: u64) -> Result<ExperimentReport> {
    if !(design.alpha > 0.0 && design.alpha < 1.0) {
        return Err(Error::Input(format!(
            "alpha = {} outside (0, 1)",
            design.alpha
        )));
    }
    let mut report = ExperimentReport::new("power");
    for &model in &design.models {
        for (li, &lambda) in design.lambdas.iter().enumerate() {
            let spec = ModelSpec::new(model, design.n, seed).with_lambda(lambda);
            spec.validate()?;
            let cell = [model_id(model), li as u64];
            let rejections: Vec<Vec<bool>> = (0..design.reps)
                .into_par_iter()
                .map(|rep| {
                    let s = replicate_seed_for(seed, &cell, rep);
                    let sample = generate(&spec.with_seed(s))?;
                    design
                        .methods
                        .iter()
                        .map(|&m| {
                            let t = permutation_test(
                                &sample,
                                m,
                                design.b,
                                derive_seed(s, &[method_id(m)]),
                            );
                            match t {
                                Ok(t) => Ok(t.p_value <= design.alpha),
                                // A response with no spread cannot reject.
                                Err(Error::DegenerateResponse(_)) => Ok(false),
                                Err(e) => Err(e),
                            }
                        })
                        .collect::<Result<Vec<bool>>>()
                })
                .collect::<Result<_>>()?;
            for (mi, &m) in design.methods.iter().enumerate() {
                let hits = rejections.iter().filter(|r| r[mi]).count();
                let power = hits as f64 / design.reps as f64;
                let se = (power * (1.0 - power) / design.reps as f64).sqrt();
                report.push(
                    ReportRow::new(model.name(), design.n, lambda, m.as_str(), "power").value(
                        power,
                        se,
                        design.reps,
                    ),
                );
            }
        }
    }
    Ok(report)
}

/// Outcome of one selection run against the true set `{0, 1, 2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectionOutcome {
    pub exact: bool,
    pub included: bool,
    pub false_selections: usize,
}

pub fn selection_outcome(chosen: &[usize]) -> SelectionOutcome {
    let included = (0..3).all(|c| chosen.contains(&c));
    let false_selections = chosen.iter().filter(|&&c| c >= 3).count();
    SelectionOutcome {
        exact: included && false_selections == 0,
        included,
        false_selections,
    }
}

/// Selection runs for one model and sample size; covariates are
/// standardized before selection.
pub fn selection_outcomes(
    model: Model,
    n: usize,
    p: usize,
    reps: usize,
    seed: u64,
) -> Result<Vec<SelectionOutcome>> {
    let spec = ModelSpec::new(model, n, seed).with_p(p);
    spec.validate()?;
    let cell = [model_id(model), n as u64];
    (0..reps)
        .into_par_iter()
        .map(|rep| {
            let s = replicate_seed_for(seed, &cell, rep);
            let sample = generate(&spec.with_seed(s))?.standardized();
            let path = ford_select(&sample, s, None)?;
            Ok(selection_outcome(&path.chosen))
        })
        .collect()
}

/// Exact-recovery rate, inclusion rate and mean number of false selections
/// of forward selection, per `(model, n)`. The true set is the first three
/// covariates.
pub fn selection_study(
    models: &[Model],
    n_list: &[usize],
    p: usize,
    reps: usize,
    seed: u64,
) -> Result<ExperimentReport> {
    if reps == 0 {
        return Err(Error::Input("reps must be at least 1".into()));
    }
    let mut report = ExperimentReport::new("selection");
    for &model in models {
        if !model.is_selection() {
            return Err(Error::Input(format!("{model} is not a selection model")));
        }
        for &n in n_list {
            let out = selection_outcomes(model, n, p, reps, seed)?;
            let k = reps as f64;
            let rate = |f: &dyn Fn(&SelectionOutcome) -> bool| {
                let r = out.iter().filter(|o| f(o)).count() as f64 / k;
                (
                    r,
                    if reps > 1 {
                        (r * (1.0 - r) / k).sqrt()
                    } else {
                        0.0
                    },
                )
            };
            let (exact, exact_se) = rate(&|o| o.exact);
            let (incl, incl_se) = rate(&|o| o.included);
            let falses: Vec<f64> = out.iter().map(|o| o.false_selections as f64).collect();
            let (fmean, _, fse) = summarize(&falses);
            let row = |metric: &str| ReportRow::new(model.name(), n, p as f64, "ford", metric);
            report.push(row("exact_recovery").value(exact, exact_se, reps));
            report.push(row("inclusion").value(incl, incl_se, reps));
            report.push(row("mean_false").value(fmean, fse, reps));
        }
    }
    Ok(report)
}

/// Noiseless and noisy scatterplot models at `n`: mean and sd of the
/// general estimator for every noise level.
pub fn figure1_study(
    noise_sds: &[f64],
    n: usize,
    reps: usize,
    seed: u64,
) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new("figure1");
    for model in Model::SCATTER {
        for &sd in noise_sds {
            let spec = ModelSpec::new(model, n, seed).with_noise_sd(sd);
            let values = coefficient_replicates(&spec, Method::Nu, reps, seed)?;
            let (mean, var, se) = summarize(&values);
            let row = |metric: &str| ReportRow::new(model.name(), n, sd, "nu", metric);
            report.push(row("mean").value(mean, se, reps));
            report.push(row("sd").value(var.sqrt(), 0.0, reps));
        }
    }
    Ok(report)
}

/// Median absolute error of `method` against the population value on the
/// product-uniform model, for each sample size.
pub fn rate_study(
    n_list: &[usize],
    reps: usize,
    method: Method,
    seed: u64,
) -> Result<ExperimentReport> {
    let target = nu_product_uniform()?.value;
    let mut report = ExperimentReport::new("rate");
    for &n in n_list {
        let spec = ModelSpec::new(Model::ProductUniform, n, seed);
        let values = coefficient_replicates(&spec, method, reps, derive_seed(seed, &[n as u64]))?;
        let errors: Vec<f64> = values.iter().map(|v| (v - target).abs()).collect();
        report.push(
            ReportRow::new(
                Model::ProductUniform.name(),
                n,
                0.0,
                method.as_str(),
                "median_abs_error",
            )
            .value(median(&errors), 0.0, reps),
        );
    }
    Ok(report)
}

/// Median wall time per call (seconds) of `method` on independent normal
/// data of each size. Each size is timed until at least `min_seconds` has
/// elapsed and `min_calls` calls were made; data generation is excluded.
pub fn runtime_study(
    n_list: &[usize],
    method: Method,
    min_calls: usize,
    min_seconds: f64,
    seed: u64,
) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new("runtime");
    for &n in n_list {
        let spec = ModelSpec::new(Model::Independent, n, derive_seed(seed, &[n as u64]));
        let sample = generate(&spec)?;
        let mut times = Vec::new();
        let start = Instant::now();
        while times.len() < min_calls.max(1) || start.elapsed().as_secs_f64() < min_seconds {
            let t0 = Instant::now();
            std::hint::black_box(coefficient(&sample, method, seed, 1)?);
            times.push(t0.elapsed().as_secs_f64());
        }
        report.push(
            ReportRow::new("independent", n, 0.0, method.as_str(), "seconds").value(
                median(&times),
                0.0,
                times.len(),
            ),
        );
    }
    Ok(report)
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let k = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / k;
    let my = ly.iter().sum::<f64>() / k;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn null_study_emits_histogram() {
        let r = null_moment_study(20, 400, 1, 30).unwrap();
        assert_eq!(r.rows_with_metric("hist_count").count(), 30);
        let total: f64 = r.rows_with_metric("hist_count").map(|r| r.value).sum();
        assert_eq!(total, 400.0);
        assert!(null_moment_study(20, 10, 1, 10).is_err());
    }

    #[test]
    fn power_is_one_without_noise_and_reproducible() {
        let design = PowerDesign {
            models: vec![Model::Linear],
            lambdas: vec![0.0],
            n: 60,
            reps: 20,
            b: 99,
            alpha: 0.05,
            methods: Method::ALL.to_vec(),
        };
        let a = power_study(&design, 4).unwrap();
        assert_eq!(a, power_study(&design, 4).unwrap());
        for row in &a.rows {
            assert_eq!(row.value, 1.0, "{}", row.method);
        }
    }

    #[test]
    fn single_replicate_selection_flagged() {
        let r = selection_study(&[Model::Lm], &[60], 6, 1, 2).unwrap();
        for row in &r.rows {
            assert_eq!(row.mc_se, 0.0);
            assert_eq!(row.note.as_deref(), Some("single_replicate"));
        }
    }

    #[test]
    fn slope_of_power_law() {
        let x = [1e3, 1e4, 1e5];
        let y: Vec<f64> = x.iter().map(|v: &f64| 3.0 * v.powf(1.1)).collect();
        assert!((loglog_slope(&x, &y) - 1.1).abs() < 1e-12);
    }

    #[test]
    fn outcome_classification() {
        assert_eq!(
            selection_outcome(&[2, 0, 1]),
            SelectionOutcome {
                exact: true,
                included: true,
                false_selections: 0
            }
        );
        assert_eq!(
            selection_outcome(&[0, 5, 1, 2]),
            SelectionOutcome {
                exact: false,
                included: true,
                false_selections: 1
            }
        );
        assert!(!selection_outcome(&[0, 1]).included);
    }
}
