use std::fs::File;
use std::io::{self, BufWriter, Write};

use serde::Serialize;

use ir2_core::inference::{asymptotic_test, permutation_test, PermutationTestResult};
use ir2_core::permdist::{classical_metric, d_nu, d_nu_symmetric, ClassicalMetric, Permutation};
use ir2_core::simulation::{
    figure1_study, null_moment_study, power_study, selection_study, ExperimentReport, PowerDesign,
};
use ir2_core::{
    coefficient, ford_full_ordering, ford_select, generate, CoefficientResult, Method, Model,
    ModelSpec, Sample, SelectionPath,
};

use crate::args::{
    CoeffArgs, DataArgs, FordArgs, MetricArg, Mode, PermdistArgs, ReportFormat, SampleArgs,
    SimulateArgs, Study, TestArgs,
};
use crate::data::read_dataset;
use crate::error::CliError;

/// Data provenance attached to every result computed from a file.
#[derive(Debug, Serialize)]
struct Input {
    y_col: String,
    x_cols: Vec<String>,
    standardized: bool,
    dropped_rows: usize,
}

#[derive(Serialize)]
struct CoeffOutput {
    #[serde(flatten)]
    result: CoefficientResult,
    #[serde(flatten)]
    input: Input,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<&'static str>,
}

#[derive(Serialize)]
struct FordOutput {
    #[serde(flatten)]
    path: SelectionPath,
    chosen_names: Vec<String>,
    #[serde(flatten)]
    input: Input,
}

#[derive(Serialize)]
struct TestOutput {
    #[serde(flatten)]
    result: PermutationTestResult,
    #[serde(flatten)]
    input: Input,
}

#[derive(Serialize)]
struct PermdistOutput {
    metric: &'static str,
    value: f64,
    n: usize,
    a: Permutation,
    b: Permutation,
}

#[derive(Serialize)]
struct SimulateSummary {
    study: String,
    rows: usize,
    out: String,
    format: &'static str,
    seed: u64,
}

pub fn print_json<T: Serialize>(value: &T) -> Result<(), CliError> {
    let s = serde_json::to_string_pretty(value).map_err(|e| CliError::Data(e.to_string()))?;
    let mut out = io::stdout().lock();
    writeln!(out, "{s}")?;
    Ok(())
}

fn load(data: &DataArgs, standardize_default: bool) -> Result<(Sample, Input), CliError> {
    let x_cols: Vec<String> = data
        .x_cols
        .iter()
        .map(|c| c.trim().to_string())
        .filter(|c| !c.is_empty())
        .collect();
    if x_cols.is_empty() {
        return Err(CliError::Usage(
            "at least one covariate column is required".into(),
        ));
    }
    let d = read_dataset(&data.file, &data.y_col, &x_cols, data.drop_missing)?;
    let standardized = data.standardize_or(standardize_default);
    let sample = Sample::with_columns(d.y, d.x, d.x_cols.clone())?;
    let sample = if standardized {
        sample.standardized()
    } else {
        sample
    };
    let input = Input {
        y_col: d.y_col,
        x_cols: d.x_cols,
        standardized,
        dropped_rows: d.dropped,
    };
    Ok((sample, input))
}

fn check_univariate(method: Method, data: &DataArgs) -> Result<(), CliError> {
    let k = data.x_cols.iter().filter(|c| !c.trim().is_empty()).count();
    if method.is_univariate() && k > 1 {
        return Err(CliError::Usage(format!(
            "method {method} takes exactly one covariate column, got {k}"
        )));
    }
    Ok(())
}

pub fn coeff(args: &CoeffArgs, seed: u64) -> Result<(), CliError> {
    check_univariate(args.method, &args.data)?;
    if args.replicate_ties == 0 {
        return Err(CliError::Usage(
            "--replicate-ties must be at least 1".into(),
        ));
    }
    let (sample, input) = load(&args.data, args.method == Method::Nu)?;
    let result = coefficient(&sample, args.method, seed, args.replicate_ties)?;
    let note = (result.value < 0.0)
        .then_some("negative estimate: finite-sample values are not clipped to [0, 1]");
    print_json(&CoeffOutput {
        result,
        input,
        note,
    })
}

pub fn ford(args: &FordArgs, seed: u64) -> Result<(), CliError> {
    let (sample, input) = load(&args.data, true)?;
    let path = if args.full {
        ford_full_ordering(&sample, seed)?
    } else {
        ford_select(&sample, seed, args.max_steps)?
    };
    let chosen_names = path
        .chosen
        .iter()
        .map(|&c| input.x_cols[c].clone())
        .collect();
    print_json(&FordOutput {
        path,
        chosen_names,
        input,
    })
}

pub fn test(args: &TestArgs, seed: u64) -> Result<(), CliError> {
    check_univariate(args.method, &args.data)?;
    if args.mode == Mode::Asymptotic {
        if args.method != Method::Nu1d {
            return Err(CliError::Usage(
                "the asymptotic test is available for method nu1d only".into(),
            ));
        }
        if args.data.x_cols.len() != 1 {
            return Err(CliError::Usage(
                "the asymptotic test takes one covariate column".into(),
            ));
        }
    }
    if args.mode == Mode::Perm && args.permutations == 0 {
        return Err(CliError::Usage("--permutations must be at least 1".into()));
    }
    let (sample, input) = load(&args.data, args.method == Method::Nu)?;
    let result = match args.mode {
        Mode::Perm => permutation_test(&sample, args.method, args.permutations, seed)?,
        Mode::Asymptotic => asymptotic_test(sample.y(), &sample.column(0), seed)?,
    };
    print_json(&TestOutput { result, input })
}

pub fn permdist(args: &PermdistArgs) -> Result<(), CliError> {
    let a: Permutation = args.a.parse()?;
    let b: Permutation = args.b.parse()?;
    let (name, value) = match args.metric {
        MetricArg::DNu => ("d_nu", d_nu(&a, &b)?),
        MetricArg::DNuSym => ("d_nu_sym", d_nu_symmetric(&a, &b)?),
        other => {
            let m = match other {
                MetricArg::Footrule => ClassicalMetric::Footrule,
                MetricArg::SpearmanRhoSq => ClassicalMetric::SpearmanRhoSq,
                MetricArg::Kendall => ClassicalMetric::Kendall,
                MetricArg::Cayley => ClassicalMetric::Cayley,
                MetricArg::Hamming => ClassicalMetric::Hamming,
                MetricArg::Ulam => ClassicalMetric::Ulam,
                MetricArg::DNu | MetricArg::DNuSym => unreachable!(),
            };
            (m.name(), classical_metric(m, &a, &b)?)
        }
    };
    print_json(&PermdistOutput {
        metric: name,
        value,
        n: a.len(),
        a,
        b,
    })
}

fn models_or(given: &[Model], default: &[Model]) -> Vec<Model> {
    if given.is_empty() {
        default.to_vec()
    } else {
        given.to_vec()
    }
}

fn run_study(args: &SimulateArgs, seed: u64) -> Result<ExperimentReport, CliError> {
    let report = match args.study {
        Study::Null => null_moment_study(
            args.n.unwrap_or(1000),
            args.reps.unwrap_or(10_000),
            seed,
            args.bins,
        )?,
        Study::Power => {
            let mut design = PowerDesign {
                models: models_or(&args.models, &Model::POWER),
                ..PowerDesign::default()
            };
            if let Some(n) = args.n {
                design.n = n;
            }
            if let Some(r) = args.reps {
                design.reps = r;
            }
            if let Some(b) = args.permutations {
                design.b = b;
            }
            if let Some(a) = args.alpha {
                design.alpha = a;
            }
            if !args.lambdas.is_empty() {
                design.lambdas = args.lambdas.clone();
            }
            if !args.methods.is_empty() {
                design.methods = args.methods.clone();
            }
            power_study(&design, seed)?
        }
        Study::Selection => {
            let n_list = if args.n_list.is_empty() {
                vec![args.n.unwrap_or(1000)]
            } else {
                args.n_list.clone()
            };
            selection_study(
                &models_or(&args.models, &Model::SELECTION),
                &n_list,
                args.p.unwrap_or(10),
                args.reps.unwrap_or(100),
                seed,
            )?
        }
        Study::Figure1 => {
            let sds = if args.noise_sds.is_empty() {
                vec![0.0, 0.3]
            } else {
                args.noise_sds.clone()
            };
            figure1_study(&sds, args.n.unwrap_or(100), args.reps.unwrap_or(100), seed)?
        }
    };
    Ok(report)
}

fn write_report<W: Write>(
    report: &ExperimentReport,
    format: ReportFormat,
    out: W,
) -> Result<(), CliError> {
    match format {
        ReportFormat::Csv => report.write_csv(out)?,
        ReportFormat::Jsonl => report.write_jsonl(out)?,
    }
    Ok(())
}

pub fn simulate(args: &SimulateArgs, seed: u64) -> Result<(), CliError> {
    let report = run_study(args, seed)?;
    match &args.out {
        Some(path) => {
            let file = File::create(path)
                .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
            let mut w = BufWriter::new(file);
            write_report(&report, args.format, &mut w)?;
            w.flush()?;
            print_json(&SimulateSummary {
                study: report.study.clone(),
                rows: report.rows.len(),
                out: path.display().to_string(),
                format: match args.format {
                    ReportFormat::Csv => "csv",
                    ReportFormat::Jsonl => "jsonl",
                },
                seed,
            })
        }
        None => write_report(&report, args.format, io::stdout().lock()),
    }
}

pub fn sample(args: &SampleArgs, seed: u64) -> Result<(), CliError> {
    let mut spec = ModelSpec::new(args.model, args.n, seed)
        .with_lambda(args.lambda)
        .with_noise_sd(args.noise_sd);
    if let Some(p) = args.p {
        spec = spec.with_p(p);
    }
    let s = generate(&spec)?;
    let sink: Box<dyn Write> = match &args.out {
        Some(path) => Box::new(
            File::create(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?,
        ),
        None => Box::new(io::stdout().lock()),
    };
    let mut w = csv::Writer::from_writer(BufWriter::new(sink));
    let csv_err = |e: csv::Error| CliError::Data(e.to_string());
    let mut header = vec!["y".to_string()];
    header.extend(s.columns().iter().cloned());
    w.write_record(&header).map_err(csv_err)?;
    let x = s.x();
    for i in 0..s.n() {
        let mut row = vec![s.y()[i].to_string()];
        row.extend(x.row(i).iter().map(|v| v.to_string()));
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}
