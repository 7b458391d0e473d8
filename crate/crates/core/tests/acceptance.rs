//! Acceptance suite: one line per criterion and a summary line.
//!
//! The report is the verdict. The process exits nonzero on a failed criterion
//! only when `IR2_ACCEPTANCE_STRICT` is set, so a plain `cargo test` still runs
//! every other test target after this one.

use std::process::ExitCode;
use std::time::Instant;

use ndarray::Array2;
use rand::Rng;

use ir2_core::coefficient::{
    nu_1dim, nu_1dim_oracle, nu_general, nu_general_oracle, weight_comparison,
};
use ir2_core::inference::{exact_null_values_1dim, permutation_test};
use ir2_core::permdist::{d_nu, d_nu_exact, Permutation};
use ir2_core::population::nu_product_uniform;
use ir2_core::rng::{derive_seed, rng_from_seed};
use ir2_core::simulation::{
    coefficient_replicates, generate, loglog_slope, rate_study, runtime_study, selection_outcomes,
    summarize, Model, ModelSpec,
};
use ir2_core::{Method, Sample};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn c01_exact_null_mean() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in 4..=7 {
        let values = exact_null_values_1dim(n).unwrap();
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        worst = worst.max((mean - 2.0 / n as f64).abs());
    }
    outcome(
        worst <= 1e-12,
        format!("max |mean - 2/n| over n=4..7 = {worst:.2e} (tol 1e-12)"),
    )
}

fn c02_null_variance() -> Outcome {
    let spec = ModelSpec::new(Model::Independent, 1000, 0);
    let values = coefficient_replicates(&spec, Method::Nu1d, 10_000, 202).unwrap();
    let (_, var, _) = summarize(&values);
    let nv = 1000.0 * var;
    outcome(
        (0.26..=0.32).contains(&nv),
        format!("n*Var = {nv:.4} at n=1000, 10000 reps (band [0.26, 0.32])"),
    )
}

fn c03_product_uniform() -> Outcome {
    let q = nu_product_uniform().unwrap().value;
    let spec = ModelSpec::new(Model::ProductUniform, 1000, 0);
    let values = coefficient_replicates(&spec, Method::Nu1d, 10_000, 303).unwrap();
    let (mean, var, _) = summarize(&values);
    let sd = var.sqrt();
    let ok_q = (q - 0.3126).abs() <= 0.001;
    let ok_mean = (mean - 0.314).abs() <= 0.01;
    let ok_sd = (sd - 0.02).abs() <= 0.005;
    outcome(
        ok_q && ok_mean && ok_sd,
        format!(
            "quadrature {q:.6} (0.3126 ± 0.001), MC mean {mean:.4} (0.314 ± 0.01), sd {sd:.4} (0.02 ± 0.005)"
        ),
    )
}

/// Random dataset with optional ties in both coordinates.
fn random_sample(rng: &mut impl Rng, n: usize, p: usize, tied: bool) -> Sample {
    let levels = (n / 3).max(2);
    let x = Array2::from_shape_fn((n, p), |_| {
        if tied {
            rng.random_range(0..levels) as f64
        } else {
            rng.random::<f64>()
        }
    });
    let y = (0..n)
        .map(|_| {
            if tied {
                rng.random_range(0..levels) as f64
            } else {
                rng.random::<f64>()
            }
        })
        .collect();
    Sample::new(y, x).unwrap()
}

fn c04_oracle_equivalence() -> Outcome {
    let mut rng = rng_from_seed(404);
    let (mut checked, mut mismatches) = (0, Vec::new());
    for case in 0..200u64 {
        let n = rng.random_range(4..=64);
        let p = rng.random_range(1..=3);
        let tied = case % 2 == 0;
        let s = random_sample(&mut rng, n, p, tied);
        let seed = derive_seed(404, &[case]);
        match (nu_general(&s, seed), nu_general_oracle(&s, seed)) {
            (Ok(a), Ok(b)) => {
                checked += 1;
                if a.value != b.value {
                    mismatches.push(format!("nu case {case}: {} vs {}", a.value, b.value));
                }
            }
            (Err(_), Err(_)) => {}
            (a, b) => mismatches.push(format!("nu case {case}: {a:?} vs {b:?}")),
        }
        let x = s.column(0);
        match (nu_1dim(s.y(), &x, seed), nu_1dim_oracle(s.y(), &x, seed)) {
            (Ok(a), Ok(b)) => {
                checked += 1;
                if a.value != b.value {
                    mismatches.push(format!("nu1d case {case}: {} vs {}", a.value, b.value));
                }
            }
            (Err(_), Err(_)) => {}
            (a, b) => mismatches.push(format!("nu1d case {case}: {a:?} vs {b:?}")),
        }
    }
    outcome(
        mismatches.is_empty() && checked >= 380,
        format!(
            "{checked} fast/oracle pairs over 200 datasets, {} mismatches{}",
            mismatches.len(),
            mismatches
                .first()
                .map(|m| format!(" (first: {m})"))
                .unwrap_or_default()
        ),
    )
}

fn c05_monotone_exactness() -> Outcome {
    let mut bad = Vec::new();
    for n in 4..=500usize {
        let x: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).exp()).collect();
        let up: Vec<f64> = x.iter().map(|v| v.ln() * 3.0 + 1.0).collect();
        let down: Vec<f64> = x.iter().map(|v| -v.sqrt()).collect();
        for (label, y) in [("increasing", &up), ("decreasing", &down)] {
            let fast = nu_1dim(y, &x, n as u64).unwrap().value;
            let oracle = nu_1dim_oracle(y, &x, n as u64).unwrap().value;
            if fast != 1.0 || oracle != 1.0 {
                bad.push(format!("n={n} {label}: {fast} / {oracle}"));
            }
        }
    }
    outcome(
        bad.is_empty(),
        format!(
            "n=4..500 both directions, fast and oracle exactly 1: {} failures{}",
            bad.len(),
            bad.first()
                .map(|b| format!(" (first: {b})"))
                .unwrap_or_default()
        ),
    )
}

fn c06_scatter_bands() -> Outcome {
    let bands = [
        (Model::ScatterLinear, 0.95, 1.0),
        (Model::ScatterQuadratic, 0.94, 1.0),
        (Model::ScatterSine, 0.85, 0.95),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (model, lo, hi) in bands {
        let spec = ModelSpec::new(model, 100, 0);
        let values = coefficient_replicates(&spec, Method::Nu, 100, 606).unwrap();
        let inside = values.iter().filter(|v| (lo..=hi).contains(*v)).count();
        let (mean, _, _) = summarize(&values);
        pass &= inside >= 90;
        parts.push(format!(
            "{model} {inside}/100 in [{lo}, {hi}] (mean {mean:.4})"
        ));
    }
    outcome(pass, format!("{} (need >= 90 each)", parts.join("; ")))
}

fn c07_ford_recovery() -> Outcome {
    let big = selection_outcomes(Model::Lm, 1000, 100, 100, 707).unwrap();
    let small = selection_outcomes(Model::Lm, 100, 100, 100, 707).unwrap();
    let rate = |o: &[ir2_core::simulation::SelectionOutcome]| {
        o.iter().filter(|r| r.included).count() as f64 / o.len() as f64
    };
    let incl_big = rate(&big);
    let incl_small = rate(&small);
    let false_big = big.iter().map(|o| o.false_selections as f64).sum::<f64>() / big.len() as f64;
    outcome(
        incl_big >= 0.95 && false_big <= 1.0 && incl_small < incl_big,
        format!(
            "LM p=100: inclusion n=1000 {incl_big:.3} (>= 0.95), mean false {false_big:.3} (<= 1.0), inclusion n=100 {incl_small:.3} (< n=1000)"
        ),
    )
}

fn c08_calibration() -> Outcome {
    let reps = 500;
    let rejections = (0..reps)
        .filter(|&k| {
            let seed = derive_seed(808, &[k]);
            let s = generate(&ModelSpec::new(Model::Independent, 100, seed)).unwrap();
            permutation_test(&s, Method::Nu1d, 199, seed)
                .unwrap()
                .p_value
                <= 0.05
        })
        .count();
    let rate = rejections as f64 / reps as f64;
    outcome(
        (0.03..=0.07).contains(&rate),
        format!(
            "rejection rate {rate:.3} at alpha 0.05, n=100, B=199, 500 reps (band [0.03, 0.07])"
        ),
    )
}

fn c09_weight_ratio() -> Outcome {
    let mut min_ratio = f64::INFINITY;
    for n in 5..=200 {
        for r in 2..n {
            let w = weight_comparison(n, r).unwrap();
            min_ratio = min_ratio.min(w.w_nu / w.w_xi);
        }
    }
    outcome(
        min_ratio >= 2.0 / 3.0,
        format!("min w_nu/w_xi over 5 <= n <= 200 = {min_ratio:.6} (>= 2/3)"),
    )
}

fn c10_dnu_properties() -> Outcome {
    let mut rng = rng_from_seed(1010);
    let mut invariance_failures = 0;
    for _ in 0..200 {
        let n = rng.random_range(2..=40);
        let s = Permutation::random(n, &mut rng);
        let p = Permutation::random(n, &mut rng);
        let t = Permutation::random(n, &mut rng);
        let a = d_nu(&s, &p).unwrap();
        let b = d_nu(&t.compose(&s).unwrap(), &t.compose(&p).unwrap()).unwrap();
        if a != b {
            invariance_failures += 1;
        }
    }
    let mut identity_failures = 0;
    let mut zero_off_diagonal = Vec::new();
    for n in 2..=6 {
        let all = Permutation::all(n);
        for s in &all {
            for p in &all {
                let zero = d_nu_exact(s, p).unwrap() == 0.into();
                let float_zero = d_nu(s, p).unwrap() == 0.0;
                if zero != float_zero {
                    identity_failures += 1;
                }
                if s == p && !zero {
                    identity_failures += 1;
                }
                if s != p && zero {
                    zero_off_diagonal.push((s.clone(), p.clone()));
                }
            }
        }
    }
    let pass = invariance_failures == 0 && identity_failures == 0 && zero_off_diagonal.is_empty();
    outcome(
        pass,
        format!(
            "left-invariance failures {invariance_failures}/200; d(s,s) != 0 cases {identity_failures}; \
             pairs s != p with d = 0 for n <= 6: {}{}",
            zero_off_diagonal.len(),
            zero_off_diagonal
                .iter()
                .find(|(s, _)| s.len() >= 3)
                .map(|(s, p)| format!(" (e.g. s = {s}, p = {p})"))
                .unwrap_or_default()
        ),
    )
}

fn c11_rate() -> Outcome {
    let r = rate_study(&[100, 400, 1600], 200, Method::Nu, 1111).unwrap();
    let med: Vec<f64> = r.rows.iter().map(|row| row.value).collect();
    outcome(
        med.windows(2).all(|w| w[1] < w[0]),
        format!(
            "median |nu_n - nu| at n=100/400/1600: {:.4} / {:.4} / {:.4} (strictly decreasing)",
            med[0], med[1], med[2]
        ),
    )
}

fn c12_runtime() -> Outcome {
    let ns = [1_000usize, 10_000, 100_000];
    let r = runtime_study(&ns, Method::Nu1d, 5, 0.25, 1212).unwrap();
    let times: Vec<f64> = r.rows.iter().map(|row| row.value).collect();
    let x: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
    let slope = loglog_slope(&x, &times);
    outcome(
        slope <= 1.3,
        format!(
            "median seconds {:.2e} / {:.2e} / {:.2e}, log-log slope {slope:.3} (<= 1.3)",
            times[0], times[1], times[2]
        ),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("C01 exact null mean", c01_exact_null_mean),
        ("C02 null variance", c02_null_variance),
        ("C03 product-uniform target", c03_product_uniform),
        ("C04 oracle equivalence", c04_oracle_equivalence),
        ("C05 monotone exactness", c05_monotone_exactness),
        ("C06 scatterplot bands", c06_scatter_bands),
        ("C07 FORD scaled recovery", c07_ford_recovery),
        ("C08 test calibration", c08_calibration),
        ("C09 weight-ratio bound", c09_weight_ratio),
        ("C10 discrepancy properties", c10_dnu_properties),
        ("C11 rate sanity", c11_rate),
        ("C12 runtime growth", c12_runtime),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let o = run();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!(
            "[{tag}] {name}: {} [{:.1}s]",
            o.detail,
            start.elapsed().as_secs_f64()
        );
        if !o.pass {
            failed += 1;
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 || std::env::var_os("IR2_ACCEPTANCE_STRICT").is_none() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
