use ir2_core::simulation::{
    null_moment_study, power_study, selection_study, PowerDesign, MIN_HISTOGRAM_BINS,
};
use ir2_core::{generate, Method, Model, ModelSpec};

#[test]
fn generation_is_reproducible_per_model() {
    for m in Model::ALL {
        let spec = ModelSpec::new(m, 50, 77);
        let spec = if m.is_selection() {
            spec.with_p(5)
        } else {
            spec.with_lambda(0.3)
        };
        let a = generate(&spec).unwrap();
        let b = generate(&spec).unwrap();
        assert_eq!(a, b, "{m}");
        let c = generate(&spec.with_seed(78)).unwrap();
        assert_ne!(a, c, "{m}");
    }
}

#[test]
fn null_study_reports_moments_and_histogram() {
    let r = null_moment_study(60, 2000, 3, MIN_HISTOGRAM_BINS).unwrap();
    let hist: Vec<_> = r.rows_with_metric("hist_count").collect();
    assert_eq!(hist.len(), MIN_HISTOGRAM_BINS);
    assert_eq!(hist.iter().map(|row| row.value).sum::<f64>(), 2000.0);
    let mean = r.find("independent", "nu1d", "mean").unwrap();
    assert!((mean.value - 2.0 / 60.0).abs() < 4.0 * mean.mc_se + 1e-3);
    assert!(null_moment_study(60, 100, 3, 10).is_err());
    // Same seed, same report.
    let again = null_moment_study(60, 2000, 3, MIN_HISTOGRAM_BINS).unwrap();
    assert_eq!(r.to_csv_string().unwrap(), again.to_csv_string().unwrap());
}

#[test]
fn null_rejection_rate_is_nominal() {
    let design = PowerDesign {
        models: vec![Model::Independent],
        lambdas: vec![0.0],
        n: 100,
        reps: 600,
        b: 199,
        alpha: 0.05,
        methods: Method::ALL.to_vec(),
    };
    let r = power_study(&design, 8).unwrap();
    for row in r.rows_with_metric("power") {
        assert!(
            (row.value - 0.05).abs() <= 0.02 + 2.0 * row.mc_se,
            "{}: {}",
            row.method,
            row.value
        );
    }
}

#[test]
fn simple_estimator_keeps_up_with_xi_on_oscillation() {
    let design = PowerDesign {
        models: vec![Model::Sinusoid],
        lambdas: (0..=10).map(|k| k as f64 / 10.0).collect(),
        n: 100,
        reps: 300,
        b: 199,
        alpha: 0.05,
        methods: vec![Method::Nu1d, Method::Xi],
    };
    let r = power_study(&design, 9).unwrap();
    for &lambda in &design.lambdas {
        let get = |m: &str| {
            r.rows
                .iter()
                .find(|row| row.param == lambda && row.method == m && row.metric == "power")
                .unwrap()
                .value
        };
        assert!(
            get("nu1d") >= get("xi") - 0.05,
            "lambda {lambda}: {} vs {}",
            get("nu1d"),
            get("xi")
        );
    }
}

#[test]
fn selection_study_rejects_non_selection_models() {
    assert!(selection_study(&[Model::Linear], &[100], 5, 2, 0).is_err());
    let r = selection_study(&[Model::Lm], &[200], 5, 4, 0).unwrap();
    assert_eq!(r.rows.len(), 3);
}
