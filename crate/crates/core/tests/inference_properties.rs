use proptest::prelude::*;
use rayon::prelude::*;

use ir2_core::inference::{
    asymptotic_test, bh_adjust, exact_null_values_1dim, permutation_test, NULL_VARIANCE_LIMIT,
};
use ir2_core::rng::derive_seed;
use ir2_core::simulation::{coefficient_replicates, summarize};
use ir2_core::{generate, Method, Model, ModelSpec, Sample};

fn null_sample(n: usize, seed: u64) -> Sample {
    generate(&ModelSpec::new(Model::Independent, n, seed)).unwrap()
}

#[test]
fn permutation_p_values_are_super_uniform() {
    let p: Vec<f64> = (0..2000u64)
        .into_par_iter()
        .map(|k| {
            let seed = derive_seed(41, &[k]);
            permutation_test(&null_sample(50, seed), Method::Nu1d, 199, seed)
                .unwrap()
                .p_value
        })
        .collect();
    for alpha in [0.01, 0.05, 0.1] {
        let rate = p.iter().filter(|&&v| v <= alpha).count() as f64 / p.len() as f64;
        assert!(rate <= alpha + 0.02, "alpha {alpha}: {rate}");
    }
}

#[test]
fn exact_null_mean_and_variance() {
    for n in 4..=9 {
        let v = exact_null_values_1dim(n).unwrap();
        let k = v.len() as f64;
        let mean = v.iter().sum::<f64>() / k;
        assert!((mean - 2.0 / n as f64).abs() <= 1e-12, "n = {n}");
        let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / k;
        // The finite-n variance carries an o(1/n) remainder; compare loosely.
        if n >= 6 {
            assert!(
                (n as f64 * var - NULL_VARIANCE_LIMIT).abs() < 0.05,
                "n = {n}: {}",
                n as f64 * var
            );
        }
    }
}

#[test]
fn monte_carlo_variance_approaches_limit() {
    for (n, seed) in [(100, 1), (1000, 2)] {
        let spec = ModelSpec::new(Model::Independent, n, 0);
        let v = coefficient_replicates(&spec, Method::Nu1d, 4000, seed).unwrap();
        let (_, var, _) = summarize(&v);
        let scaled = n as f64 * var;
        assert!(
            (scaled - NULL_VARIANCE_LIMIT).abs() < 0.04,
            "n = {n}: {scaled}"
        );
    }
}

#[test]
fn asymptotic_test_is_calibrated() {
    let rejections = (0..500u64)
        .into_par_iter()
        .filter(|&k| {
            let seed = derive_seed(42, &[k]);
            let s = null_sample(1000, seed);
            asymptotic_test(s.y(), &s.column(0), seed).unwrap().p_value <= 0.05
        })
        .count();
    let rate = rejections as f64 / 500.0;
    assert!((0.03..=0.07).contains(&rate), "{rate}");
}

#[test]
fn strong_dependence_gets_smallest_p_value() {
    let x: Vec<f64> = (0..100).map(|i| (i as f64 / 7.0).sin()).collect();
    let s = Sample::univariate(x.clone(), x).unwrap();
    let r = permutation_test(&s, Method::Nu1d, 200, 5).unwrap();
    assert_eq!(r.p_value, 1.0 / 201.0);
    assert_eq!(r.null_mean_theoretical, Some(0.02));
    let r = permutation_test(&s, Method::Xi, 199, 5).unwrap();
    assert_eq!(r.p_value, 0.005);
}

#[test]
fn permutation_test_is_reproducible_and_thread_independent() {
    let s = null_sample(80, 3);
    let a = permutation_test(&s, Method::Nu, 300, 9).unwrap();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let b = pool.install(|| permutation_test(&s, Method::Nu, 300, 9).unwrap());
    assert_eq!(a, b);
}

proptest! {
    #[test]
    fn bh_commutes_with_reordering(
        p in prop::collection::vec(0.0f64..=1.0, 1..40),
        seed in any::<u64>(),
    ) {
        use rand::seq::SliceRandom;
        let q = bh_adjust(&p).unwrap();
        let mut idx: Vec<usize> = (0..p.len()).collect();
        idx.shuffle(&mut ir2_core::rng_from_seed(seed));
        let pp: Vec<f64> = idx.iter().map(|&i| p[i]).collect();
        let qq = bh_adjust(&pp).unwrap();
        for (k, &i) in idx.iter().enumerate() {
            prop_assert_eq!(qq[k], q[i]);
        }
        for (&pi, &qi) in p.iter().zip(&q) {
            prop_assert!(qi >= pi && qi <= 1.0);
        }
        // Monotone in p.
        let mut pairs: Vec<(f64, f64)> = p.iter().cloned().zip(q.iter().cloned()).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        for w in pairs.windows(2) {
            prop_assert!(w[1].1 >= w[0].1);
        }
    }
}
