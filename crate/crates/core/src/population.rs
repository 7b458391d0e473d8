//! Population values of ν for benchmark models.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng::{derive_seed, rng_from_seed};
use crate::simulation::ModelSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PopulationMethod {
    ClosedFormQuadrature,
    PlugInMc,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PopulationTarget {
    pub model: String,
    pub value: f64,
    pub method: PopulationMethod,
    /// Quadrature error estimate, or two standard errors for Monte Carlo.
    pub abs_error_bound: f64,
    /// Monte Carlo standard error; absent for quadrature.
    pub std_error: Option<f64>,
}

const DEFAULT_TOLERANCE: f64 = 1e-10;
const U_MAX: f64 = 60.0;
const SERIES_CUTOFF: f64 = 0.5;

/// `G(u) = 1 − (1 + u)e^{−u}`, the survival function `P(Y > t)` at `t = e^{−u}`
/// for `Y = XZ`.
fn survival(u: f64) -> f64 {
    if u < SERIES_CUTOFF {
        // Σ_{k≥2} (−1)^k (k−1) u^k / k!
        let mut term = u; // u^k / k! at k = 1
        let mut sum = 0.0;
        for k in 2..30 {
            term *= u / k as f64;
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            sum += sign * (k - 1) as f64 * term;
        }
        sum
    } else {
        1.0 - (1.0 + u) * (-u).exp()
    }
}

/// `H(u) = 2G(u) − u²e^{−u}`, equal to `e^{u} Var(P(Y > t | X))`.
fn scaled_between_variance(u: f64) -> f64 {
    if u < SERIES_CUTOFF {
        // Σ_{k≥3} (−1)^{k+1} (k−1)(k−2) u^k / k!
        let mut term = u * u / 2.0;
        let mut sum = 0.0;
        for k in 3..30 {
            term *= u / k as f64;
            let sign = if k % 2 == 0 { -1.0 } else { 1.0 };
            sum += sign * ((k - 1) * (k - 2)) as f64 * term;
        }
        sum
    } else {
        2.0 * survival(u) - u * u * (-u).exp()
    }
}

/// Integrand of ν(XZ, X) in the original variable `t ∈ (0, 1)`:
/// `Var(P(Y > t | X)) / Var(1{Y > t}) · (−log t)`.
pub fn product_uniform_integrand(t: f64) -> f64 {
    if !(t > 0.0 && t < 1.0) {
        return 0.0;
    }
    let u = -t.ln();
    let g = survival(u);
    if g <= 0.0 {
        return 0.0;
    }
    scaled_between_variance(u) / (g * (1.0 + u)) * u
}

/// Integrand after substituting `t = e^{−u}`.
fn integrand_u(u: f64) -> f64 {
    if u <= 0.0 {
        return 0.0;
    }
    let g = survival(u);
    if g <= 0.0 {
        return 0.0;
    }
    scaled_between_variance(u) / (g * (1.0 + u)) * u * (-u).exp()
}

/// ν(Y, X) for `Y = XZ` with `X, Z ~ U[0, 1]` independent.
pub fn nu_product_uniform() -> Result<PopulationTarget> {
    nu_product_uniform_with_tolerance(DEFAULT_TOLERANCE)
}

/// Same as [`nu_product_uniform`] with an explicit absolute error target.
///
/// The logarithmic substitution `t = e^{−u}` removes the `−log t`
/// singularity at 0; the tail beyond `u = 60` contributes below `1e-24`.
/// Near `t = 1` the numerator and denominator vanish together, so both are
/// evaluated from their power series for small `u`.
pub fn nu_product_uniform_with_tolerance(tol: f64) -> Result<PopulationTarget> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Input(format!("tolerance {tol} must be positive")));
    }
    let out = quadrature::double_exponential::integrate(integrand_u, 0.0, U_MAX, tol);
    if !out.integral.is_finite() || out.error_estimate > 1e-4 {
        return Err(Error::Numerical(format!(
            "quadrature did not converge (estimate {}, error {})",
            out.integral, out.error_estimate
        )));
    }
    Ok(PopulationTarget {
        model: "product_uniform".into(),
        value: out.integral,
        method: PopulationMethod::ClosedFormQuadrature,
        abs_error_bound: out.error_estimate.max(f64::EPSILON),
        std_error: None,
    })
}

/// Sampling budget of the nested Monte Carlo estimator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McBudget {
    /// Thresholds `t` drawn from the law of Y.
    pub t_grid_size: usize,
    /// Covariate draws per threshold.
    pub n_outer: usize,
    /// Response draws per covariate draw.
    pub n_inner: usize,
}

impl Default for McBudget {
    fn default() -> Self {
        Self {
            t_grid_size: 400,
            n_outer: 400,
            n_inner: 64,
        }
    }
}

/// Plug-in Monte Carlo approximation of ν for any generator model.
///
/// For each threshold `t` drawn from the law of Y (rejecting a point mass at
/// the maximum), `Var(P(Y > t | X))` is estimated from `n_outer` covariate
/// draws with `n_inner` responses each, corrected for the within-draw
/// binomial noise, and divided by the Bernoulli variance of `1{Y > t}`.
/// The reported value is the mean over thresholds, with the standard error
/// of that mean.
pub fn nu_plug_in_mc(spec: &ModelSpec, budget: McBudget, seed: u64) -> Result<PopulationTarget> {
    spec.validate()?;
    if budget.t_grid_size < 2 || budget.n_outer < 2 || budget.n_inner < 2 {
        return Err(Error::Input(
            "Monte Carlo budget sizes must be at least 2".into(),
        ));
    }
    let model = spec.model;
    let atom = model.max_atom(spec);
    let terms: Vec<Option<f64>> = (0..budget.t_grid_size)
        .into_par_iter()
        .map(|k| {
            let mut rng = rng_from_seed(derive_seed(seed, &[k as u64]));
            let t = loop {
                let x = model.draw_x(spec, &mut rng);
                let y = model.draw_y(spec, &x, &mut rng);
                if atom != Some(y) {
                    break y;
                }
            };
            let m = budget.n_inner as f64;
            let mut probs = Vec::with_capacity(budget.n_outer);
            for _ in 0..budget.n_outer {
                let x = model.draw_x(spec, &mut rng);
                let hits = (0..budget.n_inner)
                    .filter(|_| model.draw_y(spec, &x, &mut rng) > t)
                    .count();
                probs.push(hits as f64 / m);
            }
            let k = probs.len() as f64;
            let p_bar = probs.iter().sum::<f64>() / k;
            // Same k/(k-1) scaling as the spread, so a deterministic response gives exactly 1.
            let total = p_bar * (1.0 - p_bar) * k / (k - 1.0);
            if total <= 0.0 {
                return None;
            }
            let spread = probs.iter().map(|p| (p - p_bar).powi(2)).sum::<f64>() / (k - 1.0);
            let noise = probs.iter().map(|p| p * (1.0 - p)).sum::<f64>() / k / (m - 1.0);
            Some((spread - noise) / total)
        })
        .collect();
    let ratios: Vec<f64> = terms.into_iter().flatten().collect();
    if ratios.len() < 2 {
        return Err(Error::Numerical(
            "fewer than two non-degenerate thresholds".into(),
        ));
    }
    let k = ratios.len() as f64;
    let mean = ratios.iter().sum::<f64>() / k;
    let var = ratios.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (k - 1.0);
    let se = (var / k).sqrt();
    Ok(PopulationTarget {
        model: model.name().into(),
        value: mean,
        method: PopulationMethod::PlugInMc,
        abs_error_bound: (2.0 * se).max(f64::EPSILON),
        std_error: Some(se),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulation::Model;

    /// Reference value from 50-digit quadrature of the same integral.
    const REFERENCE: f64 = 0.312_601_694_720_152_7;

    fn direct_integrand(t: f64) -> f64 {
        let l = t.ln();
        let g = 1.0 - t + t * l;
        (1.0 + 2.0 * t * l - t * t - g * g) / (g * (t - t * l)) * (-l)
    }

    #[test]
    fn quadrature_matches_reference() {
        let v = nu_product_uniform().unwrap();
        assert!((v.value - REFERENCE).abs() < 1e-9, "{}", v.value);
        assert!(v.abs_error_bound <= 1e-4);
        assert!((v.value - 0.3126).abs() <= 0.001);
    }

    #[test]
    fn halved_tolerance_agrees() {
        let a = nu_product_uniform_with_tolerance(1e-8).unwrap().value;
        let b = nu_product_uniform_with_tolerance(5e-9).unwrap().value;
        assert!((a - b).abs() < 1e-5);
    }

    #[test]
    fn integrand_matches_closed_form_away_from_endpoints() {
        for &t in &[0.01, 0.1, 0.3, 0.5, 0.7, 0.9] {
            let a = product_uniform_integrand(t);
            let b = direct_integrand(t);
            assert!(
                (a - b).abs() < 1e-12 * b.abs().max(1.0),
                "t = {t}: {a} vs {b}"
            );
        }
    }

    #[test]
    fn integrand_vanishes_at_one() {
        let v = product_uniform_integrand(1.0 - 1e-6);
        assert!(v > 0.0 && v < 1e-11, "{v}");
        // Leading behaviour (2/3) u², u ≈ 1e-6.
        assert!((v / (2.0 / 3.0 * 1e-12) - 1.0).abs() < 1e-3);
    }

    #[test]
    fn series_branches_are_continuous() {
        let eps = 1e-9;
        let below = survival(SERIES_CUTOFF - eps);
        let above = survival(SERIES_CUTOFF + eps);
        assert!((below - above).abs() < 1e-8);
        let below = scaled_between_variance(SERIES_CUTOFF - eps);
        let above = scaled_between_variance(SERIES_CUTOFF + eps);
        assert!((below - above).abs() < 1e-8);
    }

    fn mc(model: Model) -> PopulationTarget {
        let budget = McBudget {
            t_grid_size: 300,
            n_outer: 300,
            n_inner: 32,
        };
        nu_plug_in_mc(&ModelSpec::new(model, 100, 0), budget, 9).unwrap()
    }

    #[test]
    fn plug_in_product_uniform_near_quadrature() {
        let t = mc(Model::ProductUniform);
        let se = t.std_error.unwrap();
        assert!(
            (t.value - REFERENCE).abs() <= 2.0 * se,
            "{} ± {se}",
            t.value
        );
    }

    #[test]
    fn plug_in_independent_near_zero() {
        let t = mc(Model::Independent);
        let se = t.std_error.unwrap();
        assert!(t.value.abs() <= 2.0 * se, "{} ± {se}", t.value);
    }

    #[test]
    fn plug_in_functional_is_one() {
        let t = mc(Model::ScatterLinear);
        assert!((t.value - 1.0).abs() < 1e-12, "{}", t.value);
    }

    #[test]
    fn plug_in_step_rejects_top_atom() {
        let t = mc(Model::Step);
        assert!((t.value - 1.0).abs() < 1e-12, "{}", t.value);
    }
}
