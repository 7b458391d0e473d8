use std::fmt;
use std::str::FromStr;

use ndarray::Array2;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{rng_from_seed, PortableRng};
use crate::sample::Sample;

/// Synthetic data-generating models.
///
/// The power alternatives and the scatterplot models draw `X ~ U[-1, 1]`;
/// the selection models draw `X ~ N(0, I_p)` and depend on the first three
/// covariates only. Noise `ε` is standard normal unless stated otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    /// `Y = 0.5 X + 3λε`.
    Linear,
    /// `Y = f(X) + 10λε`, `f` = −3, 2, −4, −3 on the quarters of `[-1, 1]`.
    Step,
    /// `Y = |X + 0.5| 1{X < 0} + |X − 0.5| 1{X ≥ 0} + 0.75λε`.
    WShaped,
    /// `Y = cos(8πX) + 3λε`.
    Sinusoid,
    /// `Y = Z √(1 − X²) + 0.9λε`, `Z = ±1` with equal probability.
    Circular,
    /// `Y = 3(σ(X)(1 − λ) + λ)ε`, `σ(X) = 1{|X| ≤ 0.5}`.
    Heteroskedastic,
    /// `Y = cos(20π(1 + 10λε) X²)`.
    HeteroSinusoid,
    /// `X, Y ~ U[0, 1]` independent.
    Independent,
    /// `X, Z ~ U[0, 1]` independent, `Y = XZ`.
    ProductUniform,
    /// `Y = X + σε`.
    ScatterLinear,
    /// `Y = X² + σε`.
    ScatterQuadratic,
    /// `Y = sin(2πX) + σε`.
    ScatterSine,
    /// `Y = 3X₁ + 2X₂ − X₃ + ε`.
    Lm,
    /// `Y = X₁X₂ + sin(X₁X₃)`.
    Nonlin1,
    /// `Y = |X₁ + ε|^{sin(X₂ − X₃)}`, `ε ~ U[0, 1]`.
    Nonlin2,
    /// `Y = sin(X₁)/√|X₁| + X₂X₃`.
    Osc1,
    /// `Y = sin(X₁)/X₂ + X₂X₃`.
    Osc2,
}

impl Model {
    pub const ALL: [Model; 17] = [
        Model::Linear,
        Model::Step,
        Model::WShaped,
        Model::Sinusoid,
        Model::Circular,
        Model::Heteroskedastic,
        Model::HeteroSinusoid,
        Model::Independent,
        Model::ProductUniform,
        Model::ScatterLinear,
        Model::ScatterQuadratic,
        Model::ScatterSine,
        Model::Lm,
        Model::Nonlin1,
        Model::Nonlin2,
        Model::Osc1,
        Model::Osc2,
    ];

    /// The seven noise-indexed alternatives of the power study.
    pub const POWER: [Model; 7] = [
        Model::Linear,
        Model::Step,
        Model::WShaped,
        Model::Sinusoid,
        Model::Circular,
        Model::Heteroskedastic,
        Model::HeteroSinusoid,
    ];

    pub const SELECTION: [Model; 5] = [
        Model::Lm,
        Model::Nonlin1,
        Model::Nonlin2,
        Model::Osc1,
        Model::Osc2,
    ];

    pub const SCATTER: [Model; 3] = [
        Model::ScatterLinear,
        Model::ScatterQuadratic,
        Model::ScatterSine,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Model::Linear => "linear",
            Model::Step => "step",
            Model::WShaped => "w_shaped",
            Model::Sinusoid => "sinusoid",
            Model::Circular => "circular",
            Model::Heteroskedastic => "heteroskedastic",
            Model::HeteroSinusoid => "hetero_sinusoid",
            Model::Independent => "independent",
            Model::ProductUniform => "product_uniform",
            Model::ScatterLinear => "scatter_linear",
            Model::ScatterQuadratic => "scatter_quadratic",
            Model::ScatterSine => "scatter_sine",
            Model::Lm => "lm",
            Model::Nonlin1 => "nonlin1",
            Model::Nonlin2 => "nonlin2",
            Model::Osc1 => "osc1",
            Model::Osc2 => "osc2",
        }
    }

    /// Selection models take `p ≥ 3` covariates; all others exactly one.
    pub fn is_selection(&self) -> bool {
        Self::SELECTION.contains(self)
    }

    /// Y value carrying a point mass at the top of the support, if any.
    pub fn max_atom(&self, spec: &ModelSpec) -> Option<f64> {
        match self {
            Model::Step if spec.lambda == 0.0 => Some(2.0),
            _ => None,
        }
    }

    /// One covariate row.
    pub fn draw_x(&self, spec: &ModelSpec, rng: &mut PortableRng) -> Vec<f64> {
        match self {
            Model::Independent | Model::ProductUniform => vec![rng.random::<f64>()],
            m if m.is_selection() => (0..spec.p).map(|_| rng.sample(StandardNormal)).collect(),
            _ => vec![rng.random_range(-1.0..=1.0)],
        }
    }

    /// One response given the covariate row `x`.
    pub fn draw_y(&self, spec: &ModelSpec, x: &[f64], rng: &mut PortableRng) -> f64 {
        let lambda = spec.lambda;
        let mut eps = || -> f64 { rng.sample(StandardNormal) };
        let x1 = x[0];
        match self {
            Model::Linear => 0.5 * x1 + 3.0 * lambda * eps(),
            Model::Step => step_level(x1) + 10.0 * lambda * eps(),
            Model::WShaped => w_shape(x1) + 0.75 * lambda * eps(),
            Model::Sinusoid => (8.0 * std::f64::consts::PI * x1).cos() + 3.0 * lambda * eps(),
            Model::Circular => {
                let z = if rng.random::<bool>() { 1.0 } else { -1.0 };
                let noise: f64 = rng.sample(StandardNormal);
                z * (1.0 - x1 * x1).max(0.0).sqrt() + 0.9 * lambda * noise
            }
            Model::Heteroskedastic => {
                let sigma = if x1.abs() <= 0.5 { 1.0 } else { 0.0 };
                3.0 * (sigma * (1.0 - lambda) + lambda) * eps()
            }
            Model::HeteroSinusoid => {
                (20.0 * std::f64::consts::PI * (1.0 + 10.0 * lambda * eps()) * x1 * x1).cos()
            }
            Model::Independent => rng.random::<f64>(),
            Model::ProductUniform => x1 * rng.random::<f64>(),
            Model::ScatterLinear => x1 + spec.noise_sd * eps(),
            Model::ScatterQuadratic => x1 * x1 + spec.noise_sd * eps(),
            Model::ScatterSine => (2.0 * std::f64::consts::PI * x1).sin() + spec.noise_sd * eps(),
            Model::Lm => 3.0 * x[0] + 2.0 * x[1] - x[2] + eps(),
            Model::Nonlin1 => x[0] * x[1] + (x[0] * x[2]).sin(),
            Model::Nonlin2 => {
                let u: f64 = rng.random();
                (x[0] + u).abs().powf((x[1] - x[2]).sin())
            }
            Model::Osc1 => x[0].sin() / x[0].abs().sqrt() + x[1] * x[2],
            Model::Osc2 => x[0].sin() / x[1] + x[1] * x[2],
        }
    }
}

/// Step-function levels on `[-1,-0.5)`, `[-0.5,0)`, `[0,0.5)`, `[0.5,1]`.
pub fn step_level(x: f64) -> f64 {
    if x < -0.5 {
        -3.0
    } else if x < 0.0 {
        2.0
    } else if x < 0.5 {
        -4.0
    } else {
        -3.0
    }
}

fn w_shape(x: f64) -> f64 {
    if x < 0.0 {
        (x + 0.5).abs()
    } else {
        (x - 0.5).abs()
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.to_ascii_lowercase().replace('-', "_");
        Model::ALL
            .into_iter()
            .find(|m| m.name() == key)
            .ok_or_else(|| Error::UnknownModel(s.to_string()))
    }
}

/// A model together with its size and noise parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub model: Model,
    pub n: usize,
    /// Covariate count; must be 1 for univariate models.
    pub p: usize,
    /// Noise level of the power alternatives, in `[0, 1]`.
    pub lambda: f64,
    /// Noise standard deviation of the scatterplot models.
    pub noise_sd: f64,
    pub seed: u64,
}

impl ModelSpec {
    pub fn new(model: Model, n: usize, seed: u64) -> Self {
        let p = if model.is_selection() { 3 } else { 1 };
        Self {
            model,
            n,
            p,
            lambda: 0.0,
            noise_sd: 0.0,
            seed,
        }
    }

    pub fn with_p(mut self, p: usize) -> Self {
        self.p = p;
        self
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn with_noise_sd(mut self, noise_sd: f64) -> Self {
        self.noise_sd = noise_sd;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 4 {
            return Err(Error::InsufficientSample {
                needed: 4,
                got: self.n,
            });
        }
        if !(0.0..=1.0).contains(&self.lambda) {
            return Err(Error::Input(format!(
                "lambda = {} outside [0, 1]",
                self.lambda
            )));
        }
        if !(self.noise_sd >= 0.0 && self.noise_sd.is_finite()) {
            return Err(Error::Input(format!(
                "noise_sd = {} must be >= 0",
                self.noise_sd
            )));
        }
        if self.model.is_selection() {
            if self.p < 3 {
                return Err(Error::Input(format!(
                    "model {} needs p >= 3, got {}",
                    self.model, self.p
                )));
            }
        } else if self.p != 1 {
            return Err(Error::Input(format!(
                "model {} has one covariate, got p = {}",
                self.model, self.p
            )));
        }
        Ok(())
    }
}

/// Draws a reproducible sample: row `i` takes its covariates and then its
/// response from a single ChaCha8 stream seeded with `spec.seed`.
pub fn generate(spec: &ModelSpec) -> Result<Sample> {
    spec.validate()?;
    let mut rng = rng_from_seed(spec.seed);
    let mut x = Array2::zeros((spec.n, spec.p));
    let mut y = Vec::with_capacity(spec.n);
    for i in 0..spec.n {
        let row = spec.model.draw_x(spec, &mut rng);
        y.push(spec.model.draw_y(spec, &row, &mut rng));
        for (j, v) in row.into_iter().enumerate() {
            x[[i, j]] = v;
        }
    }
    Sample::new(y, x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn draw(model: Model, lambda: f64) -> Sample {
        generate(&ModelSpec::new(model, 400, 3).with_lambda(lambda)).unwrap()
    }

    #[test]
    fn linear_without_noise_is_exact() {
        let s = draw(Model::Linear, 0.0);
        for (y, x) in s.y().iter().zip(s.column(0)) {
            assert_eq!(*y, 0.5 * x);
        }
    }

    #[test]
    fn circular_without_noise_lies_on_circle() {
        let s = draw(Model::Circular, 0.0);
        for (y, x) in s.y().iter().zip(s.column(0)) {
            assert!((x * x + y * y - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn w_shape_is_nonnegative_with_zeros_at_half() {
        let s = draw(Model::WShaped, 0.0);
        assert!(s.y().iter().all(|&y| y >= 0.0));
        assert_eq!(w_shape(-0.5), 0.0);
        assert_eq!(w_shape(0.5), 0.0);
    }

    #[test]
    fn step_levels_by_quarter() {
        let s = draw(Model::Step, 0.0);
        for (y, x) in s.y().iter().zip(s.column(0)) {
            let want = match x {
                x if x < -0.5 => -3.0,
                x if x < 0.0 => 2.0,
                x if x < 0.5 => -4.0,
                _ => -3.0,
            };
            assert_eq!(*y, want);
        }
    }

    #[test]
    fn same_spec_same_sample() {
        for m in Model::ALL {
            let spec = ModelSpec::new(m, 50, 17);
            let spec = if m.is_selection() {
                spec.with_p(6)
            } else {
                spec.with_lambda(0.4)
            };
            assert_eq!(generate(&spec).unwrap(), generate(&spec).unwrap(), "{m}");
        }
    }

    #[test]
    fn names_round_trip() {
        for m in Model::ALL {
            assert_eq!(m.name().parse::<Model>().unwrap(), m);
        }
        assert!(matches!(
            "spiral".parse::<Model>(),
            Err(Error::UnknownModel(_))
        ));
    }

    #[test]
    fn invalid_specs() {
        assert!(generate(&ModelSpec::new(Model::Linear, 3, 0)).is_err());
        assert!(generate(&ModelSpec::new(Model::Linear, 10, 0).with_lambda(1.5)).is_err());
        assert!(generate(&ModelSpec::new(Model::Lm, 10, 0).with_p(2)).is_err());
        assert!(generate(&ModelSpec::new(Model::Linear, 10, 0).with_p(2)).is_err());
    }
}
