//! Monte Carlo of the controlled mispricing `dZ = (μ − u) dt + σ dW`.

use std::sync::Arc;

use rayon::prelude::*;

use crate::arb::control::{ControlParams, QuadraticCoefficients};
use crate::error::{invalid_param, Result};
use crate::market::{mean_estimate, MeanEstimate};
use crate::rng;

/// Control rate as a function of `(t, z)`.
#[derive(Clone)]
pub enum FeedbackLaw {
    /// `u = slope · z − offset`.
    Affine {
        slope: f64,
        offset: f64,
    },
    General(Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>),
}

impl std::fmt::Debug for FeedbackLaw {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Affine { slope, offset } => f
                .debug_struct("Affine")
                .field("slope", slope)
                .field("offset", offset)
                .finish(),
            Self::General(_) => f.write_str("General(..)"),
        }
    }
}

impl FeedbackLaw {
    /// Optimal feedback for a stationary quadratic value.
    pub fn from_coefficients(coef: &QuadraticCoefficients, lambda: f64) -> Self {
        Self::Affine {
            slope: (1.0 - coef.h2) / lambda,
            offset: coef.h1 / lambda,
        }
    }

    pub fn constant(rate: f64) -> Self {
        Self::Affine {
            slope: 0.0,
            offset: -rate,
        }
    }

    pub fn rate(&self, t: f64, z: f64) -> f64 {
        match self {
            Self::Affine { slope, offset } => slope * z - offset,
            Self::General(f) => f(t, z),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    EulerMaruyama,
    /// Exact Gaussian transition; requires an affine law.
    ExactAffine,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlSimConfig {
    pub dt: f64,
    pub horizon: f64,
    pub paths: usize,
    pub seed: u64,
    pub z0: f64,
    pub scheme: Scheme,
    /// Keep every `record_stride`-th state; `0` keeps none.
    pub record_stride: usize,
}

impl Default for ControlSimConfig {
    fn default() -> Self {
        Self {
            dt: 0.01,
            horizon: 2000.0,
            paths: 64,
            seed: 7,
            z0: 0.0,
            scheme: Scheme::ExactAffine,
            record_stride: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ControlledPath {
    /// `(1/T) Σ r_n dt`.
    pub average_reward: f64,
    /// `Σ e^{−ρ t_n} r_n dt`.
    pub discounted_reward: f64,
    /// `(1/N) Σ Z_n²`.
    pub mean_square: f64,
    pub recorded: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ControlledRun {
    pub paths: Vec<ControlledPath>,
}

impl ControlledRun {
    pub fn average_reward(&self) -> MeanEstimate {
        mean_estimate(
            &self
                .paths
                .iter()
                .map(|p| p.average_reward)
                .collect::<Vec<_>>(),
        )
    }

    pub fn discounted_reward(&self) -> MeanEstimate {
        mean_estimate(
            &self
                .paths
                .iter()
                .map(|p| p.discounted_reward)
                .collect::<Vec<_>>(),
        )
    }

    /// Time-averaged `Z²`, i.e. the stationary variance when `E Z = 0`.
    pub fn mean_square(&self) -> MeanEstimate {
        mean_estimate(&self.paths.iter().map(|p| p.mean_square).collect::<Vec<_>>())
    }
}

/// Running reward `z u − (λ/2) u² − (τ/2) z²`.
pub fn running_reward(params: &ControlParams, z: f64, u: f64) -> f64 {
    z * u - 0.5 * params.lambda * u * u - 0.5 * params.tau * z * z
}

pub fn simulate_controlled(
    params: &ControlParams,
    law: &FeedbackLaw,
    config: &ControlSimConfig,
) -> Result<ControlledRun> {
    params.validate()?;
    if !(config.dt > 0.0 && config.horizon >= config.dt) {
        return Err(invalid_param(
            "dt",
            format!(
                "need 0 < dt <= horizon, got dt = {}, horizon = {}",
                config.dt, config.horizon
            ),
        ));
    }
    if config.paths == 0 {
        return Err(invalid_param("paths", "at least one path is required"));
    }
    if config.scheme == Scheme::ExactAffine && !matches!(law, FeedbackLaw::Affine { .. }) {
        return Err(invalid_param(
            "scheme",
            "exact sampling needs an affine feedback law",
        ));
    }
    let steps = (config.horizon / config.dt).round() as usize;
    let paths = (0..config.paths)
        .into_par_iter()
        .map(|i| run_path(params, law, config, steps, i as u64))
        .collect();
    Ok(ControlledRun { paths })
}

fn run_path(
    params: &ControlParams,
    law: &FeedbackLaw,
    config: &ControlSimConfig,
    steps: usize,
    index: u64,
) -> ControlledPath {
    let dt = config.dt;
    let normals = rng::standard_normals(config.seed, index, steps);
    // exact transition Z' = m + (Z − m)e^{−θdt} + σ√((1 − e^{−2θdt})/(2θ)) ξ
    let exact = match (config.scheme, law) {
        (Scheme::ExactAffine, FeedbackLaw::Affine { slope, offset }) => Some({
            let theta = *slope;
            let drift = params.mu + offset;
            if theta.abs() < 1e-300 {
                (1.0, drift * dt, params.sigma * dt.sqrt())
            } else {
                let decay = (-theta * dt).exp();
                let var = -(-2.0 * theta * dt).exp_m1() / (2.0 * theta);
                (
                    decay,
                    drift / theta * (1.0 - decay),
                    params.sigma * var.sqrt(),
                )
            }
        }),
        _ => None,
    };
    let vol = params.sigma * dt.sqrt();
    let mut z = config.z0;
    let (mut total, mut discounted, mut square) = (0.0, 0.0, 0.0);
    let mut recorded = Vec::new();
    for (n, xi) in normals.iter().enumerate() {
        let t = n as f64 * dt;
        if config.record_stride > 0 && n % config.record_stride == 0 {
            recorded.push((t, z));
        }
        let u = law.rate(t, z);
        let r = running_reward(params, z, u);
        total += r * dt;
        discounted += (-params.rho * t).exp() * r * dt;
        square += z * z;
        z = match exact {
            Some((decay, shift, v)) => z * decay + shift + v * xi,
            None => z + (params.mu - u) * dt + vol * xi,
        };
    }
    if config.record_stride > 0 && steps.is_multiple_of(config.record_stride) {
        recorded.push((steps as f64 * dt, z));
    }
    ControlledPath {
        average_reward: total / (steps as f64 * dt),
        discounted_reward: discounted,
        mean_square: square / steps as f64,
        recorded,
    }
}
