//! Linear-quadratic arbitrage control of the log mispricing
//! `dZ = (μ − u) dt + σ dW` with running reward
//! `Z u − (λ/2) u² − (τ/2) Z²`.
//!
//! All value functions are quadratic, `V = ½ h2 z² + h1 z + h0`, and the
//! maximising feedback is `u* = (z − ∂_z V)/λ = ((1 − h2) z − h1)/λ`.

use crate::error::{invalid_param, Error, Result};
use crate::quadrature::{integrate, QuadOptions};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlParams {
    pub mu: f64,
    pub sigma: f64,
    pub lambda: f64,
    pub tau: f64,
    pub rho: f64,
    pub horizon: f64,
}

impl Default for ControlParams {
    fn default() -> Self {
        Self {
            mu: 0.0,
            sigma: 0.2,
            lambda: 0.1,
            tau: 0.4,
            rho: 0.1,
            horizon: 1.0,
        }
    }
}

impl ControlParams {
    pub fn validate(&self) -> Result<()> {
        let positive = |name, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(invalid_param(name, format!("{v} must be positive")))
            }
        };
        positive("lambda", self.lambda)?;
        positive("tau", self.tau)?;
        positive("horizon", self.horizon)?;
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return Err(invalid_param(
                "sigma",
                format!("{} must be nonnegative", self.sigma),
            ));
        }
        if !(self.rho >= 0.0 && self.rho.is_finite()) {
            return Err(invalid_param(
                "rho",
                format!("{} must be nonnegative", self.rho),
            ));
        }
        if !self.mu.is_finite() {
            return Err(invalid_param("mu", "must be finite"));
        }
        Ok(())
    }

    /// `√(λτ)`.
    pub fn root_lt(&self) -> f64 {
        (self.lambda * self.tau).sqrt()
    }

    /// `λτ = 1`: the terminal value `h2 = 0` is already the stationary point.
    pub fn is_singular(&self) -> bool {
        self.root_lt() == 1.0
    }

    /// Ergodic slope `1 − √(λτ)`.
    pub fn stationary_h2(&self) -> f64 {
        1.0 - self.root_lt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct QuadraticCoefficients {
    pub h2: f64,
    pub h1: f64,
    pub h0: f64,
}

impl QuadraticCoefficients {
    pub fn value(&self, z: f64) -> f64 {
        0.5 * self.h2 * z * z + self.h1 * z + self.h0
    }

    pub fn slope(&self, z: f64) -> f64 {
        self.h2 * z + self.h1
    }

    /// Mispricing at which the optimal control vanishes.
    pub fn neutral_mispricing(&self) -> f64 {
        self.h1 / (1.0 - self.h2)
    }
}

/// `u* = (z − ∂_z V)/λ`.
pub fn optimal_control(coef: &QuadraticCoefficients, lambda: f64, z: f64) -> f64 {
    (z - coef.slope(z)) / lambda
}

/// Finite-horizon value with `h(T) = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiniteHorizonValue {
    params: ControlParams,
    quad: QuadOptions,
}

pub fn solve_finite(params: &ControlParams) -> Result<FiniteHorizonValue> {
    params.validate()?;
    Ok(FiniteHorizonValue {
        params: *params,
        quad: QuadOptions {
            rel_tol: 1e-12,
            abs_tol: 1e-15,
            max_intervals: 2000,
        },
    })
}

impl FiniteHorizonValue {
    pub fn params(&self) -> &ControlParams {
        &self.params
    }

    /// `(c, φ, A)` with `c = √(λτ)`, `φ = √(τ/λ)`, `A = (1 − c)/(1 + c)`.
    fn constants(&self) -> (f64, f64, f64) {
        let c = self.params.root_lt();
        let phi = (self.params.tau / self.params.lambda).sqrt();
        (c, phi, (1.0 - c) / (1.0 + c))
    }

    fn remaining(&self, t: f64) -> Result<f64> {
        let s = self.params.horizon - t;
        if !(t.is_finite() && s >= 0.0) {
            return Err(Error::Domain(format!(
                "time {t} outside [.., {}]",
                self.params.horizon
            )));
        }
        Ok(s)
    }

    fn h2_at(&self, s: f64) -> f64 {
        if self.params.is_singular() {
            return 0.0;
        }
        let (c, phi, a) = self.constants();
        // 1 − c(1 + AE)/(1 − AE) = (1 − c)(1 − E)/(1 − AE), E = e^{−2φs}
        let decay = -2.0 * phi * s;
        (1.0 - c) * -decay.exp_m1() / (1.0 - a * decay.exp())
    }

    fn h1_at(&self, s: f64) -> f64 {
        if self.params.is_singular() || self.params.mu == 0.0 {
            return 0.0;
        }
        let (c, phi, a) = self.constants();
        let half = (-phi * s).exp();
        let bump = (1.0 - half) * (1.0 - half);
        self.params.mu * (1.0 - c) * bump / (phi * (1.0 - a * half * half))
    }

    /// `h2(t)`.
    pub fn h2(&self, t: f64) -> Result<f64> {
        Ok(self.h2_at(self.remaining(t)?))
    }

    pub fn h1(&self, t: f64) -> Result<f64> {
        Ok(self.h1_at(self.remaining(t)?))
    }

    /// `h0(t) = ∫_t^T (σ²/2) h2 + μ h1 + h1²/(2λ)`, by quadrature.
    pub fn h0(&self, t: f64) -> Result<f64> {
        let s = self.remaining(t)?;
        let p = self.params;
        if p.is_singular() {
            return Ok(0.0);
        }
        let var = 0.5 * p.sigma * p.sigma;
        let f = |r: f64| {
            let h1 = self.h1_at(r);
            var * self.h2_at(r) + p.mu * h1 + h1 * h1 / (2.0 * p.lambda)
        };
        Ok(integrate(f, 0.0, s, &[], self.quad)?.value)
    }

    /// `∫_t^T h2 = (1 − c)s − λ ln[(1 − A e^{−2φs}) / (1 − A)]`.
    pub fn h2_integral(&self, t: f64) -> Result<f64> {
        let s = self.remaining(t)?;
        if self.params.is_singular() {
            return Ok(0.0);
        }
        let (c, phi, a) = self.constants();
        let log_ratio = (-a * (-2.0 * phi * s).exp()).ln_1p() - (-a).ln_1p();
        Ok((1.0 - c) * s - self.params.lambda * log_ratio)
    }

    pub fn coefficients(&self, t: f64) -> Result<QuadraticCoefficients> {
        Ok(QuadraticCoefficients {
            h2: self.h2(t)?,
            h1: self.h1(t)?,
            h0: self.h0(t)?,
        })
    }

    /// Alternative tanh-type closed form
    /// `√(λτ)(1 + ξE)/(1 − ξE)`, `E = e^{2φ(T−t)}`, `ξ = (1 + √(λτ))/(1 − √(λτ))`.
    /// It differs from `h2` by exactly one and so misses `h2(T) = 0`.
    pub fn h2_reference(&self, t: f64) -> Result<f64> {
        let s = self.remaining(t)?;
        let (c, phi, _) = self.constants();
        let xi = (1.0 + c) / (1.0 - c);
        let e = xi * (2.0 * phi * s).exp();
        Ok(c * (1.0 + e) / (1.0 - e))
    }

    /// Samples on `n + 1` evenly spaced times in `[0, T]`.
    pub fn grid(&self, n: usize) -> Result<Vec<(f64, QuadraticCoefficients)>> {
        let n = n.max(1);
        let horizon = self.params.horizon;
        // h0 accumulated segment by segment from T backwards
        let mut out = vec![(0.0, QuadraticCoefficients::default()); n + 1];
        let p = self.params;
        let var = 0.5 * p.sigma * p.sigma;
        let f = |r: f64| {
            let h1 = self.h1_at(r);
            var * self.h2_at(r) + p.mu * h1 + h1 * h1 / (2.0 * p.lambda)
        };
        let mut h0 = 0.0;
        for k in (0..=n).rev() {
            let t = if k == n {
                horizon
            } else {
                horizon * k as f64 / n as f64
            };
            if k < n && !p.is_singular() {
                let s_hi = horizon - t;
                let s_lo = horizon - out[k + 1].0;
                h0 += integrate(f, s_lo, s_hi, &[], self.quad)?.value;
            }
            out[k] = (
                t,
                QuadraticCoefficients {
                    h2: self.h2(t)?,
                    h1: self.h1(t)?,
                    h0,
                },
            );
        }
        Ok(out)
    }
}

/// Classical RK4 integration of the coefficient ODEs backwards from
/// `h(T) = 0` with step `≤ max_step_fraction · T`. Returns samples in
/// increasing time.
pub fn riccati_oracle(
    params: &ControlParams,
    max_step_fraction: f64,
) -> Result<Vec<(f64, QuadraticCoefficients)>> {
    params.validate()?;
    if !(max_step_fraction > 0.0 && max_step_fraction <= 1.0) {
        return Err(invalid_param(
            "max_step_fraction",
            format!("{max_step_fraction} must lie in (0, 1]"),
        ));
    }
    let steps = (1.0 / max_step_fraction).ceil() as usize;
    let horizon = params.horizon;
    let ds = horizon / steps as f64;
    if !(ds > 0.0) || horizon - ds == horizon {
        return Err(Error::Numeric(format!(
            "step {ds} underflows at horizon {horizon}"
        )));
    }
    let p = *params;
    // d/ds of (h2, h1, h0) with s = T − t
    let rhs = |h: [f64; 3]| {
        let [h2, h1, _] = h;
        [
            (1.0 - h2).powi(2) / p.lambda - p.tau,
            p.mu * h2 - (1.0 - h2) * h1 / p.lambda,
            0.5 * p.sigma * p.sigma * h2 + p.mu * h1 + h1 * h1 / (2.0 * p.lambda),
        ]
    };
    let add =
        |h: [f64; 3], k: [f64; 3], w: f64| [h[0] + w * k[0], h[1] + w * k[1], h[2] + w * k[2]];
    let mut h = [0.0; 3];
    let mut out = Vec::with_capacity(steps + 1);
    out.push((horizon, QuadraticCoefficients::default()));
    for i in 1..=steps {
        let k1 = rhs(h);
        let k2 = rhs(add(h, k1, 0.5 * ds));
        let k3 = rhs(add(h, k2, 0.5 * ds));
        let k4 = rhs(add(h, k3, ds));
        for j in 0..3 {
            h[j] += ds / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        if h.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric(format!("RK4 diverged at step {i}")));
        }
        let t = if i == steps {
            0.0
        } else {
            horizon - i as f64 * ds
        };
        out.push((
            t,
            QuadraticCoefficients {
                h2: h[0],
                h1: h[1],
                h0: h[2],
            },
        ));
    }
    out.reverse();
    Ok(out)
}

/// Discounted (`ρ > 0`) solution with the admissible root, plus comparison
/// values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscountedValue {
    pub coefficients: QuadraticCoefficients,
    /// The other root of the `h2` quadratic; solves the algebra but gives a
    /// non-admissible feedback.
    pub h2_plus: f64,
    /// `−μ/(ρ+τ)[(1+ρλ)h2 − (1−τλ)]`.
    pub h1_reference: f64,
    /// Alternative closed form for `h0`, kept for comparison.
    pub h0_reference: f64,
}

pub fn solve_discounted(params: &ControlParams) -> Result<DiscountedValue> {
    params.validate()?;
    let ControlParams {
        mu,
        sigma,
        lambda,
        tau,
        rho,
        ..
    } = *params;
    if rho <= 0.0 {
        return Err(Error::Domain(
            "discounted problem needs rho > 0; use the ergodic solver".into(),
        ));
    }
    let centre = 1.0 + rho * lambda / 2.0;
    let disc = (rho * rho * lambda * lambda / 4.0 + rho * lambda + tau * lambda).sqrt();
    let h2 = centre - disc;
    let coefficients = discounted_coefficients(params, h2);
    let rt = rho + tau;
    let h1_reference = -mu / rt * ((1.0 + rho * lambda) * h2 - (1.0 - tau * lambda));
    let h0_reference = ((0.5 * sigma * sigma
        + rho * mu * mu / (rt * rt) * (1.0 + rho * lambda).powi(2) / 2.0)
        * h2
        + mu * mu / (rt * rt) * (1.0 - lambda * tau) * (tau / 2.0 - rho * rho * lambda / 2.0))
        / rho;
    Ok(DiscountedValue {
        coefficients,
        h2_plus: centre + disc,
        h1_reference,
        h0_reference,
    })
}

/// `h1`, `h0` from the linear and constant equations for a given root `h2`.
pub fn discounted_coefficients(params: &ControlParams, h2: f64) -> QuadraticCoefficients {
    let ControlParams {
        mu,
        sigma,
        lambda,
        rho,
        ..
    } = *params;
    let h1 = lambda * mu * h2 / (rho * lambda + 1.0 - h2);
    let h0 = (0.5 * sigma * sigma * h2 + mu * h1 + h1 * h1 / (2.0 * lambda)) / rho;
    QuadraticCoefficients { h2, h1, h0 }
}

/// Residual of `ρ h2 − (1 − h2)²/λ + τ = 0`.
pub fn discounted_quadratic_residual(params: &ControlParams, h2: f64) -> f64 {
    params.rho * h2 - (1.0 - h2).powi(2) / params.lambda + params.tau
}

/// Long-run average solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErgodicValue {
    /// Relative value function (`h0 = 0`).
    pub coefficients: QuadraticCoefficients,
    /// `(σ²/2) h2 + μ h1 + h1²/(2λ)`.
    pub eta_hjb: f64,
    /// `σ²/2 + (μ²/2)(1/τ − λ)`, the commonly quoted constant.
    pub eta_reference: f64,
}

pub fn solve_ergodic(params: &ControlParams) -> Result<ErgodicValue> {
    params.validate()?;
    let ControlParams {
        mu,
        sigma,
        lambda,
        tau,
        ..
    } = *params;
    let h2 = params.stationary_h2();
    let h1 = mu * ((lambda / tau).sqrt() - lambda);
    let eta_hjb = 0.5 * sigma * sigma * h2 + mu * h1 + h1 * h1 / (2.0 * lambda);
    Ok(ErgodicValue {
        coefficients: QuadraticCoefficients { h2, h1, h0: 0.0 },
        eta_hjb,
        eta_reference: 0.5 * sigma * sigma + 0.5 * mu * mu * (1.0 / tau - lambda),
    })
}

/// Hamiltonian `sup_u [(μ − u)V_z + z u − (λ/2)u²] + (σ²/2)V_zz − (τ/2)z²`.
fn hamiltonian(params: &ControlParams, coef: &QuadraticCoefficients, z: f64) -> f64 {
    let vz = coef.slope(z);
    let u = (z - vz) / params.lambda;
    (params.mu - u) * vz + z * u - 0.5 * params.lambda * u * u
        + 0.5 * params.sigma.powi(2) * coef.h2
        - 0.5 * params.tau * z * z
}

/// `max_z |ρV − H|` for a stationary discounted value.
pub fn hjb_residual_discounted(
    params: &ControlParams,
    coef: &QuadraticCoefficients,
    z_grid: &[f64],
) -> f64 {
    z_grid
        .iter()
        .map(|&z| (params.rho * coef.value(z) - hamiltonian(params, coef, z)).abs())
        .fold(0.0, f64::max)
}

/// `max_z |η − H|` for an ergodic pair.
pub fn hjb_residual_ergodic(params: &ControlParams, value: &ErgodicValue, z_grid: &[f64]) -> f64 {
    z_grid
        .iter()
        .map(|&z| (value.eta_hjb - hamiltonian(params, &value.coefficients, z)).abs())
        .fold(0.0, f64::max)
}

/// `max |∂_t V + H|` over interior samples of a time grid, with `∂_t V`
/// from central differences between neighbouring samples.
pub fn hjb_residual_finite(
    params: &ControlParams,
    samples: &[(f64, QuadraticCoefficients)],
    z_grid: &[f64],
) -> f64 {
    let mut worst: f64 = 0.0;
    for w in samples.windows(3) {
        let ((t0, a), (_, mid), (t2, b)) = (w[0], w[1], w[2]);
        let span = t2 - t0;
        for &z in z_grid {
            let vt = (b.value(z) - a.value(z)) / span;
            worst = worst.max((vt + hamiltonian(params, &mid, z)).abs());
        }
    }
    worst
}

/// Evenly spaced grid on `[lo, hi]` with spacing close to `step`.
pub fn uniform_grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step).round().max(1.0) as usize;
    (0..=n)
        .map(|i| lo + (hi - lo) * i as f64 / n as f64)
        .collect()
}

/// `ρ V_ρ(0)` along a decreasing sequence of discount rates.
#[derive(Debug, Clone, PartialEq)]
pub struct RhoLimit {
    pub rows: Vec<(f64, f64)>,
    /// Linear extrapolation to `ρ = 0` from the last two rows.
    pub extrapolated: f64,
    pub eta_hjb: f64,
    pub eta_reference: f64,
}

impl RhoLimit {
    pub fn final_gap(&self) -> f64 {
        self.rows
            .last()
            .map_or(f64::NAN, |r| (r.1 - self.eta_hjb).abs())
    }

    /// Distances to `η_HJB` shrink at every row.
    pub fn converges_monotonically(&self) -> bool {
        self.rows
            .windows(2)
            .all(|w| (w[1].1 - self.eta_hjb).abs() < (w[0].1 - self.eta_hjb).abs())
    }
}

fn richardson(rows: &[(f64, f64)]) -> f64 {
    match rows {
        [] => f64::NAN,
        [only] => only.1,
        [.., (r1, f1), (r2, f2)] => (r1 * f2 - r2 * f1) / (r1 - r2),
    }
}

pub fn rho_limit_check(params: &ControlParams, rhos: &[f64]) -> Result<RhoLimit> {
    if rhos.is_empty() {
        return Err(invalid_param("rho", "need at least one discount rate"));
    }
    if rhos.windows(2).any(|w| w[1] >= w[0]) {
        return Err(invalid_param("rho", "rates must be strictly decreasing"));
    }
    let erg = solve_ergodic(params)?;
    let rows = rhos
        .iter()
        .map(|&rho| {
            let v = solve_discounted(&ControlParams { rho, ..*params })?;
            Ok((rho, rho * v.coefficients.value(0.0)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RhoLimit {
        extrapolated: richardson(&rows),
        rows,
        eta_hjb: erg.eta_hjb,
        eta_reference: erg.eta_reference,
    })
}

/// Extrapolated `lim_{ρ→0} h2(ρ)` of the discounted solution.
pub fn discounted_h2_limit(params: &ControlParams, rhos: &[f64]) -> Result<f64> {
    let rows = rhos
        .iter()
        .map(|&rho| {
            Ok((
                rho,
                solve_discounted(&ControlParams { rho, ..*params })?
                    .coefficients
                    .h2,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(richardson(&rows))
}
