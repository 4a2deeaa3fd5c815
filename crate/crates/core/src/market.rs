//! Exogenous price paths and LP wealth accounting.
//!
//! Ledgers compare three portfolios started from the same wealth: holding the
//! initial reserves (`H`), the LP position itself (`V`), and a self-financing
//! portfolio rebalanced to the pool's risk-asset holding at every step (`R`).
//! `IL = H − V` and `LVR = R − V`; `H − R` is the hedgeable martingale part.

use std::sync::Arc;

use rayon::prelude::*;

use crate::cfmm::G3mCurve;
use crate::clmm::ClmmPool;
use crate::error::{invalid_param, Error, Result};
use crate::liquidity::LiquidityProfile;
use crate::rng;

/// GBM path settings; `mu` and `sigma` refer to `ln S`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathConfig {
    pub mu: f64,
    pub sigma: f64,
    pub dt: f64,
    pub horizon: f64,
    pub seed: u64,
    pub paths: usize,
    pub initial_price: f64,
}

impl Default for PathConfig {
    fn default() -> Self {
        Self {
            mu: 0.0,
            sigma: 0.2,
            dt: 1.0 / 365.0,
            horizon: 1.0,
            seed: 42,
            paths: 1000,
            initial_price: 1.0,
        }
    }
}

impl PathConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(invalid_param("dt", format!("{} must be positive", self.dt)));
        }
        if !(self.horizon >= self.dt && self.horizon.is_finite()) {
            return Err(invalid_param(
                "horizon",
                format!("{} must be at least dt = {}", self.horizon, self.dt),
            ));
        }
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return Err(invalid_param(
                "sigma",
                format!("{} must be nonnegative", self.sigma),
            ));
        }
        if !self.mu.is_finite() {
            return Err(invalid_param("mu", "must be finite"));
        }
        if self.paths == 0 {
            return Err(invalid_param("paths", "at least one path is required"));
        }
        if !(self.initial_price > 0.0 && self.initial_price.is_finite()) {
            return Err(invalid_param(
                "initial_price",
                format!("{} must be positive", self.initial_price),
            ));
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        ((self.horizon / self.dt).round() as usize).max(1)
    }

    /// Drift of `ln S` that makes `S` a martingale.
    pub fn martingale_drift(sigma: f64) -> f64 {
        -0.5 * sigma * sigma
    }
}

/// Log-price path from standard normal shocks:
/// `ln S_n = ln S_0 + μ n dt + σ √dt Σ_{k<n} ξ_k`.
pub fn log_path_from_normals(
    log_s0: f64,
    mu: f64,
    sigma: f64,
    dt: f64,
    normals: &[f64],
) -> Vec<f64> {
    let vol = sigma * dt.sqrt();
    let mut out = Vec::with_capacity(normals.len() + 1);
    out.push(log_s0);
    let mut noise = 0.0;
    for (n, xi) in normals.iter().enumerate() {
        noise += xi;
        out.push(log_s0 + mu * ((n + 1) as f64 * dt) + vol * noise);
    }
    out
}

/// One log-price path, keyed by `(config.seed, index)`.
pub fn simulate_gbm_path(config: &PathConfig, index: usize) -> Vec<f64> {
    let normals = rng::standard_normals(config.seed, index as u64, config.steps());
    log_path_from_normals(
        config.initial_price.ln(),
        config.mu,
        config.sigma,
        config.dt,
        &normals,
    )
}

/// All log-price paths, in path-index order.
pub fn simulate_gbm(config: &PathConfig) -> Result<Vec<Vec<f64>>> {
    config.validate()?;
    Ok((0..config.paths)
        .into_par_iter()
        .map(|i| simulate_gbm_path(config, i))
        .collect())
}

/// Anything that maps a pool price to reserves.
pub trait ReserveCurve: Sync {
    fn reserves_at(&self, price: f64) -> Result<(f64, f64)>;

    /// `−½ x'(P)`: LVR accrued per unit of quadratic variation of `P`.
    fn lvr_density(&self, price: f64) -> Result<f64>;

    /// Fails if the curve cannot trade along `[a, b]`.
    fn check_segment(&self, _a: f64, _b: f64) -> Result<()> {
        Ok(())
    }
}

impl ReserveCurve for LiquidityProfile {
    fn reserves_at(&self, price: f64) -> Result<(f64, f64)> {
        self.reserves(price)
    }

    /// `¼ ℓ(P) P^{-3/2}`.
    fn lvr_density(&self, price: f64) -> Result<f64> {
        Ok(0.25 * self.value(price)? * price.powf(-1.5))
    }

    fn check_segment(&self, a: f64, b: f64) -> Result<()> {
        if self.value(a)? <= 0.0 {
            return Err(Error::InsufficientLiquidity { lower: a, upper: a });
        }
        self.check_positive_between(a, b)
    }
}

impl ReserveCurve for G3mCurve {
    fn reserves_at(&self, price: f64) -> Result<(f64, f64)> {
        self.reserves_from_price(price)
    }

    /// `½ w^{1−w} (1−w)^w ℓ P^{w−2}`.
    fn lvr_density(&self, price: f64) -> Result<f64> {
        crate::liquidity::check_price(price)?;
        let w = self.weight();
        Ok(0.5 * w.powf(1.0 - w) * (1.0 - w).powf(w) * self.liquidity() * price.powf(w - 2.0))
    }
}

/// `LVR_{n+1} = LVR_n + ρ(P_n) (ΔP_n)²` with `ρ` the curve's LVR density.
pub fn accumulate_lvr<C: ReserveCurve + ?Sized>(curve: &C, prices: &[f64]) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(prices.len());
    let mut acc = 0.0;
    out.push(acc);
    for w in prices.windows(2) {
        curve.check_segment(w[0], w[1])?;
        let dp = w[1] - w[0];
        acc += curve.lvr_density(w[0])? * dp * dp;
        out.push(acc);
    }
    Ok(out)
}

/// One time step of a wealth ledger.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LedgerRow {
    pub t: f64,
    /// Exogenous price.
    pub s: f64,
    /// Pool price.
    pub p: f64,
    pub x: f64,
    pub y: f64,
    pub hold: f64,
    pub value: f64,
    pub rebalance: Option<f64>,
    pub il: f64,
    pub lvr: Option<f64>,
    pub fees_x: f64,
    pub fees_y: f64,
    /// Cumulative upward regulator (pool price pushed down).
    pub g: f64,
    /// Cumulative downward regulator (pool price pushed up).
    pub d: f64,
}

impl LedgerRow {
    /// `H − R`, the martingale part of the impermanent loss.
    pub fn martingale_part(&self) -> Option<f64> {
        self.rebalance.map(|r| self.hold - r)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SimLedger {
    pub rows: Vec<LedgerRow>,
}

impl SimLedger {
    pub const COLUMNS: [&'static str; 14] = [
        "t", "S", "P", "x", "y", "H", "V", "R", "IL", "LVR", "Fx", "Fy", "G", "D",
    ];

    pub fn last(&self) -> Option<&LedgerRow> {
        self.rows.last()
    }

    /// Largest violation of `IL = H − V` and `LVR = R − V` over all rows.
    pub fn identity_error(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| {
                let il = (r.il - (r.hold - r.value)).abs();
                let lvr = match (r.lvr, r.rebalance) {
                    (Some(l), Some(rb)) => (l - (rb - r.value)).abs(),
                    _ => 0.0,
                };
                il.max(lvr)
            })
            .fold(0.0, f64::max)
    }
}

/// Ledger for a passive LP on a price path (`S = P`, no fees).
///
/// With `rebalance = false` the `R` and `LVR` columns are omitted.
pub fn ledger_for_path<C: ReserveCurve + ?Sized>(
    curve: &C,
    dt: f64,
    prices: &[f64],
    rebalance: bool,
) -> Result<SimLedger> {
    let Some(&p0) = prices.first() else {
        return Ok(SimLedger::default());
    };
    let (x0, y0) = curve.reserves_at(p0)?;
    let mut rows = Vec::with_capacity(prices.len());
    let mut r_val = p0 * x0 + y0;
    let mut prev: Option<(f64, f64)> = None;
    for (n, &p) in prices.iter().enumerate() {
        if let Some((p_prev, x_prev)) = prev {
            curve.check_segment(p_prev, p)?;
            r_val += x_prev * (p - p_prev);
        }
        let (x, y) = curve.reserves_at(p)?;
        let value = p * x + y;
        let hold = x0 * p + y0;
        rows.push(LedgerRow {
            t: n as f64 * dt,
            s: p,
            p,
            x,
            y,
            hold,
            value,
            rebalance: rebalance.then_some(r_val),
            il: hold - value,
            lvr: rebalance.then_some(r_val - value),
            fees_x: 0.0,
            fees_y: 0.0,
            g: 0.0,
            d: 0.0,
        });
        prev = Some((p, x));
    }
    Ok(SimLedger { rows })
}

/// Piecewise-constant-in-time liquidity schedule: each profile takes effect
/// at its start time.
#[derive(Debug, Clone)]
pub struct ProfileSchedule {
    entries: Vec<(f64, Arc<LiquidityProfile>)>,
}

impl ProfileSchedule {
    pub fn new(mut entries: Vec<(f64, Arc<LiquidityProfile>)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(invalid_param("schedule", "needs at least one profile"));
        }
        entries.sort_by(|a, b| a.0.total_cmp(&b.0));
        if entries.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(invalid_param("schedule", "start times must be distinct"));
        }
        Ok(Self { entries })
    }

    pub fn at(&self, t: f64) -> &LiquidityProfile {
        let idx = self.entries.partition_point(|(s, _)| *s <= t);
        &self.entries[idx.saturating_sub(1)].1
    }
}

/// Ledger under a deterministic liquidity schedule, plus the cumulative
/// value of LP deposits (positive) and withdrawals (negative) made when the
/// profile changes.
///
/// Profile changes are applied before the price move of the same step. The
/// rebalancing portfolio receives the same deposits so that `R − V` keeps
/// measuring the price-driven loss; `H` and `IL` are left unadjusted.
#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleLedger {
    pub ledger: SimLedger,
    pub adjustments: Vec<f64>,
}

pub fn ledger_for_schedule(
    schedule: &ProfileSchedule,
    dt: f64,
    prices: &[f64],
) -> Result<ScheduleLedger> {
    let Some(&p0) = prices.first() else {
        return Ok(ScheduleLedger {
            ledger: SimLedger::default(),
            adjustments: Vec::new(),
        });
    };
    let (x0, y0) = schedule.at(0.0).reserves(p0)?;
    let mut rows = Vec::with_capacity(prices.len());
    let mut adjustments = Vec::with_capacity(prices.len());
    let mut r_val = p0 * x0 + y0;
    let mut adj_total = 0.0;
    let mut prev: Option<(f64, f64)> = None;
    for (n, &p) in prices.iter().enumerate() {
        let t = n as f64 * dt;
        let profile = schedule.at(t);
        if let Some((p_prev, x_prev_new)) = prev {
            profile.check_segment(p_prev, p)?;
            r_val += x_prev_new * (p - p_prev);
        }
        let (x, y) = profile.reserves(p)?;
        // deposit needed if the next step runs on a different profile
        let next_profile = schedule.at(t + dt);
        let (xn, yn) = next_profile.reserves(p)?;
        let adj = p * (xn - x) + (yn - y);
        let value = p * x + y;
        let hold = x0 * p + y0;
        rows.push(LedgerRow {
            t,
            s: p,
            p,
            x,
            y,
            hold,
            value,
            rebalance: Some(r_val),
            il: hold - value,
            lvr: Some(r_val - value),
            fees_x: 0.0,
            fees_y: 0.0,
            g: 0.0,
            d: 0.0,
        });
        adjustments.push(adj_total);
        adj_total += adj;
        r_val += adj;
        prev = Some((p, xn));
    }
    Ok(ScheduleLedger {
        ledger: SimLedger { rows },
        adjustments,
    })
}

/// One Euler step of the order-flow dynamics
/// `dP = −2 P^{3/2} / ℓ(P) · (u_a − u_b) dt`, with gross fees
/// `dF^x = ((1−γ)/γ) u_a dt`, `dF^y = ((1−γ)/γ) P u_b dt`.
pub fn order_flow_step(pool: &ClmmPool, u_a: f64, u_b: f64, dt: f64) -> Result<ClmmPool> {
    if !(u_a >= 0.0 && u_b >= 0.0) {
        return Err(invalid_param(
            "rates",
            format!("({u_a}, {u_b}) must be nonnegative"),
        ));
    }
    if !(dt > 0.0) {
        return Err(invalid_param("dt", format!("{dt} must be positive")));
    }
    let p = pool.price;
    let l = pool.liquidity()?;
    if l <= 0.0 {
        return Err(Error::InsufficientLiquidity { lower: p, upper: p });
    }
    let dp = -2.0 * p.powf(1.5) / l * (u_a - u_b) * dt;
    let next_price = p + dp;
    if !(next_price > 0.0) {
        return Err(Error::Domain(format!(
            "order flow step drives the price to {next_price}; reduce dt"
        )));
    }
    pool.profile.check_positive_between(p, next_price)?;
    let rate = (1.0 - pool.gamma) / pool.gamma;
    let mut next = pool.clone();
    next.price = next_price;
    next.fees_x += rate * u_a * dt;
    next.fees_y += rate * p * u_b * dt;
    Ok(next)
}

/// Sample mean and its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanEstimate {
    pub mean: f64,
    pub std_err: f64,
    pub samples: usize,
}

pub fn mean_estimate(values: &[f64]) -> MeanEstimate {
    let n = values.len();
    if n == 0 {
        return MeanEstimate {
            mean: f64::NAN,
            std_err: f64::NAN,
            samples: 0,
        };
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let var = if n > 1 {
        values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64
    } else {
        0.0
    };
    MeanEstimate {
        mean,
        std_err: (var / n as f64).sqrt(),
        samples: n,
    }
}

/// Terminal ledger rows of a Monte Carlo run over GBM paths.
pub fn terminal_rows<C: ReserveCurve + ?Sized>(
    curve: &C,
    config: &PathConfig,
) -> Result<Vec<LedgerRow>> {
    config.validate()?;
    (0..config.paths)
        .into_par_iter()
        .map(|i| {
            let prices: Vec<f64> = simulate_gbm_path(config, i)
                .into_iter()
                .map(f64::exp)
                .collect();
            let ledger = ledger_for_path(curve, config.dt, &prices, true)?;
            Ok(*ledger.last().expect("paths have at least one step"))
        })
        .collect()
}
