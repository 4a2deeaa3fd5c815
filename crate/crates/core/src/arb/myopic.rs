//! Inventory, fee and profit flows of a myopic arbitrageur who trades the
//! pool back to the edge of the no-arbitrage band whenever it is crossed.
//!
//! Per-step quantities are exact reserve differences between consecutive
//! pool prices; the infinitesimal forms `dx = ½ℓP^{-1/2}(dG − dD)`,
//! `dy = ½ℓP^{1/2}(dD − dG)` are their integrands.

use crate::arb::reflection::ReflectedPath;
use crate::cfmm::check_gamma;
use crate::error::{Error, Result};
use crate::liquidity::LiquidityProfile;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MyopicStep {
    /// Pool reserve changes.
    pub dx: f64,
    pub dy: f64,
    pub fee_x: f64,
    pub fee_y: f64,
    /// Arbitrage profit valued at the external price.
    pub profit: f64,
    /// `½ℓ(P)√P[(γ − e^Ẑ)dG + (e^Ẑ − γ^{-1})dD]` at the pre-step price.
    pub profit_formula: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MyopicLedger {
    /// `steps[n]` covers the move from `n` to `n + 1`.
    pub steps: Vec<MyopicStep>,
}

impl MyopicLedger {
    fn cumulative(&self, f: impl Fn(&MyopicStep) -> f64) -> Vec<f64> {
        let mut acc = 0.0;
        std::iter::once(0.0)
            .chain(self.steps.iter().map(|s| {
                acc += f(s);
                acc
            }))
            .collect()
    }

    pub fn cumulative_profit(&self) -> Vec<f64> {
        self.cumulative(|s| s.profit)
    }

    pub fn cumulative_profit_formula(&self) -> Vec<f64> {
        self.cumulative(|s| s.profit_formula)
    }

    pub fn cumulative_fees(&self) -> (Vec<f64>, Vec<f64>) {
        (self.cumulative(|s| s.fee_x), self.cumulative(|s| s.fee_y))
    }

    pub fn total_profit(&self) -> f64 {
        self.steps.iter().map(|s| s.profit).sum()
    }
}

/// Runs the arbitrage flows along a reflected path.
pub fn myopic_ledger(
    path: &ReflectedPath,
    profile: &LiquidityProfile,
    gamma: f64,
) -> Result<MyopicLedger> {
    check_gamma(gamma)?;
    let prices = path.pool_prices();
    let fee_rate = (1.0 - gamma) / gamma;
    let Some(&p0) = prices.first() else {
        return Ok(MyopicLedger { steps: Vec::new() });
    };
    if profile.value(p0)? <= 0.0 {
        return Err(Error::InsufficientLiquidity {
            lower: p0,
            upper: p0,
        });
    }
    let mut reserves = profile.reserves(p0)?;
    let mut steps = Vec::with_capacity(prices.len().saturating_sub(1));
    for n in 1..prices.len() {
        let (p_prev, p) = (prices[n - 1], prices[n]);
        let (dg, dd) = (path.dg(n), path.dd(n));
        if dg == 0.0 && dd == 0.0 {
            steps.push(MyopicStep::default());
            continue;
        }
        profile.check_positive_between(p_prev, p)?;
        let next = profile.reserves(p)?;
        let (dx, dy) = (next.0 - reserves.0, next.1 - reserves.1);
        reserves = next;
        let s = path.log_s[n].exp();
        let e_pre = path.z_pre[n].exp();
        let density = 0.5 * profile.value(p_prev)? * p_prev.sqrt();
        let mut step = MyopicStep {
            dx,
            dy,
            profit_formula: density * ((gamma - e_pre) * dg + (e_pre - 1.0 / gamma) * dd),
            ..Default::default()
        };
        if dd > 0.0 {
            // arbitrageur pays y (gross of fee) for x
            step.fee_y = fee_rate * dy;
            step.profit = -s * dx - dy / gamma;
        } else {
            step.fee_x = fee_rate * dx;
            step.profit = -dy - s * dx / gamma;
        }
        steps.push(step);
    }
    Ok(MyopicLedger { steps })
}

/// Per-step `(Δx, Δy, ΔF^x, ΔF^y)`.
pub fn myopic_inventory_and_fees(
    path: &ReflectedPath,
    profile: &LiquidityProfile,
    gamma: f64,
) -> Result<Vec<(f64, f64, f64, f64)>> {
    Ok(myopic_ledger(path, profile, gamma)?
        .steps
        .iter()
        .map(|s| (s.dx, s.dy, s.fee_x, s.fee_y))
        .collect())
}

/// Per-step arbitrage profit.
pub fn myopic_pnl(
    path: &ReflectedPath,
    profile: &LiquidityProfile,
    gamma: f64,
) -> Result<Vec<f64>> {
    Ok(myopic_ledger(path, profile, gamma)?
        .steps
        .iter()
        .map(|s| s.profit)
        .collect())
}

/// Total arbitrage profit on a fine log-price path and on the same path
/// sampled every `factor` steps.
pub fn refinement_pair(
    fine_log_s: &[f64],
    factor: usize,
    profile: &LiquidityProfile,
    gamma: f64,
    p0: f64,
) -> Result<(f64, f64)> {
    use crate::arb::reflection::skorokhod_reflect;
    let coarse: Vec<f64> = fine_log_s.iter().copied().step_by(factor.max(1)).collect();
    let total = |log_s: &[f64]| -> Result<f64> {
        let path = skorokhod_reflect(log_s, gamma, p0)?;
        Ok(myopic_ledger(&path, profile, gamma)?.total_profit())
    };
    Ok((total(&coarse)?, total(fine_log_s)?))
}
