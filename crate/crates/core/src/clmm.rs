//! Concentrated-liquidity positions and pools.

use std::sync::Arc;

use crate::cfmm::{check_gamma, Asset};
use crate::error::{invalid_param, Error, Result};
use crate::liquidity::{check_price, LiquidityProfile};

/// One LP range: `liquidity` on `[lower, upper)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Position {
    pub liquidity: f64,
    pub lower: f64,
    pub upper: f64,
}

impl Position {
    pub fn new(liquidity: f64, lower: f64, upper: f64) -> Result<Self> {
        let pos = Self {
            liquidity,
            lower,
            upper,
        };
        pos.validate()
            .map_err(|reason| Error::InvalidPosition { index: 0, reason })?;
        Ok(pos)
    }

    /// Position centred at `center` with `lower = center / r`, `upper = center · r`.
    pub fn centered(liquidity: f64, center: f64, r: f64) -> Result<Self> {
        Self::new(liquidity, center / r, center * r)
    }

    pub(crate) fn validate(&self) -> std::result::Result<(), String> {
        if !(self.liquidity >= 0.0 && self.liquidity.is_finite()) {
            return Err(format!(
                "liquidity must be nonnegative, got {}",
                self.liquidity
            ));
        }
        if !(self.lower > 0.0 && self.upper > self.lower && self.upper.is_finite()) {
            return Err(format!(
                "range must satisfy 0 < lower < upper < ∞, got [{}, {}]",
                self.lower, self.upper
            ));
        }
        Ok(())
    }

    /// Geometric centre `p_m = √(p_l p_u)`.
    pub fn center(&self) -> f64 {
        (self.lower * self.upper).sqrt()
    }

    /// Half-width ratio `r = p_u / p_m = √(p_u / p_l)`.
    pub fn width_ratio(&self) -> f64 {
        (self.upper / self.lower).sqrt()
    }

    /// Reserves
    /// `x = ℓ[(P^{-1/2} − p_u^{-1/2})⁺ − (P^{-1/2} − p_l^{-1/2})⁺]`,
    /// `y = ℓ[(√P − √p_l)⁺ − (√P − √p_u)⁺]`.
    pub fn reserves(&self, price: f64) -> Result<(f64, f64)> {
        check_price(price)?;
        let l = self.liquidity;
        let s = 1.0 / price.sqrt();
        let t = price.sqrt();
        let x =
            l * ((s - 1.0 / self.upper.sqrt()).max(0.0) - (s - 1.0 / self.lower.sqrt()).max(0.0));
        let y = l * ((t - self.lower.sqrt()).max(0.0) - (t - self.upper.sqrt()).max(0.0));
        Ok((x, y))
    }

    /// Position value from the three-branch formula.
    pub fn value(&self, price: f64) -> Result<f64> {
        check_price(price)?;
        let (l, pl, pu) = (self.liquidity, self.lower, self.upper);
        Ok(if price < pl {
            l * price * (1.0 / pl.sqrt() - 1.0 / pu.sqrt())
        } else if price <= pu {
            l * (2.0 * price.sqrt() - price / pu.sqrt() - pl.sqrt())
        } else {
            l * (pu.sqrt() - pl.sqrt())
        })
    }

    /// Value as a function of `k = P / p_m`.
    pub fn value_at_ratio(&self, k: f64) -> f64 {
        let r = self.width_ratio();
        let scale = self.liquidity * self.center().sqrt();
        if k < 1.0 / r {
            scale * (r.sqrt() - 1.0 / r.sqrt()) * k
        } else if k <= r {
            scale * (2.0 * k.sqrt() - k / r.sqrt() - 1.0 / r.sqrt())
        } else {
            scale * (r.sqrt() - 1.0 / r.sqrt())
        }
    }

    /// Number of covered calls (strike 1 in the `k` domain) that dominate the
    /// position: `ℓ √p_m (√r − 1/√r)`.
    pub fn covered_call_count(&self) -> f64 {
        let r = self.width_ratio();
        self.liquidity * self.center().sqrt() * (r.sqrt() - 1.0 / r.sqrt())
    }
}

/// `(V(k), ℓ√p_m(√r − 1/√r)(k − (k−1)⁺))`; the first never exceeds the second.
pub fn covered_call_bound(pos: &Position, k: f64) -> Result<(f64, f64)> {
    if !(k >= 0.0 && k.is_finite()) {
        return Err(invalid_param("k", format!("{k} must be nonnegative")));
    }
    let bound = pos.covered_call_count() * (k - (k - 1.0).max(0.0));
    Ok((pos.value_at_ratio(k), bound))
}

/// A pool whose reserves are generated by a liquidity profile.
#[derive(Debug, Clone)]
pub struct ClmmPool {
    pub profile: Arc<LiquidityProfile>,
    pub price: f64,
    pub gamma: f64,
    pub fees_x: f64,
    pub fees_y: f64,
}

/// Result of moving a pool's price.
#[derive(Debug, Clone)]
pub struct PoolSwap {
    pub pool: ClmmPool,
    /// Change in pool reserves.
    pub delta_x: f64,
    pub delta_y: f64,
    /// Fees credited by this move.
    pub fee_x: f64,
    pub fee_y: f64,
}

impl ClmmPool {
    pub fn new(profile: impl Into<Arc<LiquidityProfile>>, price: f64, gamma: f64) -> Result<Self> {
        check_price(price)?;
        check_gamma(gamma)?;
        Ok(Self {
            profile: profile.into(),
            price,
            gamma,
            fees_x: 0.0,
            fees_y: 0.0,
        })
    }

    pub fn reserves(&self) -> Result<(f64, f64)> {
        self.profile.reserves(self.price)
    }

    pub fn value(&self) -> Result<f64> {
        let (x, y) = self.reserves()?;
        Ok(self.price * x + y)
    }

    pub fn liquidity(&self) -> Result<f64> {
        self.profile.value(self.price)
    }

    /// `d²y/dx² = 2 P^{3/2} / ℓ(P)` at the current price.
    pub fn curvature(&self) -> Result<f64> {
        self.profile.curvature(self.price)
    }

    /// Moves the price to `target`. Price-increasing moves pay fees in Y,
    /// price-decreasing moves in X, at `(1−γ)/γ` of the pool-side amount.
    pub fn swap_to_price(&self, target: f64) -> Result<PoolSwap> {
        check_price(target)?;
        self.profile.check_positive_between(self.price, target)?;
        let (x0, y0) = self.reserves()?;
        let (x1, y1) = self.profile.reserves(target)?;
        let (dx, dy) = (x1 - x0, y1 - y0);
        let rate = (1.0 - self.gamma) / self.gamma;
        let fee_x = rate * dx.max(0.0);
        let fee_y = rate * dy.max(0.0);
        let mut pool = self.clone();
        pool.price = target;
        pool.fees_x += fee_x;
        pool.fees_y += fee_y;
        Ok(PoolSwap {
            pool,
            delta_x: dx,
            delta_y: dy,
            fee_x,
            fee_y,
        })
    }

    /// Swaps a gross input `amount` of `asset` into the pool; `γ·amount`
    /// enters the reserves. The target price is found by bisection in
    /// log-price to 1e-14 relative.
    pub fn swap_exact_input(&self, asset: Asset, amount: f64) -> Result<PoolSwap> {
        if !(amount >= 0.0 && amount.is_finite()) {
            return Err(invalid_param(
                "amount",
                format!("{amount} must be nonnegative"),
            ));
        }
        if amount == 0.0 {
            return self.swap_to_price(self.price);
        }
        let effective = self.gamma * amount;
        let (x0, y0) = self.reserves()?;
        let gained = |p: f64| -> Result<f64> {
            let (x, y) = self.profile.reserves(p)?;
            Ok(match asset {
                Asset::X => x - x0,
                Asset::Y => y - y0,
            })
        };
        // X in pushes the price down, Y in pushes it up
        let factor = match asset {
            Asset::X => 0.5,
            Asset::Y => 2.0,
        };
        let mut near = self.price;
        let mut far = self.price;
        let mut bracketed = false;
        for _ in 0..2100 {
            let next = far * factor;
            if !(next > 0.0 && next.is_finite()) {
                break;
            }
            self.profile.check_positive_between(self.price, next)?;
            far = next;
            if gained(far)? >= effective {
                bracketed = true;
                break;
            }
            near = far;
        }
        if !bracketed {
            return Err(Error::InsufficientLiquidity {
                lower: self.price.min(far),
                upper: self.price.max(far),
            });
        }
        while (far - near).abs() > 1e-14 * near.abs() {
            let mid = (near * far).sqrt();
            if mid == near || mid == far {
                break;
            }
            if gained(mid)? >= effective {
                far = mid;
            } else {
                near = mid;
            }
        }
        self.swap_to_price(far)
    }
}
