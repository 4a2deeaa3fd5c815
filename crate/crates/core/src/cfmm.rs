//! Geometric-mean market makers (`x^w y^{1-w} = ℓ`) with fee-adjusted swaps.
//!
//! Fees are kept outside the bonding reserves: a trader's gross input is
//! split into an effective amount that enters the curve and a fee credited to
//! a separate ledger.

use crate::error::{invalid_param, Error, Result};

/// Bonding curve `f(x, y) = x^w y^{1-w} = ℓ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct G3mCurve {
    weight: f64,
    liquidity: f64,
}

/// Reserves and fee ledger of a pool.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoolState {
    pub x: f64,
    pub y: f64,
    /// Fee retention `γ ∈ (0, 1]`; the fee rate is `1 − γ`.
    pub gamma: f64,
    pub fees_x: f64,
    pub fees_y: f64,
}

impl PoolState {
    pub fn new(x: f64, y: f64, gamma: f64) -> Result<Self> {
        if !(x >= 0.0 && y >= 0.0 && x.is_finite() && y.is_finite()) {
            return Err(invalid_param(
                "reserves",
                format!("({x}, {y}) must be nonnegative"),
            ));
        }
        check_gamma(gamma)?;
        Ok(Self {
            x,
            y,
            gamma,
            fees_x: 0.0,
            fees_y: 0.0,
        })
    }
}

pub(crate) fn check_gamma(gamma: f64) -> Result<()> {
    if gamma > 0.0 && gamma <= 1.0 {
        Ok(())
    } else {
        Err(invalid_param("gamma", format!("{gamma} is outside (0, 1]")))
    }
}

/// Asset in which a fee was charged.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Asset {
    X,
    Y,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Swap {
    pub state: PoolState,
    /// Gross numéraire flow from the trader into the pool (negative when the
    /// trader receives numéraire).
    pub delta_y: f64,
    pub fee_asset: Asset,
    pub fee: f64,
}

impl G3mCurve {
    pub fn new(weight: f64, liquidity: f64) -> Result<Self> {
        if !(weight > 0.0 && weight < 1.0) {
            return Err(invalid_param(
                "weight",
                format!("{weight} is outside (0, 1)"),
            ));
        }
        if !(liquidity > 0.0 && liquidity.is_finite()) {
            return Err(invalid_param(
                "liquidity",
                format!("{liquidity} must be positive"),
            ));
        }
        Ok(Self { weight, liquidity })
    }

    /// Constant-product curve `x y = ℓ²`.
    pub fn constant_product(liquidity: f64) -> Result<Self> {
        Self::new(0.5, liquidity)
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn liquidity(&self) -> f64 {
        self.liquidity
    }

    pub fn bonding(&self, x: f64, y: f64) -> f64 {
        x.powf(self.weight) * y.powf(1.0 - self.weight)
    }

    /// `y` on the curve at a given `x`.
    fn y_on_curve(&self, x: f64) -> f64 {
        let w = self.weight;
        (self.liquidity / x.powf(w)).powf(1.0 / (1.0 - w))
    }

    /// Spot price `P = (w/(1−w)) · y/x`.
    pub fn spot_price(&self, state: &PoolState) -> Result<f64> {
        check_reserves(state)?;
        Ok(self.weight / (1.0 - self.weight) * state.y / state.x)
    }

    /// Reserves on this curve at price `P`.
    pub fn reserves_from_price(&self, price: f64) -> Result<(f64, f64)> {
        crate::liquidity::check_price(price)?;
        let w = self.weight;
        let x = (w / (1.0 - w)).powf(1.0 - w) * self.liquidity * price.powf(w - 1.0);
        let y = ((1.0 - w) / w).powf(w) * self.liquidity * price.powf(w);
        Ok((x, y))
    }

    /// Pool value `P x + y = ℓ P^w / (w^w (1−w)^{1−w})`.
    pub fn value_at_price(&self, price: f64) -> Result<f64> {
        crate::liquidity::check_price(price)?;
        let w = self.weight;
        Ok(self.liquidity * price.powf(w) / (w.powf(w) * (1.0 - w).powf(1.0 - w)))
    }

    /// Second derivative `d²y/dx²` of the trading curve, from the implicit
    /// function theorem:
    /// `−(f_xx f_y² − 2 f_x f_y f_xy + f_yy f_x²) / f_y³`.
    ///
    /// Positive (convex curve). The pool price falls as pool `x` grows, at
    /// rate `dP/dx = −d²y/dx²`.
    pub fn price_impact(&self, state: &PoolState) -> Result<f64> {
        check_reserves(state)?;
        let (x, y, w) = (state.x, state.y, self.weight);
        let f = self.bonding(x, y);
        let fx = w * f / x;
        let fy = (1.0 - w) * f / y;
        let fxx = w * (w - 1.0) * f / (x * x);
        let fyy = (1.0 - w) * (-w) * f / (y * y);
        let fxy = w * (1.0 - w) * f / (x * y);
        Ok(-(fxx * fy * fy - 2.0 * fx * fy * fxy + fyy * fx * fx) / (fy * fy * fy))
    }

    /// Trader-signed swap of `delta_x` units of the risk asset.
    ///
    /// `delta_x > 0`: the trader sells X; `γ Δx` enters the reserves and
    /// `(1−γ) Δx` goes to the X fee ledger. `delta_x < 0`: the trader buys
    /// `|Δx|` and pays a gross `Δy`, of which `γ Δy` enters the reserves.
    pub fn swap_with_fee(&self, state: &PoolState, delta_x: f64) -> Result<Swap> {
        check_reserves(state)?;
        check_gamma(state.gamma)?;
        let g = state.gamma;
        let mut next = *state;
        if delta_x == 0.0 {
            return Ok(Swap {
                state: next,
                delta_y: 0.0,
                fee_asset: Asset::X,
                fee: 0.0,
            });
        }
        // reserves are re-solved on the curve through the current state
        let curve = G3mCurve {
            weight: self.weight,
            liquidity: self.bonding(state.x, state.y),
        };
        if delta_x > 0.0 {
            next.x = state.x + g * delta_x;
            next.y = curve.y_on_curve(next.x);
            let fee = (1.0 - g) * delta_x;
            next.fees_x += fee;
            Ok(Swap {
                state: next,
                delta_y: next.y - state.y,
                fee_asset: Asset::X,
                fee,
            })
        } else {
            let x_new = state.x + delta_x;
            if x_new <= 0.0 {
                return Err(Error::InsufficientLiquidity {
                    lower: 0.0,
                    upper: state.x,
                });
            }
            let y_target = curve.y_on_curve(x_new);
            let gross = (y_target - state.y) / g;
            let fee = (1.0 - g) * gross;
            next.x = x_new;
            next.y = y_target;
            next.fees_y += fee;
            Ok(Swap {
                state: next,
                delta_y: gross,
                fee_asset: Asset::Y,
                fee,
            })
        }
    }
}

/// Pool value `P x + y` using the state's own spot price.
pub fn pool_value(curve: &G3mCurve, state: &PoolState) -> Result<f64> {
    let p = curve.spot_price(state)?;
    Ok(p * state.x + state.y)
}

/// Infinitesimal (bid, ask) quotes `(γ P, P / γ)` around the spot price.
pub fn bid_ask(curve: &G3mCurve, state: &PoolState) -> Result<(f64, f64)> {
    let p = curve.spot_price(state)?;
    Ok((state.gamma * p, p / state.gamma))
}

fn check_reserves(state: &PoolState) -> Result<()> {
    if state.x > 0.0 && state.y > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "reserves must be strictly positive, got ({}, {})",
            state.x, state.y
        )))
    }
}
