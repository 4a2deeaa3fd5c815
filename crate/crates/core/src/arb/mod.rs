//! Arbitrage models for a pool whose price lags an external market.
//!
//! [`reflection`] and [`myopic`] cover the arbitrageur who trades only when
//! the mispricing leaves the fee band; [`control`] and [`simulate`] cover the
//! quadratic-penalty control problems in finite-horizon, discounted and
//! ergodic form.

pub mod control;
pub mod myopic;
pub mod reflection;
pub mod simulate;

pub use control::{
    optimal_control, rho_limit_check, riccati_oracle, solve_discounted, solve_ergodic,
    solve_finite, ControlParams, DiscountedValue, ErgodicValue, FiniteHorizonValue,
    QuadraticCoefficients, RhoLimit,
};
pub use myopic::{myopic_inventory_and_fees, myopic_ledger, myopic_pnl, MyopicLedger, MyopicStep};
pub use reflection::{reflect_band, reflect_increments, skorokhod_reflect, ReflectedPath};
pub use simulate::{simulate_controlled, ControlSimConfig, ControlledRun, FeedbackLaw, Scheme};
