//! Numerical toolkit for concentrated-liquidity market makers.
//!
//! - [`liquidity`]: liquidity profiles, their atoms, and reserve integrals.
//! - [`cfmm`]: geometric-mean market makers with fee-adjusted swaps.
//! - [`clmm`]: concentrated-liquidity positions and profile-driven pools.
//! - [`market`]: GBM paths and hold / pool / rebalance wealth ledgers.
//! - [`arb`]: reflected myopic arbitrage and the quadratic arbitrage control problems.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod arb;
pub mod cfmm;
pub mod clmm;
pub mod error;
pub mod liquidity;
pub mod market;
pub mod quadrature;
pub mod rng;

pub use error::{Error, Result};
