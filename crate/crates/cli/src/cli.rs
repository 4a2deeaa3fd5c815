use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::config::Params;

#[derive(Debug, Parser)]
#[command(
    name = "clmm-lab",
    version,
    about = "Concentrated-liquidity pool math, LP loss simulation and arbitrage control"
)]
pub struct Cli {
    /// TOML or JSON file with parameter values (flags override it)
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(flatten)]
    pub params: Params,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Reserve curves over a log-spaced price grid.
    ///
    /// Writes pool.csv with columns: price, liquidity, x, y, value.
    /// The profile comes from --ticks, else --positions, else a uniform
    /// --liquidity; --curve g3m uses a weighted pool instead.
    Pool,

    /// Value and reserves of one LP position, and its covered-call bound.
    ///
    /// Writes position.csv (price, value, x, y, hold) and covered_call.csv
    /// (k, value, bound, gap) with k = price / centre on [0, 5].
    Position,

    /// Monte Carlo of hold / pool / rebalance wealth on GBM paths.
    ///
    /// Writes sim_summary.csv (metric, mean, std_err, samples) over all
    /// paths and sim_path.csv (t, S, P, x, y, H, V, R, IL, LVR, Fx, Fy, G, D)
    /// for path 0.
    Sim,

    /// Arbitrage models.
    Arb {
        #[command(subcommand)]
        mode: ArbMode,
    },

    /// Runs the built-in oracle checks and writes verify.csv
    /// (check, passed, measured, tolerance). Exits 1 if any check fails.
    Verify,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum ArbMode {
    /// Fee-band reflection with a myopic arbitrageur on one GBM path.
    ///
    /// Writes myopic.csv: t, S, P, Z, G, D, dx, dy, fee_x, fee_y,
    /// arb_profit, arb_profit_formula (the last two cumulative).
    Myopic,

    /// Finite-horizon value coefficients.
    ///
    /// Writes finite.csv: t, h2, h1, h0, h2_rk4, h1_rk4, h0_rk4,
    /// h2_reference, control_slope, control_offset.
    Finite,

    /// Discounted value coefficients and the ρ → 0 table.
    ///
    /// Writes discounted.csv (quantity, value) and rho_limit.csv
    /// (rho, rho_v0, gap_hjb).
    Discounted,

    /// Ergodic constant, both candidate values, and a Monte Carlo estimate.
    ///
    /// Writes ergodic.csv (quantity, value) with eta_hjb and eta_reference.
    Ergodic,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Pool => "pool",
            Self::Position => "position",
            Self::Sim => "sim",
            Self::Arb { mode } => match mode {
                ArbMode::Myopic => "arb myopic",
                ArbMode::Finite => "arb finite",
                ArbMode::Discounted => "arb discounted",
                ArbMode::Ergodic => "arb ergodic",
            },
            Self::Verify => "verify",
        }
    }
}
