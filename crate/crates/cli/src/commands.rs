//! One function per subcommand; each returns tables and optional charts.

use clmm_lab::arb::control::{
    discounted_quadratic_residual, hjb_residual_discounted, hjb_residual_ergodic, uniform_grid,
};
use clmm_lab::arb::{
    myopic_ledger, rho_limit_check, riccati_oracle, simulate_controlled, skorokhod_reflect,
    solve_discounted, solve_ergodic, solve_finite, ControlParams, ControlSimConfig, FeedbackLaw,
    Scheme,
};
use clmm_lab::cfmm::G3mCurve;
use clmm_lab::clmm::{covered_call_bound, Position};
use clmm_lab::liquidity::{profile_from_positions, LiquidityProfile};
use clmm_lab::market::{
    ledger_for_path, mean_estimate, simulate_gbm_path, terminal_rows, LedgerRow, PathConfig,
    ReserveCurve, SimLedger,
};

use crate::config::{CurveKind, Effective, SchemeKind};
use crate::error::{CliError, CliResult};
use crate::output::{line_chart, num, opt_num, Table};
use crate::ticks::load_profile;

#[derive(Debug, Clone, Default)]
pub struct Artifacts {
    pub tables: Vec<Table>,
    /// `(file stem, svg text)`.
    pub charts: Vec<(String, String)>,
}

/// Parses `liquidity:lower:upper` triples separated by commas.
pub fn parse_positions(spec: &str) -> CliResult<Vec<Position>> {
    spec.split(',')
        .filter(|s| !s.trim().is_empty())
        .enumerate()
        .map(|(i, item)| {
            let parts: Vec<f64> = item
                .split(':')
                .map(|v| v.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|e| CliError::Usage(format!("position {i} `{item}`: {e}")))?;
            match parts[..] {
                [l, a, b] => Position::new(l, a, b)
                    .map_err(|e| CliError::Usage(format!("position {i}: {e}"))),
                _ => Err(CliError::Usage(format!(
                    "position {i} `{item}`: expected liquidity:lower:upper"
                ))),
            }
        })
        .collect()
}

pub fn build_profile(eff: &Effective) -> CliResult<LiquidityProfile> {
    if let Some(path) = &eff.ticks {
        load_profile(path)
    } else if let Some(spec) = &eff.positions {
        Ok(profile_from_positions(&parse_positions(spec)?)?)
    } else {
        Ok(LiquidityProfile::uniform(eff.liquidity)?)
    }
}

enum Curve {
    Profile(LiquidityProfile),
    Weighted(G3mCurve),
}

impl Curve {
    fn build(eff: &Effective) -> CliResult<Self> {
        Ok(match eff.curve {
            CurveKind::Clmm => Self::Profile(build_profile(eff)?),
            CurveKind::G3m => Self::Weighted(G3mCurve::new(eff.weight, eff.liquidity)?),
        })
    }

    fn as_reserve_curve(&self) -> &dyn ReserveCurve {
        match self {
            Self::Profile(p) => p,
            Self::Weighted(c) => c,
        }
    }

    fn liquidity_at(&self, price: f64) -> CliResult<f64> {
        Ok(match self {
            Self::Profile(p) => p.value(price)?,
            Self::Weighted(c) => c.liquidity(),
        })
    }
}

fn log_grid(lo: f64, hi: f64, points: usize) -> CliResult<Vec<f64>> {
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(CliError::Usage(format!(
            "price grid needs 0 < price-min < price-max, got [{lo}, {hi}]"
        )));
    }
    if points < 2 {
        return Err(CliError::Usage("points must be at least 2".into()));
    }
    let (a, b) = (lo.ln(), hi.ln());
    Ok((0..points)
        .map(|i| {
            if i + 1 == points {
                hi
            } else {
                (a + (b - a) * i as f64 / (points - 1) as f64).exp()
            }
        })
        .collect())
}

fn series(table: &Table, x: &str, ys: &[&str]) -> Vec<(String, Vec<(f64, f64)>)> {
    let xs = table.column(x);
    ys.iter()
        .map(|y| {
            (
                y.to_string(),
                xs.iter().copied().zip(table.column(y)).collect(),
            )
        })
        .collect()
}

fn chart(name: &str, title: &str, table: &Table, x: &str, ys: &[&str]) -> (String, String) {
    let s = series(table, x, ys);
    let refs: Vec<(&str, Vec<(f64, f64)>)> =
        s.iter().map(|(n, v)| (n.as_str(), v.clone())).collect();
    (name.to_string(), line_chart(title, x, &refs))
}

pub fn pool(eff: &Effective) -> CliResult<Artifacts> {
    let curve = Curve::build(eff)?;
    let mut t = Table::new("pool", &["price", "liquidity", "x", "y", "value"]);
    for p in log_grid(eff.price_min, eff.price_max, eff.points)? {
        let (x, y) = curve.as_reserve_curve().reserves_at(p)?;
        t.push_numbers(&[p, curve.liquidity_at(p)?, x, y, p * x + y]);
    }
    let charts = vec![chart("pool", "reserves", &t, "price", &["x", "y"])];
    Ok(Artifacts {
        tables: vec![t],
        charts,
    })
}

fn position_from(eff: &Effective) -> CliResult<Position> {
    Ok(match (eff.lower, eff.upper) {
        (Some(a), Some(b)) => Position::new(eff.liquidity, a, b)?,
        (None, None) => Position::centered(eff.liquidity, eff.price, eff.ratio)?,
        _ => {
            return Err(CliError::Usage(
                "give both --lower and --upper, or neither".into(),
            ))
        }
    })
}

pub fn position(eff: &Effective) -> CliResult<Artifacts> {
    let pos = position_from(eff)?;
    let (x0, y0) = pos.reserves(pos.center())?;
    let mut t = Table::new("position", &["price", "value", "x", "y", "hold"]);
    for p in log_grid(eff.price_min, eff.price_max, eff.points)? {
        let (x, y) = pos.reserves(p)?;
        t.push_numbers(&[p, pos.value(p)?, x, y, x0 * p + y0]);
    }
    let mut cc = Table::new("covered_call", &["k", "value", "bound", "gap"]);
    for i in 0..=500 {
        let k = i as f64 / 100.0;
        let (v, b) = covered_call_bound(&pos, k)?;
        cc.push_numbers(&[k, v, b, b - v]);
    }
    let charts = vec![
        chart(
            "position",
            "position value",
            &t,
            "price",
            &["value", "hold"],
        ),
        chart(
            "covered_call",
            "covered-call bound",
            &cc,
            "k",
            &["value", "bound"],
        ),
    ];
    Ok(Artifacts {
        tables: vec![t, cc],
        charts,
    })
}

fn path_config(eff: &Effective) -> PathConfig {
    PathConfig {
        mu: eff.mu,
        sigma: eff.sigma,
        dt: eff.dt,
        horizon: eff.horizon,
        seed: eff.seed,
        paths: eff.paths,
        initial_price: eff.price,
    }
}

fn ledger_table(name: &str, ledger: &SimLedger) -> Table {
    let mut t = Table::new(name, &SimLedger::COLUMNS);
    for r in &ledger.rows {
        let LedgerRow {
            t: time,
            s,
            p,
            x,
            y,
            hold,
            value,
            rebalance,
            il,
            lvr,
            fees_x,
            fees_y,
            g,
            d,
        } = *r;
        let mut row: Vec<String> = [time, s, p, x, y, hold, value]
            .iter()
            .map(|v| num(*v))
            .collect();
        row.push(opt_num(rebalance));
        row.push(num(il));
        row.push(opt_num(lvr));
        row.extend([fees_x, fees_y, g, d].iter().map(|v| num(*v)));
        t.push(row);
    }
    t
}

pub fn sim(eff: &Effective) -> CliResult<Artifacts> {
    let curve = Curve::build(eff)?;
    let cfg = path_config(eff);
    let rows = terminal_rows(curve.as_reserve_curve(), &cfg)?;
    let mut summary = Table::new("sim_summary", &["metric", "mean", "std_err", "samples"]);
    type Metric = (&'static str, fn(&LedgerRow) -> f64);
    let metrics: [Metric; 6] = [
        ("H", |r| r.hold),
        ("V", |r| r.value),
        ("R", |r| r.rebalance.unwrap_or(f64::NAN)),
        ("IL", |r| r.il),
        ("LVR", |r| r.lvr.unwrap_or(f64::NAN)),
        ("H_minus_R", |r| r.martingale_part().unwrap_or(f64::NAN)),
    ];
    for (name, f) in metrics {
        let m = mean_estimate(&rows.iter().map(f).collect::<Vec<_>>());
        summary.push(vec![
            name.into(),
            num(m.mean),
            num(m.std_err),
            m.samples.to_string(),
        ]);
    }
    let prices: Vec<f64> = simulate_gbm_path(&cfg, 0)
        .into_iter()
        .map(f64::exp)
        .collect();
    let ledger = ledger_for_path(curve.as_reserve_curve(), cfg.dt, &prices, true)?;
    let path = ledger_table("sim_path", &ledger);
    let charts = vec![chart(
        "sim_path",
        "wealth decomposition, path 0",
        &path,
        "t",
        &["IL", "LVR"],
    )];
    Ok(Artifacts {
        tables: vec![summary, path],
        charts,
    })
}

fn control_params(eff: &Effective) -> ControlParams {
    ControlParams {
        mu: eff.mu,
        sigma: eff.sigma,
        lambda: eff.lambda,
        tau: eff.tau,
        rho: eff.rho,
        horizon: eff.horizon,
    }
}

pub fn arb_myopic(eff: &Effective) -> CliResult<Artifacts> {
    if eff.curve != CurveKind::Clmm {
        return Err(CliError::Usage(
            "arb myopic needs a liquidity profile (--curve clmm)".into(),
        ));
    }
    let profile = build_profile(eff)?;
    let cfg = PathConfig {
        paths: 1,
        ..path_config(eff)
    };
    cfg.validate()?;
    let log_s = simulate_gbm_path(&cfg, 0);
    let path = skorokhod_reflect(&log_s, eff.gamma, eff.price)?;
    let ledger = myopic_ledger(&path, &profile, eff.gamma)?;
    let mut t = Table::new(
        "myopic",
        &[
            "t",
            "S",
            "P",
            "Z",
            "G",
            "D",
            "dx",
            "dy",
            "fee_x",
            "fee_y",
            "arb_profit",
            "arb_profit_formula",
        ],
    );
    let profit = ledger.cumulative_profit();
    let formula = ledger.cumulative_profit_formula();
    for n in 0..path.len() {
        let step = if n == 0 {
            Default::default()
        } else {
            ledger.steps[n - 1]
        };
        t.push_numbers(&[
            n as f64 * cfg.dt,
            log_s[n].exp(),
            path.log_pool_price[n].exp(),
            path.z[n],
            path.g[n],
            path.d[n],
            step.dx,
            step.dy,
            step.fee_x,
            step.fee_y,
            profit[n],
            formula[n],
        ]);
    }
    let charts = vec![
        chart(
            "myopic_prices",
            "external and pool price",
            &t,
            "t",
            &["S", "P"],
        ),
        chart("myopic_regulators", "regulators", &t, "t", &["G", "D"]),
    ];
    Ok(Artifacts {
        tables: vec![t],
        charts,
    })
}

pub fn arb_finite(eff: &Effective) -> CliResult<Artifacts> {
    let params = control_params(eff);
    let value = solve_finite(&params)?;
    let intervals = eff.points.max(2) - 1;
    let per = 10_000usize.div_ceil(intervals);
    let oracle = riccati_oracle(&params, 1.0 / (per * intervals) as f64)?;
    let closed = value.grid(intervals)?;
    let mut t = Table::new(
        "finite",
        &[
            "t",
            "h2",
            "h1",
            "h0",
            "h2_rk4",
            "h1_rk4",
            "h0_rk4",
            "h2_reference",
            "control_slope",
            "control_offset",
        ],
    );
    for (k, (time, c)) in closed.iter().enumerate() {
        let o = oracle[k * per].1;
        t.push_numbers(&[
            *time,
            c.h2,
            c.h1,
            c.h0,
            o.h2,
            o.h1,
            o.h0,
            value.h2_reference(*time)?,
            (1.0 - c.h2) / params.lambda,
            c.h1 / params.lambda,
        ]);
    }
    let charts = vec![chart(
        "finite",
        "value coefficients",
        &t,
        "t",
        &["h2", "h1", "h0", "h2_rk4"],
    )];
    Ok(Artifacts {
        tables: vec![t],
        charts,
    })
}

fn kv(name: &str, rows: &[(&str, f64)]) -> Table {
    let mut t = Table::new(name, &["quantity", "value"]);
    for (k, v) in rows {
        t.push(vec![k.to_string(), num(*v)]);
    }
    t
}

pub fn arb_discounted(eff: &Effective) -> CliResult<Artifacts> {
    let params = control_params(eff);
    let v = solve_discounted(&params)?;
    let c = v.coefficients;
    let grid = uniform_grid(-1.0, 1.0, 0.01);
    let t = kv(
        "discounted",
        &[
            ("rho", params.rho),
            ("h2", c.h2),
            ("h1", c.h1),
            ("h0", c.h0),
            ("h2_plus", v.h2_plus),
            ("h1_reference", v.h1_reference),
            ("h0_reference", v.h0_reference),
            (
                "quadratic_residual",
                discounted_quadratic_residual(&params, c.h2),
            ),
            ("hjb_residual", hjb_residual_discounted(&params, &c, &grid)),
            ("control_slope", (1.0 - c.h2) / params.lambda),
            ("control_offset", c.h1 / params.lambda),
        ],
    );
    let limit = rho_limit_check(&params, &[1e-1, 1e-2, 1e-3, 1e-4])?;
    let mut rl = Table::new("rho_limit", &["rho", "rho_v0", "gap_hjb"]);
    for (rho, val) in &limit.rows {
        rl.push_numbers(&[*rho, *val, (val - limit.eta_hjb).abs()]);
    }
    rl.push(vec![
        "0".into(),
        num(limit.extrapolated),
        num((limit.extrapolated - limit.eta_hjb).abs()),
    ]);
    Ok(Artifacts {
        tables: vec![t, rl],
        charts: Vec::new(),
    })
}

pub fn arb_ergodic(eff: &Effective) -> CliResult<Artifacts> {
    let params = control_params(eff);
    let e = solve_ergodic(&params)?;
    let c = e.coefficients;
    let grid = uniform_grid(-1.0, 1.0, 0.01);
    let law = FeedbackLaw::from_coefficients(&c, params.lambda);
    let run = simulate_controlled(
        &params,
        &law,
        &ControlSimConfig {
            dt: eff.dt,
            horizon: eff.horizon,
            paths: eff.paths,
            seed: eff.seed,
            z0: 0.0,
            scheme: match eff.scheme {
                SchemeKind::Exact => Scheme::ExactAffine,
                SchemeKind::Euler => Scheme::EulerMaruyama,
            },
            record_stride: 0,
        },
    )?;
    let mc = run.average_reward();
    let t = kv(
        "ergodic",
        &[
            ("h2", c.h2),
            ("h1", c.h1),
            ("eta_hjb", e.eta_hjb),
            ("eta_reference", e.eta_reference),
            ("hjb_residual", hjb_residual_ergodic(&params, &e, &grid)),
            ("control_slope", (1.0 - c.h2) / params.lambda),
            ("control_offset", c.h1 / params.lambda),
            ("mc_average_reward", mc.mean),
            ("mc_std_err", mc.std_err),
            ("mc_paths", mc.samples as f64),
            ("mc_horizon", eff.horizon),
        ],
    );
    Ok(Artifacts {
        tables: vec![t],
        charts: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positions_parse() {
        let p = parse_positions("10:1:4, 20:4:9").unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(p[1], Position::new(20.0, 4.0, 9.0).unwrap());
        assert!(parse_positions("10:1").is_err());
        assert!(parse_positions("10:4:1").is_err());
        assert!(parse_positions("a:1:2").is_err());
    }

    #[test]
    fn grid_ends_exactly() {
        let g = log_grid(0.5, 2.0, 3).unwrap();
        assert_eq!(g[2], 2.0);
        assert!((g[1] - 1.0).abs() < 1e-15);
        assert!(log_grid(2.0, 1.0, 3).is_err());
        assert!(log_grid(1.0, 2.0, 1).is_err());
    }
}
