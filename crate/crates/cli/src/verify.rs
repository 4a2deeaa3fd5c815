//! Built-in oracle checks behind `clmm-lab verify`.

use clmm_lab::arb::control::{
    discounted_coefficients, discounted_h2_limit, discounted_quadratic_residual,
    hjb_residual_discounted, hjb_residual_finite, uniform_grid,
};
use clmm_lab::arb::myopic::refinement_pair;
use clmm_lab::arb::{
    reflect_increments, rho_limit_check, riccati_oracle, simulate_controlled, skorokhod_reflect,
    solve_discounted, solve_ergodic, solve_finite, ControlParams, ControlSimConfig, FeedbackLaw,
    QuadraticCoefficients, Scheme,
};
use clmm_lab::cfmm::G3mCurve;
use clmm_lab::clmm::{covered_call_bound, Position};
use clmm_lab::liquidity::{profile_from_positions, LiquidityProfile, SmoothDensity};
use clmm_lab::market::{
    accumulate_lvr, ledger_for_path, log_path_from_normals, mean_estimate, simulate_gbm_path,
    terminal_rows, PathConfig,
};
use clmm_lab::rng::standard_normals;

use crate::error::CliResult;
use crate::output::{num, Table};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub measured: f64,
    pub tolerance: f64,
}

impl Check {
    /// Passes when `measured <= tolerance`.
    fn at_most(name: &'static str, measured: f64, tolerance: f64) -> Self {
        Self {
            name,
            passed: measured <= tolerance,
            measured,
            tolerance,
        }
    }

    /// Passes when `measured >= threshold`.
    fn at_least(name: &'static str, measured: f64, threshold: f64) -> Self {
        Self {
            name,
            passed: measured >= threshold,
            measured,
            tolerance: threshold,
        }
    }
}

pub fn report_table(checks: &[Check]) -> Table {
    let mut t = Table::new("verify", &["check", "passed", "measured", "tolerance"]);
    for c in checks {
        t.push(vec![
            c.name.to_string(),
            c.passed.to_string(),
            num(c.measured),
            num(c.tolerance),
        ]);
    }
    t
}

fn max_abs(pairs: impl IntoIterator<Item = (f64, f64)>) -> f64 {
    pairs
        .into_iter()
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

fn two_position_reserves() -> CliResult<Vec<Check>> {
    let prof = profile_from_positions(&[
        Position::new(10.0, 1.0, 4.0)?,
        Position::new(20.0, 4.0, 9.0)?,
    ])?;
    let case = |p: f64| -> (f64, f64) {
        let r = p.sqrt();
        if p < 1.0 {
            (10.0 * (1.0 - 0.5) + 20.0 * (0.5 - 1.0 / 3.0), 0.0)
        } else if p < 4.0 {
            (
                10.0 * (1.0 / r - 0.5) + 20.0 * (0.5 - 1.0 / 3.0),
                10.0 * (r - 1.0),
            )
        } else if p < 9.0 {
            (20.0 * (1.0 / r - 1.0 / 3.0), 10.0 + 20.0 * (r - 2.0))
        } else {
            (0.0, 30.0)
        }
    };
    let mut worst: f64 = 0.0;
    for i in 0..=200 {
        let p = 0.25 * (48.0f64).powf(i as f64 / 200.0);
        let (x, y) = prof.reserves(p)?;
        let (cx, cy) = case(p);
        worst = worst.max((x - cx).abs()).max((y - cy).abs());
    }
    Ok(vec![Check::at_most(
        "reserves_two_position_cases",
        worst,
        1e-12,
    )])
}

fn cpmm_limit() -> CliResult<Vec<Check>> {
    let l = 10.0;
    let step = LiquidityProfile::uniform(l)?;
    let smooth = LiquidityProfile::from_density(SmoothDensity::constant(l, 0.0, f64::INFINITY)?);
    let (mut quad, mut closed): (f64, f64) = (0.0, 0.0);
    for i in 0..50 {
        let p = 10f64.powf(-3.0 + 6.0 * i as f64 / 49.0);
        let (x, y) = smooth.reserves(p)?;
        quad = quad.max((x * y / (l * l) - 1.0).abs());
        let (x, y) = step.reserves(p)?;
        closed = closed.max((x * y / (l * l) - 1.0).abs());
    }
    Ok(vec![
        Check::at_most("cpmm_product_quadrature", quad, 1e-9),
        Check::at_most("cpmm_product_closed_form", closed, 1e-12),
    ])
}

/// Random step profile driven by standard normals.
pub fn random_step_profile(seed: u64, index: u64) -> CliResult<LiquidityProfile> {
    let z = standard_normals(seed, index, 24);
    let pieces = 2 + (z[0].abs() * 4.0) as usize % 8;
    let mut b = if z[1] > 0.0 { 0.0 } else { (0.5 * z[2]).exp() };
    let mut breakpoints = vec![b];
    let mut levels = Vec::new();
    for k in 0..pieces {
        b = if b == 0.0 {
            (0.5 * z[3 + k]).exp()
        } else {
            b * (1.0 + (0.7 * z[3 + k]).exp())
        };
        breakpoints.push(b);
        let level = 10.0 * z[12 + k].abs();
        levels.push(if z[12 + k] < -1.0 { 0.0 } else { level });
    }
    if z[23] > 0.0 {
        *breakpoints.last_mut().expect("nonempty") = f64::INFINITY;
    }
    Ok(LiquidityProfile::from_steps(breakpoints, levels)?)
}

fn by_parts(seed: u64) -> CliResult<Vec<Check>> {
    let mut worst: f64 = 0.0;
    for i in 0..100 {
        let prof = random_step_profile(seed, i)?;
        for p in [0.05, 0.3, 0.9, 1.0, 1.7, 3.0, 8.0, 40.0] {
            let (a, b) = (prof.step_reserves(p), prof.step_reserves_by_parts(p));
            worst = worst.max((a.0 - b.0).abs()).max((a.1 - b.1).abs());
        }
        for &bp in prof
            .breakpoints()
            .iter()
            .filter(|b| **b > 0.0 && b.is_finite())
        {
            let (a, b) = (prof.step_reserves(bp), prof.step_reserves_by_parts(bp));
            worst = worst.max((a.0 - b.0).abs()).max((a.1 - b.1).abs());
        }
    }
    Ok(vec![Check::at_most(
        "reserves_by_parts_random_profiles",
        worst,
        1e-12,
    )])
}

fn riccati() -> CliResult<Vec<Check>> {
    let params = ControlParams {
        mu: 0.05,
        ..ControlParams::default()
    };
    let oracle = riccati_oracle(&params, 1e-4)?;
    let closed = solve_finite(&params)?.grid(oracle.len() - 1)?;
    let diff = |f: fn(&QuadraticCoefficients) -> f64| {
        max_abs(oracle.iter().zip(&closed).map(|(o, c)| (f(&o.1), f(&c.1))))
    };
    let terminal = solve_finite(&params)?.coefficients(params.horizon)?;
    let singular = ControlParams {
        lambda: 1.0,
        tau: 1.0,
        mu: 0.05,
        ..ControlParams::default()
    };
    let sv = solve_finite(&singular)?;
    let mut singular_max: f64 = 0.0;
    for k in 0..=10 {
        let c = sv.coefficients(k as f64 / 10.0)?;
        singular_max = singular_max.max(c.h2.abs()).max(c.h1.abs()).max(c.h0.abs());
    }
    let z_grid = uniform_grid(-1.0, 1.0, 0.1);
    Ok(vec![
        Check::at_most("finite_h2_vs_rk4", diff(|c| c.h2), 1e-6),
        Check::at_most("finite_h1_vs_rk4", diff(|c| c.h1), 1e-6),
        Check::at_most("finite_h0_vs_rk4", diff(|c| c.h0), 1e-6),
        Check::at_most(
            "finite_terminal_values",
            terminal
                .h2
                .abs()
                .max(terminal.h1.abs())
                .max(terminal.h0.abs()),
            0.0,
        ),
        Check::at_most("finite_singular_zero", singular_max, 0.0),
        Check::at_most(
            "finite_hjb_residual_rk4",
            hjb_residual_finite(&params, &oracle, &z_grid),
            1e-5,
        ),
    ])
}

fn discounted() -> CliResult<Vec<Check>> {
    let params = ControlParams::default();
    let v = solve_discounted(&params)?;
    let grid = uniform_grid(-1.0, 1.0, 0.01);
    let drifted = ControlParams { mu: 0.05, ..params };
    let vd = solve_discounted(&drifted)?;
    let plus = discounted_coefficients(&params, v.h2_plus);
    Ok(vec![
        Check::at_most(
            "discounted_hjb_residual",
            hjb_residual_discounted(&params, &v.coefficients, &grid).max(hjb_residual_discounted(
                &drifted,
                &vd.coefficients,
                &grid,
            )),
            1e-10,
        ),
        Check::at_most(
            "discounted_quadratic_residual",
            discounted_quadratic_residual(&params, v.coefficients.h2).abs(),
            1e-12,
        ),
        Check::at_most(
            "discounted_h2_example",
            (v.coefficients.h2 - 0.7813373).abs(),
            5e-8,
        ),
        Check::at_most(
            "discounted_plus_root_residual",
            hjb_residual_discounted(&params, &plus, &grid),
            1e-10,
        ),
    ])
}

fn regimes() -> CliResult<Vec<Check>> {
    let params = ControlParams::default();
    let ergodic = solve_ergodic(&params)?.coefficients.h2;
    let disc = discounted_h2_limit(&params, &[1e-4, 1e-5, 1e-6])?;
    let finite = solve_finite(&ControlParams {
        horizon: 50.0,
        ..params
    })?
    .h2(0.0)?;
    Ok(vec![
        Check::at_most(
            "ergodic_vs_discounted_limit_h2",
            (ergodic - disc).abs(),
            1e-6,
        ),
        Check::at_most("ergodic_vs_long_finite_h2", (ergodic - finite).abs(), 1e-6),
    ])
}

fn ergodic_mc(seed: u64) -> CliResult<Vec<Check>> {
    let params = ControlParams::default();
    let e = solve_ergodic(&params)?;
    let law = FeedbackLaw::from_coefficients(&e.coefficients, params.lambda);
    let run = simulate_controlled(
        &params,
        &law,
        &ControlSimConfig {
            dt: 0.01,
            horizon: 2000.0,
            paths: 64,
            seed,
            z0: 0.0,
            scheme: Scheme::ExactAffine,
            record_stride: 0,
        },
    )?;
    let m = run.average_reward();
    let gap = 0.5 * params.sigma.powi(2) * params.root_lt();
    Ok(vec![
        Check::at_most(
            "ergodic_mc_vs_eta_hjb_in_se",
            (m.mean - e.eta_hjb).abs() / m.std_err,
            3.0,
        ),
        Check::at_least(
            "ergodic_mc_vs_eta_reference_in_se",
            (m.mean - e.eta_reference).abs() / m.std_err,
            5.0,
        ),
        Check::at_least("ergodic_candidate_gap_in_se", gap / m.std_err, 5.0),
    ])
}

fn rho_limit() -> CliResult<Vec<Check>> {
    let table = rho_limit_check(&ControlParams::default(), &[1e-1, 1e-2, 1e-3])?;
    Ok(vec![
        Check::at_least(
            "rho_limit_monotone",
            if table.converges_monotonically() {
                1.0
            } else {
                0.0
            },
            1.0,
        ),
        Check::at_most("rho_limit_final_gap", table.final_gap(), 1e-3),
    ])
}

fn reflection(seed: u64) -> CliResult<Vec<Check>> {
    let gamma = (-0.01f64).exp();
    let cfg = PathConfig {
        mu: 0.0,
        sigma: 0.2,
        dt: 1.0 / 365.0,
        horizon: 1.0,
        seed,
        paths: 100,
        initial_price: 1.0,
    };
    let mut violations = 0.0;
    for i in 0..cfg.paths {
        let path = skorokhod_reflect(&simulate_gbm_path(&cfg, i), gamma, 1.0)?;
        if path.check_invariants(1e-12).is_err() {
            violations += 1.0;
        }
    }
    let hand = reflect_increments(0.0, &[0.02, -0.005, -0.03], 0.01)?;
    let expected_z = [0.01, 0.005, -0.01];
    let expected_dd = [0.01, 0.0, 0.0];
    let expected_dg = [0.0, 0.0, 0.015];
    let mut hand_err: f64 = 0.0;
    for n in 1..4 {
        hand_err = hand_err
            .max((hand.z[n] - expected_z[n - 1]).abs())
            .max((hand.dd(n) - expected_dd[n - 1]).abs())
            .max((hand.dg(n) - expected_dg[n - 1]).abs());
    }
    Ok(vec![
        Check::at_most("reflection_invariant_violations", violations, 0.0),
        Check::at_most(
            "reflection_hand_example",
            hand_err,
            4.0 * f64::EPSILON * 0.015,
        ),
    ])
}

fn myopic_refinement(seed: u64) -> CliResult<Vec<Check>> {
    let profile = LiquidityProfile::uniform(1.0)?;
    let gamma = (-0.003f64).exp();
    let fine = 4096;
    let mut shrank = 0.0;
    for i in 0..100 {
        let xi = standard_normals(seed, i, fine);
        let log_s = log_path_from_normals(0.0, -0.02, 0.2, 1.0 / fine as f64, &xi);
        let (coarse, refined) = refinement_pair(&log_s, 4, &profile, gamma, 1.0)?;
        if refined.abs() < coarse.abs() {
            shrank += 1.0;
        }
    }
    Ok(vec![Check::at_least(
        "myopic_arb_shrinks_fraction",
        shrank / 100.0,
        0.8,
    )])
}

fn lvr(seed: u64) -> CliResult<Vec<Check>> {
    let sigma: f64 = 0.2;
    let cfg = PathConfig {
        mu: PathConfig::martingale_drift(sigma),
        sigma,
        dt: 1.0 / 256.0,
        horizon: 1.0,
        seed,
        paths: 100,
        initial_price: 1.0,
    };
    let uniform = LiquidityProfile::uniform(10.0)?;
    let g3m = G3mCurve::constant_product(10.0)?;
    let two = profile_from_positions(&[
        Position::new(10.0, 0.5, 2.0)?,
        Position::new(5.0, 0.8, 1.25)?,
        Position::new(1.0, 0.01, 100.0)?,
    ])?;
    let (mut pathwise, mut identity): (f64, f64) = (0.0, 0.0);
    for i in 0..cfg.paths {
        let prices: Vec<f64> = simulate_gbm_path(&cfg, i)
            .into_iter()
            .map(f64::exp)
            .collect();
        let a = accumulate_lvr(&uniform, &prices)?;
        let b = accumulate_lvr(&g3m, &prices)?;
        pathwise = pathwise.max(max_abs(a.into_iter().zip(b)));
        for curve in [&uniform as &dyn clmm_lab::market::ReserveCurve, &g3m, &two] {
            identity =
                identity.max(ledger_for_path(curve, cfg.dt, &prices, true)?.identity_error());
        }
    }
    let big = PathConfig {
        paths: 10_000,
        ..cfg
    };
    let rows = terminal_rows(&uniform, &big)?;
    let il = mean_estimate(&rows.iter().map(|r| r.il).collect::<Vec<_>>());
    Ok(vec![
        Check::at_most("lvr_uniform_vs_g3m_pathwise", pathwise, 1e-12),
        Check::at_most("ledger_identities", identity, 1e-10),
        Check::at_least("expected_il_nonnegative_in_se", il.mean / il.std_err, -3.0),
    ])
}

fn covered_call() -> CliResult<Vec<Check>> {
    let mut excess: f64 = f64::NEG_INFINITY;
    let mut gap_ratio: f64 = 0.0;
    for r in [4.0, 1.1, 1.01] {
        let pos = Position::centered(1.0, 1.0, r)?;
        let mut sup_gap: f64 = 0.0;
        for i in 0..=500 {
            let (v, b) = covered_call_bound(&pos, i as f64 / 100.0)?;
            excess = excess.max(v - b);
            sup_gap = sup_gap.max(b - v);
        }
        if r == 1.01 {
            gap_ratio = sup_gap / pos.covered_call_count();
        }
    }
    Ok(vec![
        Check::at_most("covered_call_excess", excess.max(0.0), 0.0),
        Check::at_most("covered_call_gap_ratio_r1_01", gap_ratio, 0.01),
    ])
}

/// Runs every check with Monte Carlo streams keyed by `seed`.
pub fn run_checks(seed: u64) -> CliResult<Vec<Check>> {
    let mut out = Vec::new();
    out.extend(two_position_reserves()?);
    out.extend(cpmm_limit()?);
    out.extend(by_parts(seed)?);
    out.extend(riccati()?);
    out.extend(discounted()?);
    out.extend(regimes()?);
    out.extend(ergodic_mc(seed)?);
    out.extend(rho_limit()?);
    out.extend(reflection(seed)?);
    out.extend(myopic_refinement(seed)?);
    out.extend(lvr(seed)?);
    out.extend(covered_call()?);
    Ok(out)
}
