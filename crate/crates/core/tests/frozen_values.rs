//! Reference values computed offline with a 30-digit ODE solver and
//! closed forms, frozen here. They guard against silent drift in the
//! solvers.

use clmm_lab::arb::{solve_discounted, solve_ergodic, solve_finite, ControlParams};
use clmm_lab::cfmm::G3mCurve;

fn params() -> ControlParams {
    ControlParams {
        mu: 0.05,
        sigma: 0.2,
        lambda: 0.1,
        tau: 0.4,
        rho: 0.1,
        horizon: 1.0,
    }
}

fn close(got: f64, want: f64, tol: f64) {
    assert!(
        (got - want).abs() <= tol,
        "got {got}, want {want} (tol {tol})"
    );
}

#[test]
fn finite_horizon_coefficients() {
    let v = solve_finite(&params()).unwrap();
    // (t, h2, h1, h0)
    let table = [
        (
            0.5,
            0.760_331_565_233_813_3,
            0.008_784_056_537_522_587,
            0.006_156_277_418_113_278,
        ),
        (
            0.0,
            0.795_055_454_624_628,
            0.015_137_739_697_571_763,
            0.014_686_674_302_145_898,
        ),
    ];
    for (t, h2, h1, h0) in table {
        let c = v.coefficients(t).unwrap();
        close(c.h2, h2, 1e-13);
        close(c.h1, h1, 1e-13);
        close(c.h0, h0, 1e-12);
    }
}

#[test]
fn discounted_coefficients() {
    let c = solve_discounted(&params()).unwrap().coefficients;
    close(c.h2, 0.781_337_307_536_549_6, 1e-14);
    close(c.h1, 0.017_084_931_938_808_49, 1e-14);
    close(c.h0, 0.179_404_672_444_400_1, 1e-13);
}

#[test]
fn ergodic_constant() {
    let e = solve_ergodic(&params()).unwrap();
    close(e.coefficients.h2, 0.8, 1e-15);
    close(e.coefficients.h1, 0.02, 1e-15);
    close(e.eta_hjb, 0.019, 1e-15);
    let quiet = solve_ergodic(&ControlParams::default()).unwrap();
    close(quiet.eta_hjb, 0.016, 1e-15);
    close(quiet.eta_reference, 0.02, 1e-15);
}

#[test]
fn weighted_pool_reserves() {
    let (x, y) = G3mCurve::new(0.3, 5.0)
        .unwrap()
        .reserves_from_price(2.0)
        .unwrap();
    close(x, 1.700_847_036_555_965_8, 1e-13);
    close(y, 7.937_286_170_594_507, 1e-13);
}
