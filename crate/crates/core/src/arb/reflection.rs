//! Two-sided Skorokhod reflection of the log mispricing.
//!
//! `Z = ln S − ln P` is kept inside `[ln γ, −ln γ]` by two regulators:
//! `G` pushes `Z` up at the lower edge (the pool price falls, the external
//! price being cheap) and `D` pushes it down at the upper edge (the pool
//! price rises). `ln P_n = ln P_0 + D_n − G_n`.

use crate::error::{invalid_param, Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ReflectedPath {
    pub half_width: f64,
    pub log_s: Vec<f64>,
    /// Mispricing after reflection.
    pub z: Vec<f64>,
    /// Mispricing before the clamp (`z_pre[0] = z[0]`).
    pub z_pre: Vec<f64>,
    /// Cumulative upward regulator.
    pub g: Vec<f64>,
    /// Cumulative downward regulator.
    pub d: Vec<f64>,
    pub log_pool_price: Vec<f64>,
}

impl ReflectedPath {
    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }

    pub fn lower(&self) -> f64 {
        -self.half_width
    }

    pub fn upper(&self) -> f64 {
        self.half_width
    }

    /// Increment of `G` over step `n` (from `n − 1` to `n`).
    pub fn dg(&self, n: usize) -> f64 {
        self.g[n] - self.g[n - 1]
    }

    pub fn dd(&self, n: usize) -> f64 {
        self.d[n] - self.d[n - 1]
    }

    pub fn pool_prices(&self) -> Vec<f64> {
        self.log_pool_price.iter().map(|v| v.exp()).collect()
    }

    /// Checks band containment, regulator monotonicity, boundary-only
    /// pushes and `Z_n = ln S_n − ln P_0 + G_n − D_n`. Returns the first
    /// violation as `(step, description)`.
    pub fn check_invariants(&self, tol: f64) -> std::result::Result<(), (usize, String)> {
        let (lo, hi) = (self.lower(), self.upper());
        let log_p0 = self.log_pool_price[0];
        for n in 0..self.len() {
            let z = self.z[n];
            if z < lo - tol || z > hi + tol {
                return Err((n, format!("Z = {z} outside [{lo}, {hi}]")));
            }
            let identity = self.log_s[n] - log_p0 + self.g[n] - self.d[n];
            if (z - identity).abs() > tol {
                return Err((n, format!("decomposition off by {}", z - identity)));
            }
            if n == 0 {
                continue;
            }
            let (dg, dd) = (self.dg(n), self.dd(n));
            if dg < -tol || dd < -tol {
                return Err((n, format!("regulator decreased: dG = {dg}, dD = {dd}")));
            }
            if dg > tol && (z - lo).abs() > tol {
                return Err((n, format!("dG = {dg} away from the lower edge (Z = {z})")));
            }
            if dd > tol && (z - hi).abs() > tol {
                return Err((n, format!("dD = {dd} away from the upper edge (Z = {z})")));
            }
        }
        Ok(())
    }
}

/// Reflects `log_s` in the band `[−half_width, half_width]` starting from
/// pool log-price `log_p0`.
pub fn reflect_band(log_s: &[f64], half_width: f64, log_p0: f64) -> Result<ReflectedPath> {
    let Some(&first) = log_s.first() else {
        return Err(invalid_param("log_s", "path is empty"));
    };
    let increments = log_s.windows(2).map(|w| w[1] - w[0]);
    reflect_steps(first, log_p0, increments, half_width, Some(log_s))
}

/// Reflection driven directly by log-price increments, starting from
/// `ln S_0 = z0`, `ln P_0 = 0`.
pub fn reflect_increments(z0: f64, increments: &[f64], half_width: f64) -> Result<ReflectedPath> {
    reflect_steps(z0, 0.0, increments.iter().copied(), half_width, None)
}

fn reflect_steps(
    log_s0: f64,
    log_p0: f64,
    increments: impl ExactSizeIterator<Item = f64>,
    half_width: f64,
    log_s: Option<&[f64]>,
) -> Result<ReflectedPath> {
    if !(half_width >= 0.0 && half_width.is_finite()) {
        return Err(invalid_param(
            "half_width",
            format!("{half_width} must be nonnegative"),
        ));
    }
    let z0 = log_s0 - log_p0;
    if z0.abs() > half_width {
        return Err(Error::Domain(format!(
            "initial mispricing {z0} outside the no-arbitrage band ±{half_width}"
        )));
    }
    let n = increments.len() + 1;
    let mut out = ReflectedPath {
        half_width,
        log_s: Vec::with_capacity(n),
        z: Vec::with_capacity(n),
        z_pre: Vec::with_capacity(n),
        g: Vec::with_capacity(n),
        d: Vec::with_capacity(n),
        log_pool_price: Vec::with_capacity(n),
    };
    out.log_s.push(log_s0);
    out.z.push(z0);
    out.z_pre.push(z0);
    out.g.push(0.0);
    out.d.push(0.0);
    out.log_pool_price.push(log_p0);
    let (mut z, mut g, mut d, mut ls) = (z0, 0.0, 0.0, log_s0);
    for (k, step) in increments.enumerate() {
        let pre = z + step;
        let push_down = (pre - half_width).max(0.0);
        let push_up = (-half_width - pre).max(0.0);
        z = pre.clamp(-half_width, half_width);
        d += push_down;
        g += push_up;
        ls = match log_s {
            Some(path) => path[k + 1],
            None => ls + step,
        };
        out.log_s.push(ls);
        out.z.push(z);
        out.z_pre.push(pre);
        out.g.push(g);
        out.d.push(d);
        out.log_pool_price.push(log_p0 + d - g);
    }
    Ok(out)
}

/// Reflection for fee tier `γ ∈ (0, 1]`, i.e. half-width `−ln γ`, with
/// initial pool price `p0`.
pub fn skorokhod_reflect(log_s: &[f64], gamma: f64, p0: f64) -> Result<ReflectedPath> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(invalid_param(
            "gamma",
            format!("{gamma} must lie in (0, 1]"),
        ));
    }
    if !(p0 > 0.0 && p0.is_finite()) {
        return Err(invalid_param("p0", format!("{p0} must be positive")));
    }
    // `0.0 - ln 1` is +0, keeping messages free of "-0".
    reflect_band(log_s, 0.0 - gamma.ln(), p0.ln())
}
