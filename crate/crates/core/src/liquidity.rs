//! Liquidity profiles as right-continuous step functions of price, with an
//! optional smooth density component.
//!
//! The distributional derivative of a step profile is a finite set of signed
//! atoms located at the breakpoints. Reserves follow from
//!
//! ```text
//! x(P) = 1/2 ∫_P^∞ ℓ(p) p^{-3/2} dp,     y(P) = 1/2 ∫_0^P ℓ(p) p^{-1/2} dp
//! ```
//!
//! The step part is integrated piece by piece with the antiderivatives
//! `-2 p^{-1/2}` and `2 p^{1/2}`. The density part is integrated in the
//! transformed variables `s = p^{-1/2}` (for x) and `t = p^{1/2}` (for y),
//! where both integrals become `∫ ℓ(1/s²) ds` and `∫ ℓ(t²) dt` over finite
//! ranges even when the support is unbounded.

use std::fmt;
use std::sync::Arc;

use crate::clmm::Position;
use crate::error::{Error, Result};
use crate::quadrature::{self, QuadOptions};

type DensityFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Smooth, bounded, nonnegative liquidity density with declared support
/// `[lower, upper]` (`upper` may be `+∞`).
///
/// The density is assumed strictly positive on the interior of its support.
#[derive(Clone)]
pub struct SmoothDensity {
    f: DensityFn,
    lower: f64,
    upper: f64,
    label: String,
}

impl fmt::Debug for SmoothDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SmoothDensity")
            .field("label", &self.label)
            .field("lower", &self.lower)
            .field("upper", &self.upper)
            .finish()
    }
}

impl SmoothDensity {
    pub fn new<F>(label: impl Into<String>, lower: f64, upper: f64, f: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !(lower >= 0.0 && lower.is_finite() && upper > lower) {
            return Err(Error::InvalidProfile(format!(
                "density support [{lower}, {upper}] is not a nonempty subset of [0, ∞]"
            )));
        }
        Ok(Self {
            f: Arc::new(f),
            lower,
            upper,
            label: label.into(),
        })
    }

    /// `scale` times the χ² density with three degrees of freedom.
    pub fn chi_squared_3(scale: f64) -> Result<Self> {
        if !(scale >= 0.0 && scale.is_finite()) {
            return Err(Error::InvalidProfile(format!(
                "density scale must be finite and nonnegative, got {scale}"
            )));
        }
        let norm = scale / (2.0 * std::f64::consts::PI).sqrt();
        Self::new("chi2(3)", 0.0, f64::INFINITY, move |p: f64| {
            norm * p.sqrt() * (-0.5 * p).exp()
        })
    }

    /// Constant density on `[lower, upper]`.
    pub fn constant(level: f64, lower: f64, upper: f64) -> Result<Self> {
        if !(level >= 0.0 && level.is_finite()) {
            return Err(Error::InvalidProfile(format!(
                "density level must be finite and nonnegative, got {level}"
            )));
        }
        Self::new(format!("const({level})"), lower, upper, move |_| level)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn support(&self) -> (f64, f64) {
        (self.lower, self.upper)
    }

    pub fn value(&self, p: f64) -> f64 {
        if p < self.lower || p > self.upper {
            0.0
        } else {
            (self.f)(p)
        }
    }

    fn scaled(&self, alpha: f64) -> Self {
        let f = Arc::clone(&self.f);
        Self {
            f: Arc::new(move |p| alpha * f(p)),
            lower: self.lower,
            upper: self.upper,
            label: format!("{alpha}*{}", self.label),
        }
    }

    fn sum(&self, other: &Self) -> Self {
        let (a, b) = (self.clone(), other.clone());
        Self {
            lower: self.lower.min(other.lower),
            upper: self.upper.max(other.upper),
            label: format!("{}+{}", self.label, other.label),
            f: Arc::new(move |p| a.value(p) + b.value(p)),
        }
    }
}

/// A single atom of the measure `dℓ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub location: f64,
    pub mass: f64,
}

/// Signed atoms of `dℓ` for the step component, plus the level `ℓ(0+)` so
/// that the profile is the cumulative sum of the atoms.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SignedAtomSet {
    pub initial_level: f64,
    pub atoms: Vec<Atom>,
}

impl SignedAtomSet {
    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.mass).sum()
    }

    /// Right-continuous cumulative distribution `ℓ(0+) + Σ_{k ≤ p} mass_k`.
    pub fn cdf(&self, p: f64) -> f64 {
        self.initial_level
            + self
                .atoms
                .iter()
                .take_while(|a| a.location <= p)
                .map(|a| a.mass)
                .sum::<f64>()
    }
}

/// Liquidity as a function of price.
///
/// The step component is `levels[i]` on `[breakpoints[i], breakpoints[i+1])`.
/// The first breakpoint may be `0` and the last may be `+∞`.
#[derive(Debug, Clone)]
pub struct LiquidityProfile {
    breakpoints: Vec<f64>,
    levels: Vec<f64>,
    density: Option<SmoothDensity>,
    quad: QuadOptions,
}

impl Default for LiquidityProfile {
    fn default() -> Self {
        Self::empty()
    }
}

impl LiquidityProfile {
    /// `ℓ ≡ 0`.
    pub fn empty() -> Self {
        Self {
            breakpoints: Vec::new(),
            levels: Vec::new(),
            density: None,
            quad: QuadOptions::default(),
        }
    }

    /// Constant liquidity on the full price range, i.e. a constant-product pool.
    pub fn uniform(level: f64) -> Result<Self> {
        Self::from_steps(vec![0.0, f64::INFINITY], vec![level])
    }

    pub fn from_steps(breakpoints: Vec<f64>, levels: Vec<f64>) -> Result<Self> {
        if breakpoints.is_empty() && levels.is_empty() {
            return Ok(Self::empty());
        }
        if breakpoints.len() < 2 || levels.len() + 1 != breakpoints.len() {
            return Err(Error::InvalidProfile(format!(
                "{} breakpoints need {} levels, got {}",
                breakpoints.len(),
                breakpoints.len().saturating_sub(1),
                levels.len()
            )));
        }
        if breakpoints[0].is_nan() || breakpoints[0] < 0.0 {
            return Err(Error::InvalidProfile(format!(
                "first breakpoint must be >= 0, got {}",
                breakpoints[0]
            )));
        }
        for (i, w) in breakpoints.windows(2).enumerate() {
            if !(w[1] > w[0]) {
                return Err(Error::InvalidProfile(format!(
                    "breakpoints must be strictly increasing: b[{i}] = {} , b[{}] = {}",
                    w[0],
                    i + 1,
                    w[1]
                )));
            }
        }
        if breakpoints[..breakpoints.len() - 1]
            .iter()
            .any(|b| !b.is_finite())
        {
            return Err(Error::InvalidProfile(
                "only the last breakpoint may be infinite".into(),
            ));
        }
        if let Some((i, l)) = levels
            .iter()
            .enumerate()
            .find(|(_, l)| !(l.is_finite() && **l >= 0.0))
        {
            return Err(Error::InvalidProfile(format!(
                "level {i} must be finite and nonnegative, got {l}"
            )));
        }
        Ok(Self {
            breakpoints,
            levels,
            density: None,
            quad: QuadOptions::default(),
        })
    }

    /// Pure density profile.
    pub fn from_density(density: SmoothDensity) -> Self {
        Self::empty().with_density(density)
    }

    pub fn with_density(mut self, density: SmoothDensity) -> Self {
        self.density = Some(match self.density.take() {
            Some(existing) => existing.sum(&density),
            None => density,
        });
        self
    }

    /// Relative tolerance used by the density quadrature.
    pub fn with_tolerance(mut self, rel_tol: f64) -> Self {
        self.quad.rel_tol = rel_tol;
        self
    }

    pub fn tolerance(&self) -> f64 {
        self.quad.rel_tol
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn density(&self) -> Option<&SmoothDensity> {
        self.density.as_ref()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.iter().all(|&l| l == 0.0) && self.density.is_none()
    }

    /// `α·self + β·other` for nonnegative weights.
    pub fn combine(alpha: f64, a: &Self, beta: f64, b: &Self) -> Result<Self> {
        if !(alpha >= 0.0 && beta >= 0.0) {
            return Err(Error::InvalidProfile(
                "combination weights must be nonnegative".into(),
            ));
        }
        let mut nodes: Vec<f64> = a
            .breakpoints
            .iter()
            .chain(b.breakpoints.iter())
            .copied()
            .collect();
        nodes.sort_by(f64::total_cmp);
        nodes.dedup();
        let levels = nodes
            .windows(2)
            .map(|w| alpha * a.step_value(w[0]) + beta * b.step_value(w[0]))
            .collect();
        let mut out = if nodes.is_empty() {
            Self::empty()
        } else {
            Self::from_steps(nodes, levels)?
        };
        out.density = match (&a.density, &b.density) {
            (Some(da), Some(db)) => Some(da.scaled(alpha).sum(&db.scaled(beta))),
            (Some(da), None) => Some(da.scaled(alpha)),
            (None, Some(db)) => Some(db.scaled(beta)),
            (None, None) => None,
        };
        out.quad = a.quad;
        Ok(out)
    }

    fn step_value(&self, p: f64) -> f64 {
        let idx = self.breakpoints.partition_point(|&b| b <= p);
        if idx == 0 || idx > self.levels.len() {
            0.0
        } else {
            self.levels[idx - 1]
        }
    }

    /// Right-continuous point evaluation `ℓ(p)`.
    pub fn value(&self, p: f64) -> Result<f64> {
        check_price(p)?;
        Ok(self.step_value(p) + self.density.as_ref().map_or(0.0, |d| d.value(p)))
    }

    /// Atoms of `dℓ` for the step component (density atoms are empty).
    /// Breakpoints at `0` or `+∞` carry no atom; the level at `0+` is
    /// recorded separately.
    pub fn atoms(&self) -> SignedAtomSet {
        let mut atoms = Vec::new();
        let mut initial_level = 0.0;
        for (i, &b) in self.breakpoints.iter().enumerate() {
            let left = if i == 0 { 0.0 } else { self.levels[i - 1] };
            let right = self.levels.get(i).copied().unwrap_or(0.0);
            if b == 0.0 {
                initial_level = right;
                continue;
            }
            if !b.is_finite() {
                continue;
            }
            let mass = right - left;
            if mass != 0.0 {
                atoms.push(Atom { location: b, mass });
            }
        }
        SignedAtomSet {
            initial_level,
            atoms,
        }
    }

    /// Reserves `(x, y)` at price `P`.
    pub fn reserves(&self, price: f64) -> Result<(f64, f64)> {
        check_price(price)?;
        let (xs, ys) = self.step_reserves(price);
        let (xd, yd) = self.density_reserves(price)?;
        Ok((xs + xd, ys + yd))
    }

    /// Closed-form reserves of the step component.
    pub fn step_reserves(&self, price: f64) -> (f64, f64) {
        let mut x = 0.0;
        let mut y = 0.0;
        for (w, &level) in self.breakpoints.windows(2).zip(&self.levels) {
            if level == 0.0 {
                continue;
            }
            let (a, b) = (w[0], w[1]);
            if b > price {
                x += level * (1.0 / a.max(price).sqrt() - 1.0 / b.sqrt());
            }
            if a < price {
                y += level * (b.min(price).sqrt() - a.sqrt());
            }
        }
        (x, y)
    }

    /// Reserves of the step component via the atoms of `dℓ`:
    /// `x = ℓ(P)/√P + Σ_{k>P} m_k/√k`, `y = ℓ(P)√P − Σ_{k≤P} m_k √k`.
    pub fn step_reserves_by_parts(&self, price: f64) -> (f64, f64) {
        let level = self.step_value(price);
        let root = price.sqrt();
        let atoms = self.atoms();
        let (mut x, mut y) = (level / root, level * root);
        for a in &atoms.atoms {
            if a.location > price {
                x += a.mass / a.location.sqrt();
            } else {
                y -= a.mass * a.location.sqrt();
            }
        }
        (x, y)
    }

    fn density_reserves(&self, price: f64) -> Result<(f64, f64)> {
        let Some(d) = &self.density else {
            return Ok((0.0, 0.0));
        };
        let (lo, hi) = d.support();
        let x = if price.max(lo) < hi {
            let s_lo = if hi.is_finite() { 1.0 / hi.sqrt() } else { 0.0 };
            let s_hi = 1.0 / price.max(lo).sqrt();
            quadrature::integrate(|s| d.value(1.0 / (s * s)), s_lo, s_hi, &[], self.quad)?.value
        } else {
            0.0
        };
        let y = if price.min(hi) > lo {
            quadrature::integrate(
                |t| d.value(t * t),
                lo.sqrt(),
                price.min(hi).sqrt(),
                &[],
                self.quad,
            )?
            .value
        } else {
            0.0
        };
        Ok((x, y))
    }

    /// Checks that `ℓ > 0` on the open interval between `a` and `b`;
    /// reports the first zero-liquidity stretch otherwise.
    pub fn check_positive_between(&self, a: f64, b: f64) -> Result<()> {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        if lo == hi {
            return Ok(());
        }
        let mut nodes: Vec<f64> = self
            .breakpoints
            .iter()
            .copied()
            .chain(self.density.iter().flat_map(|d| [d.lower, d.upper]))
            .filter(|&p| p > lo && p < hi)
            .collect();
        nodes.push(lo);
        nodes.push(hi);
        nodes.sort_by(f64::total_cmp);
        nodes.dedup();
        // merge adjacent empty stretches into one reported gap
        let mut gap: Option<(f64, f64)> = None;
        for w in nodes.windows(2) {
            let mid = if w[1].is_finite() {
                0.5 * (w[0] + w[1])
            } else {
                2.0 * w[0] + 1.0
            };
            let empty = self.step_value(mid) <= 0.0
                && self.density.as_ref().is_none_or(|d| d.value(mid) <= 0.0);
            match (&mut gap, empty) {
                (Some(g), true) => g.1 = w[1],
                (None, true) => gap = Some((w[0], w[1])),
                (Some(_), false) => break,
                (None, false) => {}
            }
        }
        match gap {
            Some((lower, upper)) => Err(Error::InsufficientLiquidity { lower, upper }),
            None => Ok(()),
        }
    }

    /// Curvature `d²y/dx² = 2 P^{3/2} / ℓ(P)` of the aggregate reserve curve.
    pub fn curvature(&self, price: f64) -> Result<f64> {
        let l = self.value(price)?;
        if l <= 0.0 {
            return Err(Error::InsufficientLiquidity {
                lower: price,
                upper: price,
            });
        }
        Ok(2.0 * price.powf(1.5) / l)
    }
}

/// Builds `Σ ℓ_i 1_{[p_l_i, p_u_i)}` from LP positions.
pub fn profile_from_positions(positions: &[Position]) -> Result<LiquidityProfile> {
    for (index, p) in positions.iter().enumerate() {
        p.validate()
            .map_err(|reason| Error::InvalidPosition { index, reason })?;
    }
    let mut nodes: Vec<f64> = positions.iter().flat_map(|p| [p.lower, p.upper]).collect();
    if nodes.is_empty() {
        return Ok(LiquidityProfile::empty());
    }
    nodes.sort_by(f64::total_cmp);
    nodes.dedup();
    let levels = nodes
        .windows(2)
        .map(|w| {
            positions
                .iter()
                .filter(|p| p.lower <= w[0] && w[0] < p.upper)
                .map(|p| p.liquidity)
                .sum()
        })
        .collect();
    LiquidityProfile::from_steps(nodes, levels)
}

pub(crate) fn check_price(p: f64) -> Result<()> {
    if p > 0.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "price must be positive and finite, got {p}"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_positions() -> LiquidityProfile {
        profile_from_positions(&[
            Position::new(10.0, 1.0, 4.0).unwrap(),
            Position::new(20.0, 4.0, 9.0).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn single_position_profile() {
        let p = profile_from_positions(&[Position::new(10.0, 0.4, 2.5).unwrap()]).unwrap();
        assert_eq!(p.breakpoints(), &[0.4, 2.5]);
        assert_eq!(p.levels(), &[10.0]);
        assert_eq!(p.value(0.39).unwrap(), 0.0);
        assert_eq!(p.value(0.4).unwrap(), 10.0);
        assert_eq!(p.value(2.5).unwrap(), 0.0);
    }

    #[test]
    fn adjacent_positions() {
        let p = two_positions();
        assert_eq!(p.breakpoints(), &[1.0, 4.0, 9.0]);
        assert_eq!(p.levels(), &[10.0, 20.0]);
        assert_eq!(p.value(4.0).unwrap(), 20.0);
        assert_eq!(p.value(9.0).unwrap(), 0.0);
    }

    #[test]
    fn overlapping_positions_add_pointwise() {
        let positions = [
            Position::new(5.0, 1.0, 4.0).unwrap(),
            Position::new(5.0, 2.0, 8.0).unwrap(),
        ];
        let p = profile_from_positions(&positions).unwrap();
        assert_eq!(p.levels(), &[5.0, 10.0, 5.0]);
        // oracle: sum of indicators at sample prices
        for q in [0.5, 1.0, 1.5, 2.0, 3.9, 4.0, 7.99, 8.0, 20.0] {
            let expected: f64 = positions
                .iter()
                .filter(|pos| pos.lower <= q && q < pos.upper)
                .map(|pos| pos.liquidity)
                .sum();
            assert_eq!(p.value(q).unwrap(), expected, "at {q}");
        }
    }

    #[test]
    fn invalid_positions_are_named() {
        let bad = Position {
            liquidity: 1.0,
            lower: 3.0,
            upper: 2.0,
        };
        let good = Position::new(1.0, 1.0, 2.0).unwrap();
        let err = profile_from_positions(&[good, bad]).unwrap_err();
        assert!(matches!(err, Error::InvalidPosition { index: 1, .. }));
        let neg = Position {
            liquidity: -1.0,
            lower: 1.0,
            upper: 2.0,
        };
        assert!(matches!(
            profile_from_positions(&[neg]).unwrap_err(),
            Error::InvalidPosition { index: 0, .. }
        ));
    }

    #[test]
    fn point_evaluation() {
        let u = LiquidityProfile::uniform(7.0).unwrap();
        assert_eq!(u.value(123.0).unwrap(), 7.0);
        assert!(matches!(u.value(0.0), Err(Error::Domain(_))));
        assert!(matches!(u.value(-1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn atoms_of_profiles() {
        let single = profile_from_positions(&[Position::new(3.0, 0.5, 2.0).unwrap()]).unwrap();
        assert_eq!(
            single.atoms().atoms,
            vec![
                Atom {
                    location: 0.5,
                    mass: 3.0
                },
                Atom {
                    location: 2.0,
                    mass: -3.0
                }
            ]
        );
        let two = two_positions().atoms();
        assert_eq!(
            two.atoms,
            vec![
                Atom {
                    location: 1.0,
                    mass: 10.0
                },
                Atom {
                    location: 4.0,
                    mass: 10.0
                },
                Atom {
                    location: 9.0,
                    mass: -20.0
                }
            ]
        );
        assert_eq!(two.total_mass(), 0.0);
        let uniform = LiquidityProfile::uniform(5.0).unwrap().atoms();
        assert!(uniform.atoms.is_empty());
        assert_eq!(uniform.initial_level, 5.0);
    }

    #[test]
    fn atoms_rebuild_the_profile() {
        let p = profile_from_positions(&[
            Position::new(5.0, 1.0, 4.0).unwrap(),
            Position::new(2.5, 2.0, 8.0).unwrap(),
            Position::new(1.0, 0.3, 20.0).unwrap(),
        ])
        .unwrap();
        let atoms = p.atoms();
        for &b in p.breakpoints() {
            for q in [b * (1.0 - 1e-9), b, b * (1.0 + 1e-9)] {
                assert_eq!(atoms.cdf(q), p.value(q).unwrap());
            }
        }
    }

    #[test]
    fn two_position_reserve_cases() {
        let p = two_positions();
        let (a, b, c, k1, k2) = (1.0f64, 4.0f64, 9.0f64, 10.0, 20.0);
        let case = |q: f64| -> (f64, f64) {
            if q >= c {
                (0.0, k1 * (b.sqrt() - a.sqrt()) + k2 * (c.sqrt() - b.sqrt()))
            } else if q >= b {
                (
                    k2 * (1.0 / q.sqrt() - 1.0 / c.sqrt()),
                    k1 * (b.sqrt() - a.sqrt()) + k2 * (q.sqrt() - b.sqrt()),
                )
            } else if q >= a {
                (
                    k1 * (1.0 / q.sqrt() - 1.0 / b.sqrt()) + k2 * (1.0 / b.sqrt() - 1.0 / c.sqrt()),
                    k1 * (q.sqrt() - a.sqrt()),
                )
            } else {
                (k1 / a.sqrt() + (k2 - k1) / b.sqrt() - k2 / c.sqrt(), 0.0)
            }
        };
        assert_eq!(p.reserves(9.0).unwrap(), (0.0, 30.0));
        let (x, y) = p.reserves(0.5).unwrap();
        assert!((x - 25.0 / 3.0).abs() < 1e-12 && y == 0.0);
        for q in [0.2, 0.99, 1.0, 2.0, 3.99, 4.0, 6.0, 8.999, 9.0, 50.0] {
            let (x, y) = p.reserves(q).unwrap();
            let (ex, ey) = case(q);
            assert!((x - ex).abs() < 1e-12 && (y - ey).abs() < 1e-12, "at {q}");
        }
    }

    #[test]
    fn uniform_is_constant_product() {
        let p = LiquidityProfile::uniform(10.0).unwrap();
        for q in [1e-3, 0.25, 1.0, 4.0, 1e4] {
            let (x, y) = p.reserves(q).unwrap();
            assert!((x - 10.0 / q.sqrt()).abs() <= 1e-12 * x);
            assert!((y - 10.0 * q.sqrt()).abs() <= 1e-12 * y);
        }
    }

    #[test]
    fn density_quadrature_matches_step_equivalent() {
        let step = profile_from_positions(&[Position::new(3.0, 0.5, 6.0).unwrap()]).unwrap();
        let dens = LiquidityProfile::from_density(SmoothDensity::constant(3.0, 0.5, 6.0).unwrap());
        for q in [0.1, 0.5, 1.7, 6.0, 7.0] {
            let (xs, ys) = step.reserves(q).unwrap();
            let (xd, yd) = dens.reserves(q).unwrap();
            assert!(
                (xs - xd).abs() <= 1e-10 * xs.max(1e-300) + 1e-15,
                "x at {q}"
            );
            assert!(
                (ys - yd).abs() <= 1e-10 * ys.max(1e-300) + 1e-15,
                "y at {q}"
            );
        }
    }

    #[test]
    fn chi_squared_reserves_match_special_functions() {
        // For the χ²₃ density the integrands reduce to exponentials:
        // y(2) = c (1 − e^{-1}),  x(2) = (c/2) E₁(1),  c = scale/√(2π).
        let scale = 100.0;
        let c = scale / (2.0 * std::f64::consts::PI).sqrt();
        const E1_OF_ONE: f64 = 0.219_383_934_395_520_27;
        let prof = LiquidityProfile::from_density(SmoothDensity::chi_squared_3(scale).unwrap());
        let (x, y) = prof.reserves(2.0).unwrap();
        let (ex, ey) = (0.5 * c * E1_OF_ONE, c * (1.0 - (-1f64).exp()));
        assert!((x - ex).abs() < 1e-10 * ex, "{x} vs {ex}");
        assert!((y - ey).abs() < 1e-10 * ey, "{y} vs {ey}");
    }

    #[test]
    fn liquidity_gaps_are_reported() {
        let p = profile_from_positions(&[
            Position::new(1.0, 1.0, 2.0).unwrap(),
            Position::new(1.0, 3.0, 4.0).unwrap(),
        ])
        .unwrap();
        assert!(p.check_positive_between(1.0, 2.0).is_ok());
        assert_eq!(
            p.check_positive_between(1.5, 3.5).unwrap_err(),
            Error::InsufficientLiquidity {
                lower: 2.0,
                upper: 3.0
            }
        );
        assert!(p.check_positive_between(3.9, 5.0).is_err());
    }

    #[test]
    fn curvature_is_positive() {
        let p = LiquidityProfile::uniform(10.0).unwrap();
        assert!((p.curvature(4.0).unwrap() - 2.0 * 8.0 / 10.0).abs() < 1e-15);
        assert!(LiquidityProfile::empty().curvature(1.0).is_err());
    }

    #[test]
    fn bad_step_inputs() {
        assert!(LiquidityProfile::from_steps(vec![1.0, 1.0], vec![1.0]).is_err());
        assert!(LiquidityProfile::from_steps(vec![1.0, 2.0], vec![-1.0]).is_err());
        assert!(LiquidityProfile::from_steps(vec![1.0, 2.0, 3.0], vec![1.0]).is_err());
        assert!(
            LiquidityProfile::from_steps(vec![1.0, f64::INFINITY, 3.0], vec![1.0, 1.0]).is_err()
        );
    }
}
