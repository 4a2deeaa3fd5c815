//! Parameter layering: command-line flags over a config file over defaults.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::{io_err, CliError, CliResult};

pub const OUT_ENV: &str = "CLMM_LAB_OUT";
pub const DEFAULT_OUT: &str = "clmm-lab-out";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CurveKind {
    /// Liquidity-profile pool (ticks, positions or uniform level).
    Clmm,
    /// Weighted geometric-mean pool.
    G3m,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeKind {
    Exact,
    Euler,
}

/// Every tunable. Unset flags fall back to the config file, then defaults.
#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    /// Output directory [default: $CLMM_LAB_OUT, else ./clmm-lab-out]
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Also write SVG line charts
    #[arg(long, global = true, num_args = 0..=1, default_missing_value = "true")]
    pub svg: Option<bool>,

    /// Drift of ln S (market paths) or of the mispricing (control) [0]
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub mu: Option<f64>,
    /// Volatility [0.2]
    #[arg(long, global = true)]
    pub sigma: Option<f64>,
    /// Time step [0.01]
    #[arg(long, global = true)]
    pub dt: Option<f64>,
    /// Horizon T [1]
    #[arg(long, global = true)]
    pub horizon: Option<f64>,
    /// Monte Carlo paths [1000]
    #[arg(long, global = true)]
    pub paths: Option<usize>,
    /// Random seed [42]
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Initial (or centre) price [1]
    #[arg(long, global = true)]
    pub price: Option<f64>,

    /// Fee factor γ in (0, 1] [0.997]
    #[arg(long, global = true)]
    pub gamma: Option<f64>,
    /// Control penalty λ [0.1]
    #[arg(long, global = true)]
    pub lambda: Option<f64>,
    /// Mispricing penalty τ [0.4]
    #[arg(long, global = true)]
    pub tau: Option<f64>,
    /// Discount rate ρ [0.1]
    #[arg(long, global = true)]
    pub rho: Option<f64>,
    /// Control simulation scheme [exact]
    #[arg(long, global = true, value_enum)]
    pub scheme: Option<SchemeKind>,

    /// Pool family [clmm]
    #[arg(long, global = true, value_enum)]
    pub curve: Option<CurveKind>,
    /// Uniform liquidity level, or position liquidity [10]
    #[arg(long, global = true)]
    pub liquidity: Option<f64>,
    /// G3M weight on the risky asset [0.5]
    #[arg(long, global = true)]
    pub weight: Option<f64>,
    /// Tick snapshot JSON defining the profile
    #[arg(long, global = true)]
    pub ticks: Option<PathBuf>,
    /// Positions as `liquidity:lower:upper,...`
    #[arg(long, global = true)]
    pub positions: Option<String>,
    /// Position lower price
    #[arg(long, global = true)]
    pub lower: Option<f64>,
    /// Position upper price
    #[arg(long, global = true)]
    pub upper: Option<f64>,
    /// Position half-width ratio √(upper/lower) when bounds are not given [2]
    #[arg(long, global = true)]
    pub ratio: Option<f64>,

    /// Price grid lower end [0.25]
    #[arg(long, global = true)]
    pub price_min: Option<f64>,
    /// Price grid upper end [4]
    #[arg(long, global = true)]
    pub price_max: Option<f64>,
    /// Grid points [201]
    #[arg(long, global = true)]
    pub points: Option<usize>,
}

/// Fully resolved parameters, echoed next to the outputs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Effective {
    pub command: String,
    pub out: PathBuf,
    pub svg: bool,
    pub mu: f64,
    pub sigma: f64,
    pub dt: f64,
    pub horizon: f64,
    pub paths: usize,
    pub seed: u64,
    pub price: f64,
    pub gamma: f64,
    pub lambda: f64,
    pub tau: f64,
    pub rho: f64,
    pub scheme: SchemeKind,
    pub curve: CurveKind,
    pub liquidity: f64,
    pub weight: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ticks: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub positions: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lower: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upper: Option<f64>,
    pub ratio: f64,
    pub price_min: f64,
    pub price_max: f64,
    pub points: usize,
}

impl Params {
    /// `self` wins wherever it is set.
    pub fn over(self, base: Params) -> Params {
        macro_rules! pick {
            ($($f:ident),*) => { Params { $($f: self.$f.or(base.$f)),* } };
        }
        pick!(
            out, svg, mu, sigma, dt, horizon, paths, seed, price, gamma, lambda, tau, rho, scheme,
            curve, liquidity, weight, ticks, positions, lower, upper, ratio, price_min, price_max,
            points
        )
    }

    pub fn resolve(self, command: &str, env_out: Option<PathBuf>) -> Effective {
        Effective {
            command: command.to_string(),
            out: self
                .out
                .or(env_out)
                .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT)),
            svg: self.svg.unwrap_or(false),
            mu: self.mu.unwrap_or(0.0),
            sigma: self.sigma.unwrap_or(0.2),
            dt: self.dt.unwrap_or(0.01),
            horizon: self.horizon.unwrap_or(1.0),
            paths: self.paths.unwrap_or(1000),
            seed: self.seed.unwrap_or(42),
            price: self.price.unwrap_or(1.0),
            gamma: self.gamma.unwrap_or(0.997),
            lambda: self.lambda.unwrap_or(0.1),
            tau: self.tau.unwrap_or(0.4),
            rho: self.rho.unwrap_or(0.1),
            scheme: self.scheme.unwrap_or(SchemeKind::Exact),
            curve: self.curve.unwrap_or(CurveKind::Clmm),
            liquidity: self.liquidity.unwrap_or(10.0),
            weight: self.weight.unwrap_or(0.5),
            ticks: self.ticks,
            positions: self.positions,
            lower: self.lower,
            upper: self.upper,
            ratio: self.ratio.unwrap_or(2.0),
            price_min: self.price_min.unwrap_or(0.25),
            price_max: self.price_max.unwrap_or(4.0),
            points: self.points.unwrap_or(201),
        }
    }
}

/// Reads a `.json` file as JSON and anything else as TOML.
pub fn load_file(path: &Path) -> CliResult<Params> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    let is_json = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("json"));
    let parsed = if is_json {
        serde_json::from_str(&text).map_err(|e| e.to_string())
    } else {
        toml::from_str(&text).map_err(|e| e.to_string())
    };
    parsed.map_err(|message| CliError::Config {
        path: path.to_path_buf(),
        message,
    })
}

impl Effective {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("effective config is plain data")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cli_beats_file_beats_default() {
        let cli = Params {
            lambda: Some(0.3),
            ..Params::default()
        };
        let file = Params {
            lambda: Some(0.2),
            tau: Some(0.5),
            ..Params::default()
        };
        let eff = cli.over(file).resolve("x", None);
        assert_eq!((eff.lambda, eff.tau, eff.rho), (0.3, 0.5, 0.1));
        assert_eq!(eff.out, PathBuf::from(DEFAULT_OUT));
    }

    #[test]
    fn env_out_is_only_a_default() {
        let file = Params {
            out: Some("from-file".into()),
            ..Params::default()
        };
        let eff = Params::default()
            .over(file)
            .resolve("x", Some("from-env".into()));
        assert_eq!(eff.out, PathBuf::from("from-file"));
        let eff = Params::default().resolve("x", Some("from-env".into()));
        assert_eq!(eff.out, PathBuf::from("from-env"));
    }

    #[test]
    fn file_formats() {
        let dir = std::env::temp_dir().join(format!("clmm-lab-config-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let t = dir.join("c.toml");
        std::fs::write(&t, "sigma = 0.3\ncurve = \"g3m\"\n").unwrap();
        let p = load_file(&t).unwrap();
        assert_eq!((p.sigma, p.curve), (Some(0.3), Some(CurveKind::G3m)));
        let j = dir.join("c.json");
        std::fs::write(&j, r#"{"seed": 9}"#).unwrap();
        assert_eq!(load_file(&j).unwrap().seed, Some(9));
        std::fs::write(&t, "sigmaa = 0.3\n").unwrap();
        assert!(matches!(load_file(&t), Err(CliError::Config { .. })));
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn effective_echo_is_toml() {
        let eff = Params::default().resolve("pool", None);
        let text = eff.to_toml();
        assert!(text.contains("command = \"pool\""));
        assert!(text.contains("curve = \"clmm\""));
    }
}
