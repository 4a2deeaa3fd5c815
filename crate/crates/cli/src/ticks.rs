//! Tick snapshot ingestion.
//!
//! Schema: `{"base": 1.0001, "ticks": [[tick, liquidity], ...]}`. Entry `i`
//! sets the level on `[base^tick_i, base^tick_{i+1})`; a nonzero last level
//! extends to infinity.

use std::path::Path;

use clmm_lab::liquidity::LiquidityProfile;
use serde::Deserialize;

use crate::error::{io_err, CliError, CliResult};

pub const DEFAULT_BASE: f64 = 1.0001;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TickSnapshot {
    #[serde(default = "default_base")]
    pub base: f64,
    pub ticks: Vec<(i64, f64)>,
}

fn default_base() -> f64 {
    DEFAULT_BASE
}

/// Line and column (1-based) of each `[tick, liquidity]` entry in `text`.
fn entry_positions(text: &str) -> Vec<(usize, usize)> {
    let Some(start) = text.find("\"ticks\"") else {
        return Vec::new();
    };
    let mut out = Vec::new();
    let (mut line, mut col) = (1, 1);
    let mut depth = 0usize;
    let mut opened = false;
    for (i, ch) in text.char_indices() {
        if i >= start {
            match ch {
                '[' => {
                    depth += 1;
                    if depth == 1 {
                        opened = true;
                    } else if depth == 2 {
                        out.push((line, col));
                    }
                }
                ']' => {
                    depth = depth.saturating_sub(1);
                    if opened && depth == 0 {
                        break;
                    }
                }
                _ => {}
            }
        }
        if ch == '\n' {
            line += 1;
            col = 1;
        } else {
            col += 1;
        }
    }
    out
}

pub fn parse_ticks(text: &str) -> CliResult<TickSnapshot> {
    let snap: TickSnapshot = serde_json::from_str(text).map_err(|e| CliError::Ticks {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let positions = entry_positions(text);
    let at = |i: usize, message: String| {
        let (line, column) = positions.get(i).copied().unwrap_or((0, 0));
        CliError::Ticks {
            line,
            column,
            message,
        }
    };
    if !(snap.base > 1.0 && snap.base.is_finite()) {
        return Err(CliError::Ticks {
            line: 1,
            column: 1,
            message: format!("base must be greater than 1, got {}", snap.base),
        });
    }
    for (i, &(tick, liq)) in snap.ticks.iter().enumerate() {
        if !(liq >= 0.0 && liq.is_finite()) {
            return Err(at(
                i,
                format!("entry {i}: liquidity must be nonnegative, got {liq}"),
            ));
        }
        if i > 0 && tick <= snap.ticks[i - 1].0 {
            return Err(at(
                i,
                format!(
                    "entry {i}: tick {tick} does not exceed the previous tick {}",
                    snap.ticks[i - 1].0
                ),
            ));
        }
    }
    Ok(snap)
}

impl TickSnapshot {
    pub fn to_profile(&self) -> CliResult<LiquidityProfile> {
        let mut ticks = self.ticks.as_slice();
        while let Some((&(_, liq), rest)) = ticks.split_last() {
            if liq != 0.0 {
                break;
            }
            ticks = rest;
        }
        if ticks.is_empty() {
            return Ok(LiquidityProfile::empty());
        }
        let mut breakpoints: Vec<f64> = ticks
            .iter()
            .map(|&(t, _)| self.base.powf(t as f64))
            .collect();
        let levels: Vec<f64> = ticks.iter().map(|&(_, l)| l).collect();
        match self.ticks.get(ticks.len()) {
            // trailing zero entry closes the last range
            Some(&(t, _)) => breakpoints.push(self.base.powf(t as f64)),
            None => breakpoints.push(f64::INFINITY),
        }
        Ok(LiquidityProfile::from_steps(breakpoints, levels)?)
    }
}

pub fn load_profile(path: &Path) -> CliResult<LiquidityProfile> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    parse_ticks(&text)?.to_profile()
}
