//! JSON run configuration. Every key is optional; missing keys fall back to
//! the bundled defaults.
use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::profile::{CountryKey, MarketParams, PymAssignment};
use crate::winwin::{CompensationBase, WinWinParams};
use crate::yields::DEFAULT_SHADE_YIELD_SLOPE;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub market: MarketParams,
    pub shade_yield_slope: f64,
    pub pym_intermediate: f64,
    pub pym_maximum: f64,
    pub adoption_rate: f64,
    /// Per-country multipliers that reproduce the published maximum-scenario additions.
    pub maximum_overrides: BTreeMap<CountryKey, f64>,
    /// Long-run prices quoted for the income tables, USD/kg.
    pub long_term_price_intermediate: f64,
    pub long_term_price_maximum: f64,
    pub gridline_step_days: u32,
    pub winwin: WinWinParams,
    pub winwin_base: CompensationBase,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            market: MarketParams::default(),
            shade_yield_slope: DEFAULT_SHADE_YIELD_SLOPE,
            pym_intermediate: 2.6,
            pym_maximum: 3.3,
            adoption_rate: 0.25,
            maximum_overrides: [("ivory coast", 4.9), ("ghana", 4.9)]
                .into_iter()
                .map(|(k, v)| (CountryKey::new(k), v))
                .collect(),
            long_term_price_intermediate: 1.89,
            long_term_price_maximum: 1.61,
            gridline_step_days: 10,
            winwin: WinWinParams::default(),
            winwin_base: CompensationBase::default(),
        }
    }
}

impl Config {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: Config = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Config::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        self.market.validate()?;
        self.winwin.validate()?;
        PymAssignment::uniform(self.pym_intermediate).validate()?;
        self.maximum_pym().validate()?;
        if !(0.0..=1.0).contains(&self.adoption_rate) {
            return Err(domain(format!("adoption rate {} is outside [0, 1]", self.adoption_rate)));
        }
        if !(self.shade_yield_slope > 0.0) {
            return Err(domain("shade_yield_slope must be positive"));
        }
        if self.gridline_step_days == 0 {
            return Err(domain("gridline_step_days must be positive"));
        }
        if !(self.long_term_price_intermediate > 0.0 && self.long_term_price_maximum > 0.0) {
            return Err(domain("long-term prices must be positive"));
        }
        Ok(())
    }

    /// Uniform maximum multiplier with the configured per-country overrides.
    pub fn maximum_pym(&self) -> PymAssignment {
        PymAssignment {
            default: Some(self.pym_maximum),
            overrides: self.maximum_overrides.clone(),
        }
    }
}
