//! Pollination-yield multipliers and the shade-cover equivalence.
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::profile::{baseline_production, CountryProfile};

/// Default linear shade-yield decline coefficient.
pub const DEFAULT_SHADE_YIELD_SLOPE: f64 = 0.962;

/// Dry yield under a pollination-yield multiplier.
pub fn apply_pym(yield_dry_kg_ha: f64, pym: f64) -> Result<f64> {
    if !(pym >= 1.0) {
        return Err(domain(format!("multiplier {pym} would not increase yield")));
    }
    if !(yield_dry_kg_ha >= 0.0) {
        return Err(domain(format!("dry yield {yield_dry_kg_ha} is negative")));
    }
    Ok(yield_dry_kg_ha * pym)
}

/// Extra national production (tonnes) when `adoption` of farmers hand-pollinate.
pub fn country_addition(profile: &CountryProfile, pym: f64, adoption: f64) -> Result<f64> {
    if !(pym >= 1.0) {
        return Err(domain(format!("multiplier {pym} would not increase yield")));
    }
    if !(0.0..=1.0).contains(&adoption) {
        return Err(domain(format!("adoption rate {adoption} is outside [0, 1]")));
    }
    Ok(baseline_production(profile) * (pym - 1.0) * adoption)
}

/// Linear decline of yield with shade cover: `y(s) = y0 * (1 - slope * s)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShadeYieldModel {
    pub y0_kg_ha: f64,
    pub slope: f64,
}

impl ShadeYieldModel {
    pub fn new(y0_kg_ha: f64, slope: f64) -> Result<Self> {
        if !(slope > 0.0) {
            return Err(domain(format!("shade-yield slope must be positive, got {slope}")));
        }
        if !(y0_kg_ha > 0.0) {
            return Err(domain(format!("zero-shade yield must be positive, got {y0_kg_ha}")));
        }
        Ok(ShadeYieldModel { y0_kg_ha, slope })
    }

    /// Shade fraction at which the modelled yield reaches zero (capped at full shade).
    pub fn max_shade(&self) -> f64 {
        (1.0 / self.slope).min(1.0)
    }

    /// Yield at shade fraction `shade`; `None` outside `[0, max_shade]`.
    pub fn yield_at(&self, shade: f64) -> Option<f64> {
        (0.0..=self.max_shade())
            .contains(&shade)
            .then_some(self.y0_kg_ha * (1.0 - self.slope * shade))
    }
}

/// Shade cover at which a hand-pollinated farm matches the unshaded yield.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShadeEquivalent {
    /// Unclamped solution of `pym * y(s) = y(0)`.
    pub shade: f64,
    /// Set when `shade` exceeds full cover; the value is reported, not clamped.
    pub exceeds_full_cover: bool,
}

pub fn shade_equivalent(pym: f64, model: &ShadeYieldModel) -> Result<ShadeEquivalent> {
    if !(model.slope > 0.0) {
        return Err(domain(format!("shade-yield slope must be positive, got {}", model.slope)));
    }
    if !(pym >= 1.0) {
        return Err(domain(format!("multiplier {pym} would not increase yield")));
    }
    let shade = (1.0 - 1.0 / pym) / model.slope;
    Ok(ShadeEquivalent {
        shade,
        exceeds_full_cover: shade > 1.0,
    })
}
