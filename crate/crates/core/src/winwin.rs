//! Win-win scenario: hand pollination adopted only to offset production lost
//! to agroforestry conversion and declining habitat suitability, so world
//! supply (and price) stays put.
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::market::{equilibrium_from_delta, EquilibriumResult};
use crate::profile::{baseline_production, CountryProfile, MarketParams};

/// Share of world production grown in the three modelled countries.
pub const THREE_COUNTRY_SHARE: f64 = 0.668;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossComposition {
    /// Conversion and suitability losses act multiplicatively.
    #[default]
    Compound,
    Additive,
}

impl LossComposition {
    pub fn label(&self) -> &'static str {
        match self {
            LossComposition::Compound => "compound",
            LossComposition::Additive => "additive",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WinWinParams {
    /// Fraction of production area converted from monoculture to agroforestry.
    pub conversion_share: f64,
    /// Fractional yield loss of converted area.
    pub agroforestry_yield_penalty: f64,
    /// Annual fractional decline of suitable production area.
    pub suitability_decline_rate: f64,
    pub horizon_years: f64,
    /// New land brought into production; the scenario requires zero.
    #[serde(default)]
    pub encroachment: f64,
    #[serde(default)]
    pub loss_composition: LossComposition,
}

impl Default for WinWinParams {
    fn default() -> Self {
        WinWinParams {
            conversion_share: 1.0,
            agroforestry_yield_penalty: 0.4,
            suitability_decline_rate: 0.004,
            horizon_years: 0.0,
            encroachment: 0.0,
            loss_composition: LossComposition::Compound,
        }
    }
}

impl WinWinParams {
    pub fn validate(&self) -> Result<()> {
        let fractions = [
            ("conversion_share", self.conversion_share),
            ("agroforestry_yield_penalty", self.agroforestry_yield_penalty),
            ("suitability_decline_rate", self.suitability_decline_rate),
        ];
        for (name, v) in fractions {
            if !(0.0..=1.0).contains(&v) {
                return Err(domain(format!("{name} = {v} is outside [0, 1]")));
            }
        }
        if !(self.horizon_years >= 0.0) || !self.horizon_years.is_finite() {
            return Err(domain(format!("horizon {} must be non-negative", self.horizon_years)));
        }
        if self.encroachment != 0.0 {
            return Err(domain("the win-win scenario assumes zero encroachment"));
        }
        Ok(())
    }

    /// Fraction of area lost to suitability decline over the horizon.
    pub fn suitability_loss(&self) -> f64 {
        1.0 - (1.0 - self.suitability_decline_rate).powf(self.horizon_years)
    }

    pub fn conversion_loss(&self) -> f64 {
        self.agroforestry_yield_penalty * self.conversion_share
    }

    /// Total fractional production loss under the chosen composition.
    pub fn loss_fraction(&self) -> f64 {
        match self.loss_composition {
            LossComposition::Compound => {
                1.0 - (1.0 - self.conversion_loss()) * (1.0 - self.suitability_loss())
            }
            LossComposition::Additive => self.conversion_loss() + self.suitability_loss(),
        }
    }
}

/// Which production the losses are applied to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CompensationBase {
    /// A share of world production.
    GlobalShare(f64),
    /// Sum of the profiles' area × yield.
    ProfileBaseline,
}

impl Default for CompensationBase {
    fn default() -> Self {
        CompensationBase::GlobalShare(THREE_COUNTRY_SHARE)
    }
}

impl CompensationBase {
    pub fn tonnes(&self, profiles: &[CountryProfile], market: &MarketParams) -> f64 {
        match *self {
            CompensationBase::GlobalShare(share) => share * market.global_production_t,
            CompensationBase::ProfileBaseline => profiles.iter().map(baseline_production).sum(),
        }
    }
}

/// Production (tonnes) lost from `base_production_t` that pollination must replace.
pub fn required_compensation(base_production_t: f64, params: &WinWinParams) -> Result<f64> {
    params.validate()?;
    if !(base_production_t >= 0.0) {
        return Err(domain(format!("base production {base_production_t} is negative")));
    }
    Ok(base_production_t * params.loss_fraction())
}

/// Adoption rate whose pollination gains exactly equal `required_t`.
pub fn compensating_adoption(required_t: f64, profiles: &[CountryProfile], pym: f64) -> Result<f64> {
    if !(pym > 1.0) {
        return Err(domain(format!("compensation needs a multiplier above 1, got {pym}")));
    }
    if !(required_t >= 0.0) {
        return Err(domain(format!("required compensation {required_t} is negative")));
    }
    let capacity: f64 = profiles.iter().map(|p| baseline_production(p) * (pym - 1.0)).sum();
    if capacity <= 0.0 {
        return Err(domain("profiles have no production to scale"));
    }
    let adoption = required_t / capacity;
    if adoption > 1.0 {
        return Err(Error::Infeasible {
            required_adoption: adoption,
            shortfall_t: required_t - capacity,
        });
    }
    Ok(adoption)
}

/// Equilibrium after both the losses and the compensating pollination gains.
pub fn net_equilibrium(
    lost_t: f64,
    profiles: &[CountryProfile],
    pym: f64,
    adoption: f64,
    market: &MarketParams,
) -> Result<EquilibriumResult> {
    let gained: f64 = profiles
        .iter()
        .map(|p| baseline_production(p) * (pym - 1.0) * adoption)
        .sum();
    equilibrium_from_delta((gained - lost_t) / market.global_production_t, market)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WinWinOutcome {
    pub base_production_t: f64,
    pub required_t: f64,
    pub adoption: f64,
    pub equilibrium: EquilibriumResult,
}

/// Loss, compensating adoption and the resulting net equilibrium in one step.
pub fn evaluate(
    profiles: &[CountryProfile],
    params: &WinWinParams,
    base: CompensationBase,
    pym: f64,
    market: &MarketParams,
) -> Result<WinWinOutcome> {
    let base_production_t = base.tonnes(profiles, market);
    let required_t = required_compensation(base_production_t, params)?;
    let adoption = compensating_adoption(required_t, profiles, pym)?;
    let equilibrium = net_equilibrium(required_t, profiles, pym, adoption, market)?;
    Ok(WinWinOutcome { base_production_t, required_t, adoption, equilibrium })
}

/// One cell of the compensation surface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SurfacePoint {
    pub penalty: f64,
    pub loss_composition: LossComposition,
    pub conversion_share: f64,
    /// Total fractional loss of suitable area.
    pub suitability_loss: f64,
    pub required_t: f64,
}

/// Required compensation over conversion shares 0..=1 (step 0.1) and total
/// suitability losses 0..=0.20 (step 0.01) for one penalty.
pub fn compensation_surface(
    base_production_t: f64,
    penalty: f64,
    mode: LossComposition,
) -> Result<Vec<SurfacePoint>> {
    let mut points = Vec::with_capacity(11 * 21);
    for c in 0..=10 {
        for s in 0..=20 {
            // A one-year horizon makes the annual rate equal the total loss.
            let params = WinWinParams {
                conversion_share: f64::from(c) / 10.0,
                agroforestry_yield_penalty: penalty,
                suitability_decline_rate: f64::from(s) / 100.0,
                horizon_years: 1.0,
                encroachment: 0.0,
                loss_composition: mode,
            };
            points.push(SurfacePoint {
                penalty,
                loss_composition: mode,
                conversion_share: params.conversion_share,
                suitability_loss: params.suitability_loss(),
                required_t: required_compensation(base_production_t, &params)?,
            });
        }
    }
    Ok(points)
}
