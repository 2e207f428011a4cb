//! Long-run partial equilibrium of the world cocoa market under constant
//! supply and demand elasticities.
//!
//! A production shock `delta` (fraction of baseline world production) moves
//! the equilibrium to
//!
//! ```text
//! price ratio   = (1 + delta)^(1 / (eD - eS))
//! supply ratio  = (1 + delta)^(eD / (eD - eS))
//! displaced     = delta - (supply ratio - 1)
//! ```
//!
//! where `displaced` is the share of original production whose growers exit
//! at the lower price. Exponentials are evaluated as `exp(k * ln_1p(delta))`.
use serde::Serialize;

use crate::error::{domain, Result};
use crate::profile::{CountryProfile, MarketParams, ScenarioSpec};
use crate::yields::country_addition;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EquilibriumResult {
    pub delta: f64,
    pub gamma_p: f64,
    pub gamma_s: f64,
    pub lambda: f64,
    pub new_price_usd_kg: f64,
    pub new_supply_t: f64,
}

impl EquilibriumResult {
    /// Price change relative to the reference price, in percent (negative for a fall).
    pub fn price_change_pct(&self) -> f64 {
        (self.gamma_p - 1.0) * 100.0
    }
}

/// Adoption-weighted production shock from the modelled countries.
pub fn global_delta(
    profiles: &[CountryProfile],
    spec: &ScenarioSpec,
    market: &MarketParams,
) -> Result<f64> {
    let mut added = 0.0;
    for profile in profiles {
        let pym = spec.pym.for_country(&profile.key())?;
        added += country_addition(profile, pym, spec.adoption_rate)?;
    }
    Ok(added / market.global_production_t)
}

fn exponent_base(delta: f64, market: &MarketParams) -> Result<(f64, f64)> {
    let spread = market.demand_elasticity - market.supply_elasticity;
    if !(spread < 0.0) {
        return Err(domain(format!(
            "demand minus supply elasticity must be negative, got {spread}"
        )));
    }
    if !(delta > -1.0) {
        return Err(domain(format!("production shock {delta} must exceed -1")));
    }
    Ok((delta.ln_1p(), spread))
}

/// `P_new / P_old` after a shock `delta`.
pub fn price_ratio(delta: f64, market: &MarketParams) -> Result<f64> {
    let (log_shock, spread) = exponent_base(delta, market)?;
    Ok((log_shock / spread).exp())
}

/// `S_new / S_old` after a shock `delta`.
pub fn supply_ratio(delta: f64, market: &MarketParams) -> Result<f64> {
    let (log_shock, spread) = exponent_base(delta, market)?;
    Ok((log_shock * market.demand_elasticity / spread).exp())
}

pub fn displaced_share(delta: f64, gamma_s: f64) -> f64 {
    delta - (gamma_s - 1.0)
}

/// Equilibrium for an already computed shock.
pub fn equilibrium_from_delta(delta: f64, market: &MarketParams) -> Result<EquilibriumResult> {
    let gamma_p = price_ratio(delta, market)?;
    let gamma_s = supply_ratio(delta, market)?;
    Ok(EquilibriumResult {
        delta,
        gamma_p,
        gamma_s,
        lambda: displaced_share(delta, gamma_s),
        new_price_usd_kg: market.base_price_usd_kg * gamma_p,
        new_supply_t: market.global_production_t * gamma_s,
    })
}

pub fn equilibrium(
    profiles: &[CountryProfile],
    spec: &ScenarioSpec,
    market: &MarketParams,
) -> Result<EquilibriumResult> {
    market.validate()?;
    spec.validate()?;
    let delta = global_delta(profiles, spec, market)?;
    equilibrium_from_delta(delta, market)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::{bundled_profiles, InputCosts, PriceMode, PymAssignment};

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    fn market() -> MarketParams {
        MarketParams::default()
    }

    #[test]
    fn global_delta_examples() {
        let profiles = bundled_profiles();
        let spec = ScenarioSpec::new(2.6, 0.25, 30, PriceMode::ShortTerm);
        let d = global_delta(&profiles, &spec, &market()).unwrap();
        assert!(rel(d, 0.1833) < 5e-4, "{d}");

        let mut spec_max = spec.clone();
        spec_max.pym = PymAssignment::uniform(3.3)
            .with_override("Ivory Coast", 4.9)
            .with_override("Ghana", 4.9);
        let d = global_delta(&profiles, &spec_max, &market()).unwrap();
        assert!(rel(d, 0.3811) < 5e-4, "{d}");

        let zero = ScenarioSpec::new(3.3, 0.0, 30, PriceMode::ShortTerm);
        assert_eq!(global_delta(&profiles, &zero, &market()).unwrap(), 0.0);
    }

    #[test]
    fn missing_multiplier_is_configuration_error() {
        let profiles = bundled_profiles();
        let spec = ScenarioSpec {
            pym: PymAssignment::default().with_override("ghana", 2.6),
            adoption_rate: 0.25,
            pollination_days: 30,
            price_mode: PriceMode::ShortTerm,
        };
        assert!(matches!(
            global_delta(&profiles, &spec, &market()),
            Err(crate::Error::Config(_))
        ));
    }

    #[test]
    fn ratio_examples() {
        let m = market();
        let gp = price_ratio(0.1833, &m).unwrap();
        assert!(rel(gp, 0.8313) < 5e-4, "{gp}");
        assert!((2.28 * gp - 1.89).abs() < 0.006);
        let gp = price_ratio(0.3811, &m).unwrap();
        assert!(rel(gp, 0.7014) < 5e-4, "{gp}");
        assert_eq!(price_ratio(0.0, &m).unwrap(), 1.0);

        assert!(rel(supply_ratio(0.1833, &m).unwrap(), 1.0648) < 5e-4);
        assert!(rel(supply_ratio(0.3811, &m).unwrap(), 1.1280) < 5e-4);
        assert_eq!(supply_ratio(0.0, &m).unwrap(), 1.0);
    }

    #[test]
    fn displaced_share_examples() {
        assert!((displaced_share(0.1833, 1.0648) - 0.1185).abs() < 1e-12);
        assert!((displaced_share(0.3811, 1.1280) - 0.2531).abs() < 1e-12);
        assert_eq!(displaced_share(0.0, 1.0), 0.0);
    }

    #[test]
    fn degenerate_inputs_are_rejected() {
        let flat = MarketParams { demand_elasticity: 0.57, ..market() };
        assert!(price_ratio(0.1, &flat).is_err());
        assert!(supply_ratio(0.1, &flat).is_err());
        assert!(price_ratio(-1.0, &market()).is_err());
    }

    #[test]
    fn intermediate_equilibrium() {
        let profiles = bundled_profiles();
        let spec = ScenarioSpec::new(2.6, 0.25, 30, PriceMode::LongTerm);
        let eq = equilibrium(&profiles, &spec, &market()).unwrap();
        assert!(rel(eq.delta, 0.1833) < 5e-4);
        assert!(rel(eq.gamma_p, 0.8313) < 5e-4);
        assert!(rel(eq.gamma_s, 1.0648) < 5e-4);
        assert!(rel(eq.lambda, 0.1185) < 5e-3);
        assert!(rel(eq.new_price_usd_kg, 1.89) < 5e-3);
        assert!(rel(eq.new_supply_t, 4_755_963.0) < 5e-4);
    }

    #[test]
    fn zero_adoption_equilibrium() {
        let eq = equilibrium(
            &bundled_profiles(),
            &ScenarioSpec::new(2.6, 0.0, 30, PriceMode::LongTerm),
            &market(),
        )
        .unwrap();
        assert_eq!(
            (eq.delta, eq.gamma_p, eq.gamma_s, eq.lambda),
            (0.0, 1.0, 1.0, 0.0)
        );
        assert_eq!(eq.new_price_usd_kg, 2.28);
        assert_eq!(eq.new_supply_t, 4_466_574.0);
    }

    #[test]
    fn single_country_ten_percent_of_world() {
        // 1000 ha at 100 kg/ha = 100 t, world = 1000 t.
        let country = CountryProfile {
            name: "Solo".into(),
            area_harvested_ha: 1000.0,
            yield_dry_no_poll_kg_ha: 100.0,
            trees_per_ha: 1000.0,
            farmer_count: 100.0,
            smallholder_share: 1.0,
            input_costs: InputCosts::default(),
            farm_labour_cost: 0.0,
            pollination_wage_per_day: 1.0,
            trees_per_worker_day: 100.0,
        };
        let m = MarketParams { global_production_t: 1000.0, ..market() };
        let spec = ScenarioSpec::new(2.0, 1.0, 0, PriceMode::LongTerm);
        let eq = equilibrium(&[country], &spec, &m).unwrap();
        assert!((eq.delta - 0.10).abs() < 1e-12);
    }
}
