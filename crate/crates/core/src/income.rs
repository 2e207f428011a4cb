//! Per-hectare, national and per-farmer cocoa income under a scenario.
use std::io::Write;

use serde::Serialize;

use crate::error::{domain, Result};
use crate::market::equilibrium;
use crate::profile::{CountryProfile, MarketParams, PriceMode, ScenarioSpec};
use crate::yields::apply_pym;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IncomeStatement {
    pub gross_usd_ha: f64,
    /// Farm inputs plus farm labour.
    pub opcost_farm_usd_ha: f64,
    pub opcost_poll_usd_ha: f64,
    pub net_usd_ha: f64,
    pub national_usd: f64,
    pub per_farmer_usd: f64,
    pub price_used_usd_kg: f64,
}

impl IncomeStatement {
    /// Percentage change of per-farmer income against `baseline`.
    pub fn pct_change_from(&self, baseline: &IncomeStatement) -> f64 {
        (self.per_farmer_usd / baseline.per_farmer_usd - 1.0) * 100.0
    }
}

pub fn gross_income(yield_kg_ha: f64, price_usd_kg: f64) -> f64 {
    yield_kg_ha * price_usd_kg
}

/// Hand-pollination labour cost of one day over one hectare, USD/ha/day.
pub fn daily_pollination_cost(profile: &CountryProfile) -> Result<f64> {
    if !(profile.trees_per_worker_day > 0.0) {
        return Err(domain(format!(
            "{}: trees per worker-day must be positive",
            profile.name
        )));
    }
    Ok(profile.trees_per_ha / profile.trees_per_worker_day * profile.pollination_wage_per_day)
}

/// Seasonal hand-pollination labour cost, USD/ha/yr.
pub fn pollination_opcost(profile: &CountryProfile, days: u32) -> Result<f64> {
    Ok(daily_pollination_cost(profile)? * f64::from(days))
}

/// Statement for one country at an already resolved price.
///
/// Pollination labour is charged only when the country's multiplier exceeds 1.
pub fn income_statement(
    profile: &CountryProfile,
    spec: &ScenarioSpec,
    price_usd_kg: f64,
) -> Result<IncomeStatement> {
    if !(price_usd_kg > 0.0) {
        return Err(domain(format!("price {price_usd_kg} must be positive")));
    }
    let pym = spec.pym.for_country(&profile.key())?;
    let yield_kg_ha = apply_pym(profile.yield_dry_no_poll_kg_ha, pym)?;
    let gross = gross_income(yield_kg_ha, price_usd_kg);
    let opcost_farm = profile.farm_opcost();
    let opcost_poll = if pym > 1.0 {
        pollination_opcost(profile, spec.pollination_days)?
    } else {
        0.0
    };
    let net = gross - opcost_farm - opcost_poll;
    let national = net * profile.area_harvested_ha * profile.smallholder_share;
    if !(profile.farmer_count > 0.0) {
        return Err(domain(format!("{}: farmer count must be positive", profile.name)));
    }
    Ok(IncomeStatement {
        gross_usd_ha: gross,
        opcost_farm_usd_ha: opcost_farm,
        opcost_poll_usd_ha: opcost_poll,
        net_usd_ha: net,
        national_usd: national,
        per_farmer_usd: national / profile.farmer_count,
        price_used_usd_kg: price_usd_kg,
    })
}

/// No-pollination statement at the reference price.
pub fn baseline_statement(profile: &CountryProfile, market: &MarketParams) -> Result<IncomeStatement> {
    let spec = ScenarioSpec::new(1.0, 0.0, 0, PriceMode::ShortTerm);
    income_statement(profile, &spec, market.base_price_usd_kg)
}

/// Price implied by the scenario's price mode.
pub fn resolve_price(
    profiles: &[CountryProfile],
    spec: &ScenarioSpec,
    market: &MarketParams,
) -> Result<f64> {
    match spec.price_mode {
        PriceMode::ShortTerm => Ok(market.base_price_usd_kg),
        PriceMode::LongTerm => Ok(equilibrium(profiles, spec, market)?.new_price_usd_kg),
        PriceMode::Explicit(p) if p > 0.0 => Ok(p),
        PriceMode::Explicit(p) => Err(domain(format!("explicit price {p} must be positive"))),
    }
}

/// One serialized income statement.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IncomeRow {
    pub country: String,
    pub scenario: String,
    pub days: u32,
    pub price_mode: String,
    pub price: f64,
    pub gross_ha: f64,
    pub opcost_farm_ha: f64,
    pub opcost_poll_ha: f64,
    pub net_ha: f64,
    pub national: f64,
    pub per_farmer: f64,
    pub pct_change: f64,
}

impl IncomeRow {
    pub fn new(
        profile: &CountryProfile,
        scenario: &str,
        spec: &ScenarioSpec,
        statement: &IncomeStatement,
        baseline: &IncomeStatement,
    ) -> Self {
        IncomeRow {
            country: profile.name.clone(),
            scenario: scenario.to_owned(),
            days: spec.pollination_days,
            price_mode: spec.price_mode.label().to_owned(),
            price: statement.price_used_usd_kg,
            gross_ha: statement.gross_usd_ha,
            opcost_farm_ha: statement.opcost_farm_usd_ha,
            opcost_poll_ha: statement.opcost_poll_usd_ha,
            net_ha: statement.net_usd_ha,
            national: statement.national_usd,
            per_farmer: statement.per_farmer_usd,
            pct_change: statement.pct_change_from(baseline),
        }
    }
}

pub fn write_income_rows<W: Write>(writer: W, rows: &[IncomeRow]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    for row in rows {
        wtr.serialize(row)?;
    }
    wtr.flush()?;
    Ok(())
}
