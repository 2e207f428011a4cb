//! Adoption-rate sweeps over the equilibrium and farm-income model.
use std::io::Write;

use serde::Serialize;

use crate::error::{domain, Result};
use crate::income::{income_statement, resolve_price};
use crate::market::{equilibrium, EquilibriumResult};
use crate::profile::{CountryProfile, MarketParams, ScenarioSpec};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub adoption: f64,
    pub equilibrium: EquilibriumResult,
    /// Price used for the farm incomes (depends on the scenario's price mode).
    pub price_used_usd_kg: f64,
    /// Per-farmer income of each profile, in profile order.
    pub per_farmer_usd: Vec<f64>,
}

/// Evenly spaced grid from `start` to `stop` inclusive.
pub fn grid_range(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !(stop >= start) {
        return Err(domain(format!("invalid grid range {start}:{stop}:{step}")));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| start + step * i as f64).collect())
}

pub fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(domain("adoption grid is empty"));
    }
    if let Some(bad) = grid.iter().find(|a| !(0.0..=1.0).contains(*a)) {
        return Err(domain(format!("adoption {bad} is outside [0, 1]")));
    }
    Ok(())
}

/// Evaluates `template` at each adoption rate in `grid`, keeping every other
/// scenario setting fixed.
pub fn adoption_sweep(
    profiles: &[CountryProfile],
    grid: &[f64],
    template: &ScenarioSpec,
    market: &MarketParams,
) -> Result<Vec<SweepRow>> {
    validate_grid(grid)?;
    grid.iter()
        .map(|&adoption| {
            let spec = ScenarioSpec { adoption_rate: adoption, ..template.clone() };
            let eq = equilibrium(profiles, &spec, market)?;
            let price = resolve_price(profiles, &spec, market)?;
            let per_farmer_usd = profiles
                .iter()
                .map(|p| income_statement(p, &spec, price).map(|s| s.per_farmer_usd))
                .collect::<Result<Vec<_>>>()?;
            Ok(SweepRow { adoption, equilibrium: eq, price_used_usd_kg: price, per_farmer_usd })
        })
        .collect()
}

pub fn sweep_columns(profiles: &[CountryProfile]) -> Vec<String> {
    let mut columns: Vec<String> = [
        "adoption", "delta", "gamma_p", "gamma_s", "lambda", "new_price", "new_supply", "price_used",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    columns.extend(profiles.iter().map(|p| format!("per_farmer_{}", p.key().as_str().replace(' ', "_"))));
    columns
}

pub fn sweep_record(row: &SweepRow) -> Vec<String> {
    let eq = &row.equilibrium;
    let mut fields: Vec<String> = [
        row.adoption,
        eq.delta,
        eq.gamma_p,
        eq.gamma_s,
        eq.lambda,
        eq.new_price_usd_kg,
        eq.new_supply_t,
        row.price_used_usd_kg,
    ]
    .iter()
    .map(f64::to_string)
    .collect();
    fields.extend(row.per_farmer_usd.iter().map(f64::to_string));
    fields
}

pub fn write_sweep<W: Write>(writer: W, profiles: &[CountryProfile], rows: &[SweepRow]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(sweep_columns(profiles))?;
    for row in rows {
        wtr.write_record(sweep_record(row))?;
    }
    wtr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::{bundled_profiles, PriceMode};

    #[test]
    fn quarter_steps_give_five_rows() {
        let profiles = bundled_profiles();
        let grid = grid_range(0.0, 1.0, 0.25).unwrap();
        assert_eq!(grid.len(), 5);
        let template = ScenarioSpec::new(2.6, 0.0, 30, PriceMode::ShortTerm);
        let rows = adoption_sweep(&profiles, &grid, &template, &MarketParams::default()).unwrap();
        assert_eq!(rows.len(), 5);
        assert!((rows[1].equilibrium.delta - 0.1833).abs() < 1e-4);
        assert!((rows[1].equilibrium.new_price_usd_kg - 1.895).abs() < 1e-3);
        assert_eq!(rows[0].equilibrium.delta, 0.0);
    }

    #[test]
    fn full_adoption_delta() {
        let profiles = bundled_profiles();
        let template = ScenarioSpec::new(2.6, 0.0, 30, PriceMode::LongTerm);
        let rows = adoption_sweep(&profiles, &[1.0], &template, &MarketParams::default()).unwrap();
        assert!((rows[0].equilibrium.delta - 3_274_968.0 / 4_466_574.0).abs() < 1e-6);
        assert_eq!(rows[0].price_used_usd_kg, rows[0].equilibrium.new_price_usd_kg);
    }

    #[test]
    fn bad_grids_are_rejected() {
        let profiles = bundled_profiles();
        let template = ScenarioSpec::new(2.6, 0.0, 30, PriceMode::ShortTerm);
        let m = MarketParams::default();
        assert!(adoption_sweep(&profiles, &[], &template, &m).is_err());
        assert!(adoption_sweep(&profiles, &[0.5, 1.2], &template, &m).is_err());
        assert!(grid_range(0.0, 1.0, 0.0).is_err());
    }
}
