//! Break-even pollination effort: how many days of hand pollination a farmer
//! can pay for while still meeting an income goal.
//!
//! Per-farmer income is affine in pollination days, so the break-even duration
//! is closed form.
use serde::Serialize;

use crate::error::{domain, Result};
use crate::income::{daily_pollination_cost, gross_income};
use crate::profile::CountryProfile;
use crate::yields::apply_pym;

/// Income goal as a multiple of the no-pollination per-farmer income.
pub const GOAL_DOUBLE: f64 = 2.0;
pub const GOAL_TEN_PERCENT: f64 = 1.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Breakeven {
    /// Largest real number of days meeting the goal, 0 when unreachable.
    pub exact_days: f64,
    /// False when the goal is missed even without any pollination labour.
    pub reachable: bool,
}

/// Days `d*` at which per-farmer income under `pym` at `price_usd_kg` equals
/// `goal_multiplier` times the no-pollination income at `baseline_price_usd_kg`.
pub fn breakeven_days(
    profile: &CountryProfile,
    pym: f64,
    price_usd_kg: f64,
    goal_multiplier: f64,
    baseline_price_usd_kg: f64,
) -> Result<Breakeven> {
    if !(pym > 1.0) {
        return Err(domain(format!("break-even needs a multiplier above 1, got {pym}")));
    }
    if !(goal_multiplier >= 1.0) {
        return Err(domain(format!("income goal {goal_multiplier} is below 1")));
    }
    let daily = daily_pollination_cost(profile)?;
    if !(daily > 0.0) {
        return Err(domain(format!(
            "{}: daily pollination cost is zero, no break-even exists",
            profile.name
        )));
    }
    let opcost_farm = profile.farm_opcost();
    let net_without_labour =
        gross_income(apply_pym(profile.yield_dry_no_poll_kg_ha, pym)?, price_usd_kg) - opcost_farm;
    let baseline_net = gross_income(profile.yield_dry_no_poll_kg_ha, baseline_price_usd_kg) - opcost_farm;
    // Per-farmer income is the per-hectare net scaled by a positive constant,
    // so the goal can be solved per hectare.
    let days = (net_without_labour - goal_multiplier * baseline_net) / daily;
    Ok(if days >= 0.0 {
        Breakeven { exact_days: days, reachable: true }
    } else {
        Breakeven { exact_days: 0.0, reachable: false }
    })
}

/// Largest multiple of `step` not exceeding `days`.
pub fn gridline_floor(days: f64, step: u32) -> Result<u32> {
    if step == 0 {
        return Err(domain("gridline step must be positive"));
    }
    if !(days >= 0.0) {
        return Ok(0);
    }
    let step_f = f64::from(step);
    Ok(((days / step_f).floor() * step_f) as u32)
}
