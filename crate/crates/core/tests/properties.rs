//! Property tests over the scenario engine.
use proptest::prelude::*;

use cocoa_core::breakeven::{breakeven_days, gridline_floor};
use cocoa_core::income::{baseline_statement, income_statement};
use cocoa_core::market::equilibrium_from_delta;
use cocoa_core::profile::{
    baseline_production, bundled_profiles, read_profiles, write_profiles, MarketParams, PriceMode, ScenarioSpec,
};
use cocoa_core::winwin::{required_compensation, LossComposition, WinWinParams};
use cocoa_core::yields::{apply_pym, country_addition, shade_equivalent, ShadeYieldModel};

fn country() -> impl Strategy<Value = usize> {
    0usize..3
}

proptest! {
    #[test]
    fn apply_pym_is_monotone(y in 0.0..2000.0f64, a in 1.0..6.0f64, b in 1.0..6.0f64) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(apply_pym(y, lo).unwrap() <= apply_pym(y, hi).unwrap());
    }

    #[test]
    fn addition_is_linear_in_adoption(i in country(), pym in 1.0..5.0f64, a in 0.0..=1.0f64) {
        let p = &bundled_profiles()[i];
        let full = country_addition(p, pym, 1.0).unwrap();
        let got = country_addition(p, pym, a).unwrap();
        prop_assert!((got - a * full).abs() <= 1e-9 * full.max(1.0));
        prop_assert!((full - baseline_production(p) * (pym - 1.0)).abs() <= 1e-9 * full.max(1.0));
    }

    #[test]
    fn shade_equivalent_restores_unshaded_yield(pym in 1.0..3.5f64, slope in 0.3..1.5f64) {
        let model = ShadeYieldModel::new(1.0, slope).unwrap();
        let eq = shade_equivalent(pym, &model).unwrap();
        let restored = pym * (1.0 - slope * eq.shade);
        prop_assert!((restored - 1.0).abs() < 1e-12);
        prop_assert_eq!(eq.exceeds_full_cover, eq.shade > 1.0);
    }

    #[test]
    fn equilibrium_ratios_are_consistent(a in 0.0..2.0f64, b in 0.0..2.0f64) {
        let market = MarketParams::default();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let x = equilibrium_from_delta(lo, &market).unwrap();
        let y = equilibrium_from_delta(hi, &market).unwrap();
        prop_assert!((x.gamma_s - x.gamma_p.powf(market.demand_elasticity)).abs() <= 1e-9 * x.gamma_s);
        // The new price lies on the shifted supply curve.
        let shifted = (1.0 + lo) * x.gamma_p.powf(market.supply_elasticity);
        prop_assert!((shifted - x.gamma_s).abs() <= 1e-9 * x.gamma_s);
        prop_assert!(x.gamma_p <= 1.0 && x.gamma_s >= 1.0);
        prop_assert!(y.gamma_p <= x.gamma_p && y.gamma_s >= x.gamma_s);
        prop_assert!(x.lambda >= -1e-12 && x.lambda <= lo + 1e-12);
    }

    #[test]
    fn income_is_affine_in_days(i in country(), pym in 1.01..5.0f64, price in 0.5..4.0f64, d1 in 0u32..200, d2 in 0u32..200) {
        let p = &bundled_profiles()[i];
        let at = |d: u32| {
            income_statement(p, &ScenarioSpec::new(pym, 0.25, d, PriceMode::Explicit(price)), price)
                .unwrap()
                .per_farmer_usd
        };
        let slope = at(1) - at(0);
        let predicted = at(d1) + slope * (f64::from(d2) - f64::from(d1));
        prop_assert!((at(d2) - predicted).abs() <= 1e-6 * at(0).abs().max(1.0));
        prop_assert!(slope < 0.0);
    }

    #[test]
    fn breakeven_reaches_the_goal(i in country(), pym in 1.5..5.0f64, price in 1.0..3.0f64, goal in 1.0..3.0f64) {
        let profiles = bundled_profiles();
        let p = &profiles[i];
        let market = MarketParams::default();
        let solved = breakeven_days(p, pym, price, goal, market.base_price_usd_kg).unwrap();
        prop_assume!(solved.reachable);
        // The closed form is continuous in days; evaluate the affine income at the exact root.
        let at = |d: u32| {
            income_statement(p, &ScenarioSpec::new(pym, 0.25, d, PriceMode::Explicit(price)), price)
                .unwrap()
                .per_farmer_usd
        };
        let income = at(0) + (at(1) - at(0)) * solved.exact_days;
        let target = goal * baseline_statement(p, &market).unwrap().per_farmer_usd;
        prop_assert!((income - target).abs() <= 1e-9 * target.abs());
        let harder = breakeven_days(p, pym, price, goal + 0.1, market.base_price_usd_kg).unwrap();
        prop_assert!(harder.exact_days <= solved.exact_days);
        let richer = breakeven_days(p, pym + 0.1, price, goal, market.base_price_usd_kg).unwrap();
        prop_assert!(richer.exact_days >= solved.exact_days);
    }

    #[test]
    fn gridline_is_a_floor(days in 0.0..500.0f64, step in 1u32..30) {
        let g = gridline_floor(days, step).unwrap();
        prop_assert_eq!(g % step, 0);
        prop_assert!(f64::from(g) <= days && days < f64::from(g + step));
    }

    #[test]
    fn compensation_is_bounded_by_its_terms(
        conv in 0.0..=1.0f64,
        pen in 0.0..=1.0f64,
        rate in 0.0..=1.0f64,
        horizon in 0.0..100.0f64,
    ) {
        let params = WinWinParams {
            conversion_share: conv,
            agroforestry_yield_penalty: pen,
            suitability_decline_rate: rate,
            horizon_years: horizon,
            encroachment: 0.0,
            loss_composition: LossComposition::Compound,
        };
        let compound = required_compensation(1000.0, &params).unwrap();
        let additive = required_compensation(
            1000.0,
            &WinWinParams { loss_composition: LossComposition::Additive, ..params },
        )
        .unwrap();
        // Compounding never exceeds the first-order sum of both losses.
        prop_assert!(compound <= additive + 1e-9);
        prop_assert!(compound >= 1000.0 * params.conversion_loss().max(params.suitability_loss()) - 1e-9);
    }
}

#[test]
fn profiles_round_trip_through_csv() {
    let profiles = bundled_profiles();
    let mut buf = Vec::new();
    write_profiles(&mut buf, &profiles).unwrap();
    assert_eq!(read_profiles(buf.as_slice()).unwrap(), profiles);
}

#[test]
fn profile_file_loads_from_disk() {
    use cocoa_core::profile::{load_profiles, ProfileSource};
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("profiles.csv");
    let mut buf = Vec::new();
    write_profiles(&mut buf, &bundled_profiles()[..1]).unwrap();
    std::fs::write(&path, buf).unwrap();
    let loaded = load_profiles(ProfileSource::File(&path)).unwrap();
    assert_eq!(loaded.len(), 1);
    assert_eq!(loaded[0].name, "Ivory Coast");
}
