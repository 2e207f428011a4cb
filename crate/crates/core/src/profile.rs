//! Country profiles, market parameters and scenario definitions.
//!
//! The bundled dataset carries the three producer countries (Ivory Coast,
//! Ghana, Indonesia) with their 2016 production, agronomic and cost figures.
//! Pollination wages are stored at the precision implied by the published
//! 60-day pollination cost per hectare; rounded to cents they equal the
//! published per-day salaries.
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{describe_row_error, domain, Error, Result, ValidationReport};

const BUNDLED_PROFILES: &str = include_str!("../data/profiles.csv");

/// Column order of the country-profile CSV schema.
pub const PROFILE_COLUMNS: [&str; 13] = [
    "name",
    "area_harvested_ha",
    "yield_dry_no_poll_kg_ha",
    "trees_per_ha",
    "farmer_count",
    "smallholder_share",
    "cost_fertilizer",
    "cost_insecticide",
    "cost_herbicide",
    "cost_fungicide",
    "cost_farm_labour",
    "pollination_wage_per_day",
    "trees_per_worker_day",
];

/// Case-insensitive country identifier.
///
/// Normalization lowercases, maps `_` and `-` to spaces and collapses runs of
/// whitespace, so `"Ivory_Coast"` and `" ivory  coast"` are the same key.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "String", into = "String")]
pub struct CountryKey(String);

impl CountryKey {
    pub fn new(name: &str) -> Self {
        let cleaned: String = name
            .chars()
            .map(|c| if c == '_' || c == '-' { ' ' } else { c })
            .collect();
        let normalized = cleaned
            .split_whitespace()
            .collect::<Vec<_>>()
            .join(" ")
            .to_lowercase();
        CountryKey(normalized)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<String> for CountryKey {
    fn from(s: String) -> Self {
        CountryKey::new(&s)
    }
}

impl From<&str> for CountryKey {
    fn from(s: &str) -> Self {
        CountryKey::new(s)
    }
}

impl From<CountryKey> for String {
    fn from(k: CountryKey) -> String {
        k.0
    }
}

impl fmt::Display for CountryKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Annual farm input costs in USD/ha.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct InputCosts {
    pub fertilizer: f64,
    pub insecticide: f64,
    pub herbicide: f64,
    pub fungicide: f64,
}

impl InputCosts {
    pub fn total(&self) -> f64 {
        self.fertilizer + self.insecticide + self.herbicide + self.fungicide
    }
}

/// One producer country's production, agronomic and cost parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountryProfile {
    /// Display name as given in the source file.
    pub name: String,
    pub area_harvested_ha: f64,
    /// Dry bean yield without manual pollination, kg/ha/yr.
    pub yield_dry_no_poll_kg_ha: f64,
    pub trees_per_ha: f64,
    pub farmer_count: f64,
    /// Share of national production grown by smallholders, in (0, 1].
    pub smallholder_share: f64,
    pub input_costs: InputCosts,
    /// Farm-based labour cost, USD/ha/yr.
    pub farm_labour_cost: f64,
    /// USD per worker-day of pollination.
    pub pollination_wage_per_day: f64,
    /// Trees one worker hand-pollinates per day.
    pub trees_per_worker_day: f64,
}

impl CountryProfile {
    pub fn key(&self) -> CountryKey {
        CountryKey::new(&self.name)
    }

    /// Farm operational cost without pollination labour (inputs + farm labour), USD/ha/yr.
    pub fn farm_opcost(&self) -> f64 {
        self.input_costs.total() + self.farm_labour_cost
    }

    /// Checks the type invariants; every violation is reported against `line`.
    pub fn check(&self, line: usize, report: &mut ValidationReport) {
        if CountryKey::new(&self.name).as_str().is_empty() {
            report.push(line, Some("name"), "country name is empty");
        }
        let non_negative = [
            ("area_harvested_ha", self.area_harvested_ha),
            ("yield_dry_no_poll_kg_ha", self.yield_dry_no_poll_kg_ha),
            ("trees_per_ha", self.trees_per_ha),
            ("farmer_count", self.farmer_count),
            ("smallholder_share", self.smallholder_share),
            ("cost_fertilizer", self.input_costs.fertilizer),
            ("cost_insecticide", self.input_costs.insecticide),
            ("cost_herbicide", self.input_costs.herbicide),
            ("cost_fungicide", self.input_costs.fungicide),
            ("cost_farm_labour", self.farm_labour_cost),
            ("pollination_wage_per_day", self.pollination_wage_per_day),
            ("trees_per_worker_day", self.trees_per_worker_day),
        ];
        for (column, value) in non_negative {
            if !value.is_finite() {
                report.push(line, Some(column), format!("value {value} is not finite"));
            } else if value < 0.0 {
                report.push(line, Some(column), format!("value {value} is negative"));
            }
        }
        if self.area_harvested_ha == 0.0 {
            report.push(line, Some("area_harvested_ha"), "harvested area must be positive");
        }
        if self.trees_per_worker_day == 0.0 {
            report.push(line, Some("trees_per_worker_day"), "trees per worker-day must be positive");
        }
        if self.farmer_count == 0.0 {
            report.push(line, Some("farmer_count"), "farmer count must be positive");
        }
        if self.smallholder_share == 0.0 || self.smallholder_share > 1.0 {
            report.push(
                line,
                Some("smallholder_share"),
                format!("share {} is outside (0, 1]", self.smallholder_share),
            );
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mut report = ValidationReport::default();
        self.check(0, &mut report);
        report.into_result()
    }
}

/// Baseline national production in tonnes: area × dry yield / 1000.
pub fn baseline_production(profile: &CountryProfile) -> f64 {
    profile.area_harvested_ha * profile.yield_dry_no_poll_kg_ha / 1000.0
}

/// Smallholder hectares per farmer.
pub fn farm_area_per_farmer(profile: &CountryProfile) -> Result<f64> {
    if profile.farmer_count <= 0.0 {
        return Err(domain(format!(
            "{}: farmer count must be positive to compute area per farmer",
            profile.name
        )));
    }
    Ok(profile.area_harvested_ha * profile.smallholder_share / profile.farmer_count)
}

/// Global market baseline and long-run elasticities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarketParams {
    pub global_production_t: f64,
    pub base_price_usd_kg: f64,
    pub supply_elasticity: f64,
    pub demand_elasticity: f64,
}

impl Default for MarketParams {
    fn default() -> Self {
        MarketParams {
            global_production_t: 4_466_574.0,
            base_price_usd_kg: 2.28,
            supply_elasticity: 0.57,
            demand_elasticity: -0.34,
        }
    }
}

impl MarketParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.supply_elasticity > 0.0) {
            return Err(domain(format!(
                "supply elasticity must be positive, got {}",
                self.supply_elasticity
            )));
        }
        if !(self.demand_elasticity < 0.0) {
            return Err(domain(format!(
                "demand elasticity must be negative, got {}",
                self.demand_elasticity
            )));
        }
        if !(self.base_price_usd_kg > 0.0) || !(self.global_production_t > 0.0) {
            return Err(domain("base price and global production must be positive"));
        }
        Ok(())
    }
}

/// Pollination-yield multipliers per country: a uniform default plus overrides.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PymAssignment {
    pub default: Option<f64>,
    #[serde(default)]
    pub overrides: BTreeMap<CountryKey, f64>,
}

impl PymAssignment {
    pub fn uniform(pym: f64) -> Self {
        PymAssignment {
            default: Some(pym),
            overrides: BTreeMap::new(),
        }
    }

    pub fn with_override(mut self, country: &str, pym: f64) -> Self {
        self.overrides.insert(CountryKey::new(country), pym);
        self
    }

    pub fn for_country(&self, country: &CountryKey) -> Result<f64> {
        self.overrides
            .get(country)
            .copied()
            .or(self.default)
            .ok_or_else(|| {
                Error::Config(format!("no pollination-yield multiplier for country `{country}`"))
            })
    }

    pub fn validate(&self) -> Result<()> {
        let all = self.default.iter().chain(self.overrides.values());
        for &pym in all {
            if !(pym >= 1.0) || !pym.is_finite() {
                return Err(domain(format!("multiplier {pym} is below 1")));
            }
        }
        Ok(())
    }
}

/// Which price the farm-income calculation uses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PriceMode {
    /// Reference price before any market response.
    ShortTerm,
    /// Equilibrium price after the scenario's own supply shock.
    LongTerm,
    Explicit(f64),
}

impl PriceMode {
    pub fn label(&self) -> &'static str {
        match self {
            PriceMode::ShortTerm => "short",
            PriceMode::LongTerm => "long",
            PriceMode::Explicit(_) => "explicit",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub pym: PymAssignment,
    pub adoption_rate: f64,
    pub pollination_days: u32,
    pub price_mode: PriceMode,
}

impl ScenarioSpec {
    pub fn new(pym: f64, adoption_rate: f64, pollination_days: u32, price_mode: PriceMode) -> Self {
        ScenarioSpec {
            pym: PymAssignment::uniform(pym),
            adoption_rate,
            pollination_days,
            price_mode,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.pym.validate()?;
        if !(0.0..=1.0).contains(&self.adoption_rate) {
            return Err(domain(format!(
                "adoption rate {} is outside [0, 1]",
                self.adoption_rate
            )));
        }
        if let PriceMode::Explicit(p) = self.price_mode {
            if !(p > 0.0) {
                return Err(domain(format!("explicit price {p} must be positive")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct ProfileRow {
    name: String,
    area_harvested_ha: f64,
    yield_dry_no_poll_kg_ha: f64,
    trees_per_ha: f64,
    farmer_count: f64,
    smallholder_share: f64,
    cost_fertilizer: f64,
    cost_insecticide: f64,
    cost_herbicide: f64,
    cost_fungicide: f64,
    cost_farm_labour: f64,
    pollination_wage_per_day: f64,
    trees_per_worker_day: f64,
}

impl From<ProfileRow> for CountryProfile {
    fn from(r: ProfileRow) -> Self {
        CountryProfile {
            name: r.name.trim().to_owned(),
            area_harvested_ha: r.area_harvested_ha,
            yield_dry_no_poll_kg_ha: r.yield_dry_no_poll_kg_ha,
            trees_per_ha: r.trees_per_ha,
            farmer_count: r.farmer_count,
            smallholder_share: r.smallholder_share,
            input_costs: InputCosts {
                fertilizer: r.cost_fertilizer,
                insecticide: r.cost_insecticide,
                herbicide: r.cost_herbicide,
                fungicide: r.cost_fungicide,
            },
            farm_labour_cost: r.cost_farm_labour,
            pollination_wage_per_day: r.pollination_wage_per_day,
            trees_per_worker_day: r.trees_per_worker_day,
        }
    }
}

impl From<&CountryProfile> for ProfileRow {
    fn from(p: &CountryProfile) -> Self {
        ProfileRow {
            name: p.name.clone(),
            area_harvested_ha: p.area_harvested_ha,
            yield_dry_no_poll_kg_ha: p.yield_dry_no_poll_kg_ha,
            trees_per_ha: p.trees_per_ha,
            farmer_count: p.farmer_count,
            smallholder_share: p.smallholder_share,
            cost_fertilizer: p.input_costs.fertilizer,
            cost_insecticide: p.input_costs.insecticide,
            cost_herbicide: p.input_costs.herbicide,
            cost_fungicide: p.input_costs.fungicide,
            cost_farm_labour: p.farm_labour_cost,
            pollination_wage_per_day: p.pollination_wage_per_day,
            trees_per_worker_day: p.trees_per_worker_day,
        }
    }
}

/// Where to load profiles from.
#[derive(Debug, Clone, Copy)]
pub enum ProfileSource<'a> {
    Bundled,
    File(&'a Path),
}

pub fn load_profiles(source: ProfileSource<'_>) -> Result<Vec<CountryProfile>> {
    match source {
        ProfileSource::Bundled => read_profiles(BUNDLED_PROFILES.as_bytes()),
        ProfileSource::File(path) => read_profiles(std::fs::File::open(path)?),
    }
}

pub fn bundled_profiles() -> Vec<CountryProfile> {
    read_profiles(BUNDLED_PROFILES.as_bytes()).expect("bundled profile table is valid")
}

/// Parses and validates a profile CSV. All row problems are collected before failing.
pub fn read_profiles<R: Read>(reader: R) -> Result<Vec<CountryProfile>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let mut report = ValidationReport::default();
    for column in PROFILE_COLUMNS {
        if !headers.iter().any(|h| h == column) {
            report.push(1, Some(column), "required column missing from header");
        }
    }
    report.clone().into_result()?;

    let mut profiles = Vec::new();
    let mut seen = BTreeSet::new();
    for (idx, record) in rdr.records().enumerate() {
        let line = idx + 2;
        let record = match record {
            Ok(r) => r,
            Err(e) => {
                report.push(line, None, e.to_string());
                continue;
            }
        };
        let row: ProfileRow = match record.deserialize(Some(&headers)) {
            Ok(row) => row,
            Err(e) => {
                let (column, message) = describe_row_error(&e, &headers);
                report.push(line, column.as_deref(), message);
                continue;
            }
        };
        let profile = CountryProfile::from(row);
        profile.check(line, &mut report);
        if !seen.insert(profile.key()) {
            report.push(line, Some("name"), format!("duplicate country `{}`", profile.name));
        }
        profiles.push(profile);
    }
    if profiles.is_empty() && report.is_empty() {
        report.push(1, None, "profile file contains no rows");
    }
    report.into_result()?;
    Ok(profiles)
}

pub fn write_profiles<W: Write>(writer: W, profiles: &[CountryProfile]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    for p in profiles {
        wtr.serialize(ProfileRow::from(p))?;
    }
    wtr.flush()?;
    Ok(())
}

/// Looks a profile up by case-insensitive name.
pub fn find_profile<'a>(profiles: &'a [CountryProfile], name: &str) -> Result<&'a CountryProfile> {
    let key = CountryKey::new(name);
    profiles
        .iter()
        .find(|p| p.key() == key)
        .ok_or_else(|| Error::UnknownCountry(name.to_owned()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(1e-12)
    }

    #[test]
    fn bundled_profiles_carry_published_parameters() {
        let profiles = bundled_profiles();
        assert_eq!(profiles.len(), 3);
        let ci = find_profile(&profiles, "ivory coast").unwrap();
        assert_eq!(ci.yield_dry_no_poll_kg_ha, 273.19);
        assert_eq!(ci.trees_per_ha, 975.0);
        assert_eq!(ci.farmer_count, 1_000_000.0);
        assert_eq!(ci.smallholder_share, 0.70);

        let gh = find_profile(&profiles, "GHANA").unwrap();
        assert_eq!((gh.pollination_wage_per_day * 100.0).round() / 100.0, 1.36);
        assert_eq!(gh.trees_per_worker_day, 77.10);

        let id = find_profile(&profiles, "Indonesia").unwrap();
        assert_eq!(id.farmer_count, 1_400_000.0);
    }

    #[test]
    fn farm_opcosts_match_published_totals() {
        let profiles = bundled_profiles();
        let totals = [34.57, 137.57, 24.34];
        for (p, want) in profiles.iter().zip(totals) {
            assert!(close(p.farm_opcost(), want, 1e-9), "{}: {}", p.name, p.farm_opcost());
        }
    }

    #[test]
    fn baseline_production_examples() {
        let profiles = bundled_profiles();
        let ci = find_profile(&profiles, "Ivory Coast").unwrap();
        let id = find_profile(&profiles, "Indonesia").unwrap();
        assert!(close(baseline_production(ci), 778_887.64, 1e-6));
        assert!(close(baseline_production(id), 733_792.69, 1e-6));
        let mut zero = ci.clone();
        zero.yield_dry_no_poll_kg_ha = 0.0;
        assert_eq!(baseline_production(&zero), 0.0);

        let total: f64 = profiles.iter().map(baseline_production).sum();
        assert!(close(total, 2_046_854.78, 1e-4));
    }

    #[test]
    fn area_per_farmer_examples() {
        let profiles = bundled_profiles();
        let ci = farm_area_per_farmer(&profiles[0]).unwrap();
        let gh = farm_area_per_farmer(&profiles[1]).unwrap();
        // Inverse of the published farmer / per-hectare net income ratios.
        assert!(close(ci, 1_174.11 / 588.30, 1e-4));
        assert!(close(gh, 1_109.57 / 585.76, 1e-4));

        let mut unit = profiles[0].clone();
        unit.farmer_count = unit.area_harvested_ha * unit.smallholder_share;
        assert!(close(farm_area_per_farmer(&unit).unwrap(), 1.0, 1e-12));

        let mut none = profiles[0].clone();
        none.farmer_count = 0.0;
        assert!(matches!(farm_area_per_farmer(&none), Err(Error::Domain(_))));
    }

    #[test]
    fn negative_area_is_a_validation_error() {
        let csv = format!(
            "{}\nTestland,-5,300,1000,10,0.5,1,1,1,1,1,1,80\n",
            PROFILE_COLUMNS.join(",")
        );
        let err = read_profiles(csv.as_bytes()).unwrap_err();
        let Error::Validation(report) = err else { panic!("expected validation error") };
        assert_eq!(report.issues.len(), 1);
        assert_eq!(report.issues[0].line, 2);
        assert_eq!(report.issues[0].column.as_deref(), Some("area_harvested_ha"));
    }

    #[test]
    fn malformed_number_names_row_and_column() {
        let csv = format!(
            "{}\nA,10,300,1000,10,0.5,1,1,1,1,1,1,80\nB,10,abc,1000,10,0.5,1,1,1,1,1,1,80\n",
            PROFILE_COLUMNS.join(",")
        );
        let Error::Validation(report) = read_profiles(csv.as_bytes()).unwrap_err() else {
            panic!("expected validation error")
        };
        assert_eq!(report.issues[0].line, 3);
        assert_eq!(report.issues[0].column.as_deref(), Some("yield_dry_no_poll_kg_ha"));
    }

    #[test]
    fn missing_column_and_duplicates_are_rejected() {
        let csv = "name,area_harvested_ha\nA,10\n";
        assert!(matches!(read_profiles(csv.as_bytes()), Err(Error::Validation(_))));

        let csv = format!(
            "{}\nGhana,10,300,1000,10,0.5,1,1,1,1,1,1,80\n ghana ,10,300,1000,10,0.5,1,1,1,1,1,1,80\n",
            PROFILE_COLUMNS.join(",")
        );
        let Error::Validation(report) = read_profiles(csv.as_bytes()).unwrap_err() else {
            panic!()
        };
        assert!(report.issues[0].message.contains("duplicate"));
    }

    #[test]
    fn share_bounds() {
        let mut p = bundled_profiles().remove(0);
        p.smallholder_share = 1.0;
        assert!(p.validate().is_ok());
        p.smallholder_share = 0.0;
        assert!(p.validate().is_err());
        p.smallholder_share = 1.01;
        assert!(p.validate().is_err());
    }

    #[test]
    fn country_key_normalization() {
        assert_eq!(CountryKey::new("Ivory_Coast"), CountryKey::new(" ivory  COAST "));
        assert_eq!(CountryKey::new("ivory-coast").as_str(), "ivory coast");
    }

    #[test]
    fn pym_assignment_lookup() {
        let pym = PymAssignment::uniform(3.3).with_override("Ivory Coast", 4.9);
        assert_eq!(pym.for_country(&"ivory coast".into()).unwrap(), 4.9);
        assert_eq!(pym.for_country(&"ghana".into()).unwrap(), 3.3);
        let only = PymAssignment::default().with_override("ghana", 2.0);
        assert!(matches!(only.for_country(&"indonesia".into()), Err(Error::Config(_))));
        assert!(PymAssignment::uniform(0.9).validate().is_err());
    }

    #[test]
    fn market_params_reject_degenerate_elasticities() {
        assert!(MarketParams::default().validate().is_ok());
        let bad = MarketParams { demand_elasticity: 0.1, ..MarketParams::default() };
        assert!(bad.validate().is_err());
        let bad = MarketParams { supply_elasticity: 0.0, ..MarketParams::default() };
        assert!(bad.validate().is_err());
    }
}
