//! Hand-pollination field-trial records: ingestion, validation and summary
//! statistics (pollination-yield multiplier, fruit set and loss rates).
//!
//! Each record is one tree. `fruit_set_48h` counts pollinated flowers still on
//! the tree two days after pollination; later cherelle wilt, pest and disease
//! losses and the final harvest partition that set fruit.
use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{describe_row_error, Error, Result, ValidationReport};

pub const TRIAL_COLUMNS: [&str; 12] = [
    "farm_id",
    "tree_id",
    "treatment",
    "assigned_rate",
    "flowers_open",
    "flowers_pollinated",
    "fruit_set_48h",
    "wilt_losses",
    "pest_losses",
    "disease_losses",
    "fruits_harvested",
    "dry_bean_kg",
];

/// Natural (open) pollination fruit-set band reported for cocoa.
pub const NATURAL_SET_BAND: (f64, f64) = (0.05, 0.10);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Treatment {
    HandPollinated,
    OpenControl,
}

impl Treatment {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "hand_pollinated" => Some(Treatment::HandPollinated),
            "open_control" => Some(Treatment::OpenControl),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub farm_id: String,
    pub tree_id: String,
    pub treatment: Treatment,
    /// Fraction of open flowers assigned to hand pollination.
    pub assigned_rate: f64,
    pub flowers_open: u32,
    pub flowers_pollinated: u32,
    pub fruit_set_48h: u32,
    /// Cherelle wilt.
    pub wilt_losses: u32,
    pub pest_losses: u32,
    pub disease_losses: u32,
    pub fruits_harvested: u32,
    /// Dry bean weight, kg/tree.
    pub dry_bean_kg: f64,
}

impl TrialRecord {
    fn losses_and_harvest(&self) -> u64 {
        u64::from(self.wilt_losses)
            + u64::from(self.pest_losses)
            + u64::from(self.disease_losses)
            + u64::from(self.fruits_harvested)
    }

    pub fn check(&self, line: usize, report: &mut ValidationReport) {
        if !(0.0..=1.0).contains(&self.assigned_rate) {
            report.push(line, Some("assigned_rate"), format!("rate {} is outside [0, 1]", self.assigned_rate));
        }
        if self.flowers_pollinated > self.flowers_open {
            report.push(
                line,
                Some("flowers_pollinated"),
                format!("{} pollinated exceeds {} open flowers", self.flowers_pollinated, self.flowers_open),
            );
        }
        match self.treatment {
            Treatment::HandPollinated => {
                if self.fruit_set_48h > self.flowers_pollinated {
                    report.push(
                        line,
                        Some("fruit_set_48h"),
                        format!(
                            "fruit set {} exceeds {} pollinated flowers",
                            self.fruit_set_48h, self.flowers_pollinated
                        ),
                    );
                }
                if self.losses_and_harvest() > u64::from(self.fruit_set_48h) {
                    report.push(
                        line,
                        None,
                        format!(
                            "losses plus harvest ({}) exceed fruit set ({})",
                            self.losses_and_harvest(),
                            self.fruit_set_48h
                        ),
                    );
                }
            }
            Treatment::OpenControl => {
                if self.fruit_set_48h > self.flowers_open {
                    report.push(
                        line,
                        Some("fruit_set_48h"),
                        format!("fruit set {} exceeds {} open flowers", self.fruit_set_48h, self.flowers_open),
                    );
                }
            }
        }
        if !self.dry_bean_kg.is_finite() || self.dry_bean_kg < 0.0 {
            report.push(line, Some("dry_bean_kg"), format!("dry bean weight {} is negative", self.dry_bean_kg));
        } else if self.fruits_harvested == 0 && self.dry_bean_kg > 0.0 {
            report.push(line, Some("dry_bean_kg"), "dry beans recorded but no fruit harvested");
        }
    }
}

pub fn ingest_trials(path: &Path) -> Result<Vec<TrialRecord>> {
    read_trials(std::fs::File::open(path)?)
}

/// Parses a trial CSV, collecting every malformed or invalid row before failing.
pub fn read_trials<R: Read>(reader: R) -> Result<Vec<TrialRecord>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let mut report = ValidationReport::default();
    if headers.iter().all(|h| h.is_empty()) {
        report.push(1, None, "trial file is empty");
        return Err(Error::Validation(report));
    }
    for column in TRIAL_COLUMNS {
        if !headers.iter().any(|h| h == column) {
            report.push(1, Some(column), "required column missing from header");
        }
    }
    report.clone().into_result()?;

    let treatment_idx = headers.iter().position(|h| h == "treatment");
    let mut records = Vec::new();
    for (idx, row) in rdr.records().enumerate() {
        let line = idx + 2;
        let row = match row {
            Ok(r) => r,
            Err(e) => {
                report.push(line, None, e.to_string());
                continue;
            }
        };
        if let Some(value) = treatment_idx.and_then(|i| row.get(i)) {
            if Treatment::parse(value).is_none() {
                report.push(
                    line,
                    Some("treatment"),
                    format!("unknown treatment `{value}` (expected hand_pollinated or open_control)"),
                );
                continue;
            }
        }
        match row.deserialize::<TrialRecord>(Some(&headers)) {
            Ok(record) => {
                record.check(line, &mut report);
                records.push(record);
            }
            Err(e) => {
                let (column, message) = describe_row_error(&e, &headers);
                report.push(line, column.as_deref(), message);
            }
        }
    }
    if records.is_empty() && report.is_empty() {
        report.push(1, None, "trial file contains no records");
    }
    report.into_result()?;
    Ok(records)
}

pub fn write_trials<W: Write>(writer: W, records: &[TrialRecord]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    for r in records {
        wtr.serialize(r)?;
    }
    wtr.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GroupStats {
    pub n: usize,
    pub mean_kg: f64,
    /// Sample standard deviation; 0 for a single tree.
    pub sd_kg: f64,
}

impl GroupStats {
    fn from_values(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let n = values.len();
        let mean = values.iter().sum::<f64>() / n as f64;
        let sd = if n > 1 {
            let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
            (ss / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        Some(GroupStats { n, mean_kg: mean, sd_kg: sd })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FarmPym {
    pub farm_id: String,
    /// `None` when the farm lacks one of the groups or its control mean is zero.
    pub multiplier: Option<f64>,
    pub treated_n: usize,
    pub control_n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PymEstimate {
    /// Ratio of group mean dry bean yields, treated over control.
    pub multiplier: f64,
    pub treated: GroupStats,
    pub control: GroupStats,
    pub per_farm: Vec<FarmPym>,
}

fn dry_weights(records: &[&TrialRecord], treatment: Treatment) -> Vec<f64> {
    records
        .iter()
        .filter(|r| r.treatment == treatment)
        .map(|r| r.dry_bean_kg)
        .collect()
}

pub fn estimate_pym(records: &[TrialRecord]) -> Result<PymEstimate> {
    let all: Vec<&TrialRecord> = records.iter().collect();
    let treated = GroupStats::from_values(&dry_weights(&all, Treatment::HandPollinated))
        .ok_or_else(|| Error::InsufficientData("no hand-pollinated records".into()))?;
    let control = GroupStats::from_values(&dry_weights(&all, Treatment::OpenControl))
        .ok_or_else(|| Error::InsufficientData("no open-control records".into()))?;
    if control.mean_kg == 0.0 {
        return Err(Error::UndefinedMultiplier);
    }

    let mut farms: BTreeMap<&str, Vec<&TrialRecord>> = BTreeMap::new();
    for r in records {
        farms.entry(r.farm_id.as_str()).or_default().push(r);
    }
    let per_farm = farms
        .into_iter()
        .map(|(farm_id, trees)| {
            let t = GroupStats::from_values(&dry_weights(&trees, Treatment::HandPollinated));
            let c = GroupStats::from_values(&dry_weights(&trees, Treatment::OpenControl));
            let multiplier = match (t, c) {
                (Some(t), Some(c)) if c.mean_kg > 0.0 => Some(t.mean_kg / c.mean_kg),
                _ => None,
            };
            FarmPym {
                farm_id: farm_id.to_owned(),
                multiplier,
                treated_n: t.map_or(0, |g| g.n),
                control_n: c.map_or(0, |g| g.n),
            }
        })
        .collect();

    Ok(PymEstimate {
        multiplier: treated.mean_kg / control.mean_kg,
        treated,
        control,
        per_farm,
    })
}

/// Rates over the hand-pollinated subset; `None` marks an undefined ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrialRates {
    pub fruit_set_rate: Option<f64>,
    pub wilt_rate: Option<f64>,
    pub pest_rate: Option<f64>,
    pub disease_rate: Option<f64>,
    pub harvest_rate: Option<f64>,
    /// Fruit set per open flower on open-control trees.
    pub natural_set_rate: Option<f64>,
    /// Whether `natural_set_rate` lies within [`NATURAL_SET_BAND`].
    pub natural_set_in_band: Option<bool>,
}

fn ratio(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

pub fn trial_rates(records: &[TrialRecord]) -> Result<TrialRates> {
    let hand: Vec<&TrialRecord> = records
        .iter()
        .filter(|r| r.treatment == Treatment::HandPollinated)
        .collect();
    if hand.is_empty() {
        return Err(Error::InsufficientData("no hand-pollinated records".into()));
    }
    let sum = |f: fn(&TrialRecord) -> u32| -> u64 { hand.iter().map(|r| u64::from(f(r))).sum() };
    let pollinated = sum(|r| r.flowers_pollinated);
    let set = sum(|r| r.fruit_set_48h);

    let control: Vec<&TrialRecord> = records
        .iter()
        .filter(|r| r.treatment == Treatment::OpenControl)
        .collect();
    let open: u64 = control.iter().map(|r| u64::from(r.flowers_open)).sum();
    let natural_set: u64 = control.iter().map(|r| u64::from(r.fruit_set_48h)).sum();
    let natural_set_rate = ratio(natural_set, open);

    Ok(TrialRates {
        fruit_set_rate: ratio(set, pollinated),
        wilt_rate: ratio(sum(|r| r.wilt_losses), set),
        pest_rate: ratio(sum(|r| r.pest_losses), set),
        disease_rate: ratio(sum(|r| r.disease_losses), set),
        harvest_rate: ratio(sum(|r| r.fruits_harvested), set),
        natural_set_rate,
        natural_set_in_band: natural_set_rate
            .map(|r| (NATURAL_SET_BAND.0..=NATURAL_SET_BAND.1).contains(&r)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(farm: &str, tree: &str, treatment: Treatment, kg: f64) -> TrialRecord {
        TrialRecord {
            farm_id: farm.into(),
            tree_id: tree.into(),
            treatment,
            assigned_rate: if treatment == Treatment::HandPollinated { 1.0 } else { 0.0 },
            flowers_open: 100,
            flowers_pollinated: if treatment == Treatment::HandPollinated { 100 } else { 0 },
            fruit_set_48h: if treatment == Treatment::HandPollinated { 40 } else { 7 },
            wilt_losses: 10,
            pest_losses: 2,
            disease_losses: 3,
            fruits_harvested: if kg > 0.0 { 5 } else { 0 },
            dry_bean_kg: kg,
        }
    }

    const SAMPLE: &str = "\
farm_id,tree_id,treatment,assigned_rate,flowers_open,flowers_pollinated,fruit_set_48h,wilt_losses,pest_losses,disease_losses,fruits_harvested,dry_bean_kg
F1,T1,hand_pollinated,1.0,120,120,50,20,3,2,20,2.4
F1,T2,open_control,0.0,110,0,8,4,1,0,3,0.9
F2,T3,hand_pollinated,0.5,90,45,20,8,1,1,10,1.6
";

    #[test]
    fn ingests_well_formed_file() {
        let records = read_trials(SAMPLE.as_bytes()).unwrap();
        assert_eq!(records.len(), 3);
        assert_eq!(records[1].treatment, Treatment::OpenControl);
    }

    #[test]
    fn fruit_set_above_pollinated_names_the_row() {
        let bad = SAMPLE.replace("F2,T3,hand_pollinated,0.5,90,45,20", "F2,T3,hand_pollinated,0.5,90,45,60");
        let Error::Validation(report) = read_trials(bad.as_bytes()).unwrap_err() else { panic!() };
        assert!(report.issues.iter().any(|i| i.line == 4 && i.column.as_deref() == Some("fruit_set_48h")));
    }

    #[test]
    fn beans_without_harvest_is_rejected() {
        let bad = SAMPLE.replace("1,0,3,0.9", "1,0,0,0.9");
        let Error::Validation(report) = read_trials(bad.as_bytes()).unwrap_err() else { panic!() };
        assert_eq!(report.issues.len(), 1);
        assert_eq!(report.issues[0].line, 3);
        assert_eq!(report.issues[0].column.as_deref(), Some("dry_bean_kg"));
    }

    #[test]
    fn malformed_and_empty_files() {
        assert!(read_trials("".as_bytes()).is_err());
        let header_only = format!("{}\n", TRIAL_COLUMNS.join(","));
        assert!(read_trials(header_only.as_bytes()).is_err());
        let bad = SAMPLE.replace("hand_pollinated,1.0", "bee_pollinated,1.0");
        let Error::Validation(report) = read_trials(bad.as_bytes()).unwrap_err() else { panic!() };
        assert_eq!(report.issues[0].line, 2);
        assert_eq!(report.issues[0].column.as_deref(), Some("treatment"));
    }

    #[test]
    fn pym_examples() {
        let records = vec![
            record("A", "1", Treatment::HandPollinated, 2.0),
            record("A", "2", Treatment::HandPollinated, 4.0),
            record("A", "3", Treatment::OpenControl, 1.0),
            record("B", "4", Treatment::OpenControl, 1.0),
        ];
        let est = estimate_pym(&records).unwrap();
        assert!((est.multiplier - 3.0).abs() < 1e-12);
        assert_eq!(est.treated.n, 2);
        assert!((est.treated.sd_kg - 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(est.control.sd_kg, 0.0);
        assert_eq!(est.per_farm[0].multiplier, Some(3.0));
        assert_eq!(est.per_farm[1].multiplier, None);

        let published = vec![
            record("A", "1", Treatment::HandPollinated, 2.6),
            record("A", "2", Treatment::OpenControl, 1.0),
        ];
        assert!((estimate_pym(&published).unwrap().multiplier - 2.6).abs() < 1e-12);
    }

    #[test]
    fn pym_errors() {
        let only_treated = vec![record("A", "1", Treatment::HandPollinated, 2.0)];
        assert!(matches!(estimate_pym(&only_treated), Err(Error::InsufficientData(_))));
        let zero_control = vec![
            record("A", "1", Treatment::HandPollinated, 2.0),
            record("A", "2", Treatment::OpenControl, 0.0),
        ];
        assert!(matches!(estimate_pym(&zero_control), Err(Error::UndefinedMultiplier)));
    }

    #[test]
    fn rate_examples() {
        let mut r = record("A", "1", Treatment::HandPollinated, 1.0);
        r.flowers_pollinated = 100;
        r.fruit_set_48h = 40;
        r.wilt_losses = 0;
        r.pest_losses = 0;
        r.disease_losses = 0;
        r.fruits_harvested = 40;
        let rates = trial_rates(&[r.clone()]).unwrap();
        assert_eq!(rates.fruit_set_rate, Some(0.40));
        assert_eq!(rates.harvest_rate, Some(1.0));
        assert_eq!(rates.wilt_rate, Some(0.0));
        assert_eq!(rates.natural_set_rate, None);

        let control = record("A", "2", Treatment::OpenControl, 0.5);
        let rates = trial_rates(&[r.clone(), control]).unwrap();
        assert_eq!(rates.natural_set_rate, Some(0.07));
        assert_eq!(rates.natural_set_in_band, Some(true));

        r.flowers_pollinated = 0;
        r.fruit_set_48h = 0;
        r.fruits_harvested = 0;
        r.dry_bean_kg = 0.0;
        let rates = trial_rates(&[r]).unwrap();
        assert_eq!(rates.fruit_set_rate, None);
        assert_eq!(rates.harvest_rate, None);
    }
}
