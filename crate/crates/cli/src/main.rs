//! `cocoa`: scenario engine and replication harness for manual cocoa pollination.
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};

use cocoa_core::breakeven::{breakeven_days, gridline_floor};
use cocoa_core::config::Config;
use cocoa_core::income::{baseline_statement, income_statement, resolve_price, IncomeRow};
use cocoa_core::market::equilibrium;
use cocoa_core::profile::{
    find_profile, load_profiles, CountryProfile, PriceMode, ProfileSource, PymAssignment, ScenarioSpec,
};
use cocoa_core::replicate::{replicate, ReplicateOptions, Status, Target};
use cocoa_core::sweep::{adoption_sweep, grid_range, sweep_columns, sweep_record};
use cocoa_core::trial::{estimate_pym, ingest_trials, trial_rates};
use cocoa_core::winwin::{
    compensating_adoption, compensation_surface, net_equilibrium, required_compensation,
    CompensationBase, LossComposition, WinWinParams,
};

use output::{Format, Sink, Table};

const EXIT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_VALIDATION: u8 = 3;
const EXIT_TOLERANCE: u8 = 4;

#[derive(Parser)]
#[command(name = "cocoa", version, about = "Manual cocoa pollination scenario engine")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Country profile CSV; the bundled profiles are used when omitted.
    #[arg(long, global = true)]
    profiles: Option<PathBuf>,
    /// JSON configuration overriding the bundled defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for report files; results go to stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Txt)]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Regenerate published tables and figure datasets and compare them.
    Replicate(ReplicateArgs),
    /// Per-hectare, national and per-farmer income for one scenario.
    Scenario(ScenarioArgs),
    /// Global price, supply and job response to a production shock.
    Equilibrium(EquilibriumArgs),
    /// Pollination days needed to reach an income goal.
    Breakeven(BreakevenArgs),
    /// Market response and farmer income across adoption rates.
    Sweep(SweepArgs),
    /// Production loss from agroforestry conversion and the adoption that offsets it.
    Winwin(WinwinArgs),
    /// Validate a field-trial CSV and estimate the yield multiplier.
    IngestTrial(IngestArgs),
}

#[derive(Args)]
struct ReplicateArgs {
    /// Targets to regenerate; all when omitted.
    #[arg(value_parser = parse_target)]
    targets: Vec<Target>,
    /// Exit with status 4 if any check falls outside its tolerance.
    #[arg(long)]
    strict: bool,
    /// Comma-separated adoption grid for figS3.
    #[arg(long, value_parser = parse_grid)]
    grid: Option<Grid>,
}

#[derive(Clone, Copy, ValueEnum)]
enum PriceArg {
    Short,
    Long,
    Explicit,
}

#[derive(Args)]
struct PriceOpts {
    #[arg(long, value_enum, default_value_t = PriceArg::Short)]
    price_mode: PriceArg,
    /// Price in USD/kg, required with `--price-mode explicit`.
    #[arg(long, required_if_eq("price_mode", "explicit"))]
    price: Option<f64>,
}

impl PriceOpts {
    fn mode(&self) -> PriceMode {
        match self.price_mode {
            PriceArg::Short => PriceMode::ShortTerm,
            PriceArg::Long => PriceMode::LongTerm,
            PriceArg::Explicit => PriceMode::Explicit(self.price.unwrap_or_default()),
        }
    }
}

#[derive(Args)]
struct ScenarioArgs {
    /// Country to report; all profiles when omitted.
    #[arg(long)]
    country: Option<String>,
    /// Pollination-yield multiplier; defaults to the intermediate scenario.
    #[arg(long)]
    pym: Option<f64>,
    /// Share of farmers adopting; defaults to the configured rate.
    #[arg(long)]
    adoption: Option<f64>,
    #[arg(long, default_value_t = 60)]
    days: u32,
    #[command(flatten)]
    price: PriceOpts,
}

#[derive(Args)]
struct EquilibriumArgs {
    #[arg(long)]
    pym: Option<f64>,
    #[arg(long)]
    adoption: Option<f64>,
    /// Per-country multiplier, e.g. `ghana=4.9`; repeatable.
    #[arg(long = "override", value_parser = parse_override)]
    overrides: Vec<(String, f64)>,
}

#[derive(Args)]
struct BreakevenArgs {
    /// Country to solve for; all profiles when omitted.
    #[arg(long)]
    country: Option<String>,
    /// Multiplier; both configured scenarios when omitted.
    #[arg(long)]
    pym: Option<f64>,
    /// Income goal as a multiple of unpollinated per-farmer income.
    #[arg(long, default_value_t = 2.0)]
    goal: f64,
    #[command(flatten)]
    price: PriceOpts,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    pym: Option<f64>,
    /// Comma-separated adoption rates; 0 to 1 in steps of 0.05 when omitted.
    #[arg(long, value_parser = parse_grid)]
    grid: Option<Grid>,
    #[arg(long, default_value_t = 60)]
    days: u32,
    #[command(flatten)]
    price: PriceOpts,
}

#[derive(Clone, Copy, ValueEnum)]
enum BaseArg {
    /// Share of world production grown in the modelled countries.
    Share,
    /// Sum of the profiles' area times yield.
    Profiles,
}

#[derive(Args)]
struct WinwinArgs {
    #[arg(long)]
    penalty: Option<f64>,
    #[arg(long)]
    conversion: Option<f64>,
    /// Annual suitability decline.
    #[arg(long)]
    rate: Option<f64>,
    #[arg(long)]
    horizon: Option<f64>,
    #[arg(long, value_enum)]
    mode: Option<LossArg>,
    #[arg(long, value_enum)]
    base: Option<BaseArg>,
    /// Multiplier used for the compensating adoption.
    #[arg(long)]
    pym: Option<f64>,
    /// Emit the conversion by suitability-loss grid for these penalties instead.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    surface: Option<Vec<f64>>,
}

#[derive(Clone, Copy, ValueEnum)]
enum LossArg {
    Compound,
    Additive,
}

impl From<LossArg> for LossComposition {
    fn from(arg: LossArg) -> Self {
        match arg {
            LossArg::Compound => LossComposition::Compound,
            LossArg::Additive => LossComposition::Additive,
        }
    }
}

#[derive(Args)]
struct IngestArgs {
    /// Trial CSV file.
    file: PathBuf,
}

#[derive(Clone)]
struct Grid(Vec<f64>);

fn parse_target(s: &str) -> Result<Target, String> {
    s.parse().map_err(|e: cocoa_core::Error| e.to_string())
}

fn parse_grid(s: &str) -> Result<Grid, String> {
    let values = s
        .split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|_| format!("`{v}` is not a number")))
        .collect::<Result<Vec<_>, _>>()?;
    cocoa_core::sweep::validate_grid(&values).map_err(|e| e.to_string())?;
    Ok(Grid(values))
}

fn parse_override(s: &str) -> Result<(String, f64), String> {
    let (country, pym) = s
        .split_once('=')
        .ok_or_else(|| format!("expected COUNTRY=PYM, got `{s}`"))?;
    let pym = pym.trim().parse().map_err(|_| format!("`{pym}` is not a number"))?;
    Ok((country.trim().to_owned(), pym))
}

struct App {
    profiles: Vec<CountryProfile>,
    config: Config,
    sink: Sink,
}

impl App {
    fn load(common: &Common) -> anyhow::Result<Self> {
        let profiles = match &common.profiles {
            Some(path) => load_profiles(ProfileSource::File(path))
                .with_context(|| format!("loading profiles from {}", path.display()))?,
            None => load_profiles(ProfileSource::Bundled)?,
        };
        let config = match &common.config {
            Some(path) => {
                Config::load(path).with_context(|| format!("loading config from {}", path.display()))?
            }
            None => Config::default(),
        };
        Ok(App {
            profiles,
            config,
            sink: Sink::new(common.out.clone(), common.format),
        })
    }

    fn select(&self, country: Option<&str>) -> anyhow::Result<Vec<&CountryProfile>> {
        Ok(match country {
            Some(name) => vec![find_profile(&self.profiles, name)?],
            None => self.profiles.iter().collect(),
        })
    }

    fn scenarios(&self, pym: Option<f64>) -> Vec<(String, f64)> {
        match pym {
            Some(p) => vec![(format!("pym {p}"), p)],
            None => vec![
                ("intermediate".to_owned(), self.config.pym_intermediate),
                ("maximum".to_owned(), self.config.pym_maximum),
            ],
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            let validation = e
                .chain()
                .any(|c| c.downcast_ref::<cocoa_core::Error>().is_some_and(cocoa_core::Error::is_validation));
            ExitCode::from(if validation { EXIT_VALIDATION } else { EXIT_FAILURE })
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    let ctx = App::load(&cli.common)?;
    match cli.command {
        Command::Replicate(args) => cmd_replicate(&ctx, args),
        Command::Scenario(args) => cmd_scenario(&ctx, args).map(|()| 0),
        Command::Equilibrium(args) => cmd_equilibrium(&ctx, args).map(|()| 0),
        Command::Breakeven(args) => cmd_breakeven(&ctx, args).map(|()| 0),
        Command::Sweep(args) => cmd_sweep(&ctx, args).map(|()| 0),
        Command::Winwin(args) => cmd_winwin(&ctx, args).map(|()| 0),
        Command::IngestTrial(args) => cmd_ingest(&ctx, args).map(|()| 0),
    }
}

fn cmd_replicate(ctx: &App, args: ReplicateArgs) -> anyhow::Result<u8> {
    let targets = if args.targets.is_empty() { Target::ALL.to_vec() } else { args.targets };
    let options = ReplicateOptions { adoption_grid: args.grid.map(|g| g.0) };
    let reports = replicate(&ctx.profiles, &ctx.config, &targets, &options)?;
    let mut failed = 0;
    for report in &reports {
        ctx.sink.report(report)?;
        for check in report.failures() {
            eprintln!(
                "{}: FAIL {} / {}: computed {} vs published {}",
                report.target,
                check.section,
                check.item,
                check.computed,
                check.published.unwrap_or(f64::NAN)
            );
        }
        failed += report.count(Status::Fail);
    }
    if ctx.sink.has_dir() {
        for report in &reports {
            println!(
                "{}: {} pass, {} fail, {} divergent, {} info",
                report.target,
                report.count(Status::Pass),
                report.count(Status::Fail),
                report.count(Status::Divergent),
                report.count(Status::Info)
            );
        }
    }
    Ok(if args.strict && failed > 0 { EXIT_TOLERANCE } else { 0 })
}

fn cmd_scenario(ctx: &App, args: ScenarioArgs) -> anyhow::Result<()> {
    let market = &ctx.config.market;
    let pym = args.pym.unwrap_or(ctx.config.pym_intermediate);
    let adoption = args.adoption.unwrap_or(ctx.config.adoption_rate);
    let spec = ScenarioSpec::new(pym, adoption, args.days, args.price.mode());
    spec.validate()?;
    let price = resolve_price(&ctx.profiles, &spec, market)?;
    let mut rows = Vec::new();
    for profile in ctx.select(args.country.as_deref())? {
        let baseline = baseline_statement(profile, market)?;
        let statement = income_statement(profile, &spec, price)?;
        rows.push(IncomeRow::new(profile, &format!("pym {pym}"), &spec, &statement, &baseline));
    }
    ctx.sink.table("scenario", &output::serialize_rows(&rows)?)
}

fn cmd_equilibrium(ctx: &App, args: EquilibriumArgs) -> anyhow::Result<()> {
    let mut pym = PymAssignment::uniform(args.pym.unwrap_or(ctx.config.pym_intermediate));
    for (country, value) in &args.overrides {
        find_profile(&ctx.profiles, country)?;
        pym = pym.with_override(country, *value);
    }
    let spec = ScenarioSpec {
        pym,
        adoption_rate: args.adoption.unwrap_or(ctx.config.adoption_rate),
        pollination_days: 0,
        price_mode: PriceMode::LongTerm,
    };
    let eq = equilibrium(&ctx.profiles, &spec, &ctx.config.market)?;
    let mut table = output::serialize_rows(&[eq])?;
    table.columns.push("price_change_pct".to_owned());
    table.rows[0].push(eq.price_change_pct().to_string());
    ctx.sink.table("equilibrium", &table)
}

fn cmd_breakeven(ctx: &App, args: BreakevenArgs) -> anyhow::Result<()> {
    let market = &ctx.config.market;
    let step = ctx.config.gridline_step_days;
    let mut table = Table::new(&[
        "country", "scenario", "pym", "price_mode", "price", "goal", "exact_days", "gridline_days", "reachable",
    ]);
    for (scenario, pym) in ctx.scenarios(args.pym) {
        let spec = ScenarioSpec::new(pym, ctx.config.adoption_rate, 0, args.price.mode());
        let price = resolve_price(&ctx.profiles, &spec, market)?;
        for profile in ctx.select(args.country.as_deref())? {
            let solved = breakeven_days(profile, pym, price, args.goal, market.base_price_usd_kg)?;
            table.push(vec![
                profile.name.clone(),
                scenario.clone(),
                pym.to_string(),
                spec.price_mode.label().to_owned(),
                price.to_string(),
                args.goal.to_string(),
                solved.exact_days.to_string(),
                gridline_floor(solved.exact_days, step)?.to_string(),
                solved.reachable.to_string(),
            ]);
        }
    }
    ctx.sink.table("breakeven", &table)
}

fn cmd_sweep(ctx: &App, args: SweepArgs) -> anyhow::Result<()> {
    let grid = match args.grid {
        Some(g) => g.0,
        None => grid_range(0.0, 1.0, 0.05)?,
    };
    let pym = args.pym.unwrap_or(ctx.config.pym_intermediate);
    let template = ScenarioSpec::new(pym, 0.0, args.days, args.price.mode());
    let rows = adoption_sweep(&ctx.profiles, &grid, &template, &ctx.config.market)?;
    let table = Table {
        columns: sweep_columns(&ctx.profiles),
        rows: rows.iter().map(sweep_record).collect(),
    };
    ctx.sink.table("sweep", &table)
}

fn cmd_winwin(ctx: &App, args: WinwinArgs) -> anyhow::Result<()> {
    let market = &ctx.config.market;
    let defaults = ctx.config.winwin;
    let params = WinWinParams {
        conversion_share: args.conversion.unwrap_or(defaults.conversion_share),
        agroforestry_yield_penalty: args.penalty.unwrap_or(defaults.agroforestry_yield_penalty),
        suitability_decline_rate: args.rate.unwrap_or(defaults.suitability_decline_rate),
        horizon_years: args.horizon.unwrap_or(defaults.horizon_years),
        encroachment: 0.0,
        loss_composition: args.mode.map_or(defaults.loss_composition, LossComposition::from),
    };
    let base = match args.base {
        Some(BaseArg::Share) => CompensationBase::default(),
        Some(BaseArg::Profiles) => CompensationBase::ProfileBaseline,
        None => ctx.config.winwin_base,
    };
    let base_t = base.tonnes(&ctx.profiles, market);

    if let Some(penalties) = args.surface {
        let mut points = Vec::new();
        for penalty in penalties {
            points.extend(compensation_surface(base_t, penalty, params.loss_composition)?);
        }
        return ctx.sink.table("winwin_surface", &output::serialize_rows(&points)?);
    }

    let required = required_compensation(base_t, &params)?;
    let pym = args.pym.unwrap_or(ctx.config.pym_intermediate);
    let adoption = compensating_adoption(required, &ctx.profiles, pym)?;
    let eq = net_equilibrium(required, &ctx.profiles, pym, adoption, market)?;
    let mut table = Table::new(&[
        "mode", "base_t", "loss_fraction", "required_t", "pym", "adoption", "net_delta", "gamma_p", "new_price",
    ]);
    table.push(vec![
        params.loss_composition.label().to_owned(),
        base_t.to_string(),
        params.loss_fraction().to_string(),
        required.to_string(),
        pym.to_string(),
        adoption.to_string(),
        eq.delta.to_string(),
        eq.gamma_p.to_string(),
        eq.new_price_usd_kg.to_string(),
    ]);
    ctx.sink.table("winwin", &table)
}

fn cmd_ingest(ctx: &App, args: IngestArgs) -> anyhow::Result<()> {
    let records = ingest_trials(&args.file)?;
    let estimate = estimate_pym(&records);
    let rates = trial_rates(&records)?;
    let fmt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_else(|| "undefined".to_owned());
    let mut table = Table::new(&["metric", "value"]);
    table.push(vec!["records".to_owned(), records.len().to_string()]);
    match &estimate {
        Ok(est) => {
            table.push(vec!["pym".to_owned(), est.multiplier.to_string()]);
            table.push(vec!["treated_n".to_owned(), est.treated.n.to_string()]);
            table.push(vec!["treated_mean_kg".to_owned(), est.treated.mean_kg.to_string()]);
            table.push(vec!["treated_sd_kg".to_owned(), est.treated.sd_kg.to_string()]);
            table.push(vec!["control_n".to_owned(), est.control.n.to_string()]);
            table.push(vec!["control_mean_kg".to_owned(), est.control.mean_kg.to_string()]);
            table.push(vec!["control_sd_kg".to_owned(), est.control.sd_kg.to_string()]);
            for farm in &est.per_farm {
                table.push(vec![format!("pym_farm_{}", farm.farm_id), fmt(farm.multiplier)]);
            }
        }
        Err(e) => table.push(vec!["pym".to_owned(), format!("unavailable: {e}")]),
    }
    table.push(vec!["fruit_set_rate".to_owned(), fmt(rates.fruit_set_rate)]);
    table.push(vec!["wilt_rate".to_owned(), fmt(rates.wilt_rate)]);
    table.push(vec!["pest_rate".to_owned(), fmt(rates.pest_rate)]);
    table.push(vec!["disease_rate".to_owned(), fmt(rates.disease_rate)]);
    table.push(vec!["harvest_rate".to_owned(), fmt(rates.harvest_rate)]);
    table.push(vec!["natural_set_rate".to_owned(), fmt(rates.natural_set_rate)]);
    table.push(vec![
        "natural_set_in_band".to_owned(),
        rates.natural_set_in_band.map(|b| b.to_string()).unwrap_or_else(|| "undefined".to_owned()),
    ]);
    ctx.sink.table("trial", &table)
}
