use std::path::{Path, PathBuf};

use gridcast_core::dataset::{
    ingest_csv, ingest_weather, load_csv_string, weather_csv_string, CalendarInfo, Channel, SplitSpec, TimeSeries,
    WeatherSet,
};
use gridcast_core::features::{build_day_ahead_many, day_ahead_layout, FeatureSample, SchemaId};
use gridcast_core::metrics::{
    aggregate_seeds, evaluate_samples, mae_rmse, mape, plot_csv_string, predict_samples, Comparison,
    EvaluationReport, Scenario,
};
use gridcast_core::nn::LossKind;
use gridcast_core::strategies::{
    gap_fill, train_afore, train_baseline, train_osdf, train_reself, StrategyArtifact, StrategyKind,
};
use gridcast_core::synth::{generate, testbed_config, weekly_testbed_config, SynthConfig, TestbedVariant};
use serde_json::json;

use crate::config::{Features, Preset, RunConfig, SplitConfig};
use crate::error::CliError;
use crate::output::OutputDir;

const LOAD_FILE: &str = "load.csv";
const WEATHER_FILE: &str = "weather.csv";
const HOLIDAY_FILE: &str = "holidays.txt";

struct Data {
    load: TimeSeries,
    weather: WeatherSet,
    calendar: CalendarInfo,
}

impl Data {
    fn inputs(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
        let mut paths = Vec::new();
        for name in [LOAD_FILE, WEATHER_FILE] {
            let p = dir.join(name);
            if !p.is_file() {
                return Err(CliError::Usage(format!("missing data file {}", p.display())));
            }
            paths.push(p);
        }
        let holidays = dir.join(HOLIDAY_FILE);
        if holidays.is_file() {
            paths.push(holidays);
        }
        Ok(paths)
    }

    fn read(dir: &Path) -> Result<Self, CliError> {
        let load = ingest_csv(dir.join(LOAD_FILE), Channel::Load)?;
        let weather = ingest_weather(dir.join(WEATHER_FILE))?;
        let holidays = dir.join(HOLIDAY_FILE);
        let calendar = if holidays.is_file() {
            CalendarInfo::from_file(holidays)?
        } else {
            CalendarInfo::default()
        };
        Ok(Data { load, weather, calendar })
    }

    fn temperature(&self) -> Result<&TimeSeries, CliError> {
        self.weather
            .primary_temperature()
            .ok_or_else(|| CliError::Data("weather data has no temperature channel".into()))
    }
}

fn check_artifacts(cfg: &RunConfig, at_least: usize) -> Result<(), CliError> {
    if cfg.artifacts.len() < at_least {
        return Err(CliError::Usage(format!("need at least {at_least} --artifact")));
    }
    for p in &cfg.artifacts {
        if !p.is_file() {
            return Err(CliError::Usage(format!("missing artifact {}", p.display())));
        }
    }
    Ok(())
}

fn split_spec(cfg: &RunConfig, load: &TimeSeries) -> Result<SplitSpec, CliError> {
    let n_days = load.len() / 24;
    let (val, test) = match cfg.split {
        Some(SplitConfig::Ranges(spec)) => {
            spec.validate()?;
            return Ok(spec);
        }
        Some(SplitConfig::Tail { val_days, test_days }) => (val_days, test_days),
        None => {
            let k = (n_days * 15 / 100).max(1);
            (k, k)
        }
    };
    if val + test >= n_days {
        return Err(CliError::Data(format!(
            "{n_days} days of load cannot hold {val} validation and {test} test days"
        )));
    }
    Ok(SplitSpec::contiguous(load.first_date(), n_days, n_days - val - test, val)?)
}

/// How samples are built for one schema.
enum Layout {
    DayAhead,
    Window(Scenario),
}

impl Layout {
    fn for_training(cfg: &RunConfig) -> Result<Self, CliError> {
        Ok(match cfg.features() {
            Features::DayAhead => Layout::DayAhead,
            Features::Window => Layout::Window(cfg.scenario()?),
        })
    }

    fn for_artifact(schema: SchemaId, cfg: &RunConfig) -> Result<Self, CliError> {
        match schema {
            SchemaId::DayAhead => Ok(Layout::DayAhead),
            SchemaId::Window {
                input_hours,
                gap_hours,
                horizon_hours,
                ..
            } => {
                let s = Scenario::new(input_hours, gap_hours, horizon_hours, cfg.stride.unwrap_or(horizon_hours))
                    .map_err(|e| CliError::Usage(e.to_string()))?;
                Ok(Layout::Window(s))
            }
            other => Err(CliError::Usage(format!(
                "artifacts of schema {} are not supported by this command",
                other.name()
            ))),
        }
    }

    fn label(&self) -> String {
        match self {
            Layout::DayAhead => "day_ahead_daily".into(),
            Layout::Window(s) => s.id(),
        }
    }

    fn samples(&self, data: &Data) -> Result<Vec<FeatureSample>, CliError> {
        match self {
            Layout::DayAhead => {
                let first = data.load.first_date();
                let days = (0..data.load.len() / 24).map(|k| first + chrono::Duration::days(k as i64));
                Ok(build_day_ahead_many(&data.load, data.temperature()?, &data.calendar, days).0)
            }
            Layout::Window(s) => Ok(s.samples(&data.load, &data.weather)?),
        }
    }
}

/// Splits samples by the dates their targets cover.
fn partition(
    samples: Vec<FeatureSample>,
    spec: &SplitSpec,
) -> (Vec<FeatureSample>, Vec<FeatureSample>, Vec<FeatureSample>) {
    let (mut train, mut val, mut test) = (Vec::new(), Vec::new(), Vec::new());
    for s in samples {
        let last = (s.target_start + chrono::Duration::hours(s.target.len() as i64 - 1)).date_naive();
        let inside = |r: &gridcast_core::dataset::DateRange| r.contains(s.day_id) && r.contains(last);
        if inside(&spec.train) {
            train.push(s);
        } else if inside(&spec.validation) {
            val.push(s);
        } else if inside(&spec.test) {
            test.push(s);
        }
    }
    (train, val, test)
}

fn non_empty(name: &str, samples: &[FeatureSample]) -> Result<(), CliError> {
    if samples.is_empty() {
        return Err(CliError::Data(format!("the {name} split holds no complete samples")));
    }
    Ok(())
}

pub fn synth(cfg: &RunConfig) -> Result<(), CliError> {
    let out = cfg.require_out()?;
    let seed = cfg.seed();
    let mut sc = match (&cfg.synth, cfg.preset.unwrap_or(Preset::Default)) {
        (Some(s), _) => s.clone(),
        (None, Preset::Default) => SynthConfig::default(),
        (None, Preset::Reself) => testbed_config(seed, TestbedVariant::Weekday),
        (None, Preset::ReselfNull) => testbed_config(seed, TestbedVariant::Null),
        (None, Preset::Weekly) => weekly_testbed_config(seed),
    };
    sc.seed = seed;
    if let Some(h) = cfg.hours {
        sc.n_hours = h;
    }
    let data = generate(&sc)?;
    let mut dir = OutputDir::create(out)?;
    dir.write(LOAD_FILE, load_csv_string(&data.load).as_bytes())?;
    dir.write(WEATHER_FILE, weather_csv_string(&data.weather)?.as_bytes())?;
    dir.write(HOLIDAY_FILE, data.calendar.to_text().as_bytes())?;
    let resolved = serde_json::to_string_pretty(&sc).map_err(|e| CliError::Data(e.to_string()))? + "\n";
    dir.write("synth.json", resolved.as_bytes())?;
    dir.finish("synth", cfg, &[])
}

fn artifact_name(kind: StrategyKind, seed: u64) -> String {
    format!("{kind}_s{seed}.json")
}

/// Seed encoded in a `{strategy}_s{seed}.json` file name.
fn seed_of(path: &Path) -> Option<u64> {
    let stem = path.file_stem()?.to_str()?;
    stem.rsplit_once("_s")?.1.parse().ok()
}

pub fn train(cfg: &RunConfig) -> Result<(), CliError> {
    let data_dir = cfg.require_data()?;
    let out = cfg.require_out()?;
    let inputs = Data::inputs(data_dir)?;
    let kind: StrategyKind = cfg.strategy.as_deref().unwrap_or("baseline").parse()?;
    let loss: LossKind = cfg.loss.as_deref().unwrap_or("l2").parse()?;
    let features = cfg.features();
    if kind == StrategyKind::Afore && features == Features::Window {
        return Err(CliError::Usage(
            "afore needs day-ahead features (--features day-ahead); window samples carry no anchor".into(),
        ));
    }
    if cfg.blind_calendar == Some(true) && features != Features::DayAhead {
        return Err(CliError::Usage("--blind-calendar applies to day-ahead features only".into()));
    }
    let n_seeds = cfg.seeds.unwrap_or(1);
    if n_seeds == 0 {
        return Err(CliError::Usage("--seeds must be positive".into()));
    }

    let data = Data::read(data_dir)?;
    let spec = split_spec(cfg, &data.load)?;
    let layout = Layout::for_training(cfg)?;
    let (train, val, _) = partition(layout.samples(&data)?, &spec);
    non_empty("training", &train)?;

    let mut dir = OutputDir::create(out)?;
    for k in 0..n_seeds as u64 {
        let run = RunConfig {
            seed: Some(cfg.seed().wrapping_add(k)),
            ..cfg.clone()
        };
        let (mut primary, secondary) = run.stages();
        if run.blind_calendar == Some(true) {
            primary.feature_subset = Some(day_ahead_layout::WITHOUT_CALENDAR.collect());
        }
        let artifact = match kind {
            StrategyKind::Baseline => train_baseline(&train, &val, &primary, loss)?,
            StrategyKind::Afore => train_afore(&train, &val, &primary, loss)?,
            StrategyKind::Reself => train_reself(&train, &val, &primary, &secondary, loss)?,
            StrategyKind::Osdf => train_osdf(&train, &val, &primary, run.lambda(), run.stop_gradient.unwrap_or(false))?,
        };
        dir.write(&artifact_name(kind, run.seed()), (artifact.to_json()? + "\n").as_bytes())?;
    }
    dir.finish("train", cfg, &inputs)
}

struct Loaded {
    path: PathBuf,
    artifact: StrategyArtifact,
}

fn load_artifacts(cfg: &RunConfig) -> Result<Vec<Loaded>, CliError> {
    cfg.artifacts
        .iter()
        .map(|p| {
            Ok(Loaded {
                path: p.clone(),
                artifact: StrategyArtifact::load(p)?,
            })
        })
        .collect()
}

fn test_samples(cfg: &RunConfig, data: &Data, artifact: &StrategyArtifact) -> Result<(Layout, Vec<FeatureSample>), CliError> {
    let layout = Layout::for_artifact(artifact.schema, cfg)?;
    let spec = split_spec(cfg, &data.load)?;
    let (_, _, test) = partition(layout.samples(data)?, &spec);
    non_empty("test", &test)?;
    Ok((layout, test))
}

/// One report per artifact, aggregated over seeds.
fn seed_report(cfg: &RunConfig, data: &Data, runs: &[&Loaded]) -> Result<EvaluationReport, CliError> {
    let mut reports = Vec::new();
    for (i, run) in runs.iter().enumerate() {
        let (layout, test) = test_samples(cfg, data, &run.artifact)?;
        let seed = seed_of(&run.path).unwrap_or(i as u64);
        reports.push(evaluate_samples(&run.artifact, &test, &layout.label())?.with_seed(seed));
    }
    Ok(aggregate_seeds(&reports)?)
}

fn all_inputs(cfg: &RunConfig, data_dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let mut inputs = Data::inputs(data_dir)?;
    inputs.extend(cfg.artifacts.iter().cloned());
    Ok(inputs)
}

pub fn evaluate(cfg: &RunConfig) -> Result<(), CliError> {
    let data_dir = cfg.require_data()?;
    let out = cfg.require_out()?;
    check_artifacts(cfg, 1)?;
    let inputs = all_inputs(cfg, data_dir)?;
    let runs = load_artifacts(cfg)?;
    if runs.iter().any(|r| r.artifact.kind != runs[0].artifact.kind) {
        return Err(CliError::Usage("evaluate aggregates seeds of one strategy; use compare for several".into()));
    }
    let data = Data::read(data_dir)?;
    let report = seed_report(cfg, &data, &runs.iter().collect::<Vec<_>>())?;
    let table = Comparison::from_reports(vec![report.clone()])?.to_text();
    let mut dir = OutputDir::create(out)?;
    dir.write("report.json", (report.to_json()? + "\n").as_bytes())?;
    dir.write("report.txt", table.as_bytes())?;
    dir.finish("evaluate", cfg, &inputs)?;
    print!("{table}");
    Ok(())
}

pub fn compare(cfg: &RunConfig) -> Result<(), CliError> {
    let data_dir = cfg.require_data()?;
    let out = cfg.require_out()?;
    check_artifacts(cfg, 2)?;
    let inputs = all_inputs(cfg, data_dir)?;
    let runs = load_artifacts(cfg)?;
    if runs.iter().any(|r| r.artifact.schema != runs[0].artifact.schema) {
        return Err(CliError::Usage("compared artifacts must share one feature schema".into()));
    }
    let mut kinds: Vec<StrategyKind> = Vec::new();
    for r in &runs {
        if !kinds.contains(&r.artifact.kind) {
            kinds.push(r.artifact.kind);
        }
    }
    let data = Data::read(data_dir)?;
    let rows = kinds
        .iter()
        .map(|k| {
            let group: Vec<&Loaded> = runs.iter().filter(|r| r.artifact.kind == *k).collect();
            seed_report(cfg, &data, &group)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let comparison = Comparison::from_reports(rows)?;
    let table = comparison.to_text();
    let mut dir = OutputDir::create(out)?;
    dir.write("comparison.json", (comparison.to_json()? + "\n").as_bytes())?;
    dir.write("comparison.txt", table.as_bytes())?;
    dir.finish("compare", cfg, &inputs)?;
    print!("{table}");
    Ok(())
}

pub fn predict(cfg: &RunConfig) -> Result<(), CliError> {
    let data_dir = cfg.require_data()?;
    let out = cfg.require_out()?;
    check_artifacts(cfg, 1)?;
    if cfg.artifacts.len() > 1 {
        return Err(CliError::Usage("predict takes a single --artifact".into()));
    }
    let inputs = all_inputs(cfg, data_dir)?;
    let artifact = StrategyArtifact::load(&cfg.artifacts[0])?;
    let data = Data::read(data_dir)?;
    let (_, test) = test_samples(cfg, &data, &artifact)?;
    let windows = predict_samples(&artifact, &test)?;
    let mut dir = OutputDir::create(out)?;
    dir.write("predictions.csv", plot_csv_string(&windows).as_bytes())?;
    dir.finish("predict", cfg, &inputs)
}

pub fn gapfill(cfg: &RunConfig) -> Result<(), CliError> {
    let data_dir = cfg.require_data()?;
    let out = cfg.require_out()?;
    check_artifacts(cfg, 1)?;
    let gap_start = cfg
        .gap_start
        .ok_or_else(|| CliError::Usage("--gap-start is required".into()))?;
    let inputs = all_inputs(cfg, data_dir)?;
    let artifact = StrategyArtifact::load(&cfg.artifacts[0])?;
    let data = Data::read(data_dir)?;
    let days = cfg.gap_days();

    let mut holed = data.load.clone();
    let span = holed
        .day_range(gap_start)
        .map(|r| r.start..r.start + 24 * days)
        .filter(|r| r.end <= holed.len())
        .ok_or_else(|| CliError::Data(format!("gap of {days} days from {gap_start} lies outside the load series")))?;
    if cfg.mask == Some(true) {
        for i in span.clone() {
            holed.mask(i);
        }
    }
    let filled = gap_fill(&holed, data.temperature()?, &data.calendar, &artifact, gap_start, days)?;

    let mut dir = OutputDir::create(out)?;
    dir.write("load_filled.csv", load_csv_string(&filled).as_bytes())?;
    if cfg.mask == Some(true) {
        let (actual, predicted): (Vec<f64>, Vec<f64>) = span
            .filter(|&i| !data.load.is_missing(i))
            .map(|i| (data.load.values()[i], filled.values()[i]))
            .unzip();
        if !actual.is_empty() {
            let abs = mae_rmse(&actual, &predicted, artifact.norm_constant)?;
            let report = json!({
                "gap_start": gap_start.to_string(),
                "gap_days": days,
                "strategy": artifact.kind.name(),
                "hours_scored": actual.len(),
                "mape_pct": mape(&actual, &predicted)?,
                "mae_mw": abs.mae_phys,
                "rmse_mw": abs.rmse_phys,
            });
            let text = serde_json::to_string_pretty(&report).map_err(|e| CliError::Data(e.to_string()))? + "\n";
            dir.write("gap_report.json", text.as_bytes())?;
        }
    }
    dir.finish("gapfill", cfg, &inputs)
}
