use std::fmt::Write as _;

use chrono::{DateTime, Utc};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::errors::WindowErrors;
use crate::dataset::{format_timestamp, TimeSeries, WeatherSet};
use crate::error::{ForecastError, Result};
use crate::features::{build_window, window_starts, FeatureSample, SchemaId};
use crate::strategies::{predict, StrategyArtifact};

/// Window geometry of an evaluation scenario, in hours.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub input_hours: usize,
    pub gap_hours: usize,
    pub horizon_hours: usize,
    pub stride_hours: usize,
}

impl Scenario {
    pub const DAY_AHEAD: Scenario = Scenario {
        input_hours: 72,
        gap_hours: 48,
        horizon_hours: 24,
        stride_hours: 24,
    };
    pub const WEEK_AHEAD: Scenario = Scenario {
        input_hours: 336,
        gap_hours: 48,
        horizon_hours: 168,
        stride_hours: 168,
    };

    pub fn new(input_hours: usize, gap_hours: usize, horizon_hours: usize, stride_hours: usize) -> Result<Self> {
        let s = Scenario {
            input_hours,
            gap_hours,
            horizon_hours,
            stride_hours,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.input_hours == 0 || self.horizon_hours == 0 || self.stride_hours == 0 || self.gap_hours == 0 {
            return Err(ForecastError::Parameter(format!(
                "scenario hours must all be positive, got {self:?}"
            )));
        }
        Ok(())
    }

    pub fn with_stride(self, stride_hours: usize) -> Self {
        Scenario { stride_hours, ..self }
    }

    pub fn total_hours(&self) -> usize {
        self.input_hours + self.gap_hours + self.horizon_hours
    }

    pub fn schema(&self, weather_channels: usize) -> SchemaId {
        SchemaId::Window {
            input_hours: self.input_hours,
            gap_hours: self.gap_hours,
            horizon_hours: self.horizon_hours,
            weather_channels,
        }
    }

    pub fn id(&self) -> String {
        let geometry = (self.input_hours, self.gap_hours, self.horizon_hours);
        let base = if geometry == (72, 48, 24) {
            "day_ahead".to_string()
        } else if geometry == (336, 48, 168) {
            "week_ahead".to_string()
        } else {
            format!("custom_{}_{}_{}", self.input_hours, self.gap_hours, self.horizon_hours)
        };
        format!("{base}_s{}", self.stride_hours)
    }

    /// Every window of `load` at this scenario's stride, skipping windows
    /// that touch missing values.
    pub fn samples(&self, load: &TimeSeries, weather: &WeatherSet) -> Result<Vec<FeatureSample>> {
        self.validate()?;
        let starts = window_starts(
            load.len(),
            self.input_hours,
            self.gap_hours,
            self.horizon_hours,
            self.stride_hours,
        );
        let mut out = Vec::with_capacity(starts.len());
        for s in starts {
            match build_window(
                load,
                weather,
                self.input_hours,
                self.gap_hours,
                self.horizon_hours,
                load.timestamp(s),
            ) {
                Ok(sample) => out.push(sample),
                Err(ForecastError::InsufficientHistory { .. }) => {}
                Err(e) => return Err(e),
            }
        }
        Ok(out)
    }
}

/// Scores shared by single-run and multi-seed reports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub mape_pct: f64,
    pub mae_norm: f64,
    pub mae_mw: f64,
    pub rmse_norm: f64,
    pub rmse_mw: f64,
}

impl Metrics {
    pub const NAMES: [&'static str; 5] = ["mape_pct", "mae_norm", "mae_mw", "rmse_norm", "rmse_mw"];

    pub fn values(&self) -> [f64; 5] {
        [self.mape_pct, self.mae_norm, self.mae_mw, self.rmse_norm, self.rmse_mw]
    }

    fn from_values(v: [f64; 5]) -> Self {
        Metrics {
            mape_pct: v[0],
            mae_norm: v[1],
            mae_mw: v[2],
            rmse_norm: v[3],
            rmse_mw: v[4],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedMetrics {
    pub seed: u64,
    #[serde(flatten)]
    pub metrics: Metrics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub scenario: String,
    pub strategy: String,
    /// Mean over seeds when several runs were aggregated.
    #[serde(flatten)]
    pub metrics: Metrics,
    /// Sample standard deviation over seeds; absent for a single run.
    pub std: Option<Metrics>,
    pub n_windows: usize,
    pub norm_constant: f64,
    pub seeds: Vec<u64>,
    pub per_seed: Vec<SeedMetrics>,
}

impl EvaluationReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Same report tagged with the seed that produced it.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seeds = vec![seed];
        self.per_seed = vec![SeedMetrics {
            seed,
            metrics: self.metrics,
        }];
        self
    }
}

/// Prediction and ground truth for one window.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowPrediction {
    pub target_start: DateTime<Utc>,
    pub actual: Vec<f64>,
    pub predicted: Vec<f64>,
}

/// Predictions for `samples`, evaluated in parallel and returned in order.
pub fn predict_samples(artifact: &StrategyArtifact, samples: &[FeatureSample]) -> Result<Vec<WindowPrediction>> {
    samples
        .par_iter()
        .map(|s| {
            Ok(WindowPrediction {
                target_start: s.target_start,
                actual: s.target.clone(),
                predicted: predict(artifact, s)?,
            })
        })
        .collect()
}

/// Aggregates per-window errors: MAPE and MAE are window means, RMSE is
/// the square root of the mean per-window squared error.
pub fn summarize(
    windows: &[WindowPrediction],
    norm_constant: f64,
    scenario: &str,
    strategy: &str,
) -> Result<EvaluationReport> {
    if windows.is_empty() {
        return Err(ForecastError::EmptyScenario(scenario.to_string()));
    }
    if !(norm_constant > 0.0 && norm_constant.is_finite()) {
        return Err(ForecastError::Parameter(format!(
            "normalisation constant must be positive, got {norm_constant}"
        )));
    }
    let per: Vec<WindowErrors> = windows
        .par_iter()
        .map(|w| WindowErrors::of(&w.actual, &w.predicted))
        .collect::<Result<_>>()?;
    let n = per.len() as f64;
    let mape_pct = per.iter().map(|w| w.mape_pct).sum::<f64>() / n;
    let mae = per.iter().map(|w| w.mae).sum::<f64>() / n;
    let rmse = (per.iter().map(|w| w.mse).sum::<f64>() / n).sqrt();
    Ok(EvaluationReport {
        scenario: scenario.to_string(),
        strategy: strategy.to_string(),
        metrics: Metrics {
            mape_pct,
            mae_norm: mae / norm_constant,
            mae_mw: mae,
            rmse_norm: rmse / norm_constant,
            rmse_mw: rmse,
        },
        std: None,
        n_windows: per.len(),
        norm_constant,
        seeds: Vec::new(),
        per_seed: Vec::new(),
    })
}

/// Evaluates `artifact` on pre-built samples (one window each).
pub fn evaluate_samples(artifact: &StrategyArtifact, samples: &[FeatureSample], scenario: &str) -> Result<EvaluationReport> {
    let windows = predict_samples(artifact, samples)?;
    summarize(&windows, artifact.norm_constant, scenario, artifact.kind.name())
}

fn check_scenario_schema(artifact: &StrategyArtifact, scenario: &Scenario, weather: &WeatherSet) -> Result<()> {
    let expected = scenario.schema(weather.len());
    if artifact.schema != expected {
        return Err(ForecastError::Schema {
            expected: expected.name(),
            actual: artifact.schema.name(),
        });
    }
    Ok(())
}

/// Window predictions for every scenario window of the test span.
pub fn scenario_predictions(
    artifact: &StrategyArtifact,
    load: &TimeSeries,
    weather: &WeatherSet,
    scenario: &Scenario,
) -> Result<Vec<WindowPrediction>> {
    check_scenario_schema(artifact, scenario, weather)?;
    let samples = scenario.samples(load, weather)?;
    if samples.is_empty() {
        return Err(ForecastError::EmptyScenario(scenario.id()));
    }
    predict_samples(artifact, &samples)
}

pub fn evaluate_scenario(
    artifact: &StrategyArtifact,
    load: &TimeSeries,
    weather: &WeatherSet,
    scenario: &Scenario,
) -> Result<EvaluationReport> {
    let windows = scenario_predictions(artifact, load, weather, scenario)?;
    summarize(&windows, artifact.norm_constant, &scenario.id(), artifact.kind.name())
}

/// Mean and sample standard deviation of single-seed reports of one
/// strategy on one scenario.
pub fn aggregate_seeds(runs: &[EvaluationReport]) -> Result<EvaluationReport> {
    let first = runs
        .first()
        .ok_or_else(|| ForecastError::Parameter("no runs to aggregate".into()))?;
    let mut per_seed = Vec::new();
    for r in runs {
        if r.scenario != first.scenario || r.strategy != first.strategy {
            return Err(ForecastError::Schema {
                expected: format!("{}/{}", first.strategy, first.scenario),
                actual: format!("{}/{}", r.strategy, r.scenario),
            });
        }
        if r.per_seed.is_empty() {
            return Err(ForecastError::Parameter("runs must be tagged with their seed".into()));
        }
        per_seed.extend(r.per_seed.iter().cloned());
    }
    let n = per_seed.len() as f64;
    let mut mean = [0.0; 5];
    for s in &per_seed {
        for (m, v) in mean.iter_mut().zip(s.metrics.values()) {
            *m += v / n;
        }
    }
    let std = (per_seed.len() > 1).then(|| {
        let mut var = [0.0; 5];
        for s in &per_seed {
            for ((acc, v), m) in var.iter_mut().zip(s.metrics.values()).zip(mean) {
                *acc += (v - m) * (v - m) / (n - 1.0);
            }
        }
        Metrics::from_values(var.map(f64::sqrt))
    });
    Ok(EvaluationReport {
        scenario: first.scenario.clone(),
        strategy: first.strategy.clone(),
        metrics: Metrics::from_values(mean),
        std,
        n_windows: first.n_windows,
        norm_constant: first.norm_constant,
        seeds: per_seed.iter().map(|s| s.seed).collect(),
        per_seed,
    })
}

/// `"3.559 ± 0.050"`.
pub fn format_pm(mean: f64, std: f64, decimals: usize) -> String {
    format!("{mean:.decimals$} ± {std:.decimals$}")
}

/// `"3.559 $\pm$ 0.050"`.
pub fn format_pm_latex(mean: f64, std: f64, decimals: usize) -> String {
    format!("{mean:.decimals$} $\\pm$ {std:.decimals$}")
}

/// Reports side by side with the best row per metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub rows: Vec<EvaluationReport>,
    /// `(metric name, row index)`, in the order of [`Metrics::NAMES`].
    pub best: Vec<(String, usize)>,
}

impl Comparison {
    /// Lowest value wins; ties go to the earlier row.
    pub fn from_reports(rows: Vec<EvaluationReport>) -> Result<Self> {
        if rows.is_empty() {
            return Err(ForecastError::Parameter("nothing to compare".into()));
        }
        let best = Metrics::NAMES
            .iter()
            .enumerate()
            .map(|(k, name)| {
                let mut idx = 0;
                for (i, r) in rows.iter().enumerate() {
                    if r.metrics.values()[k] < rows[idx].metrics.values()[k] {
                        idx = i;
                    }
                }
                (name.to_string(), idx)
            })
            .collect();
        Ok(Comparison { rows, best })
    }

    pub fn best_row(&self, metric: &str) -> Option<usize> {
        self.best.iter().find(|(m, _)| m == metric).map(|&(_, i)| i)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Aligned plain-text table; `*` marks the best value of each column.
    pub fn to_text(&self) -> String {
        let cell = |r: &EvaluationReport, k: usize, decimals: usize| {
            let mean = r.metrics.values()[k];
            let mut s = match r.std {
                Some(sd) => format_pm(mean, sd.values()[k], decimals),
                None => format!("{mean:.decimals$}"),
            };
            if self.best[k].1 == self.rows.iter().position(|x| std::ptr::eq(x, r)).unwrap() {
                s.push('*');
            }
            s
        };
        let header = [
            "strategy",
            "scenario",
            "MAPE (%)",
            "MAE nrm.",
            "MAE (MW)",
            "RMSE nrm.",
            "RMSE (MW)",
            "windows",
            "seeds",
        ];
        let mut table: Vec<Vec<String>> = vec![header.iter().map(|s| s.to_string()).collect()];
        for r in &self.rows {
            table.push(vec![
                r.strategy.clone(),
                r.scenario.clone(),
                cell(r, 0, 3),
                cell(r, 1, 4),
                cell(r, 2, 3),
                cell(r, 3, 4),
                cell(r, 4, 3),
                r.n_windows.to_string(),
                r.seeds.len().to_string(),
            ]);
        }
        let widths: Vec<usize> = (0..header.len())
            .map(|c| table.iter().map(|row| row[c].chars().count()).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        for row in &table {
            let line: Vec<String> = row
                .iter()
                .zip(&widths)
                .enumerate()
                .map(|(c, (v, w))| {
                    let pad = w - v.chars().count();
                    if c < 2 {
                        format!("{v}{}", " ".repeat(pad))
                    } else {
                        format!("{}{v}", " ".repeat(pad))
                    }
                })
                .collect();
            let _ = writeln!(out, "{}", line.join("  ").trim_end());
        }
        out
    }
}

/// Evaluates several artifacts of one schema on the same scenario.
pub fn compare(
    artifacts: &[&StrategyArtifact],
    load: &TimeSeries,
    weather: &WeatherSet,
    scenario: &Scenario,
) -> Result<Comparison> {
    if artifacts.len() < 2 {
        return Err(ForecastError::Parameter("compare needs at least two artifacts".into()));
    }
    for a in &artifacts[1..] {
        if a.schema != artifacts[0].schema {
            return Err(ForecastError::Schema {
                expected: artifacts[0].schema.name(),
                actual: a.schema.name(),
            });
        }
    }
    let rows = artifacts
        .iter()
        .map(|a| evaluate_scenario(a, load, weather, scenario))
        .collect::<Result<Vec<_>>>()?;
    Comparison::from_reports(rows)
}

/// CSV of `(window, timestamp, actual, predicted)` rows for plotting.
pub fn plot_csv_string(windows: &[WindowPrediction]) -> String {
    let mut out = String::from("window,timestamp,actual,predicted\n");
    for (k, w) in windows.iter().enumerate() {
        for (h, (a, p)) in w.actual.iter().zip(&w.predicted).enumerate() {
            let ts = w.target_start + chrono::Duration::hours(h as i64);
            let _ = writeln!(out, "{k},{},{a},{p}", format_timestamp(ts));
        }
    }
    out
}
