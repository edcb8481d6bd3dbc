use std::path::{Path, PathBuf};

use gridcast_core::dataset::SplitSpec;
use gridcast_core::metrics::Scenario;
use gridcast_core::nn::TrainConfig;
use gridcast_core::strategies::{StageConfig, DEFAULT_GAP_DAYS, DEFAULT_LAMBDA};
use gridcast_core::synth::SynthConfig;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Contents of a `--config` file. Every key is optional; flags given on
/// the command line replace the corresponding key.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub data: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub artifacts: Vec<PathBuf>,

    pub preset: Option<Preset>,
    pub hours: Option<usize>,
    /// Full generator settings; replaces the preset.
    pub synth: Option<SynthConfig>,

    pub strategy: Option<String>,
    pub loss: Option<String>,
    pub lambda: Option<f64>,
    pub stop_gradient: Option<bool>,
    pub features: Option<Features>,
    pub scenario: Option<ScenarioName>,
    /// Custom window geometry; replaces `scenario`.
    pub window: Option<WindowGeometry>,
    pub stride: Option<usize>,
    pub blind_calendar: Option<bool>,
    pub primary: Option<StageConfig>,
    pub secondary: Option<StageConfig>,
    pub epochs: Option<usize>,
    pub seeds: Option<usize>,
    pub split: Option<SplitConfig>,

    pub gap_start: Option<chrono::NaiveDate>,
    pub gap_days: Option<usize>,
    pub mask: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    /// General-purpose synthetic grid.
    Default,
    /// Weekday-offset series on which a calendar-blind model errs systematically.
    Reself,
    /// The same series without weekday offsets or holidays.
    ReselfNull,
    /// Strongly weekly-seasonal series.
    Weekly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Features {
    /// Sliding windows of a scenario (`--scenario`).
    Window,
    /// The 171-entry day-ahead vector, one sample per day.
    DayAhead,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioName {
    Day,
    Week,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowGeometry {
    pub input_hours: usize,
    pub gap_hours: usize,
    pub horizon_hours: usize,
}

/// Chronological split. Either explicit date ranges or day counts taken
/// from the end of the series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum SplitConfig {
    Ranges(SplitSpec),
    Tail { val_days: usize, test_days: usize },
}

pub fn read_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
}

impl RunConfig {
    /// Keys set in `over` replace those of `self`.
    pub fn overlay(self, over: RunConfig) -> RunConfig {
        RunConfig {
            seed: over.seed.or(self.seed),
            data: over.data.or(self.data),
            out: over.out.or(self.out),
            artifacts: if over.artifacts.is_empty() { self.artifacts } else { over.artifacts },
            preset: over.preset.or(self.preset),
            hours: over.hours.or(self.hours),
            synth: over.synth.or(self.synth),
            strategy: over.strategy.or(self.strategy),
            loss: over.loss.or(self.loss),
            lambda: over.lambda.or(self.lambda),
            stop_gradient: over.stop_gradient.or(self.stop_gradient),
            features: over.features.or(self.features),
            scenario: over.scenario.or(self.scenario),
            window: if over.scenario.is_some() { over.window } else { over.window.or(self.window) },
            stride: over.stride.or(self.stride),
            blind_calendar: over.blind_calendar.or(self.blind_calendar),
            primary: over.primary.or(self.primary),
            secondary: over.secondary.or(self.secondary),
            epochs: over.epochs.or(self.epochs),
            seeds: over.seeds.or(self.seeds),
            split: over.split.or(self.split),
            gap_start: over.gap_start.or(self.gap_start),
            gap_days: over.gap_days.or(self.gap_days),
            mask: over.mask.or(self.mask),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn lambda(&self) -> f64 {
        self.lambda.unwrap_or(DEFAULT_LAMBDA)
    }

    pub fn gap_days(&self) -> usize {
        self.gap_days.unwrap_or(DEFAULT_GAP_DAYS)
    }

    pub fn features(&self) -> Features {
        self.features.unwrap_or(Features::Window)
    }

    pub fn require_out(&self) -> Result<&Path, CliError> {
        self.out
            .as_deref()
            .ok_or_else(|| CliError::Usage("--out is required".into()))
    }

    pub fn require_data(&self) -> Result<&Path, CliError> {
        self.data
            .as_deref()
            .ok_or_else(|| CliError::Usage("--data is required".into()))
    }

    /// Window scenario with the stride override applied.
    pub fn scenario(&self) -> Result<Scenario, CliError> {
        let base = match (self.window, self.scenario) {
            (Some(w), _) => Scenario {
                input_hours: w.input_hours,
                gap_hours: w.gap_hours,
                horizon_hours: w.horizon_hours,
                stride_hours: w.horizon_hours,
            },
            (None, Some(ScenarioName::Week)) => Scenario::WEEK_AHEAD,
            (None, _) => Scenario::DAY_AHEAD,
        };
        let s = match self.stride {
            Some(stride) => base.with_stride(stride),
            None => base,
        };
        s.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(s)
    }

    /// Stage settings with the run seed, and the epoch override, applied.
    pub fn stages(&self) -> (StageConfig, StageConfig) {
        let seed = self.seed();
        let mut primary = self.primary.clone().unwrap_or_else(default_stage);
        let mut secondary = self.secondary.clone().unwrap_or_else(default_stage);
        primary.train.seed = seed;
        secondary.train.seed = seed.wrapping_add(1000);
        if let Some(epochs) = self.epochs {
            primary.train.epochs = epochs;
            secondary.train.epochs = epochs;
        }
        (primary, secondary)
    }
}

fn default_stage() -> StageConfig {
    StageConfig {
        hidden: vec![32],
        train: TrainConfig {
            epochs: 200,
            learning_rate: 3e-3,
            early_stop_patience: Some(30),
            ..TrainConfig::default()
        },
        feature_subset: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"seed": 1, "sede": 2}"#).is_err());
        assert!(serde_json::from_str::<RunConfig>(r#"{"primary": {"hiden": [3]}}"#).is_err());
    }

    #[test]
    fn flags_win() {
        let file: RunConfig = serde_json::from_str(r#"{"seed": 1, "loss": "l1", "epochs": 5}"#).unwrap();
        let flags = RunConfig {
            seed: Some(9),
            ..RunConfig::default()
        };
        let r = file.overlay(flags);
        assert_eq!((r.seed(), r.loss.as_deref(), r.epochs), (9, Some("l1"), Some(5)));
    }

    #[test]
    fn split_forms() {
        let tail: SplitConfig = serde_json::from_str(r#"{"val_days": 5, "test_days": 9}"#).unwrap();
        assert_eq!(tail, SplitConfig::Tail { val_days: 5, test_days: 9 });
        let ranges: SplitConfig = serde_json::from_str(
            r#"{"train": {"start": "2020-01-01", "end": "2020-02-01"},
                "validation": {"start": "2020-02-01", "end": "2020-03-01"},
                "test": {"start": "2020-03-01", "end": "2020-04-01"}}"#,
        )
        .unwrap();
        assert!(matches!(ranges, SplitConfig::Ranges(_)));
    }

    #[test]
    fn scenario_resolution() {
        let mut c = RunConfig::default();
        assert_eq!(c.scenario().unwrap(), Scenario::DAY_AHEAD);
        c.scenario = Some(ScenarioName::Week);
        c.stride = Some(24);
        assert_eq!(c.scenario().unwrap(), Scenario::WEEK_AHEAD.with_stride(24));
        c.stride = Some(0);
        assert!(c.scenario().is_err());
    }

    #[test]
    fn stage_seeds_follow_run_seed() {
        let c = RunConfig {
            seed: Some(4),
            epochs: Some(3),
            ..RunConfig::default()
        };
        let (p, s) = c.stages();
        assert_eq!((p.train.seed, s.train.seed, p.train.epochs), (4, 1004, 3));
    }
}
