//! Input vectors for the day-ahead, month-ahead and year-ahead schemas and
//! for sliding-window scenarios.

mod day_ahead;
mod periodic;
mod stats;
mod window;

use chrono::{DateTime, NaiveDate, Utc};
use serde::{Deserialize, Serialize};

use crate::nn::Supervised;

pub use day_ahead::{build_day_ahead, build_day_ahead_many, day_ahead_input, layout as day_ahead_layout};
pub use periodic::{
    aggregate_daily, aggregate_monthly, build_month_ahead, build_year_ahead, DailyRecord, MonthlyRecord,
    MONTH_AHEAD_LOOKBACK_DAYS, YEAR_AHEAD_LOOKBACK_MONTHS,
};
pub use stats::{skewness, SummaryStats};
pub use window::{build_window, window_count, window_starts};

pub const HOURS_PER_DAY: usize = 24;
/// Seven 24-hour load/temperature blocks plus holiday, weekend and weekday flags.
pub const DAY_AHEAD_DIM: usize = 24 * 7 + 3;
/// Seven 12-month blocks plus five summary statistics.
pub const YEAR_AHEAD_DIM: usize = 12 * 7 + 5;
/// Eleven 10-day blocks plus five summary statistics.
pub const MONTH_AHEAD_DIM: usize = 10 * 11 + 5;

const _: () = assert!(DAY_AHEAD_DIM == 171 && YEAR_AHEAD_DIM == 89 && MONTH_AHEAD_DIM == 115);

/// Identifies the layout of a sample's input and target vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SchemaId {
    DayAhead,
    YearAhead,
    MonthAhead,
    Window {
        input_hours: usize,
        gap_hours: usize,
        horizon_hours: usize,
        weather_channels: usize,
    },
}

impl SchemaId {
    pub fn input_dim(&self) -> usize {
        match *self {
            SchemaId::DayAhead => DAY_AHEAD_DIM,
            SchemaId::YearAhead => YEAR_AHEAD_DIM,
            SchemaId::MonthAhead => MONTH_AHEAD_DIM,
            SchemaId::Window {
                input_hours,
                horizon_hours,
                weather_channels,
                ..
            } => input_hours + weather_channels * horizon_hours,
        }
    }

    pub fn target_dim(&self) -> usize {
        match *self {
            SchemaId::DayAhead => HOURS_PER_DAY,
            SchemaId::YearAhead | SchemaId::MonthAhead => 1,
            SchemaId::Window { horizon_hours, .. } => horizon_hours,
        }
    }

    pub fn name(&self) -> String {
        match *self {
            SchemaId::DayAhead => "day_ahead".into(),
            SchemaId::YearAhead => "year_ahead".into(),
            SchemaId::MonthAhead => "month_ahead".into(),
            SchemaId::Window {
                input_hours,
                gap_hours,
                horizon_hours,
                weather_channels,
            } => format!("window_{input_hours}_{gap_hours}_{horizon_hours}_w{weather_channels}"),
        }
    }
}

/// One prediction instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSample {
    pub schema: SchemaId,
    pub input: Vec<f64>,
    pub target: Vec<f64>,
    /// Loads of the same 24 hours one week before the target day.
    pub anchor: Option<Vec<f64>>,
    pub day_id: NaiveDate,
    /// Timestamp of the first target hour.
    pub target_start: DateTime<Utc>,
}

impl Supervised for FeatureSample {
    fn input(&self) -> &[f64] {
        &self.input
    }
    fn target(&self) -> &[f64] {
        &self.target
    }
}
