use std::ops::RangeInclusive;

use chrono::{Duration, NaiveDate};

use super::artifact::StrategyArtifact;
use crate::dataset::{CalendarInfo, TimeSeries};
use crate::error::{ForecastError, Result};
use crate::features::{day_ahead_input, SchemaId};

pub const GAP_DAYS: RangeInclusive<usize> = 4..=10;
pub const DEFAULT_GAP_DAYS: usize = 7;

/// Fills the masked hours of the `gap_days` days starting at `gap_start`
/// with day-ahead predictions, oldest day first. Each filled day becomes
/// history for the following ones. Days without masked hours are left
/// untouched, as are observed hours inside partially masked days.
pub fn gap_fill(
    load: &TimeSeries,
    temperature: &TimeSeries,
    calendar: &CalendarInfo,
    artifact: &StrategyArtifact,
    gap_start: NaiveDate,
    gap_days: usize,
) -> Result<TimeSeries> {
    if !GAP_DAYS.contains(&gap_days) {
        return Err(ForecastError::Parameter(format!(
            "gap length must be within {}..={} days, got {gap_days}",
            GAP_DAYS.start(),
            GAP_DAYS.end()
        )));
    }
    if artifact.schema != SchemaId::DayAhead {
        return Err(ForecastError::Schema {
            expected: SchemaId::DayAhead.name(),
            actual: artifact.schema.name(),
        });
    }
    let mut working = load.clone();
    for k in 0..gap_days {
        let d = gap_start + Duration::days(k as i64);
        let range = working.day_range(d).ok_or_else(|| {
            ForecastError::Range(format!("gap day {d} lies outside the load series"))
        })?;
        if !range.clone().any(|i| working.is_missing(i)) {
            continue;
        }
        let (input, anchor) = day_ahead_input(&working, temperature, calendar, d)?;
        let prediction = artifact.predict_input(&input, Some(&anchor))?;
        for (i, v) in range.zip(prediction) {
            if working.is_missing(i) {
                working.set(i, v)?;
            }
        }
    }
    Ok(working)
}
