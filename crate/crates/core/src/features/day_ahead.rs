use chrono::{Duration, NaiveDate};

use super::{FeatureSample, SchemaId, DAY_AHEAD_DIM};
use crate::dataset::{midnight, CalendarInfo, TimeSeries};
use crate::error::{ForecastError, Result};

/// Positions of the day-ahead blocks inside the 171-entry input vector.
pub mod layout {
    use std::ops::Range;

    pub const LOAD_D1: Range<usize> = 0..24;
    pub const LOAD_D7: Range<usize> = 24..48;
    pub const LOAD_D28: Range<usize> = 48..72;
    pub const TEMP_D1: Range<usize> = 72..96;
    pub const TEMP_D7: Range<usize> = 96..120;
    pub const TEMP_D28: Range<usize> = 120..144;
    pub const TEMP_D: Range<usize> = 144..168;
    pub const HOLIDAY: usize = 168;
    pub const WEEKEND: usize = 169;
    pub const DAY_OF_WEEK: usize = 170;
    /// Everything but the three calendar entries.
    pub const WITHOUT_CALENDAR: Range<usize> = 0..168;
}

const LOAD_LAGS: [(i64, &str); 3] = [(1, "l_{d-1}"), (7, "l_{d-7}"), (28, "l_{d-28}")];
const TEMP_LAGS: [(i64, &str); 4] = [(1, "t_{d-1}"), (7, "t_{d-7}"), (28, "t_{d-28}"), (0, "t_d")];

fn lagged_day(series: &TimeSeries, d: NaiveDate, lag: i64, name: &str) -> Result<Vec<f64>> {
    let day = d - Duration::days(lag);
    series.day(day).ok_or_else(|| ForecastError::InsufficientHistory {
        lag: name.to_string(),
        date: d.to_string(),
    })
}

/// Input vector and anchor for target day `d`; the load of `d` itself is
/// never read. Layout: `[l_{d-1}, l_{d-7}, l_{d-28}, t_{d-1}, t_{d-7},
/// t_{d-28}, t_d, H, W, D]`.
pub fn day_ahead_input(
    load: &TimeSeries,
    temperature: &TimeSeries,
    calendar: &CalendarInfo,
    d: NaiveDate,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut input = Vec::with_capacity(DAY_AHEAD_DIM);
    for (lag, name) in LOAD_LAGS {
        input.extend(lagged_day(load, d, lag, name)?);
    }
    for (lag, name) in TEMP_LAGS {
        input.extend(lagged_day(temperature, d, lag, name)?);
    }
    let info = calendar.day(d);
    input.push(f64::from(u8::from(info.is_holiday)));
    input.push(f64::from(u8::from(info.is_weekend)));
    input.push(f64::from(info.day_of_week));
    debug_assert_eq!(input.len(), DAY_AHEAD_DIM);
    let anchor = input[layout::LOAD_D7].to_vec();
    Ok((input, anchor))
}

pub fn build_day_ahead(
    load: &TimeSeries,
    temperature: &TimeSeries,
    calendar: &CalendarInfo,
    d: NaiveDate,
) -> Result<FeatureSample> {
    let (input, anchor) = day_ahead_input(load, temperature, calendar, d)?;
    let target = lagged_day(load, d, 0, "l_d")?;
    Ok(FeatureSample {
        schema: SchemaId::DayAhead,
        input,
        target,
        anchor: Some(anchor),
        day_id: d,
        target_start: midnight(d),
    })
}

/// Samples for every day in `days` that has complete history and target;
/// days that fail are skipped and returned alongside.
pub fn build_day_ahead_many(
    load: &TimeSeries,
    temperature: &TimeSeries,
    calendar: &CalendarInfo,
    days: impl IntoIterator<Item = NaiveDate>,
) -> (Vec<FeatureSample>, Vec<(NaiveDate, ForecastError)>) {
    let mut ok = Vec::new();
    let mut skipped = Vec::new();
    for d in days {
        match build_day_ahead(load, temperature, calendar, d) {
            Ok(s) => ok.push(s),
            Err(e) => skipped.push((d, e)),
        }
    }
    (ok, skipped)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Channel;

    fn d(y: i32, m: u32, day: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(y, m, day).unwrap()
    }

    /// Load value encodes (day index, hour) so any slice is recognisable.
    fn fixtures() -> (TimeSeries, TimeSeries, NaiveDate) {
        let first = d(2024, 1, 1);
        let n = 40 * 24;
        let load = TimeSeries::new(midnight(first), Channel::Load, (0..n).map(|h| 1000.0 + h as f64).collect()).unwrap();
        let temp = TimeSeries::new(midnight(first), Channel::Temperature, (0..n).map(|h| -(h as f64)).collect()).unwrap();
        (load, temp, first)
    }

    #[test]
    fn dimension_and_anchor() {
        let (load, temp, first) = fixtures();
        let s = build_day_ahead(&load, &temp, &CalendarInfo::default(), first + Duration::days(30)).unwrap();
        assert_eq!(s.input.len(), 171);
        assert_eq!(s.target.len(), 24);
        assert_eq!(s.anchor.as_deref().unwrap(), &s.input[layout::LOAD_D7]);
    }

    #[test]
    fn matches_index_arithmetic_oracle() {
        let (load, temp, _) = fixtures();
        let cal = CalendarInfo::new([d(2024, 2, 5)]);
        let target = d(2024, 2, 5); // day index 35, a Monday holiday
        let s = build_day_ahead(&load, &temp, &cal, target).unwrap();
        let k = 35usize;
        let mut oracle = Vec::new();
        for lag in [1, 7, 28] {
            oracle.extend(((k - lag) * 24..(k - lag + 1) * 24).map(|h| 1000.0 + h as f64));
        }
        for lag in [1, 7, 28, 0] {
            oracle.extend(((k - lag) * 24..(k - lag + 1) * 24).map(|h| -(h as f64)));
        }
        oracle.extend([1.0, 0.0, 0.0]);
        assert_eq!(s.input, oracle);
        let target_oracle: Vec<f64> = (k * 24..(k + 1) * 24).map(|h| 1000.0 + h as f64).collect();
        assert_eq!(s.target, target_oracle);
    }

    #[test]
    fn calendar_flags() {
        let (load, temp, _) = fixtures();
        let cal = CalendarInfo::default();
        let sat = build_day_ahead(&load, &temp, &cal, d(2024, 2, 3)).unwrap();
        assert_eq!(sat.input[layout::WEEKEND], 1.0);
        assert_eq!(sat.input[layout::DAY_OF_WEEK], 5.0);
        let mon = build_day_ahead(&load, &temp, &cal, d(2024, 2, 5)).unwrap();
        assert_eq!(&mon.input[168..], &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn missing_lag_is_named() {
        let (load, temp, first) = fixtures();
        match build_day_ahead(&load, &temp, &CalendarInfo::default(), first + Duration::days(20)) {
            Err(ForecastError::InsufficientHistory { lag, .. }) => assert_eq!(lag, "l_{d-28}"),
            other => panic!("{other:?}"),
        }
        let mut holed = load.clone();
        holed.mask(30 * 24 + 5);
        match build_day_ahead(&holed, &temp, &CalendarInfo::default(), first + Duration::days(37)) {
            Err(ForecastError::InsufficientHistory { lag, .. }) => assert_eq!(lag, "l_{d-7}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn swapping_sources_swaps_blocks() {
        let (load, temp, first) = fixtures();
        let day = first + Duration::days(33);
        let cal = CalendarInfo::default();
        let a = build_day_ahead(&load, &temp, &cal, day).unwrap();
        let temp_as_load = TimeSeries::new(temp.start(), Channel::Load, temp.values().to_vec()).unwrap();
        let b = day_ahead_input(&temp_as_load, &load, &cal, day).unwrap().0;
        assert_eq!(&a.input[layout::LOAD_D1], &b[layout::TEMP_D1]);
        assert_eq!(&a.input[layout::TEMP_D28], &b[layout::LOAD_D28]);
    }
}
