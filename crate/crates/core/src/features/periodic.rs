//! Month- and year-ahead schemas built from daily and monthly aggregates of
//! the hourly series.

use chrono::{Datelike, Duration, NaiveDate};
use serde::{Deserialize, Serialize};

use super::stats::SummaryStats;
use super::{FeatureSample, SchemaId, MONTH_AHEAD_DIM, YEAR_AHEAD_DIM};
use crate::dataset::{midnight, season_of_month, CalendarInfo, TimeSeries};
use crate::error::{ForecastError, Result};

pub const YEAR_AHEAD_LOOKBACK_MONTHS: usize = 12;
pub const MONTH_AHEAD_LOOKBACK_DAYS: usize = 10;

/// Monthly consumption (sum of hourly loads) with mean temperature and
/// humidity. `complete` is false when any hour of the month is missing in
/// any of the three series or lies outside them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonthlyRecord {
    pub year: i32,
    pub month: u32,
    pub consumption: f64,
    pub temperature: f64,
    pub humidity: f64,
    pub complete: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DailyRecord {
    pub date: NaiveDate,
    pub consumption: f64,
    pub temperature: f64,
    pub humidity: f64,
    pub complete: bool,
}

/// Sum of `load` and means of the weather series over the days in
/// `[from, to)`, or `None` if any hour is unavailable.
fn aggregate_days(
    load: &TimeSeries,
    temperature: &TimeSeries,
    humidity: &TimeSeries,
    from: NaiveDate,
    to: NaiveDate,
) -> Option<(f64, f64, f64)> {
    let hours = (to - from).num_hours() as usize;
    let span = |s: &TimeSeries| -> Option<Vec<f64>> {
        let a = s.offset_of(midnight(from))?;
        if a < 0 {
            return None;
        }
        s.span(a as usize..a as usize + hours)
    };
    let (l, t, h) = (span(load)?, span(temperature)?, span(humidity)?);
    let n = hours as f64;
    Some((
        l.iter().sum(),
        t.iter().sum::<f64>() / n,
        h.iter().sum::<f64>() / n,
    ))
}

fn first_of_next_month(year: i32, month: u32) -> NaiveDate {
    if month == 12 {
        NaiveDate::from_ymd_opt(year + 1, 1, 1).unwrap()
    } else {
        NaiveDate::from_ymd_opt(year, month + 1, 1).unwrap()
    }
}

/// One record per calendar month touched by `load`.
pub fn aggregate_monthly(load: &TimeSeries, temperature: &TimeSeries, humidity: &TimeSeries) -> Vec<MonthlyRecord> {
    if load.is_empty() {
        return Vec::new();
    }
    let first = load.first_date();
    let last = (load.end() - Duration::hours(1)).date_naive();
    let mut out = Vec::new();
    let (mut year, mut month) = (first.year(), first.month());
    loop {
        let start = NaiveDate::from_ymd_opt(year, month, 1).unwrap();
        if start > last {
            break;
        }
        let next = first_of_next_month(year, month);
        let agg = aggregate_days(load, temperature, humidity, start, next);
        out.push(MonthlyRecord {
            year,
            month,
            consumption: agg.map_or(f64::NAN, |a| a.0),
            temperature: agg.map_or(f64::NAN, |a| a.1),
            humidity: agg.map_or(f64::NAN, |a| a.2),
            complete: agg.is_some(),
        });
        (year, month) = (next.year(), next.month());
    }
    out
}

/// One record per calendar day touched by `load`.
pub fn aggregate_daily(load: &TimeSeries, temperature: &TimeSeries, humidity: &TimeSeries) -> Vec<DailyRecord> {
    if load.is_empty() {
        return Vec::new();
    }
    let first = load.first_date();
    let last = (load.end() - Duration::hours(1)).date_naive();
    first
        .iter_days()
        .take_while(|d| *d <= last)
        .map(|date| {
            let agg = aggregate_days(load, temperature, humidity, date, date + Duration::days(1));
            DailyRecord {
                date,
                consumption: agg.map_or(f64::NAN, |a| a.0),
                temperature: agg.map_or(f64::NAN, |a| a.1),
                humidity: agg.map_or(f64::NAN, |a| a.2),
                complete: agg.is_some(),
            }
        })
        .collect()
}

fn month_index(year: i32, month: u32) -> i64 {
    year as i64 * 12 + month as i64 - 1
}

/// Year-ahead sample for month `(year, month)`. Input blocks, oldest month
/// first: consumption, temperature, humidity, season, holiday count, month
/// number, year; then avg/std/min/max/skew of the 12 consumptions. Target is
/// the consumption of the month itself.
pub fn build_year_ahead(
    months: &[MonthlyRecord],
    calendar: &CalendarInfo,
    year: i32,
    month: u32,
) -> Result<FeatureSample> {
    let target_key = month_index(year, month);
    let pos = months
        .iter()
        .position(|r| month_index(r.year, r.month) == target_key)
        .ok_or_else(|| ForecastError::InsufficientHistory {
            lag: "target month".into(),
            date: format!("{year}-{month:02}"),
        })?;
    let target = &months[pos];
    if !target.complete {
        return Err(ForecastError::InsufficientHistory {
            lag: "target month".into(),
            date: format!("{year}-{month:02}"),
        });
    }
    if pos < YEAR_AHEAD_LOOKBACK_MONTHS {
        return Err(ForecastError::InsufficientHistory {
            lag: format!("{} previous months", YEAR_AHEAD_LOOKBACK_MONTHS),
            date: format!("{year}-{month:02}"),
        });
    }
    let history = &months[pos - YEAR_AHEAD_LOOKBACK_MONTHS..pos];
    for (k, r) in history.iter().enumerate() {
        let expected = target_key - (YEAR_AHEAD_LOOKBACK_MONTHS - k) as i64;
        if month_index(r.year, r.month) != expected || !r.complete {
            return Err(ForecastError::InsufficientHistory {
                lag: format!("m-{}", YEAR_AHEAD_LOOKBACK_MONTHS - k),
                date: format!("{year}-{month:02}"),
            });
        }
    }
    let consumption: Vec<f64> = history.iter().map(|r| r.consumption).collect();
    let mut input = Vec::with_capacity(YEAR_AHEAD_DIM);
    input.extend(&consumption);
    input.extend(history.iter().map(|r| r.temperature));
    input.extend(history.iter().map(|r| r.humidity));
    input.extend(history.iter().map(|r| f64::from(season_of_month(r.month))));
    input.extend(history.iter().map(|r| calendar.holidays_in_month(r.year, r.month) as f64));
    input.extend(history.iter().map(|r| r.month as f64));
    input.extend(history.iter().map(|r| r.year as f64));
    input.extend(SummaryStats::of(&consumption)?.to_array());
    debug_assert_eq!(input.len(), YEAR_AHEAD_DIM);
    let day = NaiveDate::from_ymd_opt(year, month, 1).unwrap();
    Ok(FeatureSample {
        schema: SchemaId::YearAhead,
        input,
        target: vec![target.consumption],
        anchor: None,
        day_id: day,
        target_start: midnight(day),
    })
}

/// Month-ahead sample for day `d`. Input blocks over the 10 preceding days,
/// oldest first: consumption, temperature, humidity, season, year, ISO week,
/// day of week, day of year, day of month, holiday flag, month; then
/// avg/std/min/max/skew of the 10 consumptions. Target is the consumption
/// of `d`.
pub fn build_month_ahead(days: &[DailyRecord], calendar: &CalendarInfo, d: NaiveDate) -> Result<FeatureSample> {
    let find = |date: NaiveDate| days.iter().find(|r| r.date == date && r.complete);
    let target = find(d).ok_or_else(|| ForecastError::InsufficientHistory {
        lag: "target day".into(),
        date: d.to_string(),
    })?;
    let mut history = Vec::with_capacity(MONTH_AHEAD_LOOKBACK_DAYS);
    for back in (1..=MONTH_AHEAD_LOOKBACK_DAYS as i64).rev() {
        let date = d - Duration::days(back);
        history.push(find(date).ok_or_else(|| ForecastError::InsufficientHistory {
            lag: format!("d-{back}"),
            date: d.to_string(),
        })?);
    }
    let info: Vec<_> = history.iter().map(|r| calendar.day(r.date)).collect();
    let consumption: Vec<f64> = history.iter().map(|r| r.consumption).collect();
    let mut input = Vec::with_capacity(MONTH_AHEAD_DIM);
    input.extend(&consumption);
    input.extend(history.iter().map(|r| r.temperature));
    input.extend(history.iter().map(|r| r.humidity));
    input.extend(info.iter().map(|i| f64::from(i.season)));
    input.extend(info.iter().map(|i| f64::from(i.year)));
    input.extend(info.iter().map(|i| f64::from(i.week_of_year)));
    input.extend(info.iter().map(|i| f64::from(i.day_of_week)));
    input.extend(info.iter().map(|i| f64::from(i.day_of_year)));
    input.extend(info.iter().map(|i| f64::from(i.day_of_month)));
    input.extend(info.iter().map(|i| f64::from(u8::from(i.is_holiday))));
    input.extend(info.iter().map(|i| f64::from(i.month)));
    input.extend(SummaryStats::of(&consumption)?.to_array());
    debug_assert_eq!(input.len(), MONTH_AHEAD_DIM);
    Ok(FeatureSample {
        schema: SchemaId::MonthAhead,
        input,
        target: vec![target.consumption],
        anchor: None,
        day_id: d,
        target_start: midnight(d),
    })
}
