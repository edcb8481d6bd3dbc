use std::ops::Range;

use chrono::{DateTime, Duration, NaiveDate, NaiveTime, Timelike, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{ForecastError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Channel {
    Load,
    Temperature,
    Humidity,
    WindSpeed,
    Cloudiness,
}

impl Channel {
    pub const WEATHER: [Channel; 4] = [
        Channel::Temperature,
        Channel::Humidity,
        Channel::WindSpeed,
        Channel::Cloudiness,
    ];

    /// Column name in the CSV schemas.
    pub fn column(self) -> &'static str {
        match self {
            Channel::Load => "load_mw",
            Channel::Temperature => "temperature_c",
            Channel::Humidity => "humidity_pct",
            Channel::WindSpeed => "wind_speed_ms",
            Channel::Cloudiness => "cloudiness_pct",
        }
    }
}

pub(crate) fn is_hour_aligned(ts: &DateTime<Utc>) -> bool {
    ts.minute() == 0 && ts.second() == 0 && ts.nanosecond() == 0
}

pub fn midnight(date: NaiveDate) -> DateTime<Utc> {
    date.and_time(NaiveTime::MIN).and_utc()
}

/// Hourly series with implicit timestamps `start + i hours`. Missing hours
/// are flagged in the mask and hold `NaN`.
#[derive(Debug, Clone)]
pub struct TimeSeries {
    start: DateTime<Utc>,
    channel: Channel,
    values: Vec<f64>,
    missing: Vec<bool>,
}

/// Equal when start, channel and mask agree and observed values are identical.
impl PartialEq for TimeSeries {
    fn eq(&self, other: &Self) -> bool {
        self.start == other.start
            && self.channel == other.channel
            && self.missing == other.missing
            && self
                .values
                .iter()
                .zip(&other.values)
                .zip(&self.missing)
                .all(|((a, b), &m)| m || a == b)
    }
}

impl TimeSeries {
    /// Fully observed series. Every value must be finite.
    pub fn new(start: DateTime<Utc>, channel: Channel, values: Vec<f64>) -> Result<Self> {
        let missing = vec![false; values.len()];
        Self::with_mask(start, channel, values, missing)
    }

    pub fn with_mask(
        start: DateTime<Utc>,
        channel: Channel,
        mut values: Vec<f64>,
        missing: Vec<bool>,
    ) -> Result<Self> {
        if !is_hour_aligned(&start) {
            return Err(ForecastError::Range(format!(
                "series start {start} is not on an hour boundary"
            )));
        }
        if values.len() != missing.len() {
            return Err(ForecastError::Shape(format!(
                "{} values but {} mask entries",
                values.len(),
                missing.len()
            )));
        }
        for (i, (v, &m)) in values.iter_mut().zip(&missing).enumerate() {
            if m {
                *v = f64::NAN;
            } else if !v.is_finite() {
                return Err(ForecastError::Parameter(format!(
                    "unmasked value at hour {i} is not finite"
                )));
            }
        }
        Ok(TimeSeries {
            start,
            channel,
            values,
            missing,
        })
    }

    pub fn empty(start: DateTime<Utc>, channel: Channel) -> Result<Self> {
        Self::new(start, channel, Vec::new())
    }

    pub fn start(&self) -> DateTime<Utc> {
        self.start
    }

    /// Timestamp one hour past the last entry.
    pub fn end(&self) -> DateTime<Utc> {
        self.timestamp(self.len())
    }

    pub fn channel(&self) -> Channel {
        self.channel
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn timestamp(&self, index: usize) -> DateTime<Utc> {
        self.start + Duration::hours(index as i64)
    }

    /// Position of `ts` relative to the start, which may lie outside the series.
    pub fn offset_of(&self, ts: DateTime<Utc>) -> Option<i64> {
        let delta = ts - self.start;
        let hours = delta.num_hours();
        (Duration::hours(hours) == delta).then_some(hours)
    }

    pub fn index_of(&self, ts: DateTime<Utc>) -> Option<usize> {
        match self.offset_of(ts) {
            Some(h) if h >= 0 && (h as usize) < self.len() => Some(h as usize),
            _ => None,
        }
    }

    /// Raw values; masked entries are `NaN`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn missing_mask(&self) -> &[bool] {
        &self.missing
    }

    pub fn is_missing(&self, index: usize) -> bool {
        self.missing[index]
    }

    pub fn n_missing(&self) -> usize {
        self.missing.iter().filter(|&&m| m).count()
    }

    pub fn get(&self, index: usize) -> Option<f64> {
        match self.missing.get(index) {
            Some(false) => Some(self.values[index]),
            _ => None,
        }
    }

    /// Hour indices covering `date` (00:00 to 23:00 UTC) if the whole day
    /// lies inside the series.
    pub fn day_range(&self, date: NaiveDate) -> Option<Range<usize>> {
        let first = self.offset_of(midnight(date))?;
        if first < 0 || first as usize + 24 > self.len() {
            return None;
        }
        let first = first as usize;
        Some(first..first + 24)
    }

    /// The 24 hourly values of `date` when all of them are observed.
    pub fn day(&self, date: NaiveDate) -> Option<Vec<f64>> {
        self.span(self.day_range(date)?)
    }

    /// Observed values of `range`, `None` if any is missing or out of bounds.
    pub fn span(&self, range: Range<usize>) -> Option<Vec<f64>> {
        if range.end > self.len() || self.missing[range.clone()].iter().any(|&m| m) {
            return None;
        }
        Some(self.values[range].to_vec())
    }

    pub fn first_date(&self) -> NaiveDate {
        self.start.date_naive()
    }

    /// Sub-series of the given hour range.
    pub fn slice(&self, range: Range<usize>) -> Result<TimeSeries> {
        if range.start > range.end || range.end > self.len() {
            return Err(ForecastError::Range(format!(
                "slice {range:?} outside series of length {}",
                self.len()
            )));
        }
        Ok(TimeSeries {
            start: self.timestamp(range.start),
            channel: self.channel,
            values: self.values[range.clone()].to_vec(),
            missing: self.missing[range].to_vec(),
        })
    }

    /// Writes an observed value, clearing the mask.
    pub fn set(&mut self, index: usize, value: f64) -> Result<()> {
        if index >= self.len() {
            return Err(ForecastError::Range(format!(
                "hour {index} outside series of length {}",
                self.len()
            )));
        }
        if !value.is_finite() {
            return Err(ForecastError::Parameter(format!(
                "refusing to store non-finite value at hour {index}"
            )));
        }
        self.values[index] = value;
        self.missing[index] = false;
        Ok(())
    }

    pub fn mask(&mut self, index: usize) {
        self.values[index] = f64::NAN;
        self.missing[index] = true;
    }

    /// Observed values only.
    pub fn observed(&self) -> impl Iterator<Item = f64> + '_ {
        self.values
            .iter()
            .zip(&self.missing)
            .filter(|(_, &m)| !m)
            .map(|(&v, _)| v)
    }

    pub fn max_observed(&self) -> Option<f64> {
        self.observed().reduce(f64::max)
    }

    /// Fills each missing hour with the last observed value when that value
    /// is at most `max_hours` old; longer or leading gaps are rejected.
    pub fn fill_forward(&self, max_hours: usize) -> Result<TimeSeries> {
        let mut out = self.clone();
        let mut last: Option<(usize, f64)> = None;
        for i in 0..self.len() {
            if !self.missing[i] {
                last = Some((i, self.values[i]));
                continue;
            }
            match last {
                Some((at, v)) if i - at <= max_hours => {
                    out.values[i] = v;
                    out.missing[i] = false;
                }
                _ => {
                    return Err(ForecastError::Range(format!(
                        "{:?} gap at {} exceeds the {max_hours}h carry-forward limit",
                        self.channel,
                        self.timestamp(i)
                    )))
                }
            }
        }
        Ok(out)
    }
}
