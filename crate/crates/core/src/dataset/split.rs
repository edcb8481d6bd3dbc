use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::series::{midnight, TimeSeries};
use crate::error::{ForecastError, Result};

/// Half-open range of whole days `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DateRange {
    pub start: NaiveDate,
    pub end: NaiveDate,
}

impl DateRange {
    pub fn new(start: NaiveDate, end: NaiveDate) -> Result<Self> {
        if end < start {
            return Err(ForecastError::Range(format!("range end {end} precedes start {start}")));
        }
        Ok(DateRange { start, end })
    }

    pub fn is_empty(&self) -> bool {
        self.start >= self.end
    }

    pub fn contains(&self, date: NaiveDate) -> bool {
        self.start <= date && date < self.end
    }

    pub fn n_days(&self) -> usize {
        (self.end - self.start).num_days().max(0) as usize
    }

    pub fn days(&self) -> impl Iterator<Item = NaiveDate> {
        self.start.iter_days().take(self.n_days())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitSpec {
    pub train: DateRange,
    pub validation: DateRange,
    pub test: DateRange,
}

impl SplitSpec {
    pub fn new(train: DateRange, validation: DateRange, test: DateRange) -> Result<Self> {
        let spec = SplitSpec {
            train,
            validation,
            test,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Contiguous chronological split of `n_days` starting at `first`, with
    /// `train_days` and `val_days` leading and the remainder as test.
    pub fn contiguous(first: NaiveDate, n_days: usize, train_days: usize, val_days: usize) -> Result<Self> {
        if train_days + val_days > n_days {
            return Err(ForecastError::Range(format!(
                "{train_days} train + {val_days} validation days exceed {n_days}"
            )));
        }
        let at = |k: usize| first + chrono::Duration::days(k as i64);
        SplitSpec::new(
            DateRange::new(first, at(train_days))?,
            DateRange::new(at(train_days), at(train_days + val_days))?,
            DateRange::new(at(train_days + val_days), at(n_days))?,
        )
    }

    pub fn validate(&self) -> Result<()> {
        for r in [self.train, self.validation, self.test] {
            if r.end < r.start {
                return Err(ForecastError::Range(format!("range {} .. {} is reversed", r.start, r.end)));
            }
        }
        if self.train.end > self.validation.start || self.validation.end > self.test.start {
            return Err(ForecastError::Range(
                "split ranges must be disjoint and ordered train < validation < test".into(),
            ));
        }
        Ok(())
    }

    pub fn contains_any(&self, date: NaiveDate) -> Option<&'static str> {
        if self.train.contains(date) {
            Some("train")
        } else if self.validation.contains(date) {
            Some("validation")
        } else if self.test.contains(date) {
            Some("test")
        } else {
            None
        }
    }
}

fn cut(series: &TimeSeries, range: DateRange) -> Result<TimeSeries> {
    if range.is_empty() {
        return TimeSeries::empty(midnight(range.start), series.channel());
    }
    let (from, to) = (
        series.offset_of(midnight(range.start)),
        series.offset_of(midnight(range.end)),
    );
    match (from, to) {
        (Some(a), Some(b)) if a >= 0 && b as usize <= series.len() => series.slice(a as usize..b as usize),
        _ => Err(ForecastError::Range(format!(
            "range {} .. {} outside series span {} .. {}",
            range.start,
            range.end,
            series.start(),
            series.end()
        ))),
    }
}

/// Cuts `series` into its train, validation and test spans.
pub fn split(series: &TimeSeries, spec: &SplitSpec) -> Result<(TimeSeries, TimeSeries, TimeSeries)> {
    spec.validate()?;
    Ok((
        cut(series, spec.train)?,
        cut(series, spec.validation)?,
        cut(series, spec.test)?,
    ))
}
