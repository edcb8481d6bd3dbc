use std::collections::BTreeSet;
use std::path::Path;

use chrono::{Datelike, NaiveDate, Weekday};
use serde::{Deserialize, Serialize};

use crate::error::{ForecastError, Result};

/// Calendar attributes of one day. `day_of_week` counts from Monday = 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DayInfo {
    pub date: NaiveDate,
    pub is_holiday: bool,
    pub is_weekend: bool,
    pub day_of_week: u8,
    pub day_of_month: u8,
    pub day_of_year: u16,
    pub week_of_year: u8,
    pub month: u8,
    pub season: u8,
    pub year: i32,
}

/// Dec-Feb = 0, Mar-May = 1, Jun-Aug = 2, Sep-Nov = 3.
pub fn season_of_month(month: u32) -> u8 {
    match month {
        12 | 1 | 2 => 0,
        3..=5 => 1,
        6..=8 => 2,
        _ => 3,
    }
}

/// Holiday set plus derived per-day attributes.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CalendarInfo {
    holidays: BTreeSet<NaiveDate>,
}

impl CalendarInfo {
    pub fn new(holidays: impl IntoIterator<Item = NaiveDate>) -> Self {
        CalendarInfo {
            holidays: holidays.into_iter().collect(),
        }
    }

    pub fn holidays(&self) -> impl Iterator<Item = &NaiveDate> {
        self.holidays.iter()
    }

    pub fn is_holiday(&self, date: NaiveDate) -> bool {
        self.holidays.contains(&date)
    }

    pub fn day(&self, date: NaiveDate) -> DayInfo {
        let weekday = date.weekday();
        DayInfo {
            date,
            is_holiday: self.is_holiday(date),
            is_weekend: matches!(weekday, Weekday::Sat | Weekday::Sun),
            day_of_week: weekday.num_days_from_monday() as u8,
            day_of_month: date.day() as u8,
            day_of_year: date.ordinal() as u16,
            week_of_year: date.iso_week().week() as u8,
            month: date.month() as u8,
            season: season_of_month(date.month()),
            year: date.year(),
        }
    }

    pub fn holidays_in_month(&self, year: i32, month: u32) -> usize {
        self.holidays
            .iter()
            .filter(|d| d.year() == year && d.month() == month)
            .count()
    }

    /// One ISO date per line; blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut holidays = BTreeSet::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let date = NaiveDate::parse_from_str(line, "%Y-%m-%d").map_err(|e| {
                ForecastError::Format {
                    line: i + 1,
                    message: format!("bad holiday date '{line}': {e}"),
                }
            })?;
            holidays.insert(date);
        }
        Ok(CalendarInfo { holidays })
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| ForecastError::io(path, e))?;
        Self::parse(&text)
    }

    pub fn to_text(&self) -> String {
        self.holidays
            .iter()
            .map(|d| format!("{}\n", d.format("%Y-%m-%d")))
            .collect()
    }
}
