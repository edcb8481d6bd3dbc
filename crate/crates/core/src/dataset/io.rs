//! CSV schemas.
//!
//! Load: `timestamp,load_mw`. Weather:
//! `timestamp,location_id,temperature_c,humidity_pct,wind_speed_ms,cloudiness_pct`.
//! Timestamps are ISO-8601 UTC on hour boundaries, rows strictly increasing
//! (per location for weather). Hours absent from the file become missing
//! entries, as do empty value fields.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use chrono::{DateTime, NaiveDateTime, Utc};

use super::series::{is_hour_aligned, Channel, TimeSeries};
use super::weather::{WeatherSeries, WeatherSet};
use crate::error::{ForecastError, Result};

const LOAD_HEADER: [&str; 2] = ["timestamp", "load_mw"];
const WEATHER_HEADER: [&str; 6] = [
    "timestamp",
    "location_id",
    "temperature_c",
    "humidity_pct",
    "wind_speed_ms",
    "cloudiness_pct",
];

pub fn format_timestamp(ts: DateTime<Utc>) -> String {
    ts.format("%Y-%m-%dT%H:%M:%SZ").to_string()
}

pub fn parse_timestamp(text: &str) -> Option<DateTime<Utc>> {
    let text = text.trim();
    if let Ok(ts) = DateTime::parse_from_rfc3339(text) {
        return Some(ts.with_timezone(&Utc));
    }
    ["%Y-%m-%dT%H:%M:%S", "%Y-%m-%d %H:%M:%S", "%Y-%m-%dT%H:%M"]
        .iter()
        .find_map(|f| NaiveDateTime::parse_from_str(text, f).ok())
        .map(|n| n.and_utc())
}

fn format_err(line: usize, message: impl Into<String>) -> ForecastError {
    ForecastError::Format {
        line,
        message: message.into(),
    }
}

fn read_records(text: &str, expected: &[&str]) -> Result<Vec<(usize, csv::StringRecord)>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| format_err(1, format!("unreadable header: {e}")))?
        .clone();
    if header.iter().collect::<Vec<_>>() != expected {
        return Err(format_err(
            1,
            format!("expected header '{}', got '{}'", expected.join(","), header.iter().collect::<Vec<_>>().join(",")),
        ));
    }
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
            format_err(line, e.to_string())
        })?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        out.push((line, record));
    }
    Ok(out)
}

fn parse_value(line: usize, column: &str, field: &str) -> Result<Option<f64>> {
    if field.is_empty() {
        return Ok(None);
    }
    match field.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(Some(v)),
        _ => Err(format_err(line, format!("unparsable {column} value '{field}'"))),
    }
}

fn parse_row_time(line: usize, field: &str) -> Result<DateTime<Utc>> {
    let ts = parse_timestamp(field).ok_or_else(|| format_err(line, format!("unparsable timestamp '{field}'")))?;
    if !is_hour_aligned(&ts) {
        return Err(format_err(line, format!("timestamp '{field}' is not on an hour boundary")));
    }
    Ok(ts)
}

/// Accumulates strictly increasing hourly rows into a gap-masked series.
struct SeriesBuilder {
    start: Option<DateTime<Utc>>,
    last: Option<DateTime<Utc>>,
    values: Vec<f64>,
    missing: Vec<bool>,
}

impl SeriesBuilder {
    fn new() -> Self {
        SeriesBuilder {
            start: None,
            last: None,
            values: Vec::new(),
            missing: Vec::new(),
        }
    }

    fn push(&mut self, line: usize, ts: DateTime<Utc>, value: Option<f64>) -> Result<()> {
        if let Some(last) = self.last {
            if ts == last {
                return Err(format_err(line, format!("duplicate timestamp {}", format_timestamp(ts))));
            }
            if ts < last {
                return Err(format_err(line, format!("out-of-order timestamp {}", format_timestamp(ts))));
            }
            let skipped = (ts - last).num_hours() - 1;
            for _ in 0..skipped {
                self.values.push(f64::NAN);
                self.missing.push(true);
            }
        } else {
            self.start = Some(ts);
        }
        self.last = Some(ts);
        self.values.push(value.unwrap_or(f64::NAN));
        self.missing.push(value.is_none());
        Ok(())
    }

    fn finish(self, channel: Channel) -> Result<TimeSeries> {
        let start = self.start.ok_or_else(|| format_err(1, "no data rows"))?;
        TimeSeries::with_mask(start, channel, self.values, self.missing)
    }
}

pub fn parse_load_csv(text: &str) -> Result<TimeSeries> {
    let mut builder = SeriesBuilder::new();
    for (line, record) in read_records(text, &LOAD_HEADER)? {
        if record.len() != 2 {
            return Err(format_err(line, format!("expected 2 fields, got {}", record.len())));
        }
        let ts = parse_row_time(line, &record[0])?;
        let v = parse_value(line, "load_mw", &record[1])?;
        builder.push(line, ts, v)?;
    }
    builder.finish(Channel::Load)
}

pub fn parse_weather_csv(text: &str) -> Result<WeatherSet> {
    let mut per_location: BTreeMap<String, Vec<SeriesBuilder>> = BTreeMap::new();
    for (line, record) in read_records(text, &WEATHER_HEADER)? {
        if record.len() != 6 {
            return Err(format_err(line, format!("expected 6 fields, got {}", record.len())));
        }
        let ts = parse_row_time(line, &record[0])?;
        let location = record[1].to_string();
        if location.is_empty() {
            return Err(format_err(line, "empty location_id"));
        }
        let builders = per_location
            .entry(location)
            .or_insert_with(|| (0..4).map(|_| SeriesBuilder::new()).collect());
        for (k, channel) in Channel::WEATHER.iter().enumerate() {
            let v = parse_value(line, channel.column(), &record[2 + k])?;
            builders[k].push(line, ts, v)?;
        }
    }
    if per_location.is_empty() {
        return Err(format_err(1, "no data rows"));
    }
    let mut channels = Vec::new();
    for (location_id, builders) in per_location {
        for (builder, channel) in builders.into_iter().zip(Channel::WEATHER) {
            channels.push(WeatherSeries {
                location_id: location_id.clone(),
                series: builder.finish(channel)?,
            });
        }
    }
    WeatherSet::new(channels)
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| ForecastError::io(path, e))
}

/// Reads one channel. Weather channels require a single-location file; use
/// [`ingest_weather`] for multi-location data.
pub fn ingest_csv(path: impl AsRef<Path>, channel: Channel) -> Result<TimeSeries> {
    let text = read_text(path.as_ref())?;
    if channel == Channel::Load {
        return parse_load_csv(&text);
    }
    let set = parse_weather_csv(&text)?;
    let locations = set.locations();
    if locations.len() != 1 {
        return Err(ForecastError::Parameter(format!(
            "{} locations in weather file; select one via ingest_weather",
            locations.len()
        )));
    }
    let loc = locations[0].to_string();
    Ok(set.get(&loc, channel).expect("every location carries all channels").clone())
}

pub fn ingest_weather(path: impl AsRef<Path>) -> Result<WeatherSet> {
    parse_weather_csv(&read_text(path.as_ref())?)
}

/// Observed rows only, shortest round-trip float formatting.
pub fn load_csv_string(series: &TimeSeries) -> String {
    let mut out = String::from("timestamp,load_mw\n");
    for i in 0..series.len() {
        if let Some(v) = series.get(i) {
            let _ = writeln!(out, "{},{}", format_timestamp(series.timestamp(i)), v);
        }
    }
    out
}

/// Rows for every hour where at least one channel of the location is
/// observed; unobserved fields are left empty.
pub fn weather_csv_string(set: &WeatherSet) -> Result<String> {
    let mut out = WEATHER_HEADER.join(",");
    out.push('\n');
    for location in set.locations() {
        let series: Vec<Option<&TimeSeries>> =
            Channel::WEATHER.iter().map(|&c| set.get(location, c)).collect();
        let reference = series
            .iter()
            .flatten()
            .next()
            .ok_or_else(|| ForecastError::Parameter(format!("no channels for {location}")))?;
        if series.iter().flatten().any(|s| s.start() != reference.start() || s.len() != reference.len()) {
            return Err(ForecastError::Parameter(format!(
                "channels of {location} are not aligned"
            )));
        }
        for i in 0..reference.len() {
            let fields: Vec<Option<f64>> = series.iter().map(|s| s.and_then(|s| s.get(i))).collect();
            if fields.iter().all(Option::is_none) {
                continue;
            }
            let _ = write!(out, "{},{}", format_timestamp(reference.timestamp(i)), location);
            for f in fields {
                match f {
                    Some(v) => {
                        let _ = write!(out, ",{v}");
                    }
                    None => out.push(','),
                }
            }
            out.push('\n');
        }
    }
    Ok(out)
}

pub fn export_load_csv(series: &TimeSeries, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, load_csv_string(series)).map_err(|e| ForecastError::io(path, e))
}

pub fn export_weather_csv(set: &WeatherSet, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, weather_csv_string(set)?).map_err(|e| ForecastError::io(path, e))
}
