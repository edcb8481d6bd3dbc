use chrono::{DateTime, Duration, Utc};

use super::{FeatureSample, SchemaId};
use crate::dataset::{TimeSeries, WeatherSet};
use crate::error::{ForecastError, Result};

/// Number of windows of `input + gap + horizon` hours that fit in `len`
/// hours at the given stride.
pub fn window_count(len: usize, input_hours: usize, gap_hours: usize, horizon_hours: usize, stride: usize) -> usize {
    let total = input_hours + gap_hours + horizon_hours;
    if stride == 0 || len < total {
        return 0;
    }
    (len - total) / stride + 1
}

/// Hour offsets of every window start.
pub fn window_starts(
    len: usize,
    input_hours: usize,
    gap_hours: usize,
    horizon_hours: usize,
    stride: usize,
) -> Vec<usize> {
    (0..window_count(len, input_hours, gap_hours, horizon_hours, stride))
        .map(|k| k * stride)
        .collect()
}

fn hours(series: &TimeSeries, from: DateTime<Utc>, n: usize, what: &str) -> Result<Vec<f64>> {
    let range_err = || {
        ForecastError::Range(format!(
            "{what} window {from} + {n}h is not covered by the {:?} series",
            series.channel()
        ))
    };
    let at = series.offset_of(from).ok_or_else(range_err)?;
    if at < 0 || at as usize + n > series.len() {
        return Err(range_err());
    }
    let at = at as usize;
    series.span(at..at + n).ok_or_else(|| ForecastError::InsufficientHistory {
        lag: format!("{what} ({:?})", series.channel()),
        date: from.to_string(),
    })
}

/// Window starting at `t0`: the input is `input_hours` of load followed by
/// every weather channel over the horizon span, in set order; the target is
/// the load over the horizon. The gap hours are never read.
pub fn build_window(
    load: &TimeSeries,
    weather: &WeatherSet,
    input_hours: usize,
    gap_hours: usize,
    horizon_hours: usize,
    t0: DateTime<Utc>,
) -> Result<FeatureSample> {
    if input_hours == 0 || horizon_hours == 0 {
        return Err(ForecastError::Parameter(
            "window input and horizon must be positive".into(),
        ));
    }
    let target_start = t0 + Duration::hours((input_hours + gap_hours) as i64);
    let schema = SchemaId::Window {
        input_hours,
        gap_hours,
        horizon_hours,
        weather_channels: weather.len(),
    };
    let mut input = Vec::with_capacity(schema.input_dim());
    input.extend(hours(load, t0, input_hours, "input")?);
    let target = hours(load, target_start, horizon_hours, "horizon")?;
    for w in weather.channels() {
        input.extend(hours(&w.series, target_start, horizon_hours, "weather")?);
    }
    Ok(FeatureSample {
        schema,
        input,
        target,
        anchor: None,
        day_id: target_start.date_naive(),
        target_start,
    })
}
