//! Seeded synthetic load and weather generators.
//!
//! Streams come from `ChaCha8Rng::seed_from_u64(seed)` in `rand_chacha`, a
//! counter-based generator whose output is identical on every platform.
//! Gaussian draws use `rand_distr::Normal` and are clipped at six standard
//! deviations so that positivity of the load can be checked up front.

use std::f64::consts::PI;

use chrono::{Datelike, Duration, NaiveDate};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::dataset::{midnight, CalendarInfo, Channel, TimeSeries, WeatherSeries, WeatherSet};
use crate::error::{ForecastError, Result};
use crate::features::{build_day_ahead_many, day_ahead_layout, FeatureSample, DAY_AHEAD_DIM};

/// Hours in a mean Gregorian year; period of the annual components.
pub const HOURS_PER_YEAR: f64 = 8765.82;
/// Noise draws are clipped to this many standard deviations.
pub const NOISE_CLIP: f64 = 6.0;

/// Month/day pairs of the synthetic holidays, repeated every year.
pub const HOLIDAYS: [(u32, u32); 12] = [
    (1, 1),
    (1, 6),
    (3, 25),
    (4, 20),
    (5, 1),
    (6, 8),
    (8, 15),
    (9, 14),
    (10, 28),
    (11, 17),
    (12, 25),
    (12, 26),
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    pub start: NaiveDate,
    pub n_hours: usize,
    pub seed: u64,
    pub base_mw: f64,
    pub daily_amp: f64,
    pub weekly_amp: f64,
    pub annual_amp: f64,
    /// Added on each weekday, Monday first.
    pub weekday_offsets: [f64; 7],
    /// Subtracted on holidays.
    pub holiday_drop: f64,
    /// MW per degree of deviation from `temp_mean`.
    pub temp_coupling: f64,
    /// Standard deviation of the hourly load noise.
    pub noise_std: f64,
    /// Standard deviation of a level shift shared by the 24 hours of a day.
    pub day_noise_std: f64,
    pub temp_mean: f64,
    pub temp_annual_amp: f64,
    pub temp_daily_amp: f64,
    pub temp_noise_std: f64,
    /// Independent weather locations; the load couples to the first.
    pub locations: usize,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            start: NaiveDate::from_ymd_opt(2016, 1, 4).unwrap(),
            n_hours: 3 * 8760,
            seed: 0,
            base_mw: 5000.0,
            daily_amp: 800.0,
            weekly_amp: 300.0,
            annual_amp: 600.0,
            weekday_offsets: [0.0, 0.0, 0.0, 0.0, 0.0, -300.0, -500.0],
            holiday_drop: 400.0,
            temp_coupling: 20.0,
            noise_std: 50.0,
            day_noise_std: 0.0,
            temp_mean: 18.0,
            temp_annual_amp: 8.0,
            temp_daily_amp: 4.0,
            temp_noise_std: 1.0,
            locations: 1,
        }
    }
}

impl SynthConfig {
    /// Every amplitude, offset, drop, coupling and noise term switched off.
    pub fn flat(base_mw: f64, n_hours: usize, seed: u64) -> Self {
        SynthConfig {
            n_hours,
            seed,
            base_mw,
            daily_amp: 0.0,
            weekly_amp: 0.0,
            annual_amp: 0.0,
            weekday_offsets: [0.0; 7],
            holiday_drop: 0.0,
            temp_coupling: 0.0,
            noise_std: 0.0,
            day_noise_std: 0.0,
            ..SynthConfig::default()
        }
    }

    /// Largest possible deviation of temperature from its mean.
    fn temp_bound(&self) -> f64 {
        self.temp_annual_amp.abs() + self.temp_daily_amp.abs() + NOISE_CLIP * self.temp_noise_std
    }

    /// Lower bound of every load value the config can produce.
    pub fn min_load(&self) -> f64 {
        let lowest_offset = self.weekday_offsets.iter().copied().fold(f64::INFINITY, f64::min);
        self.base_mw - self.daily_amp - self.weekly_amp - self.annual_amp + lowest_offset
            - self.holiday_drop.max(0.0)
            - self.temp_coupling.abs() * self.temp_bound()
            - NOISE_CLIP * (self.noise_std + self.day_noise_std)
    }

    pub fn validate(&self) -> Result<()> {
        let nonneg = [
            ("daily_amp", self.daily_amp),
            ("weekly_amp", self.weekly_amp),
            ("annual_amp", self.annual_amp),
            ("noise_std", self.noise_std),
            ("day_noise_std", self.day_noise_std),
            ("temp_annual_amp", self.temp_annual_amp),
            ("temp_daily_amp", self.temp_daily_amp),
            ("temp_noise_std", self.temp_noise_std),
        ];
        for (name, v) in nonneg {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(ForecastError::Parameter(format!("{name} must be non-negative, got {v}")));
            }
        }
        let finite = [self.base_mw, self.holiday_drop, self.temp_coupling, self.temp_mean];
        if finite.iter().chain(&self.weekday_offsets).any(|v| !v.is_finite()) {
            return Err(ForecastError::Parameter("synthetic config has non-finite values".into()));
        }
        if self.n_hours == 0 || self.locations == 0 {
            return Err(ForecastError::Parameter("n_hours and locations must be positive".into()));
        }
        let min = self.min_load();
        if !(min > 0.0) {
            return Err(ForecastError::Parameter(format!(
                "config admits non-positive loads (lower bound {min:.3} MW)"
            )));
        }
        Ok(())
    }
}

/// Output of [`generate`].
#[derive(Debug, Clone, PartialEq)]
pub struct SynthData {
    pub load: TimeSeries,
    /// Temperature of the first location.
    pub temperature: TimeSeries,
    /// Temperature, humidity, wind speed and cloudiness per location.
    pub weather: WeatherSet,
    pub calendar: CalendarInfo,
}

fn clipped(dist: &Normal<f64>, rng: &mut ChaCha8Rng, std: f64) -> f64 {
    if std == 0.0 {
        return 0.0;
    }
    dist.sample(rng).clamp(-NOISE_CLIP * std, NOISE_CLIP * std)
}

fn holidays_between(first: NaiveDate, last: NaiveDate) -> CalendarInfo {
    let days = (first.year()..=last.year()).flat_map(|y| {
        HOLIDAYS
            .iter()
            .filter_map(move |&(m, d)| NaiveDate::from_ymd_opt(y, m, d))
    });
    CalendarInfo::new(days.filter(|d| *d >= first && *d <= last))
}

/// Sine of hour `t` at the given period.
fn wave(t: f64, period: f64) -> f64 {
    (2.0 * PI * t / period).sin()
}

pub fn generate(config: &SynthConfig) -> Result<SynthData> {
    config.validate()?;
    let c = config;
    let start = midnight(c.start);
    let last_day = (start + Duration::hours(c.n_hours as i64 - 1)).date_naive();
    let calendar = holidays_between(c.start, last_day);
    let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
    let load_noise = Normal::new(0.0, c.noise_std.max(f64::MIN_POSITIVE)).unwrap();
    let day_noise = Normal::new(0.0, c.day_noise_std.max(f64::MIN_POSITIVE)).unwrap();
    let temp_noise = Normal::new(0.0, c.temp_noise_std.max(f64::MIN_POSITIVE)).unwrap();

    let mut temps: Vec<Vec<f64>> = Vec::with_capacity(c.locations);
    for k in 0..c.locations {
        // locations differ by a fixed phase lag of the seasonal cycles
        let lag = 24.0 * 3.0 * k as f64;
        temps.push(
            (0..c.n_hours)
                .map(|t| {
                    let t = t as f64;
                    c.temp_mean
                        + c.temp_annual_amp * wave(t - lag - 2600.0, HOURS_PER_YEAR)
                        + c.temp_daily_amp * wave(t - 9.0, 24.0)
                        + clipped(&temp_noise, &mut rng, c.temp_noise_std)
                })
                .collect(),
        );
    }

    let mut load = Vec::with_capacity(c.n_hours);
    let mut shift = 0.0;
    for (t, &temp) in temps[0].iter().enumerate() {
        let ts = start + Duration::hours(t as i64);
        let date = ts.date_naive();
        if t % 24 == 0 {
            shift = clipped(&day_noise, &mut rng, c.day_noise_std);
        }
        let info = calendar.day(date);
        let tf = t as f64;
        let value = c.base_mw
            + c.daily_amp * wave(tf, 24.0)
            + c.weekly_amp * wave(tf, 168.0)
            + c.annual_amp * wave(tf, HOURS_PER_YEAR)
            + c.weekday_offsets[info.day_of_week as usize]
            - if info.is_holiday { c.holiday_drop } else { 0.0 }
            + c.temp_coupling * (temp - c.temp_mean)
            + shift
            + clipped(&load_noise, &mut rng, c.noise_std);
        load.push(value);
    }

    let n = c.n_hours;
    let mut channels = Vec::with_capacity(4 * c.locations);
    for (k, temp) in temps.iter().enumerate() {
        let id = format!("loc{k}");
        let humidity: Vec<f64> = temp
            .iter()
            .enumerate()
            .map(|(t, &x)| (65.0 - 1.5 * (x - c.temp_mean) + 10.0 * wave(t as f64 + 3.0, 24.0)).clamp(0.0, 100.0))
            .collect();
        let wind: Vec<f64> = (0..n)
            .map(|t| 4.0 + 2.0 * wave(t as f64 + 5.0 * k as f64, 24.0) + wave(t as f64, 168.0))
            .collect();
        let cloud: Vec<f64> = (0..n)
            .map(|t| 50.0 + 30.0 * wave(t as f64 + 1000.0, HOURS_PER_YEAR) + 10.0 * wave(t as f64, 71.0))
            .collect();
        for (channel, values) in [
            (Channel::Temperature, temp.clone()),
            (Channel::Humidity, humidity),
            (Channel::WindSpeed, wind),
            (Channel::Cloudiness, cloud),
        ] {
            channels.push(WeatherSeries {
                location_id: id.clone(),
                series: TimeSeries::new(start, channel, values)?,
            });
        }
    }
    Ok(SynthData {
        load: TimeSeries::new(start, Channel::Load, load)?,
        temperature: TimeSeries::new(start, Channel::Temperature, temps.swap_remove(0))?,
        weather: WeatherSet::new(channels)?,
        calendar,
    })
}

/// Day-ahead samples split chronologically: the last `test_days` usable
/// days form the test set, the `val_days` before them the validation set,
/// everything earlier the training set.
pub fn day_ahead_splits(
    data: &SynthData,
    val_days: usize,
    test_days: usize,
) -> Result<(Vec<FeatureSample>, Vec<FeatureSample>, Vec<FeatureSample>)> {
    let first = data.load.first_date();
    let n_days = data.load.len() / 24;
    let days = (0..n_days).map(|k| first + Duration::days(k as i64));
    let (samples, _) = build_day_ahead_many(&data.load, &data.temperature, &data.calendar, days);
    if samples.len() <= val_days + test_days {
        return Err(ForecastError::Range(format!(
            "{} usable days cannot hold {val_days} validation and {test_days} test days",
            samples.len()
        )));
    }
    let mut train = samples;
    let test = train.split_off(train.len() - test_days);
    let val = train.split_off(train.len() - val_days);
    Ok((train, val, test))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestbedVariant {
    /// Strong weekday offsets and holiday drops.
    Weekday,
    /// No weekday offsets and no holiday drop.
    Null,
}

/// Day-ahead data on which a calendar-blind model makes systematic errors.
#[derive(Debug, Clone)]
pub struct ReselfTestbed {
    pub config: SynthConfig,
    pub data: SynthData,
    pub train: Vec<FeatureSample>,
    pub val: Vec<FeatureSample>,
    pub test: Vec<FeatureSample>,
    /// Input positions without the holiday, weekend and weekday entries.
    pub blinded: Vec<usize>,
    /// Dimension of the full schema.
    pub full_dim: usize,
}

pub fn testbed_config(seed: u64, variant: TestbedVariant) -> SynthConfig {
    let (offsets, drop) = match variant {
        TestbedVariant::Weekday => ([60.0, 90.0, 110.0, 90.0, 40.0, -300.0, -450.0], 350.0),
        TestbedVariant::Null => ([0.0; 7], 0.0),
    };
    SynthConfig {
        n_hours: 4 * 364 * 24,
        seed,
        base_mw: 3000.0,
        daily_amp: 400.0,
        weekly_amp: 0.0,
        annual_amp: 300.0,
        weekday_offsets: offsets,
        holiday_drop: drop,
        temp_coupling: 15.0,
        noise_std: 30.0,
        day_noise_std: 120.0,
        ..SynthConfig::default()
    }
}

/// Strongly weekly-seasonal series (weekly amplitude 0.3 of the base)
/// without weekday offsets or holidays.
pub fn weekly_testbed_config(seed: u64) -> SynthConfig {
    SynthConfig {
        n_hours: 2 * 364 * 24,
        seed,
        base_mw: 3000.0,
        daily_amp: 400.0,
        weekly_amp: 900.0,
        annual_amp: 300.0,
        weekday_offsets: [0.0; 7],
        holiday_drop: 0.0,
        noise_std: 30.0,
        day_noise_std: 60.0,
        ..SynthConfig::default()
    }
}

pub fn reself_testbed(seed: u64, variant: TestbedVariant) -> Result<ReselfTestbed> {
    let config = testbed_config(seed, variant);
    let data = generate(&config)?;
    let (train, val, test) = day_ahead_splits(&data, 56, 140)?;
    Ok(ReselfTestbed {
        config,
        data,
        train,
        val,
        test,
        blinded: day_ahead_layout::WITHOUT_CALENDAR.collect(),
        full_dim: DAY_AHEAD_DIM,
    })
}
