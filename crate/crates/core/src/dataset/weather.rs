use super::series::{Channel, TimeSeries};
use crate::error::{ForecastError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct WeatherSeries {
    pub location_id: String,
    pub series: TimeSeries,
}

impl WeatherSeries {
    pub fn channel(&self) -> Channel {
        self.series.channel()
    }
}

/// Ordered collection of weather channels. Window features concatenate the
/// channels in this order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct WeatherSet {
    channels: Vec<WeatherSeries>,
}

impl WeatherSet {
    pub fn new(channels: Vec<WeatherSeries>) -> Result<Self> {
        for (i, a) in channels.iter().enumerate() {
            if a.channel() == Channel::Load {
                return Err(ForecastError::Parameter(format!(
                    "load series cannot be a weather channel ({})",
                    a.location_id
                )));
            }
            if channels[..i]
                .iter()
                .any(|b| b.location_id == a.location_id && b.channel() == a.channel())
            {
                return Err(ForecastError::Parameter(format!(
                    "duplicate weather channel {:?} at {}",
                    a.channel(),
                    a.location_id
                )));
            }
        }
        Ok(WeatherSet { channels })
    }

    pub fn channels(&self) -> &[WeatherSeries] {
        &self.channels
    }

    pub fn len(&self) -> usize {
        self.channels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.channels.is_empty()
    }

    pub fn get(&self, location_id: &str, channel: Channel) -> Option<&TimeSeries> {
        self.channels
            .iter()
            .find(|w| w.location_id == location_id && w.channel() == channel)
            .map(|w| &w.series)
    }

    pub fn locations(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for w in &self.channels {
            if !out.contains(&w.location_id.as_str()) {
                out.push(&w.location_id);
            }
        }
        out
    }

    /// First temperature channel in set order.
    pub fn primary_temperature(&self) -> Option<&TimeSeries> {
        self.channels
            .iter()
            .find(|w| w.channel() == Channel::Temperature)
            .map(|w| &w.series)
    }

    /// Keeps only the listed channels, preserving set order.
    pub fn select(&self, channels: &[Channel]) -> WeatherSet {
        WeatherSet {
            channels: self
                .channels
                .iter()
                .filter(|w| channels.contains(&w.channel()))
                .cloned()
                .collect(),
        }
    }

    pub fn map_series(&self, mut f: impl FnMut(&TimeSeries) -> Result<TimeSeries>) -> Result<WeatherSet> {
        let channels = self
            .channels
            .iter()
            .map(|w| {
                Ok(WeatherSeries {
                    location_id: w.location_id.clone(),
                    series: f(&w.series)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(WeatherSet { channels })
    }
}
