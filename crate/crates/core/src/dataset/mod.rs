//! Hourly series ingestion, calendar metadata, chronological splits and
//! feature normalisation.

mod calendar;
mod io;
mod normalize;
mod series;
mod split;
mod weather;

pub use calendar::{season_of_month, CalendarInfo, DayInfo};
pub use io::{
    export_load_csv, export_weather_csv, format_timestamp, ingest_csv, ingest_weather, load_csv_string,
    parse_load_csv, parse_timestamp, parse_weather_csv, weather_csv_string,
};
pub use normalize::{Normalizer, STD_FLOOR};
pub use series::{midnight, Channel, TimeSeries};
pub use split::{split, DateRange, SplitSpec};
pub use weather::{WeatherSeries, WeatherSet};
