pub mod dataset;
pub mod error;
pub mod features;
pub mod metrics;
pub mod nn;
pub mod strategies;
pub mod synth;

pub use error::{ErrorClass, ForecastError, Result};
