//! Error metrics, scenario evaluation and report formatting.

mod errors;
mod report;

pub use errors::{mae_rmse, mape, AbsoluteErrors};
pub use report::{
    aggregate_seeds, compare, evaluate_samples, evaluate_scenario, format_pm, format_pm_latex, plot_csv_string,
    predict_samples, scenario_predictions, summarize, Comparison, EvaluationReport, Metrics, Scenario, SeedMetrics,
    WindowPrediction,
};
