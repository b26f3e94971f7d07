//! Versioned JSON run report.

use serde::{Deserialize, Serialize};

use foldnet_core::metrics::MetricsReport;
use foldnet_core::pipeline::{PipelineStats, UnfoldOutcome, UnfoldStatus};

pub const SCHEMA_VERSION: u32 = 1;

/// Fields that vary between otherwise identical runs.
pub const TIMING_FIELDS: &[&str] = &["wall_time_seconds"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema: u32,
    pub input: String,
    /// `progressive` or `direct`.
    pub mode: String,
    pub strategy: Option<String>,
    pub seed: u64,
    pub status: UnfoldStatus,
    pub remaining_uncollapses: usize,
    pub coverage_percent: Option<f64>,
    pub aspect_ratio: Option<f64>,
    pub hausdorff_percent: Option<f64>,
    pub wall_time_seconds: f64,
    pub stats: PipelineStats,
}

impl RunReport {
    pub fn new(input: &str, mode: &str, strategy: Option<&str>, seed: u64, outcome: &UnfoldOutcome) -> Self {
        let MetricsReport {
            status,
            coverage_percent,
            aspect_ratio,
            hausdorff_percent,
            wall_time_seconds,
        } = outcome.metrics.clone();
        Self {
            schema: SCHEMA_VERSION,
            input: input.to_string(),
            mode: mode.to_string(),
            strategy: strategy.map(str::to_string),
            seed,
            status,
            remaining_uncollapses: outcome.remaining_uncollapses(),
            coverage_percent,
            aspect_ratio,
            hausdorff_percent,
            wall_time_seconds,
            stats: outcome.stats.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

/// Removes timing fields at any depth, for replay comparisons.
pub fn strip_timing(value: &mut serde_json::Value) {
    match value {
        serde_json::Value::Object(map) => {
            for key in TIMING_FIELDS {
                map.remove(*key);
            }
            map.retain(|k, _| !k.ends_with("_time_seconds"));
            map.values_mut().for_each(strip_timing);
        }
        serde_json::Value::Array(items) => items.iter_mut().for_each(strip_timing),
        _ => {}
    }
}
