//! Serializable result bundle written as `report.json`.
//!
//! Floats are written in shortest round-trip form. Infinite z-scores are
//! written as the strings `"inf"` / `"-inf"` (and NaN as `"nan"`), since JSON
//! has no IEEE special values.

use std::fmt;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// A float that may be non-finite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metric(pub f64);

impl Serialize for Metric {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v = self.0;
        if v.is_finite() {
            s.serialize_f64(v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }
}

impl<'de> Deserialize<'de> for Metric {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct MetricVisitor;
        impl Visitor<'_> for MetricVisitor {
            type Value = Metric;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or one of \"inf\", \"-inf\", \"nan\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Metric, E> {
                Ok(Metric(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Metric, E> {
                Ok(Metric(v as f64))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Metric, E> {
                Ok(Metric(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Metric, E> {
                match v {
                    "inf" => Ok(Metric(f64::INFINITY)),
                    "-inf" => Ok(Metric(f64::NEG_INFINITY)),
                    "nan" => Ok(Metric(f64::NAN)),
                    other => Err(E::invalid_value(de::Unexpected::Str(other), &self)),
                }
            }
        }
        d.deserialize_any(MetricVisitor)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlignmentReport {
    pub schema_version: u32,
    pub settings: ReportSettings,
    pub input: InputSummary,
    pub replicates: Vec<ReplicateReport>,
    pub aggregates: Vec<RepresentationAggregate>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportSettings {
    pub representations: Vec<String>,
    /// Requested balanced sample size; `null` means all examples are used.
    pub n_target: Option<usize>,
    pub num_replicates: usize,
    pub sampling_mode: String,
    pub random_labelings: Option<usize>,
    pub epsilon: Option<f64>,
    pub confidence_delta: f64,
    pub seed: u64,
    pub dedup_mode: String,
    pub dedup_tolerance: f64,
    pub top_k: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputSummary {
    pub examples_loaded: usize,
    pub duplicates_dropped: usize,
    pub duplicate_groups: usize,
    pub examples_after_dedup: usize,
    /// `classes[0]` is encoded as +1, `classes[1]` as -1.
    pub classes: [String; 2],
    pub class_counts_after_dedup: [usize; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReplicateReport {
    pub replicate: usize,
    pub subsample_seed: u64,
    pub n: usize,
    /// Expected fraction of this replicate's examples that also appear in
    /// another independently drawn replicate.
    pub expected_overlap_with_other_replicate: f64,
    pub runs: Vec<RunReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunReport {
    pub representation: String,
    pub dim: usize,
    pub n: usize,
    pub sampling_seed: u64,
    pub real_ddc: f64,
    pub baseline: BaselineSummary,
    pub spectrum: SpectrumSummary,
    pub sample_count: SampleCountSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaselineSummary {
    pub mode: String,
    pub m: usize,
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
    pub ratio: Metric,
    pub zscore: Metric,
    pub ecdf_at_real: f64,
    pub dkw_gamma: f64,
    pub f_interval: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumSummary {
    pub lambda_max: f64,
    pub lambda_min: f64,
    pub ddc_lower_bound: f64,
    pub ddc_upper_bound: f64,
    pub ddc_range: f64,
    pub top_k: usize,
    pub variance_explained_top_k: f64,
    pub jensen_upper_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleCountSummary {
    /// Absolute accuracy target used for the Hoeffding count.
    pub epsilon: f64,
    pub confidence_delta: f64,
    pub hoeffding_m: usize,
    pub m_used: usize,
    /// Accuracy the Hoeffding bound guarantees at `m_used`.
    pub epsilon_at_m_used: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepresentationAggregate {
    pub representation: String,
    pub replicates: usize,
    pub real_ddc_mean: f64,
    pub real_ddc_std: f64,
    pub ratio_mean: Metric,
    pub ratio_std: Metric,
    pub zscore_mean: Metric,
    pub zscore_std: Metric,
}

/// Mean and population standard deviation.
pub(crate) fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if !mean.is_finite() {
        return (mean, f64::NAN);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}
