//! Loading, featurizing and preparing labeled datasets.
//!
//! Every builder produces a [`Dataset`] whose rows are ℓ2-normalized, the
//! precondition for the ReLU kernel in [`crate::gram`].

mod builders;
mod dedup;
mod sample;
mod synth;
mod tokenize;

use std::collections::HashSet;

pub use builders::{
    build_bow, build_coordinates, build_dense, build_mean_static, RepresentationSpec, VectorTable,
};
pub use dedup::{dedup, DedupMode, DedupOutcome, DEFAULT_DEDUP_TOLERANCE};
pub use sample::{balanced_indices, subsample_balanced};
pub use synth::{
    inject_duplicate_pair, synth_blobs, synth_disjoint_vocab_corpus, synth_gaussian_classes,
    synth_topic_corpus, BlobAxis, DUPLICATE_PAIR_SEPARATION,
};
pub use tokenize::Tokenizer;

use crate::error::{Error, Result};

/// Maximum allowed deviation of a row norm from 1.
pub const NORM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum Content {
    Text(String),
    Vector(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub id: String,
    pub content: Content,
    pub label: String,
}

/// Raw labeled records before featurization.
///
/// Exactly two label strings must be present. They are sorted; the first one
/// maps to `+1` and the second to `-1`.
#[derive(Debug, Clone)]
pub struct RawCorpus {
    records: Vec<Record>,
    classes: [String; 2],
}

impl RawCorpus {
    pub fn new(records: Vec<Record>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(records.len());
        for r in &records {
            if !seen.insert(r.id.as_str()) {
                return Err(Error::data(format!("duplicate record id `{}`", r.id)));
            }
        }
        let mut labels: Vec<&str> = records.iter().map(|r| r.label.as_str()).collect();
        labels.sort_unstable();
        labels.dedup();
        if labels.len() != 2 {
            return Err(Error::data(format!(
                "expected exactly two distinct labels, found {}: {:?}",
                labels.len(),
                labels.iter().take(5).collect::<Vec<_>>()
            )));
        }
        let classes = [labels[0].to_string(), labels[1].to_string()];
        Ok(Self { records, classes })
    }

    pub fn records(&self) -> &[Record] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn classes(&self) -> &[String; 2] {
        &self.classes
    }

    pub fn ids(&self) -> Vec<String> {
        self.records.iter().map(|r| r.id.clone()).collect()
    }

    pub fn labels(&self) -> Vec<f64> {
        self.records
            .iter()
            .map(|r| {
                if r.label == self.classes[0] {
                    1.0
                } else {
                    -1.0
                }
            })
            .collect()
    }
}

/// A labeled set of unit-norm representation vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    ids: Vec<String>,
    rows: Vec<f64>,
    dim: usize,
    labels: Vec<f64>,
    classes: [String; 2],
}

impl Dataset {
    /// Builds a dataset from rows that are already unit norm.
    pub fn new(
        ids: Vec<String>,
        rows: Vec<f64>,
        dim: usize,
        labels: Vec<f64>,
        classes: [String; 2],
    ) -> Result<Self> {
        let n = ids.len();
        if dim == 0 {
            return Err(Error::data("representation dimension must be positive"));
        }
        if rows.len() != n * dim {
            return Err(Error::data(format!(
                "row buffer has {} values, expected {n} x {dim}",
                rows.len()
            )));
        }
        if labels.len() != n {
            return Err(Error::data(format!(
                "{} labels for {n} examples",
                labels.len()
            )));
        }
        if let Some(i) = labels.iter().position(|&y| y != 1.0 && y != -1.0) {
            return Err(Error::data(format!(
                "label of `{}` is {}, expected +1 or -1",
                ids[i], labels[i]
            )));
        }
        let mut seen = HashSet::with_capacity(n);
        for id in &ids {
            if !seen.insert(id.as_str()) {
                return Err(Error::data(format!("duplicate example id `{id}`")));
            }
        }
        for (i, row) in rows.chunks_exact(dim).enumerate() {
            let norm = norm2(row);
            if (norm - 1.0).abs() >= NORM_TOLERANCE || norm.is_nan() {
                return Err(Error::data(format!(
                    "row `{}` has norm {norm}, expected 1",
                    ids[i]
                )));
            }
        }
        Ok(Self {
            ids,
            rows,
            dim,
            labels,
            classes,
        })
    }

    /// Builds a dataset from raw rows, ℓ2-normalizing each one.
    ///
    /// A zero (or non-finite) row cannot be normalized and is rejected with its id.
    pub fn from_raw_rows(
        ids: Vec<String>,
        mut rows: Vec<f64>,
        dim: usize,
        labels: Vec<f64>,
        classes: [String; 2],
    ) -> Result<Self> {
        if dim == 0 || rows.len() != ids.len() * dim {
            return Err(Error::data(format!(
                "row buffer has {} values, expected {} x {dim}",
                rows.len(),
                ids.len()
            )));
        }
        for (i, row) in rows.chunks_exact_mut(dim).enumerate() {
            if !normalize_in_place(row) {
                return Err(Error::data(format!(
                    "example `{}` has a zero or non-finite vector and cannot be normalized",
                    ids[i]
                )));
            }
        }
        Self::new(ids, rows, dim, labels, classes)
    }

    pub fn n(&self) -> usize {
        self.ids.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i * self.dim..(i + 1) * self.dim]
    }

    /// Row-major `n x dim` buffer.
    pub fn rows(&self) -> &[f64] {
        &self.rows
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    /// Label strings; `classes()[0]` is encoded as `+1`, `classes()[1]` as `-1`.
    pub fn classes(&self) -> &[String; 2] {
        &self.classes
    }

    pub fn class_name(&self, label: f64) -> &str {
        if label > 0.0 {
            &self.classes[0]
        } else {
            &self.classes[1]
        }
    }

    /// Same examples with a different labeling.
    pub fn with_labels(&self, labels: Vec<f64>) -> Result<Self> {
        Self::new(
            self.ids.clone(),
            self.rows.clone(),
            self.dim,
            labels,
            self.classes.clone(),
        )
    }

    /// Examples at `indices`, in the given order.
    pub fn select(&self, indices: &[usize]) -> Self {
        let mut rows = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            rows.extend_from_slice(self.row(i));
        }
        Self {
            ids: indices.iter().map(|&i| self.ids[i].clone()).collect(),
            rows,
            dim: self.dim,
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            classes: self.classes.clone(),
        }
    }

    /// Keeps only the examples whose id is in `keep`, preserving order.
    pub fn retain_ids(&self, keep: &HashSet<&str>) -> Self {
        let indices: Vec<usize> = (0..self.n())
            .filter(|&i| keep.contains(self.ids[i].as_str()))
            .collect();
        self.select(&indices)
    }

    /// Appends examples, validating the combined dataset.
    pub fn extend(&self, ids: &[String], rows: &[f64], labels: &[f64]) -> Result<Self> {
        let mut all_ids = self.ids.clone();
        all_ids.extend_from_slice(ids);
        let mut all_rows = self.rows.clone();
        all_rows.extend_from_slice(rows);
        let mut all_labels = self.labels.clone();
        all_labels.extend_from_slice(labels);
        Self::new(
            all_ids,
            all_rows,
            self.dim,
            all_labels,
            self.classes.clone(),
        )
    }

    pub fn max_norm_deviation(&self) -> f64 {
        self.rows
            .chunks_exact(self.dim)
            .map(|r| (norm2(r) - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

pub(crate) fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Scales `v` to unit length. Returns false when that is impossible.
pub(crate) fn normalize_in_place(v: &mut [f64]) -> bool {
    let norm = norm2(v);
    if norm == 0.0 || !norm.is_finite() {
        return false;
    }
    for x in v.iter_mut() {
        *x /= norm;
    }
    true
}
