//! Synthetic datasets with known alignment structure.

use std::f64::consts::FRAC_PI_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{normalize_in_place, Content, Dataset, RawCorpus, Record};
use crate::error::{Error, Result};

/// Distance between the two rows appended by [`inject_duplicate_pair`].
///
/// Large enough to survive deduplication at the default tolerance and to keep
/// the smallest eigenvalue above the singularity floor, small enough to
/// dominate the spectrum's low end.
pub const DUPLICATE_PAIR_SEPARATION: f64 = 1e-6;

/// Which plane axis carries the class separation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlobAxis {
    X,
    Y,
}

fn blob_classes() -> [String; 2] {
    ["pos".to_string(), "neg".to_string()]
}

/// Embeds a scalar coordinate as a point on the unit circle via a bounded
/// monotone angle map, so normalization keeps the ordering of coordinates.
fn circle_embedding(t: f64) -> [f64; 2] {
    let theta = FRAC_PI_2 * (t / 4.0).tanh();
    [theta.cos(), theta.sin()]
}

/// Two unit-variance Gaussian blobs in the plane, centered at `±separation/2`
/// on the labeled axis. Returns the x-only and y-only representations.
///
/// Points are redrawn until every coordinate is at least `1/n` away from the
/// same coordinate of all earlier points. Without that spacing, neighbors on
/// the one-dimensional projections become near-duplicates and the baseline is
/// dominated by the duplicate pathology.
pub fn synth_blobs(
    n: usize,
    separation: f64,
    axis: BlobAxis,
    seed: u64,
) -> Result<(Dataset, Dataset)> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(Error::config(format!(
            "blob scenario needs a positive even n, got {n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let min_gap = 1.0 / n as f64;
    let labels: Vec<f64> = (0..n).map(|i| if i < n / 2 { 1.0 } else { -1.0 }).collect();
    let mut points: Vec<[f64; 2]> = Vec::with_capacity(n);
    for &y in &labels {
        let shift = y * separation / 2.0;
        let p = loop {
            let mut p = [
                rng.sample::<f64, _>(StandardNormal),
                rng.sample(StandardNormal),
            ];
            match axis {
                BlobAxis::X => p[0] += shift,
                BlobAxis::Y => p[1] += shift,
            }
            let crowded = points
                .iter()
                .any(|q| (p[0] - q[0]).abs() < min_gap || (p[1] - q[1]).abs() < min_gap);
            if !crowded {
                break p;
            }
        };
        points.push(p);
    }
    let ids: Vec<String> = (0..n).map(|i| format!("p{i:05}")).collect();
    let embed = |coord: usize| -> Result<Dataset> {
        let rows = points
            .iter()
            .flat_map(|p| circle_embedding(p[coord]))
            .collect();
        Dataset::from_raw_rows(ids.clone(), rows, 2, labels.clone(), blob_classes())
    };
    Ok((embed(0)?, embed(1)?))
}

/// Balanced Gaussian classes in `dim` dimensions, shifted by `±separation/2`
/// along the first axis, then normalized.
pub fn synth_gaussian_classes(n: usize, dim: usize, separation: f64, seed: u64) -> Result<Dataset> {
    if n < 2 || !n.is_multiple_of(2) || dim == 0 {
        return Err(Error::config(format!(
            "gaussian classes need a positive even n and dim > 0, got n={n}, dim={dim}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let labels: Vec<f64> = (0..n).map(|i| if i < n / 2 { 1.0 } else { -1.0 }).collect();
    let mut rows = Vec::with_capacity(n * dim);
    for &y in &labels {
        for j in 0..dim {
            let mut v: f64 = rng.sample(StandardNormal);
            if j == 0 {
                v += y * separation / 2.0;
            }
            rows.push(v);
        }
    }
    Dataset::from_raw_rows(
        (0..n).map(|i| format!("g{i:05}")).collect(),
        rows,
        dim,
        labels,
        blob_classes(),
    )
}

/// Appends two examples whose rows are [`DUPLICATE_PAIR_SEPARATION`] apart.
/// The first gets label `+1`; the second `+1` when `agree`, else `-1`.
pub fn inject_duplicate_pair(d: &Dataset, agree: bool) -> Result<Dataset> {
    if d.n() < 2 || d.dim() < 2 {
        return Err(Error::data(
            "duplicate-pair injection needs at least two examples of dimension >= 2",
        ));
    }
    let (a, b) = (d.row(0), d.row(1));
    let mut u: Vec<f64> = a.iter().zip(b).map(|(x, y)| x + y).collect();
    let mut w: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    if !normalize_in_place(&mut u) {
        return Err(Error::data("first two rows are antipodal"));
    }
    let uw: f64 = u.iter().zip(&w).map(|(x, y)| x * y).sum();
    w.iter_mut().zip(&u).for_each(|(wi, ui)| *wi -= uw * ui);
    if !normalize_in_place(&mut w) {
        return Err(Error::data("first two rows are identical"));
    }
    // chord length 2 sin(angle/2) equals the separation
    let angle = 2.0 * (DUPLICATE_PAIR_SEPARATION / 2.0).asin();
    let (s, c) = angle.sin_cos();
    let v: Vec<f64> = u.iter().zip(&w).map(|(ui, wi)| c * ui + s * wi).collect();

    let mut rows = u;
    rows.extend(v);
    let second = if agree { 1.0 } else { -1.0 };
    d.extend(
        &["dup-a".to_string(), "dup-b".to_string()],
        &rows,
        &[1.0, second],
    )
}

/// Two-topic corpus over words `w0..w{vocab-1}`.
///
/// Class `topic-a` draws from the lower two thirds of the vocabulary and
/// `topic-b` from the upper two thirds; each token is instead drawn from the
/// whole vocabulary with probability `shared_fraction`. The first half of the
/// documents is `topic-a`.
pub fn synth_topic_corpus(
    n: usize,
    vocab: usize,
    doc_len: usize,
    shared_fraction: f64,
    seed: u64,
) -> Result<RawCorpus> {
    if n < 2 || !n.is_multiple_of(2) || vocab < 3 || doc_len == 0 {
        return Err(Error::config(
            "topic corpus needs an even n >= 2, vocab >= 3, and doc_len >= 1",
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo_a, hi_a) = (0, 2 * vocab / 3);
    let (lo_b, hi_b) = (vocab / 3, vocab);
    let records = (0..n)
        .map(|i| {
            let is_a = i < n / 2;
            let words: Vec<String> = (0..doc_len)
                .map(|_| {
                    let w = if rng.random::<f64>() < shared_fraction {
                        rng.random_range(0..vocab)
                    } else if is_a {
                        rng.random_range(lo_a..hi_a)
                    } else {
                        rng.random_range(lo_b..hi_b)
                    };
                    format!("w{w}")
                })
                .collect();
            Record {
                id: format!("doc{i:06}"),
                content: Content::Text(words.join(" ")),
                label: if is_a { "topic-a" } else { "topic-b" }.to_string(),
            }
        })
        .collect();
    RawCorpus::new(records)
}

/// Two communities of `per_class` documents with disjoint vocabularies
/// (`a0..` and `b0..`, `vocab_per_class` words each).
pub fn synth_disjoint_vocab_corpus(
    per_class: usize,
    vocab_per_class: usize,
    doc_len: usize,
    seed: u64,
) -> Result<RawCorpus> {
    if per_class == 0 || vocab_per_class == 0 || doc_len == 0 {
        return Err(Error::config("disjoint corpus parameters must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut records = Vec::with_capacity(2 * per_class);
    for (prefix, label) in [("a", "community-a"), ("b", "community-b")] {
        for i in 0..per_class {
            let words: Vec<String> = (0..doc_len)
                .map(|_| format!("{prefix}{}", rng.random_range(0..vocab_per_class)))
                .collect();
            records.push(Record {
                id: format!("{prefix}-{i:05}"),
                content: Content::Text(words.join(" ")),
                label: label.to_string(),
            });
        }
    }
    RawCorpus::new(records)
}
