//! Random-labeling baselines for DDC, calibration metrics, and the
//! concentration bounds that size and qualify them.

use rand::seq::SliceRandom;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::spectral::{DdcBounds, Spectrum};

/// Labelings per parallel work unit. Fixed so that aggregation order, and
/// therefore every floating-point sum, is independent of the thread count.
const SAMPLE_CHUNK: usize = 32;

/// Spread below which a sample set is treated as a point mass, relative to its mean.
const DEGENERATE_SPREAD: f64 = 1e-12;

pub const DEFAULT_MIN_SAMPLES: usize = 500;
pub const DEFAULT_MAX_SAMPLES: usize = 10_000;
/// Default Hoeffding accuracy, as a fraction of the real labeling's DDC.
pub const DEFAULT_RELATIVE_EPSILON: f64 = 0.05;
pub const DEFAULT_CONFIDENCE_DELTA: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SamplingMode {
    /// Each label is an independent fair coin flip.
    #[default]
    Iid,
    /// Uniform over labelings with exactly `n/2` of each sign.
    Balanced,
}

impl SamplingMode {
    pub fn as_str(self) -> &'static str {
        match self {
            SamplingMode::Iid => "iid",
            SamplingMode::Balanced => "balanced",
        }
    }
}

/// Number of random labelings sufficient to estimate E[DDC] within `epsilon`
/// with probability `1 - delta`, given DDC values spread over `delta_range`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HoeffdingPlan {
    pub delta_range: f64,
    pub epsilon: f64,
    pub confidence_delta: f64,
    pub m: usize,
}

impl HoeffdingPlan {
    pub fn new(delta_range: f64, epsilon: f64, confidence_delta: f64) -> Result<Self> {
        let m = hoeffding_sample_count(delta_range, epsilon, confidence_delta)?;
        Ok(Self {
            delta_range,
            epsilon,
            confidence_delta,
            m,
        })
    }
}

fn check_confidence(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::config(format!(
            "confidence delta must lie in (0, 1), got {delta}"
        )));
    }
    Ok(())
}

/// `max(1, ceil(Δ² / (2ε²) · ln(2/δ)))`
pub fn hoeffding_sample_count(delta_range: f64, epsilon: f64, delta: f64) -> Result<usize> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::config(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    check_confidence(delta)?;
    if !(delta_range.is_finite() && delta_range >= 0.0) {
        return Err(Error::config(format!(
            "DDC range must be finite and nonnegative, got {delta_range}"
        )));
    }
    let m = (delta_range * delta_range / (2.0 * epsilon * epsilon) * (2.0 / delta).ln()).ceil();
    if m > usize::MAX as f64 {
        return Err(Error::config("required sample count overflows"));
    }
    Ok((m as usize).max(1))
}

/// DKW half-width `sqrt(ln(2/δ) / 2m)` for an empirical CDF from `m` samples.
pub fn dkw_gamma(m: usize, delta: f64) -> Result<f64> {
    if m == 0 {
        return Err(Error::config("DKW bound needs at least one sample"));
    }
    check_confidence(delta)?;
    Ok(((2.0 / delta).ln() / (2.0 * m as f64)).sqrt())
}

/// Default number of random labelings: the Hoeffding count at
/// `ε = 0.05 · real DDC`, `δ = 0.01`, raised to at least 500 and capped at 10,000.
pub fn default_sample_count(bounds: &DdcBounds, real_ddc: f64) -> Result<usize> {
    let m = hoeffding_sample_count(
        bounds.range.max(0.0),
        DEFAULT_RELATIVE_EPSILON * real_ddc,
        DEFAULT_CONFIDENCE_DELTA,
    )?;
    Ok(m.clamp(DEFAULT_MIN_SAMPLES, DEFAULT_MAX_SAMPLES))
}

/// Writes random labeling number `index` of the stream identified by `seed`.
///
/// Each index has its own ChaCha stream, so labelings do not depend on how
/// indices are distributed across threads.
pub fn random_labeling_into(mode: SamplingMode, seed: u64, index: u64, out: &mut [f64]) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    match mode {
        SamplingMode::Iid => {
            for chunk in out.chunks_mut(64) {
                let mut bits = rng.next_u64();
                for v in chunk {
                    *v = if bits & 1 == 1 { 1.0 } else { -1.0 };
                    bits >>= 1;
                }
            }
        }
        SamplingMode::Balanced => {
            let half = out.len() / 2;
            for (i, v) in out.iter_mut().enumerate() {
                *v = if i < half { 1.0 } else { -1.0 };
            }
            out.shuffle(&mut rng);
        }
    }
}

pub fn random_labeling(n: usize, mode: SamplingMode, seed: u64, index: u64) -> Vec<f64> {
    let mut y = vec![0.0; n];
    random_labeling_into(mode, seed, index, &mut y);
    y
}

/// DDC values of `m` random labelings together with per-eigenvector averages.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomSamples {
    pub ddc: Vec<f64>,
    /// Mean over samples of `(yᵀ q_k)²`.
    pub mean_squared_projections: Vec<f64>,
    /// Mean over samples of `(yᵀ q_k)² / λ_k`.
    pub mean_scaled_contributions: Vec<f64>,
}

fn check_sampling(s: &Spectrum, m: usize, mode: SamplingMode) -> Result<()> {
    if m == 0 {
        return Err(Error::config(
            "number of random labelings must be at least 1",
        ));
    }
    if mode == SamplingMode::Balanced && !s.n().is_multiple_of(2) {
        return Err(Error::config(format!(
            "balanced random labelings need an even number of examples, got {}",
            s.n()
        )));
    }
    Ok(())
}

/// Samples `m` random labelings and evaluates their DDC through the whitener.
pub fn sample_baseline(
    s: &Spectrum,
    m: usize,
    mode: SamplingMode,
    seed: u64,
) -> Result<RandomSamples> {
    check_sampling(s, m, mode)?;
    let n = s.n();
    let chunks: Vec<(Vec<f64>, Vec<f64>)> = (0..m.div_ceil(SAMPLE_CHUNK))
        .into_par_iter()
        .map(|c| {
            let start = c * SAMPLE_CHUNK;
            let end = (start + SAMPLE_CHUNK).min(m);
            let mut y = vec![0.0; n];
            let mut w = vec![0.0; n];
            let mut energy_sum = vec![0.0; n];
            let mut values = Vec::with_capacity(end - start);
            for j in start..end {
                random_labeling_into(mode, seed, j as u64, &mut y);
                s.whiten_into(&y, &mut w);
                let mut energy = 0.0;
                for (acc, wk) in energy_sum.iter_mut().zip(&w) {
                    let sq = wk * wk;
                    energy += sq;
                    *acc += sq;
                }
                values.push((2.0 / n as f64 * energy).sqrt());
            }
            (values, energy_sum)
        })
        .collect();

    let mut ddc = Vec::with_capacity(m);
    let mut total = vec![0.0; n];
    for (values, sums) in chunks {
        ddc.extend(values);
        for (t, v) in total.iter_mut().zip(sums) {
            *t += v;
        }
    }
    let mean_scaled_contributions: Vec<f64> = total.iter().map(|t| t / m as f64).collect();
    let mean_squared_projections = mean_scaled_contributions
        .iter()
        .zip(s.eigenvalues())
        .map(|(c, l)| c * l)
        .collect();
    Ok(RandomSamples {
        ddc,
        mean_squared_projections,
        mean_scaled_contributions,
    })
}

/// DDC values of `m` random labelings; sample `j` uses `random_labeling(n, mode, seed, j)`.
pub fn sample_random_ddc(
    s: &Spectrum,
    m: usize,
    mode: SamplingMode,
    seed: u64,
) -> Result<Vec<f64>> {
    Ok(sample_baseline(s, m, mode, seed)?.ddc)
}

/// The real labeling's DDC placed within the random-labeling distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct BaselineDistribution {
    pub samples: Vec<f64>,
    pub real_ddc: f64,
    /// Sample mean, the estimate of E[DDC].
    pub mean: f64,
    /// Population standard deviation (divide by m).
    pub std: f64,
    /// `real / mean`
    pub ratio: f64,
    /// `(real - mean) / std`; `±inf` when the samples have no spread but
    /// differ from the real DDC.
    pub zscore: f64,
    /// Fraction of samples strictly below the real DDC.
    pub ecdf_at_real: f64,
    pub dkw_gamma: f64,
    pub confidence_delta: f64,
    /// DKW interval for the true CDF at the real DDC, clipped to [0, 1].
    pub f_interval: (f64, f64),
}

pub fn calibrate(real_ddc: f64, samples: Vec<f64>, delta: f64) -> Result<BaselineDistribution> {
    if samples.is_empty() {
        return Err(Error::config(
            "calibration needs at least one random sample",
        ));
    }
    let m = samples.len();
    let mean = samples.iter().sum::<f64>() / m as f64;
    let var = samples.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / m as f64;
    let std = var.sqrt();
    let diff = real_ddc - mean;
    let resolution = DEGENERATE_SPREAD * mean.abs();
    let zscore = if std > resolution {
        diff / std
    } else if diff.abs() <= resolution {
        0.0
    } else if diff > 0.0 {
        f64::INFINITY
    } else {
        f64::NEG_INFINITY
    };
    let below = samples.iter().filter(|&&s| s < real_ddc).count();
    let ecdf_at_real = below as f64 / m as f64;
    let gamma = dkw_gamma(m, delta)?;
    Ok(BaselineDistribution {
        real_ddc,
        mean,
        std,
        ratio: real_ddc / mean,
        zscore,
        ecdf_at_real,
        dkw_gamma: gamma,
        confidence_delta: delta,
        f_interval: (
            (ecdf_at_real - gamma).max(0.0),
            (ecdf_at_real + gamma).min(1.0),
        ),
        samples,
    })
}

/// Equal-width histogram bin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistogramBin {
    pub left: f64,
    pub right: f64,
    pub count: usize,
}

/// Histogram of `samples` over `[min, max]` of the samples and `real`.
/// The number of bins is `ceil(sqrt(m))` clamped to `[10, 100]`.
pub fn histogram(samples: &[f64], real: f64) -> Vec<HistogramBin> {
    if samples.is_empty() {
        return Vec::new();
    }
    let lo = samples.iter().cloned().fold(real, f64::min);
    let hi = samples.iter().cloned().fold(real, f64::max);
    if hi <= lo {
        return vec![HistogramBin {
            left: lo,
            right: hi,
            count: samples.len(),
        }];
    }
    let bins = ((samples.len() as f64).sqrt().ceil() as usize).clamp(10, 100);
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &s in samples {
        let b = (((s - lo) / width) as usize).min(bins - 1);
        counts[b] += 1;
    }
    counts
        .into_iter()
        .enumerate()
        .map(|(b, count)| HistogramBin {
            left: lo + b as f64 * width,
            right: if b + 1 == bins {
                hi
            } else {
                lo + (b + 1) as f64 * width
            },
            count,
        })
        .collect()
}
