use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::Dataset;
use crate::error::{Error, Result};

/// Draws `n_target / 2` indices of each class uniformly without replacement.
///
/// Returned indices are sorted ascending, so the selection keeps the original
/// example order. Deterministic in `(labels, n_target, seed)`.
pub fn balanced_indices(labels: &[f64], n_target: usize, seed: u64) -> Result<Vec<usize>> {
    if n_target == 0 || !n_target.is_multiple_of(2) {
        return Err(Error::config(format!(
            "balanced sample size must be a positive even number, got {n_target}"
        )));
    }
    let half = n_target / 2;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n_target);
    for class in [1.0, -1.0] {
        let members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        if members.len() < half {
            return Err(Error::data(format!(
                "class {class:+} has {} examples, {half} needed",
                members.len()
            )));
        }
        let picked = rand::seq::index::sample(&mut rng, members.len(), half);
        out.extend(picked.into_iter().map(|k| members[k]));
    }
    out.sort_unstable();
    Ok(out)
}

/// Balanced subsample with exactly `n_target / 2` examples per class.
pub fn subsample_balanced(d: &Dataset, n_target: usize, seed: u64) -> Result<Dataset> {
    let idx = balanced_indices(d.labels(), n_target, seed).map_err(|e| match e {
        Error::Data(msg) => Error::Data(
            msg.replace("class +1", &format!("class `{}` (+1)", d.classes()[0]))
                .replace("class -1", &format!("class `{}` (-1)", d.classes()[1])),
        ),
        other => other,
    })?;
    Ok(d.select(&idx))
}
