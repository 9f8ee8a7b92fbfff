use super::Dataset;
use crate::error::{Error, Result};

/// Euclidean distance under which two normalized rows count as duplicates.
pub const DEFAULT_DEDUP_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DedupMode {
    /// Every member of a duplicate group is removed.
    #[default]
    DropAll,
    /// The first member (in dataset order) of each group is kept.
    KeepFirst,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DedupOutcome {
    pub kept: Vec<String>,
    pub dropped: Vec<String>,
    /// Number of duplicate groups found (each of size >= 2).
    pub groups: usize,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        Self((0..n).collect())
    }

    fn find(&mut self, mut i: usize) -> usize {
        while self.0[i] != i {
            self.0[i] = self.0[self.0[i]];
            i = self.0[i];
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // smaller index becomes the root so KeepFirst keeps the earliest member
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.0[hi] = lo;
        }
    }
}

/// Finds examples that duplicate another example under any of the
/// representations. All datasets must list the same ids in the same order.
pub fn dedup(datasets: &[&Dataset], tolerance: f64, mode: DedupMode) -> Result<DedupOutcome> {
    let Some(first) = datasets.first() else {
        return Ok(DedupOutcome {
            kept: Vec::new(),
            dropped: Vec::new(),
            groups: 0,
        });
    };
    for d in &datasets[1..] {
        if d.ids() != first.ids() {
            return Err(Error::data(
                "representations to deduplicate are not row-aligned by id",
            ));
        }
    }
    let n = first.n();
    let mut uf = UnionFind::new(n);
    for d in datasets {
        link_near_duplicates(d, tolerance, &mut uf);
    }

    let mut group_size = vec![0usize; n];
    for i in 0..n {
        let r = uf.find(i);
        group_size[r] += 1;
    }
    let groups = group_size.iter().filter(|&&s| s > 1).count();
    let mut kept = Vec::new();
    let mut dropped = Vec::new();
    for i in 0..n {
        let r = uf.find(i);
        let keep = group_size[r] == 1 || (mode == DedupMode::KeepFirst && r == i);
        let id = first.ids()[i].clone();
        if keep {
            kept.push(id);
        } else {
            dropped.push(id);
        }
    }
    Ok(DedupOutcome {
        kept,
        dropped,
        groups,
    })
}

/// Sorts rows by a fixed projection and only compares rows whose projections
/// are within reach: |w.(a - b)| <= |w| |a - b|.
fn link_near_duplicates(d: &Dataset, tolerance: f64, uf: &mut UnionFind) {
    let dim = d.dim();
    let weights: Vec<f64> = (0..dim)
        .map(|j| 0.5 + (j as f64 * 0.618_033_988_749_895).fract())
        .collect();
    let wnorm = weights.iter().map(|w| w * w).sum::<f64>().sqrt();
    let mut keyed: Vec<(f64, usize)> = (0..d.n())
        .map(|i| (d.row(i).iter().zip(&weights).map(|(x, w)| x * w).sum(), i))
        .collect();
    keyed.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let window = wnorm * (tolerance + 4.0 * dim as f64 * f64::EPSILON);
    let tol2 = tolerance * tolerance;
    for a in 0..keyed.len() {
        let (pa, ia) = keyed[a];
        for &(pb, ib) in &keyed[a + 1..] {
            if pb - pa > window {
                break;
            }
            let dist2: f64 = d
                .row(ia)
                .iter()
                .zip(d.row(ib))
                .map(|(x, y)| (x - y) * (x - y))
                .sum();
            if dist2 <= tol2 {
                uf.union(ia, ib);
            }
        }
    }
}
