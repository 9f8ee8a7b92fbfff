//! Eigendecomposition of the Gram matrix and data-dependent complexity (DDC).
//!
//! With `H = Q Λ Qᵀ`, the DDC of a labeling `y` is
//!
//! ```text
//! DDC(y) = sqrt(2 yᵀ H⁻¹ y / n) = sqrt((2/n) Σ_k (yᵀ q_k)² / λ_k)
//! ```
//!
//! The whitener `W = Λ^(-1/2) Qᵀ` is cached so that every further labeling
//! costs one matrix-vector product: `DDC(y) = sqrt((2/n) |W y|²)`.

use faer::dyn_stack::{MemBuffer, MemStack};
use faer::linalg::evd::{self, ComputeEigenvectors};
use faer::{Mat, Par};

use crate::error::{Error, Result};
use crate::gram::GramMatrix;

/// Eigenvalues at or below `SINGULARITY_FLOOR * λ_max` abort decomposition.
pub const SINGULARITY_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct Spectrum {
    n: usize,
    /// Descending.
    eigenvalues: Vec<f64>,
    /// Column-major: eigenvector `k` is `eigenvectors[k*n..(k+1)*n]`.
    eigenvectors: Vec<f64>,
    /// Row-major `Λ^(-1/2) Qᵀ`; row `k` is `q_k / sqrt(λ_k)`.
    whitener: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DdcResult {
    pub ddc: f64,
    /// `yᵀ q_k` for each eigenvector, in eigenvalue order.
    pub projections: Vec<f64>,
    /// `(yᵀ q_k)² / λ_k`.
    pub scaled_contributions: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DdcBounds {
    /// `sqrt(2 / λ_max)`
    pub lower: f64,
    /// `sqrt(2 / λ_min)`
    pub upper: f64,
    /// `upper - lower`, the largest possible spread of DDC values.
    pub range: f64,
}

impl DdcBounds {
    pub fn contains(&self, ddc: f64, rel_tol: f64) -> bool {
        ddc >= self.lower * (1.0 - rel_tol) && ddc <= self.upper * (1.0 + rel_tol)
    }
}

/// Full symmetric eigendecomposition of the Gram matrix.
///
/// Runs single-threaded so the result is bitwise reproducible.
pub fn decompose(g: &GramMatrix) -> Result<Spectrum> {
    let n = g.n();
    let a = Mat::<f64>::from_fn(n, n, |i, j| g.get(i, j));
    let mut s = faer::diag::Diag::<f64>::zeros(n);
    let mut u = Mat::<f64>::zeros(n, n);
    let par = Par::Seq;
    let mut mem = MemBuffer::new(evd::self_adjoint_evd_scratch::<f64>(
        n,
        ComputeEigenvectors::Yes,
        par,
        Default::default(),
    ));
    evd::self_adjoint_evd(
        a.as_ref(),
        s.as_mut(),
        Some(u.as_mut()),
        par,
        MemStack::new(&mut mem),
        Default::default(),
    )
    .map_err(|e| Error::Numeric(format!("eigendecomposition failed: {e:?}")))?;

    let values: Vec<f64> = (0..n).map(|k| s[k]).collect();
    let mut vectors = Vec::with_capacity(n * n);
    for k in 0..n {
        vectors.extend((0..n).map(|i| u[(i, k)]));
    }
    Spectrum::from_eigenpairs(values, vectors)
}

impl Spectrum {
    /// Assembles a spectrum from eigenpairs in any order (`vectors` column-major).
    ///
    /// Sorts descending, fixes eigenvector signs (largest-magnitude component
    /// positive) and materializes the whitener.
    pub fn from_eigenpairs(values: Vec<f64>, vectors: Vec<f64>) -> Result<Self> {
        let n = values.len();
        if n == 0 || vectors.len() != n * n {
            return Err(Error::Numeric(format!(
                "eigenpairs malformed: {n} values, {} vector entries",
                vectors.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric("non-finite eigenvalue".into()));
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));

        let lambda_max = values[order[0]];
        let lambda_min = values[order[n - 1]];
        if lambda_max <= 0.0 {
            return Err(Error::Numeric(format!(
                "largest eigenvalue {lambda_max:e} is not positive"
            )));
        }
        let floor = SINGULARITY_FLOOR * lambda_max;
        if lambda_min <= floor {
            return Err(Error::NearSingular { lambda_min, floor });
        }

        let mut eigenvalues = Vec::with_capacity(n);
        let mut eigenvectors = Vec::with_capacity(n * n);
        for &k in &order {
            eigenvalues.push(values[k]);
            let col = &vectors[k * n..(k + 1) * n];
            let mut pivot = 0;
            for (i, v) in col.iter().enumerate() {
                if v.abs() > col[pivot].abs() {
                    pivot = i;
                }
            }
            let sign = if col[pivot] < 0.0 { -1.0 } else { 1.0 };
            eigenvectors.extend(col.iter().map(|v| sign * v));
        }
        let mut whitener = eigenvectors.clone();
        for (k, row) in whitener.chunks_exact_mut(n).enumerate() {
            let scale = 1.0 / eigenvalues[k].sqrt();
            row.iter_mut().for_each(|v| *v *= scale);
        }
        Ok(Self {
            n,
            eigenvalues,
            eigenvectors,
            whitener,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn lambda_max(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn lambda_min(&self) -> f64 {
        self.eigenvalues[self.n - 1]
    }

    pub fn eigenvector(&self, k: usize) -> &[f64] {
        &self.eigenvectors[k * self.n..(k + 1) * self.n]
    }

    /// Row `k` of `Λ^(-1/2) Qᵀ`.
    pub fn whitener_row(&self, k: usize) -> &[f64] {
        &self.whitener[k * self.n..(k + 1) * self.n]
    }

    /// Writes `W y` into `out`.
    pub fn whiten_into(&self, y: &[f64], out: &mut [f64]) {
        for (o, row) in out.iter_mut().zip(self.whitener.chunks_exact(self.n)) {
            *o = dot(row, y);
        }
    }

    /// DDC of `y` via the whitener, without validating `y`.
    pub fn ddc_value(&self, y: &[f64]) -> f64 {
        let energy: f64 = self
            .whitener
            .chunks_exact(self.n)
            .map(|row| {
                let w = dot(row, y);
                w * w
            })
            .sum();
        (2.0 / self.n as f64 * energy).sqrt()
    }

    /// `Q Λ Qᵀ`, row-major. For diagnostics and tests.
    pub fn reconstruct(&self) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; n * n];
        for k in 0..n {
            let q = self.eigenvector(k);
            let l = self.eigenvalues[k];
            for i in 0..n {
                let qi = l * q[i];
                let row = &mut out[i * n..(i + 1) * n];
                for (r, qj) in row.iter_mut().zip(q) {
                    *r += qi * qj;
                }
            }
        }
        out
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn check_labels(n: usize, y: &[f64]) -> Result<()> {
    if y.len() != n {
        return Err(Error::data(format!(
            "labeling has length {}, spectrum has {n} examples",
            y.len()
        )));
    }
    if y.iter().any(|&v| v != 1.0 && v != -1.0) {
        return Err(Error::data("labels must be +1 or -1"));
    }
    Ok(())
}

pub fn ddc(s: &Spectrum, y: &[f64]) -> Result<DdcResult> {
    check_labels(s.n, y)?;
    let projections: Vec<f64> = (0..s.n).map(|k| dot(s.eigenvector(k), y)).collect();
    let scaled_contributions = projections
        .iter()
        .zip(&s.eigenvalues)
        .map(|(p, l)| p * p / l)
        .collect();
    Ok(DdcResult {
        ddc: s.ddc_value(y),
        projections,
        scaled_contributions,
    })
}

/// Range any labeling's DDC must fall in: a unit-energy label vector can do no
/// better than aligning with the top eigenvector, nor worse than aligning with
/// the bottom one.
pub fn ddc_bounds(s: &Spectrum) -> DdcBounds {
    bounds_from_extremes(s.lambda_max(), s.lambda_min())
}

pub fn bounds_from_extremes(lambda_max: f64, lambda_min: f64) -> DdcBounds {
    let lower = (2.0 / lambda_max).sqrt();
    let upper = (2.0 / lambda_min).sqrt();
    DdcBounds {
        lower,
        upper,
        range: upper - lower,
    }
}

/// `sqrt((2/n) Tr[H⁻¹])`, an upper bound on the expected DDC of uniformly
/// random labelings.
pub fn jensen_upper_bound(s: &Spectrum) -> f64 {
    jensen_from_eigenvalues(&s.eigenvalues)
}

pub fn jensen_from_eigenvalues(eigenvalues: &[f64]) -> f64 {
    let trace_inv: f64 = eigenvalues.iter().map(|l| 1.0 / l).sum();
    (2.0 / eigenvalues.len() as f64 * trace_inv).sqrt()
}

/// Fraction of total eigenvalue mass in the top `k` eigenvalues.
pub fn variance_explained(s: &Spectrum, k: usize) -> Result<f64> {
    if k > s.n {
        return Err(Error::config(format!(
            "variance explained at k={k} requested for only {} eigenvalues",
            s.n
        )));
    }
    let total: f64 = s.eigenvalues.iter().sum();
    let top: f64 = s.eigenvalues[..k].iter().sum();
    Ok(top / total)
}

/// Kernel-PCA coordinates `(sqrt(λ_1) q_1, sqrt(λ_2) q_2)` per example.
pub fn pca_coords(s: &Spectrum) -> Result<Vec<[f64; 2]>> {
    if s.n < 2 {
        return Err(Error::data("kernel PCA needs at least two examples"));
    }
    let (a, b) = (s.eigenvalues[0].sqrt(), s.eigenvalues[1].sqrt());
    let (q1, q2) = (s.eigenvector(0), s.eigenvector(1));
    Ok((0..s.n).map(|i| [a * q1[i], b * q2[i]]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gram::build_gram;
    use crate::ingest::{synth_gaussian_classes, Dataset};

    fn half_identity(n: usize) -> GramMatrix {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 0.5;
        }
        GramMatrix::from_row_major(n, data).unwrap()
    }

    fn alternating(n: usize) -> Vec<f64> {
        (0..n)
            .map(|i| if i % 3 == 0 { 1.0 } else { -1.0 })
            .collect()
    }

    #[test]
    fn half_identity_spectrum() {
        let s = decompose(&half_identity(8)).unwrap();
        assert!(s.eigenvalues().iter().all(|&l| (l - 0.5).abs() < 1e-15));
        let r = ddc(&s, &alternating(8)).unwrap();
        assert!((r.ddc - 2.0).abs() < 1e-12);
        let b = ddc_bounds(&s);
        assert!((b.lower - 2.0).abs() < 1e-12 && (b.upper - 2.0).abs() < 1e-12);
        assert!(b.range.abs() < 1e-12);
        assert!((jensen_upper_bound(&s) - 2.0).abs() < 1e-12);
        assert!((variance_explained(&s, 3).unwrap() - 3.0 / 8.0).abs() < 1e-12);
        assert!((variance_explained(&s, 8).unwrap() - 1.0).abs() < 1e-12);
        assert!(variance_explained(&s, 9).is_err());
        for p in pca_coords(&s).unwrap() {
            let r = (p[0] * p[0] + p[1] * p[1]).sqrt();
            assert!(r.abs() < 1e-12 || (r - 0.5f64.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn rank_one_update_top_eigenvalue() {
        // H = I/2 + c v vᵀ with unit v has top eigenvalue 1/2 + c
        let n = 6;
        let c = 0.3;
        let v: Vec<f64> = (0..n).map(|i| (i + 1) as f64).collect();
        let vn = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let v: Vec<f64> = v.iter().map(|x| x / vn).collect();
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                data[i * n + j] = c * v[i] * v[j] + if i == j { 0.5 } else { 0.0 };
            }
        }
        // exact symmetry
        for i in 0..n {
            for j in 0..i {
                data[i * n + j] = data[j * n + i];
            }
        }
        let s = decompose(&GramMatrix::from_row_major(n, data).unwrap()).unwrap();
        assert!((s.lambda_max() - 0.8).abs() < 1e-13);
        assert!(s.eigenvalues()[1..]
            .iter()
            .all(|&l| (l - 0.5).abs() < 1e-13));
        let q = s.eigenvector(0);
        assert!(q.iter().zip(&v).all(|(a, b)| (a - b).abs() < 1e-12));
    }

    #[test]
    fn bounds_formula() {
        let s = Spectrum::from_eigenpairs(vec![0.5, 4.0], vec![1.0, 0.0, 0.0, 1.0]).unwrap();
        let b = ddc_bounds(&s);
        assert!((b.lower - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((b.upper - 2.0).abs() < 1e-15);
        assert_eq!(s.eigenvalues(), &[4.0, 0.5]);
    }

    #[test]
    fn jensen_two_eigenvalues() {
        let s = Spectrum::from_eigenpairs(vec![4.0, 1.0], vec![1.0, 0.0, 0.0, 1.0]).unwrap();
        assert!((jensen_upper_bound(&s) - 1.25f64.sqrt()).abs() < 1e-15);
        assert!((jensen_upper_bound(&s) - 1.1180).abs() < 1e-4);
    }

    #[test]
    fn singular_matrix_rejected() {
        let d = synth_gaussian_classes(10, 4, 1.0, 1).unwrap();
        let dup = d.select(&[0, 1, 2, 3, 0]);
        let dup = Dataset::new(
            (0..5).map(|i| i.to_string()).collect(),
            dup.rows().to_vec(),
            dup.dim(),
            vec![1.0, -1.0, 1.0, -1.0, 1.0],
            dup.classes().clone(),
        )
        .unwrap();
        let err = decompose(&build_gram(&dup).unwrap()).unwrap_err();
        assert!(matches!(err, Error::NearSingular { .. }), "{err}");
        assert!(err.to_string().contains("duplicate"));
    }

    #[test]
    fn random_gram_invariants() {
        let d = synth_gaussian_classes(100, 12, 1.0, 4).unwrap();
        let g = build_gram(&d).unwrap();
        let s = decompose(&g).unwrap();
        let n = s.n();
        let lmax = s.lambda_max();
        let rec = s.reconstruct();
        let err = rec
            .iter()
            .zip(g.as_slice())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-8 * lmax, "reconstruction error {err}");
        let mut orth = 0.0f64;
        for a in 0..n {
            for b in 0..n {
                let v = dot(s.eigenvector(a), s.eigenvector(b)) - if a == b { 1.0 } else { 0.0 };
                orth = orth.max(v.abs());
            }
        }
        assert!(orth < 1e-10, "orthogonality error {orth}");
        assert!(s.eigenvalues().windows(2).all(|w| w[0] >= w[1]));

        // sign convention
        for k in 0..n {
            let q = s.eigenvector(k);
            let big = q
                .iter()
                .cloned()
                .fold(0.0f64, |m, v| if v.abs() > m.abs() { v } else { m });
            assert!(big > 0.0);
        }

        let y = d.labels();
        let r = ddc(&s, y).unwrap();
        let energy: f64 = r.projections.iter().map(|p| p * p).sum();
        assert!((energy - n as f64).abs() < 1e-8);
        let via_contrib = (2.0 / n as f64 * r.scaled_contributions.iter().sum::<f64>()).sqrt();
        assert!(((r.ddc * r.ddc) - via_contrib * via_contrib).abs() < 1e-10 * r.ddc * r.ddc);
        let neg: Vec<f64> = y.iter().map(|v| -v).collect();
        assert_eq!(ddc(&s, &neg).unwrap().ddc, r.ddc);
    }

    #[test]
    fn ddc_rejects_bad_labels() {
        let s = decompose(&half_identity(4)).unwrap();
        assert!(ddc(&s, &[1.0, -1.0, 1.0]).is_err());
        assert!(ddc(&s, &[1.0, -1.0, 1.0, 0.5]).is_err());
    }

    #[test]
    fn pca_matches_rank_two_truncation() {
        let d = synth_gaussian_classes(40, 5, 2.0, 8).unwrap();
        let g = build_gram(&d).unwrap();
        let s = decompose(&g).unwrap();
        let coords = pca_coords(&s).unwrap();
        let n = s.n();
        // Gram of the coordinates equals the rank-2 truncation of H; the
        // residual against H is bounded by the third eigenvalue.
        let mut resid = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                let c = coords[i][0] * coords[j][0] + coords[i][1] * coords[j][1];
                let mut t = 0.0;
                for k in 0..2 {
                    t += s.eigenvalues()[k] * s.eigenvector(k)[i] * s.eigenvector(k)[j];
                }
                assert!((c - t).abs() < 1e-12);
                resid[i * n + j] = g.get(i, j) - c;
            }
        }
        let frob: f64 = resid.iter().map(|v| v * v).sum::<f64>().sqrt();
        let tail: f64 = s.eigenvalues()[2..]
            .iter()
            .map(|l| l * l)
            .sum::<f64>()
            .sqrt();
        assert!((frob - tail).abs() < 1e-9 * s.lambda_max());
    }
}
