//! Shared dataset generators and independent oracles for the integration tests.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use ddc_align::gram::GramMatrix;
use ddc_align::ingest::Dataset;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_dataset(n: usize, d: usize, rng: &mut ChaCha8Rng) -> Dataset {
    let rows: Vec<f64> = (0..n * d).map(|_| rng.sample(StandardNormal)).collect();
    let labels = (0..n)
        .map(|i| if i % 2 == 0 { 1.0 } else { -1.0 })
        .collect();
    Dataset::from_raw_rows(
        (0..n).map(|i| format!("r{i}")).collect(),
        rows,
        d,
        labels,
        ["a".into(), "b".into()],
    )
    .unwrap()
}

/// Rows of a random orthogonal matrix via modified Gram-Schmidt.
pub fn orthonormal_dataset(n: usize, rng: &mut ChaCha8Rng) -> Dataset {
    let mut q: Vec<Vec<f64>> = Vec::with_capacity(n);
    while q.len() < n {
        let mut v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        for _ in 0..2 {
            for u in &q {
                let p: f64 = v.iter().zip(u).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(u).for_each(|(a, b)| *a -= p * b);
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-6 {
            v.iter_mut().for_each(|x| *x /= norm);
            q.push(v);
        }
    }
    let labels = (0..n)
        .map(|i| if i % 2 == 0 { 1.0 } else { -1.0 })
        .collect();
    Dataset::new(
        (0..n).map(|i| format!("o{i}")).collect(),
        q.concat(),
        n,
        labels,
        ["a".into(), "b".into()],
    )
    .unwrap()
}

/// `sqrt(2 yᵀ H⁻¹ y / n)` by Gaussian elimination with partial pivoting.
pub fn ddc_direct(g: &GramMatrix, y: &[f64]) -> f64 {
    let n = g.n();
    let mut a: Vec<Vec<f64>> = (0..n).map(|i| g.row(i).to_vec()).collect();
    let mut b = y.to_vec();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            if f != 0.0 {
                let (top, bottom) = a.split_at_mut(r);
                for (x, p) in bottom[0][col..].iter_mut().zip(&top[col][col..]) {
                    *x -= f * p;
                }
                b[r] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    let quad: f64 = y.iter().zip(&x).map(|(a, b)| a * b).sum();
    (2.0 * quad / n as f64).sqrt()
}

pub fn mean_std(v: &[f64]) -> (f64, f64) {
    let m = v.iter().sum::<f64>() / v.len() as f64;
    let var = v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / v.len() as f64;
    (m, var.sqrt())
}
