//! Synthetic minority oversampling.
//!
//! Each synthetic row interpolates between a randomly drawn minority row
//! and one of its k nearest minority neighbors: x + u * (nn - x) with u
//! uniform in [0, 1]. Neighbor distances are Euclidean over per-feature
//! standardized values so no single wide-ranged feature dominates, but the
//! interpolation itself runs in the original feature space.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Generates `round(amount * n)` synthetic rows from `n` minority rows.
/// Needs strictly more rows than `k` so every row has k distinct
/// neighbors.
pub fn smote(minority: &[Vec<f64>], k: usize, amount: f64, seed: u64) -> Result<Vec<Vec<f64>>> {
    let n = minority.len();
    if n <= k {
        return Err(Error::validation(format!(
            "oversampling with k={k} needs more than {k} minority rows, found {n}"
        )));
    }
    if k == 0 {
        return Err(Error::validation("neighbor count must be positive"));
    }
    if !(amount.is_finite() && amount >= 0.0) {
        return Err(Error::validation("oversampling amount must be non-negative"));
    }
    let p = minority[0].len();
    if minority.iter().any(|r| r.len() != p) {
        return Err(Error::validation("minority rows have inconsistent widths"));
    }

    // standardize a copy for the distance metric; constant features drop out
    let mut mean = vec![0.0f64; p];
    for row in minority {
        for (m, v) in mean.iter_mut().zip(row) {
            *m += v;
        }
    }
    for m in &mut mean {
        *m /= n as f64;
    }
    let mut var = vec![0.0f64; p];
    for row in minority {
        for (d, (v, m)) in var.iter_mut().zip(row.iter().zip(&mean)) {
            *d += (v - m) * (v - m);
        }
    }
    let scale: Vec<f64> = var
        .iter()
        .map(|&s| {
            let sd = (s / n as f64).sqrt();
            if sd > 0.0 {
                1.0 / sd
            } else {
                0.0
            }
        })
        .collect();
    let z: Vec<Vec<f64>> = minority
        .iter()
        .map(|row| {
            row.iter().zip(mean.iter().zip(&scale)).map(|(v, (m, s))| (v - m) * s).collect()
        })
        .collect();

    // k nearest neighbors per row, ties broken by row index
    let neighbors: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            let mut dist: Vec<(f64, usize)> = (0..n)
                .filter(|&j| j != i)
                .map(|j| {
                    let d: f64 =
                        z[i].iter().zip(&z[j]).map(|(a, b)| (a - b) * (a - b)).sum();
                    (d, j)
                })
                .collect();
            dist.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            dist.into_iter().take(k).map(|(_, j)| j).collect()
        })
        .collect();

    let count = (amount * n as f64).round() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let i = rng.gen_range(0..n);
        let nn = neighbors[i][rng.gen_range(0..k)];
        let u: f64 = rng.gen();
        let row: Vec<f64> = minority[i]
            .iter()
            .zip(&minority[nn])
            .map(|(a, b)| a + u * (b - a))
            .collect();
        out.push(row);
    }
    Ok(out)
}
