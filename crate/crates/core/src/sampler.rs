//! Poissonized Plancherel sampling through RSK, and comparison of the
//! rescaled empirical densities with the `t = 0` limit shape.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::limitshape::DensityProfile;
use crate::partitions::Partition;
use crate::quad::Rule;

/// Shape of the RSK insertion tableau of `values`.
///
/// Only the rows are kept, each sorted; an inserted value bumps the first
/// strictly larger entry of the row into the next one.
pub fn rsk_shape<T: PartialOrd + Copy>(values: &[T]) -> Partition {
    let cap = 3 * (values.len() as f64).sqrt() as usize + 10;
    let mut rows: Vec<Vec<T>> = Vec::with_capacity(cap);
    for &v in values {
        let mut x = v;
        let mut r = 0;
        loop {
            if r == rows.len() {
                rows.push(vec![x]);
                break;
            }
            let row = &mut rows[r];
            let j = row.partition_point(|y| *y <= x);
            if j == row.len() {
                row.push(x);
                break;
            }
            std::mem::swap(&mut row[j], &mut x);
            r += 1;
        }
    }
    Partition::from_sorted(rows.iter().map(Vec::len).collect())
}

/// splitmix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of sample `index` in a batch seeded with `seed`.
pub fn sample_seed(seed: u64, index: u64) -> u64 {
    splitmix64(seed ^ splitmix64(index))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleBatch {
    pub xi: f64,
    pub seed: u64,
    pub seeds: Vec<u64>,
    pub shapes: Vec<Partition>,
    /// Lattice spacing used for rescaling, `Λ₀/√ξ`.
    pub hbar: f64,
}

impl SampleBatch {
    /// Rescale for a given `Λ₀` (the default is `Λ₀ = 1`).
    pub fn with_lambda0(mut self, lambda0: f64) -> Self {
        self.hbar = lambda0 / self.xi.sqrt();
        self
    }
}

fn one_sample(xi: f64, seed: u64) -> Partition {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let poisson = Poisson::new(xi).expect("xi checked positive");
    let n = poisson.sample(&mut rng) as usize;
    let mut perm: Vec<u32> = (0..n as u32).collect();
    perm.shuffle(&mut rng);
    rsk_shape(&perm)
}

/// `n_samples` draws of the Poissonized Plancherel measure with intensity
/// `xi`: `n ~ Poisson(xi)`, a uniform permutation of size `n`, its RSK shape.
pub fn sample_batch(xi: f64, n_samples: usize, seed: u64) -> Result<SampleBatch> {
    if !(xi > 0.0 && xi.is_finite()) {
        return Err(Error::InvalidParameter(format!("xi must be positive, got {xi}")));
    }
    let seeds: Vec<u64> = (0..n_samples as u64).map(|i| sample_seed(seed, i)).collect();
    let shapes = seeds.par_iter().map(|&sd| one_sample(xi, sd)).collect();
    Ok(SampleBatch { xi, seed, seeds, shapes, hbar: 1.0 / xi.sqrt() })
}

/// `ρ_{μ,s}(u/ħ)` on `grid`: 1 if the site `⌊u/ħ⌋` carries a particle
/// (`x = s + μ_i − i`), else 0.
pub fn empirical_density(mu: &Partition, hbar: f64, s: i64, grid: &[f64]) -> Result<Vec<f64>> {
    if !(hbar > 0.0) {
        return Err(Error::InvalidParameter(format!("hbar must be positive, got {hbar}")));
    }
    let parts = mu.parts();
    let len = parts.len() as i64;
    // Strictly decreasing particle positions of the non-vacuum rows.
    let sites: Vec<i64> = parts.iter().enumerate().map(|(i, &m)| s + m as i64 - i as i64 - 1).collect();
    Ok(grid
        .iter()
        .map(|&u| {
            let x = (u / hbar).floor() as i64;
            if x < s - len {
                return 1.0;
            }
            let j = sites.partition_point(|&p| p > x);
            if j < sites.len() && sites[j] == x {
                1.0
            } else {
                0.0
            }
        })
        .collect())
}

/// Averages of the step function `ρ_{μ,s}(u/ħ)` over the cells
/// `[edges[j], edges[j+1])`.
pub fn empirical_cell_density(mu: &Partition, hbar: f64, s: i64, edges: &[f64]) -> Result<Vec<f64>> {
    check_edges(edges)?;
    if !(hbar > 0.0) {
        return Err(Error::InvalidParameter(format!("hbar must be positive, got {hbar}")));
    }
    let parts = mu.parts();
    let len = parts.len() as i64;
    let sites: Vec<i64> = parts.iter().enumerate().map(|(i, &m)| s + m as i64 - i as i64 - 1).collect();
    let occupied = |x: i64| {
        if x < s - len {
            return true;
        }
        let j = sites.partition_point(|&p| p > x);
        j < sites.len() && sites[j] == x
    };
    Ok(edges
        .windows(2)
        .map(|e| {
            let (a, b) = (e[0] / hbar, e[1] / hbar);
            let mut covered = 0.0;
            let mut x = a.floor() as i64;
            while (x as f64) < b {
                if occupied(x) {
                    covered += (b.min(x as f64 + 1.0) - a.max(x as f64)).max(0.0);
                }
                x += 1;
            }
            covered / (b - a)
        })
        .collect())
}

fn check_edges(edges: &[f64]) -> Result<()> {
    if edges.len() < 2 || edges.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter("cell edges must be strictly ascending, at least 2".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeComparison {
    /// Sup distance between the batch-averaged profile and the reference.
    pub sup_dist: f64,
    /// L² distance of the same (cell-wise).
    pub l2_dist: f64,
    /// Per-sample sup distances, in batch order.
    pub sample_sup: Vec<f64>,
    /// Batch-averaged cell densities.
    pub averaged: Vec<f64>,
    /// Cell averages of the reference.
    pub reference: Vec<f64>,
}

/// Compare the rescaled shapes of `batch` (charge `s`) with `reference`,
/// cell by cell on the partition given by `edges`.
///
/// Both sides are cell averages: a single site occupation is 0 or 1, and
/// only its local averages approach `ρ*`.
pub fn compare_limit_shape(
    batch: &SampleBatch,
    s: i64,
    reference: &DensityProfile,
    edges: &[f64],
) -> Result<ShapeComparison> {
    check_edges(edges)?;
    if batch.shapes.is_empty() {
        return Err(Error::InvalidParameter("empty batch".into()));
    }
    let rule = Rule::new(16);
    let refs: Vec<f64> = edges
        .windows(2)
        .map(|e| rule.integrate(e[0], e[1], |u| reference.eval(u)) / (e[1] - e[0]))
        .collect();
    let profiles: Result<Vec<Vec<f64>>> =
        batch.shapes.par_iter().map(|mu| empirical_cell_density(mu, batch.hbar, s, edges)).collect();
    let profiles = profiles?;
    let sample_sup = profiles
        .iter()
        .map(|p| p.iter().zip(&refs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
        .collect();
    let m = profiles.len() as f64;
    let averaged: Vec<f64> = (0..refs.len()).map(|j| profiles.iter().map(|p| p[j]).sum::<f64>() / m).collect();
    let sup_dist = averaged.iter().zip(&refs).fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs()));
    let l2: f64 = edges
        .windows(2)
        .zip(averaged.iter().zip(&refs))
        .map(|(e, (a, b))| (e[1] - e[0]) * (a - b) * (a - b))
        .sum();
    Ok(ShapeComparison { sup_dist, l2_dist: l2.sqrt(), sample_sup, averaged, reference: refs })
}
