//! Random forest: bootstrap-bagged Gini trees with per-split feature
//! subsampling.
//!
//! Every tree's bootstrap sample and split randomness come from seeds
//! pre-drawn in tree order from one master stream, so fitting is
//! deterministic no matter how the trees are scheduled across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::learn::tree::{fit_tree_on, TreeModel, TreeParams};

#[derive(Clone, Debug)]
pub struct ForestParams {
    pub trees: usize,
    pub min_leaf: usize,
    pub max_depth: Option<usize>,
    /// Draw each tree's rows with replacement; off trains every tree on
    /// the full data.
    pub bootstrap: bool,
    /// Candidate features per split; None uses ceil(sqrt(feature count)).
    pub features_per_split: Option<usize>,
    pub seed: u64,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            trees: 100,
            min_leaf: 1,
            max_depth: None,
            bootstrap: true,
            features_per_split: None,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ForestModel {
    trees: Vec<TreeModel>,
    pub features_per_split: usize,
    pub seed: u64,
}

impl ForestModel {
    /// Mean leaf probability across the trees.
    pub fn score(&self, row: &[f64]) -> f64 {
        let total: f64 = self.trees.iter().map(|t| t.score(row)).sum();
        total / self.trees.len() as f64
    }

    pub fn predict(&self, row: &[f64]) -> bool {
        self.score(row) >= 0.5
    }

    pub fn tree_count(&self) -> usize {
        self.trees.len()
    }
}

pub fn fit_forest(x: &[Vec<f64>], y: &[bool], params: &ForestParams) -> Result<ForestModel> {
    if x.is_empty() {
        return Err(Error::validation("cannot fit a forest on zero rows"));
    }
    if params.trees == 0 {
        return Err(Error::validation("a forest needs at least one tree"));
    }
    let n = x.len();
    let p = x[0].len();
    let k = params
        .features_per_split
        .unwrap_or_else(|| (p as f64).sqrt().ceil() as usize)
        .clamp(1, p.max(1));
    let mut master = ChaCha8Rng::seed_from_u64(params.seed);
    let seeds: Vec<(u64, u64)> =
        (0..params.trees).map(|_| (master.gen(), master.gen())).collect();
    let trees: Vec<TreeModel> = seeds
        .par_iter()
        .map(|&(sample_seed, split_seed)| {
            let idx: Vec<usize> = if params.bootstrap {
                let mut rng = ChaCha8Rng::seed_from_u64(sample_seed);
                (0..n).map(|_| rng.gen_range(0..n)).collect()
            } else {
                (0..n).collect()
            };
            let tp = TreeParams {
                max_depth: params.max_depth,
                min_leaf: params.min_leaf,
                feature_subset: Some(k),
                seed: split_seed,
            };
            fit_tree_on(x, y, idx, &tp)
        })
        .collect::<Result<_>>()?;
    Ok(ForestModel { trees, features_per_split: k, seed: params.seed })
}
