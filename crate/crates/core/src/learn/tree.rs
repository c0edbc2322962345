//! Greedy binary decision tree minimizing Gini impurity.
//!
//! Splits are midpoints between consecutive distinct values of one
//! feature. Candidate features are scanned in ascending index order and a
//! split is replaced only by a strictly better one, so ties resolve to the
//! lowest feature index and lowest threshold. Zero-gain splits are allowed
//! (they are what lets a tree carve an XOR pattern), and recursion stops
//! at purity, the depth limit, or the minimum leaf size.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct TreeParams {
    /// Maximum split depth; None grows until purity or leaf-size limits.
    pub max_depth: Option<usize>,
    /// Minimum rows on each side of every split.
    pub min_leaf: usize,
    /// Candidate features drawn per split; None considers all.
    pub feature_subset: Option<usize>,
    pub seed: u64,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams { max_depth: None, min_leaf: 1, feature_subset: None, seed: 0 }
    }
}

#[derive(Clone, Debug)]
enum Node {
    Split { feature: usize, threshold: f64, left: usize, right: usize },
    Leaf { p: f64 },
}

/// A fitted tree; `score` returns the positive-class probability of the
/// leaf a row lands in.
#[derive(Clone, Debug)]
pub struct TreeModel {
    nodes: Vec<Node>,
    root: usize,
}

impl TreeModel {
    pub fn score(&self, row: &[f64]) -> f64 {
        let mut at = self.root;
        loop {
            match &self.nodes[at] {
                Node::Leaf { p } => return *p,
                Node::Split { feature, threshold, left, right } => {
                    at = if row[*feature] <= *threshold { *left } else { *right };
                }
            }
        }
    }

    pub fn predict(&self, row: &[f64]) -> bool {
        self.score(row) >= 0.5
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], at: usize) -> usize {
            match &nodes[at] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
            }
        }
        walk(&self.nodes, self.root)
    }
}

pub fn fit_tree(x: &[Vec<f64>], y: &[bool], params: &TreeParams) -> Result<TreeModel> {
    fit_tree_on(x, y, (0..x.len()).collect(), params)
}

/// Fit on a row multiset given by `idx` (repeats allowed, as bootstrap
/// sampling produces).
pub(crate) fn fit_tree_on(
    x: &[Vec<f64>],
    y: &[bool],
    idx: Vec<usize>,
    params: &TreeParams,
) -> Result<TreeModel> {
    if idx.is_empty() {
        return Err(Error::validation("cannot fit a tree on zero rows"));
    }
    if x.len() != y.len() {
        return Err(Error::validation(format!(
            "{} rows but {} labels",
            x.len(),
            y.len()
        )));
    }
    let p = x[0].len();
    if x.iter().any(|r| r.len() != p) {
        return Err(Error::validation("rows have inconsistent widths"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut builder = Builder {
        x,
        y,
        p,
        min_leaf: params.min_leaf.max(1),
        max_depth: params.max_depth,
        subset: params.feature_subset,
        rng: &mut rng,
        nodes: Vec::new(),
    };
    let root = builder.build(idx, 0);
    Ok(TreeModel { nodes: builder.nodes, root })
}

struct Builder<'a> {
    x: &'a [Vec<f64>],
    y: &'a [bool],
    p: usize,
    min_leaf: usize,
    max_depth: Option<usize>,
    subset: Option<usize>,
    rng: &'a mut ChaCha8Rng,
    nodes: Vec<Node>,
}

impl Builder<'_> {
    fn build(&mut self, idx: Vec<usize>, depth: usize) -> usize {
        let n = idx.len();
        let pos = idx.iter().filter(|&&i| self.y[i]).count();
        let at_depth_limit = self.max_depth.is_some_and(|d| depth >= d);
        if pos == 0 || pos == n || at_depth_limit || n < 2 * self.min_leaf {
            return self.leaf(pos, n);
        }
        let candidates = self.candidate_features();
        let Some((feature, threshold)) = self.best_split(&idx, pos, &candidates) else {
            return self.leaf(pos, n);
        };
        let (left_idx, right_idx): (Vec<usize>, Vec<usize>) =
            idx.into_iter().partition(|&i| self.x[i][feature] <= threshold);
        let left = self.build(left_idx, depth + 1);
        let right = self.build(right_idx, depth + 1);
        self.nodes.push(Node::Split { feature, threshold, left, right });
        self.nodes.len() - 1
    }

    fn leaf(&mut self, pos: usize, n: usize) -> usize {
        self.nodes.push(Node::Leaf { p: pos as f64 / n as f64 });
        self.nodes.len() - 1
    }

    fn candidate_features(&mut self) -> Vec<usize> {
        match self.subset {
            Some(k) if k < self.p => {
                let mut picked = rand::seq::index::sample(self.rng, self.p, k).into_vec();
                picked.sort_unstable();
                picked
            }
            _ => (0..self.p).collect(),
        }
    }

    /// Lowest weighted child Gini impurity over all candidate positions;
    /// None when no position satisfies the leaf-size floor.
    fn best_split(&self, idx: &[usize], pos: usize, features: &[usize]) -> Option<(usize, f64)> {
        let n = idx.len();
        let mut best: Option<(f64, usize, f64)> = None;
        let mut vals: Vec<(f64, bool)> = Vec::with_capacity(n);
        for &f in features {
            vals.clear();
            vals.extend(idx.iter().map(|&i| (self.x[i][f], self.y[i])));
            vals.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut pos_left = 0usize;
            for split in 1..n {
                pos_left += usize::from(vals[split - 1].1);
                if split < self.min_leaf || n - split < self.min_leaf {
                    continue;
                }
                if vals[split - 1].0 == vals[split].0 {
                    continue;
                }
                let nl = split as f64;
                let nr = (n - split) as f64;
                let gl = gini(pos_left as f64, nl);
                let gr = gini((pos - pos_left) as f64, nr);
                let g = (nl * gl + nr * gr) / n as f64;
                if best.map_or(true, |(bg, _, _)| g < bg - 1e-12) {
                    // the midpoint of two adjacent floats can round up to
                    // the right value, which would leave the right side
                    // empty; keep the threshold strictly below it
                    let mid = (vals[split - 1].0 + vals[split].0) / 2.0;
                    let threshold =
                        if mid < vals[split].0 { mid } else { vals[split - 1].0 };
                    best = Some((g, f, threshold));
                }
            }
        }
        best.map(|(_, f, t)| (f, t))
    }
}

fn gini(pos: f64, n: f64) -> f64 {
    let p = pos / n;
    1.0 - p * p - (1.0 - p) * (1.0 - p)
}
