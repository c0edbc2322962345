//! Centrality measures restricted to a node subset.
//!
//! Each measure takes the usual definition and narrows the set of nodes that
//! count as endpoints (betweenness), targets (closeness) or subgraph members
//! (shell number), leaving the traversal itself on the full graph where the
//! definition says so. The unrestricted variants fall out by passing the
//! full node set.

use rayon::prelude::*;

use crate::graph::CoOffenderNetwork;

/// A labeled subset of graph nodes, used to restrict a measure.
#[derive(Clone, Debug)]
pub struct NodeSubset {
    label: String,
    mask: Vec<bool>,
}

impl NodeSubset {
    pub fn new(label: impl Into<String>, mask: Vec<bool>) -> Self {
        NodeSubset { label: label.into(), mask }
    }

    /// The whole graph: restriction by nothing.
    pub fn all(label: impl Into<String>, n: usize) -> Self {
        NodeSubset { label: label.into(), mask: vec![true; n] }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn contains(&self, v: usize) -> bool {
        self.mask[v]
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn members(&self) -> impl Iterator<Item = usize> + '_ {
        self.mask.iter().enumerate().filter(|(_, &m)| m).map(|(v, _)| v)
    }

    pub fn count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }
}

/// Node-indexed scores of one measure under one restriction.
#[derive(Clone, Debug)]
pub struct CentralityScores {
    pub kind: String,
    pub values: Vec<f64>,
}

/// Betweenness restricted to endpoint pairs drawn from `subset`: for each
/// node v, the sum over unordered pairs {u, w} of subset members with
/// v ∉ {u, w} of the fraction of shortest u-w paths that pass through v.
/// Unreachable pairs contribute nothing. Unnormalized.
pub fn betweenness_wrt(g: &CoOffenderNetwork, subset: &NodeSubset) -> CentralityScores {
    let n = g.node_count();
    let sources: Vec<usize> = subset.members().collect();
    let mut acc = vec![0.0f64; n];
    // fixed-size chunks keep the reduction order independent of scheduling,
    // so results are bit-identical run to run
    for chunk in sources.chunks(128) {
        let parts: Vec<Vec<f64>> = chunk
            .par_iter()
            .map(|&s| dependency_pass(g, subset.mask(), s))
            .collect();
        for part in parts {
            for (a, p) in acc.iter_mut().zip(part) {
                *a += p;
            }
        }
    }
    // every unordered member pair was counted from both of its endpoints
    for a in &mut acc {
        *a /= 2.0;
    }
    CentralityScores { kind: format!("betweenness[{}]", subset.label()), values: acc }
}

/// One source's dependency accumulation: delta[v] sums, over subset-member
/// targets t, the fraction of shortest s-t paths with v strictly inside.
fn dependency_pass(g: &CoOffenderNetwork, members: &[bool], s: usize) -> Vec<f64> {
    let n = g.node_count();
    let mut dist: Vec<i64> = vec![-1; n];
    let mut sigma = vec![0.0f64; n];
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut order: Vec<usize> = Vec::with_capacity(n);
    dist[s] = 0;
    sigma[s] = 1.0;
    let mut queue = std::collections::VecDeque::from([s]);
    while let Some(u) = queue.pop_front() {
        order.push(u);
        for &w in g.neighbors(u) {
            if dist[w] < 0 {
                dist[w] = dist[u] + 1;
                queue.push_back(w);
            }
            if dist[w] == dist[u] + 1 {
                sigma[w] += sigma[u];
                preds[w].push(u);
            }
        }
    }
    let mut delta = vec![0.0f64; n];
    for &w in order.iter().rev() {
        let credit = if members[w] && w != s { 1.0 } else { 0.0 };
        let coeff = (credit + delta[w]) / sigma[w];
        for &p in &preds[w] {
            delta[p] += sigma[p] * coeff;
        }
    }
    delta[s] = 0.0;
    delta
}

/// Closeness restricted to `subset`: for node v, with R the subset members
/// reachable from v (v included when it is a member, at distance 0), the
/// score is (|R| - 1) / sum of distances, or 0 when |R| <= 1.
pub fn closeness_wrt(g: &CoOffenderNetwork, subset: &NodeSubset) -> CentralityScores {
    let values = closeness_values(g, subset, false);
    CentralityScores { kind: format!("closeness[{}]", subset.label()), values }
}

/// Closeness where each node's own membership is ignored for its own score:
/// node v is scored against subset-minus-v. This is the label-masked view,
/// where an offender's own labels are treated as unknown while everyone
/// else's stand.
pub fn closeness_wrt_self_masked(g: &CoOffenderNetwork, subset: &NodeSubset) -> CentralityScores {
    let values = closeness_values(g, subset, true);
    CentralityScores { kind: format!("closeness[{}]/self-masked", subset.label()), values }
}

fn closeness_values(g: &CoOffenderNetwork, subset: &NodeSubset, drop_self: bool) -> Vec<f64> {
    (0..g.node_count())
        .into_par_iter()
        .map(|v| {
            let pc = g.bfs_counts(v);
            let mut reached = 0usize;
            let mut total = 0u64;
            for m in subset.members() {
                if m == v && drop_self {
                    continue;
                }
                if let Some(d) = pc.dist[m] {
                    reached += 1;
                    total += u64::from(d);
                }
            }
            if reached <= 1 {
                0.0
            } else {
                (reached - 1) as f64 / total as f64
            }
        })
        .collect()
}

/// Shell (k-core) number per node, each node evaluated on the subgraph
/// induced by itself plus all subset members. Members share one
/// decomposition; every outside node gets its own, since its presence
/// changes the subgraph.
pub fn shell_numbers_wrt(g: &CoOffenderNetwork, subset: &NodeSubset) -> CentralityScores {
    let n = g.node_count();
    let member_graph = g.induced(subset.mask());
    let member_cores = core_numbers(&member_graph.adj);
    let mut local = vec![usize::MAX; n];
    for (li, &v) in member_graph.nodes.iter().enumerate() {
        local[v] = li;
    }
    let values: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|v| {
            if subset.contains(v) {
                member_cores[local[v]] as f64
            } else {
                // extend the member subgraph with v and peel that
                let mut adj = member_graph.adj.clone();
                let vi = adj.len();
                let mut mine: Vec<usize> = g
                    .neighbors(v)
                    .iter()
                    .filter(|&&w| subset.contains(w))
                    .map(|&w| local[w])
                    .collect();
                for &w in &mine {
                    adj[w].push(vi);
                }
                mine.sort_unstable();
                adj.push(mine);
                core_numbers(&adj)[vi] as f64
            }
        })
        .collect();
    CentralityScores { kind: format!("shell[{}]", subset.label()), values }
}

/// Core number of every node: the largest k such that the node survives in
/// the k-core (repeatedly deleting nodes of degree < k). Bucket peeling.
pub fn core_numbers(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    if n == 0 {
        return Vec::new();
    }
    let mut deg: Vec<usize> = adj.iter().map(|a| a.len()).collect();
    let maxd = deg.iter().copied().max().unwrap_or(0);
    let mut bins = vec![0usize; maxd + 2];
    for &d in &deg {
        bins[d] += 1;
    }
    let mut start = 0;
    for b in bins.iter_mut() {
        let c = *b;
        *b = start;
        start += c;
    }
    let mut pos = vec![0usize; n];
    let mut vert = vec![0usize; n];
    {
        let mut cursor = bins.clone();
        for v in 0..n {
            pos[v] = cursor[deg[v]];
            vert[pos[v]] = v;
            cursor[deg[v]] += 1;
        }
    }
    for i in 0..n {
        let v = vert[i];
        for &u in &adj[v] {
            if deg[u] > deg[v] {
                // pull u to the front of its degree bucket, then shrink it
                let du = deg[u];
                let pu = pos[u];
                let pw = bins[du];
                let w = vert[pw];
                if u != w {
                    vert.swap(pu, pw);
                    pos[u] = pw;
                    pos[w] = pu;
                }
                bins[du] += 1;
                deg[u] -= 1;
            }
        }
    }
    deg
}
