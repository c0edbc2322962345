//! Brute-force reference implementations for the acceptance suite.
//!
//! Everything in here is written the slow, definitional way on purpose:
//! shortest paths are enumerated one by one, cores are found by repeated
//! peeling at every k, partitions are searched exhaustively, and ranking
//! quality is counted pair by pair. None of it shares a code path with
//! the library, which is the point.

use std::collections::{BTreeSet, VecDeque};

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use conet::domain::Dataset;
use conet::graph::CoOffenderNetwork;

/// Seeded Erdos-Renyi adjacency list with sorted neighbor rows.
pub fn random_graph(n: usize, p: f64, rng: &mut ChaCha8Rng) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    for u in 0..n {
        for w in u + 1..n {
            if rng.gen::<f64>() < p {
                adj[u].push(w);
                adj[w].push(u);
            }
        }
    }
    adj
}

fn bfs_dist(adj: &[Vec<usize>], s: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; adj.len()];
    dist[s] = 0;
    let mut q = VecDeque::from([s]);
    while let Some(u) = q.pop_front() {
        for &w in &adj[u] {
            if dist[w] == usize::MAX {
                dist[w] = dist[u] + 1;
                q.push_back(w);
            }
        }
    }
    dist
}

/// Every shortest s-t path, listed explicitly.
pub fn enumerate_shortest_paths(adj: &[Vec<usize>], s: usize, t: usize) -> Vec<Vec<usize>> {
    let dist = bfs_dist(adj, s);
    if dist[t] == usize::MAX {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut path = vec![s];
    walk(adj, &dist, t, &mut path, &mut out);
    out
}

fn walk(
    adj: &[Vec<usize>],
    dist: &[usize],
    t: usize,
    path: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    let u = *path.last().unwrap();
    if u == t {
        out.push(path.clone());
        return;
    }
    for &w in &adj[u] {
        if dist[w] == dist[u] + 1 && dist[w] <= dist[t] {
            path.push(w);
            walk(adj, dist, t, path, out);
            path.pop();
        }
    }
}

/// Subset betweenness of `v` by full path enumeration: over unordered
/// member pairs that exclude v, the fraction of shortest paths with v in
/// the interior.
pub fn betweenness_by_enumeration(adj: &[Vec<usize>], members: &[bool], v: usize) -> f64 {
    let n = adj.len();
    let mut total = 0.0;
    for u in 0..n {
        for w in u + 1..n {
            if !members[u] || !members[w] || u == v || w == v {
                continue;
            }
            let paths = enumerate_shortest_paths(adj, u, w);
            if paths.is_empty() {
                continue;
            }
            let through = paths.iter().filter(|p| p[1..p.len() - 1].contains(&v)).count();
            total += through as f64 / paths.len() as f64;
        }
    }
    total
}

/// Subset closeness of `v`: reachable members (v itself counts at distance
/// zero when a member, unless `drop_self`) over their total distance.
pub fn closeness_by_enumeration(
    adj: &[Vec<usize>],
    members: &[bool],
    v: usize,
    drop_self: bool,
) -> f64 {
    let dist = bfs_dist(adj, v);
    let mut reached = 0u64;
    let mut total = 0u64;
    for u in 0..adj.len() {
        if !members[u] || (drop_self && u == v) {
            continue;
        }
        if dist[u] != usize::MAX {
            reached += 1;
            total += dist[u] as u64;
        }
    }
    if reached <= 1 {
        0.0
    } else {
        (reached - 1) as f64 / total as f64
    }
}

/// Shell number of `v` within the subgraph on {v} plus the members, found
/// by peeling the whole subgraph at every k until v falls out.
pub fn shell_by_peeling(adj: &[Vec<usize>], members: &[bool], v: usize) -> usize {
    let n = adj.len();
    let keep: Vec<bool> = (0..n).map(|u| members[u] || u == v).collect();
    let mut best = 0;
    for k in 0..=n {
        let mut alive = keep.clone();
        loop {
            let mut removed = false;
            for u in 0..n {
                if alive[u] && adj[u].iter().filter(|&&w| alive[w]).count() < k {
                    alive[u] = false;
                    removed = true;
                }
            }
            if !removed {
                break;
            }
        }
        if alive[v] {
            best = k;
        } else {
            break;
        }
    }
    best
}

/// Threshold diffusion by literal synchronous stepping until stable;
/// returns the final state and how many steps changed anything.
pub fn naive_fixpoint(adj: &[Vec<usize>], seeds: &[bool], k: usize) -> (Vec<bool>, usize) {
    let mut state = seeds.to_vec();
    let mut waves = 0;
    loop {
        let mut next = state.clone();
        for v in 0..adj.len() {
            if !state[v] && adj[v].iter().filter(|&&u| state[u]).count() >= k {
                next[v] = true;
            }
        }
        if next == state {
            return (state, waves);
        }
        state = next;
        waves += 1;
    }
}

/// Every set partition of `n` items as restricted-growth assignments.
pub fn all_partitions(n: usize) -> Vec<Vec<usize>> {
    fn rec(i: usize, next_block: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == cur.len() {
            out.push(cur.clone());
            return;
        }
        for b in 0..=next_block {
            cur[i] = b;
            rec(i + 1, next_block.max(b + 1), cur, out);
        }
    }
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    let mut cur = vec![0usize; n];
    rec(1, 1, &mut cur, &mut out);
    out
}

/// Modularity straight from the per-block formula: intra-edge fraction
/// minus squared degree fraction, summed over blocks.
pub fn modularity_by_blocks(adj: &[Vec<usize>], assign: &[usize]) -> f64 {
    let n = adj.len();
    let m2: usize = adj.iter().map(|a| a.len()).sum();
    let blocks: BTreeSet<usize> = assign.iter().copied().collect();
    let mut q = 0.0;
    for &b in &blocks {
        let mut intra2 = 0usize;
        let mut deg = 0usize;
        for v in 0..n {
            if assign[v] == b {
                deg += adj[v].len();
                intra2 += adj[v].iter().filter(|&&u| assign[u] == b).count();
            }
        }
        q += intra2 as f64 / m2 as f64 - (deg as f64 / m2 as f64).powi(2);
    }
    q
}

/// The best modularity any partition of the graph can reach, by trying
/// every one of them.
pub fn best_partition_by_search(adj: &[Vec<usize>]) -> f64 {
    all_partitions(adj.len())
        .iter()
        .map(|a| modularity_by_blocks(adj, a))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Two-hop heuristic membership straight from its definition: within two
/// hops of some other homicide victim, and no violent offense on record.
pub fn thh_by_definition(g: &CoOffenderNetwork, ds: &Dataset) -> BTreeSet<String> {
    let n = g.node_count();
    let mut pool = vec![false; n];
    for v in 0..n {
        if !ds.history(g.id(v)).unwrap().is_victim() {
            continue;
        }
        let dist = bfs_dist(g.adjacency(), v);
        for u in 0..n {
            if u != v && dist[u] <= 2 {
                pool[u] = true;
            }
        }
    }
    (0..n)
        .filter(|&u| pool[u] && !ds.history(g.id(u)).unwrap().has_violent())
        .map(|u| g.id(u).as_str().to_string())
        .collect()
}

/// Ranking quality by counting every positive-negative pair, ties worth
/// half a win.
pub fn auc_by_pairs(scores: &[f64], truth: &[bool]) -> Option<f64> {
    let mut wins = 0.0;
    let mut pairs = 0u64;
    for i in 0..truth.len() {
        for j in 0..truth.len() {
            if truth[i] && !truth[j] {
                pairs += 1;
                if scores[i] > scores[j] {
                    wins += 1.0;
                } else if scores[i] == scores[j] {
                    wins += 0.5;
                }
            }
        }
    }
    if pairs == 0 {
        None
    } else {
        Some(wins / pairs as f64)
    }
}
