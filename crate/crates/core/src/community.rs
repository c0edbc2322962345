//! Block partitions and modularity-based community detection.
//!
//! The Louvain routine runs on a plain adjacency slice so it can serve both
//! whole networks and induced subgraphs (gang blocks). It is deterministic
//! for a fixed seed: node visit order is the ascending index order permuted
//! by a seeded shuffle, moves happen only on strictly positive modularity
//! gain, and ties between candidate blocks go to the smallest block id.

use std::io::Write;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// A partition of nodes `0..n` into disjoint blocks. Blocks are numbered in
/// order of their smallest member, so equal partitions always compare equal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    assignment: Vec<usize>,
    blocks: Vec<Vec<usize>>,
}

impl Partition {
    /// Build from a raw node-to-block mapping; block ids are renumbered by
    /// smallest member.
    pub fn from_assignment(raw: Vec<usize>) -> Self {
        let mut first_seen: Vec<usize> = Vec::new();
        let mut remap: std::collections::HashMap<usize, usize> = std::collections::HashMap::new();
        for &b in &raw {
            if !remap.contains_key(&b) {
                remap.insert(b, first_seen.len());
                first_seen.push(b);
            }
        }
        let assignment: Vec<usize> = raw.iter().map(|b| remap[b]).collect();
        let mut blocks = vec![Vec::new(); first_seen.len()];
        for (node, &b) in assignment.iter().enumerate() {
            blocks[b].push(node);
        }
        Partition { assignment, blocks }
    }

    pub fn singletons(n: usize) -> Self {
        Partition::from_assignment((0..n).collect())
    }

    pub fn node_count(&self) -> usize {
        self.assignment.len()
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn block_of(&self, node: usize) -> usize {
        self.assignment[node]
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block_members(&self, block: usize) -> &[usize] {
        &self.blocks[block]
    }

    /// Index of the largest block; ties go to the block containing the
    /// smallest node id (the earliest block in numbering order).
    pub fn largest_block(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for (i, b) in self.blocks.iter().enumerate() {
            if best.map(|j| b.len() > self.blocks[j].len()).unwrap_or(true) {
                best = Some(i);
            }
        }
        best
    }

    /// CSV export: `node,block_index` per line, nodes ascending. `name_of`
    /// turns a node index into its external name.
    pub fn write_csv(&self, name_of: impl Fn(usize) -> String, mut w: impl Write) -> Result<()> {
        writeln!(w, "node,block_index")?;
        for (node, &b) in self.assignment.iter().enumerate() {
            writeln!(w, "{},{}", name_of(node), b)?;
        }
        Ok(())
    }
}

/// Newman modularity of a partition over an undirected simple graph, at
/// resolution 1. Errors when the graph has no edges (the quantity is
/// undefined there).
pub fn modularity(adj: &[Vec<usize>], partition: &Partition) -> Result<f64> {
    let m2: usize = adj.iter().map(|n| n.len()).sum();
    if m2 == 0 {
        return Err(Error::compute("modularity is undefined on a graph with no edges"));
    }
    let m2 = m2 as f64;
    let mut q = 0.0;
    for block in partition.blocks() {
        let inside: Vec<bool> = {
            let mut v = vec![false; adj.len()];
            for &n in block {
                v[n] = true;
            }
            v
        };
        let mut internal = 0usize; // directed count
        let mut degree = 0usize;
        for &n in block {
            degree += adj[n].len();
            internal += adj[n].iter().filter(|&&w| inside[w]).count();
        }
        q += internal as f64 / m2 - (degree as f64 / m2).powi(2);
    }
    Ok(q)
}

/// Louvain community detection. Returns the final partition and the
/// modularity trace, one entry per completed phase, measured on the input
/// graph. The trace is non-decreasing.
pub fn louvain(adj: &[Vec<usize>], seed: u64) -> Result<(Partition, Vec<f64>)> {
    let n = adj.len();
    let m2: usize = adj.iter().map(|a| a.len()).sum();
    if m2 == 0 {
        return Err(Error::compute("community detection needs a graph with at least one edge"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // current coarse graph: pair adjacency plus per-node self-loop weight
    let mut cur: Vec<Vec<(usize, f64)>> = adj
        .iter()
        .map(|ns| ns.iter().map(|&w| (w, 1.0)).collect())
        .collect();
    let mut loops: Vec<f64> = vec![0.0; n];
    // projection from original nodes to current coarse nodes
    let mut project: Vec<usize> = (0..n).collect();
    let m2 = m2 as f64;
    let mut trace: Vec<f64> = Vec::new();

    loop {
        let moved = local_moves(&cur, &loops, m2, &mut rng)?;
        let Some(assign) = moved else { break };

        // renumber this phase's communities; the new ids become the coarse
        // node ids of the aggregated graph
        let blocks = Partition::from_assignment(assign).blocks().to_vec();
        let mut owner = vec![0usize; cur.len()];
        for (b, members) in blocks.iter().enumerate() {
            for &v in members {
                owner[v] = b;
            }
        }
        project = project.iter().map(|&c| owner[c]).collect();

        // record this phase's quality on the original graph
        let q = modularity(adj, &Partition::from_assignment(project.clone()))?;
        if let Some(&prev) = trace.last() {
            debug_assert!(q >= prev - 1e-9, "modularity fell between phases: {prev} -> {q}");
        }
        trace.push(q);
        let mut next: Vec<std::collections::BTreeMap<usize, f64>> =
            vec![std::collections::BTreeMap::new(); blocks.len()];
        let mut next_loops = vec![0.0f64; blocks.len()];
        for v in 0..cur.len() {
            let ov = owner[v];
            next_loops[ov] += loops[v];
            for &(w, wt) in &cur[v] {
                let ow = owner[w];
                if ov == ow {
                    // each internal pair is visited from both sides
                    next_loops[ov] += wt / 2.0;
                } else {
                    *next[ov].entry(ow).or_insert(0.0) += wt;
                }
            }
        }
        cur = next
            .into_iter()
            .map(|m| m.into_iter().collect())
            .collect();
        loops = next_loops;
    }

    let part = Partition::from_assignment(project);
    if trace.is_empty() {
        // no phase produced a merge; the singleton partition stands
        trace.push(modularity(adj, &part)?);
    }
    Ok((part, trace))
}

/// One local-move phase on the coarse graph. Returns the community
/// assignment if any node moved, `None` when the phase was a no-op.
fn local_moves(
    cur: &[Vec<(usize, f64)>],
    loops: &[f64],
    m2: f64,
    rng: &mut ChaCha8Rng,
) -> Result<Option<Vec<usize>>> {
    let n = cur.len();
    let k: Vec<f64> = (0..n)
        .map(|v| cur[v].iter().map(|&(_, w)| w).sum::<f64>() + 2.0 * loops[v])
        .collect();
    let mut comm: Vec<usize> = (0..n).collect();
    let mut tot: Vec<f64> = k.clone();
    let mut any_moved = false;
    let mut order: Vec<usize> = (0..n).collect();

    loop {
        order.shuffle(rng);
        let mut moved_this_pass = 0usize;
        for &v in &order {
            let old = comm[v];
            tot[old] -= k[v];
            // weight from v into each neighboring community
            let mut into: std::collections::HashMap<usize, f64> = std::collections::HashMap::new();
            for &(w, wt) in &cur[v] {
                *into.entry(comm[w]).or_insert(0.0) += wt;
            }
            let gain = |c: usize| -> f64 {
                let kin = into.get(&c).copied().unwrap_or(0.0);
                2.0 * kin / m2 - 2.0 * tot[c] * k[v] / (m2 * m2)
            };
            // candidates ascending, replacement only on strictly better
            // gain: among equal gains the smallest block id wins
            let mut best_c = old;
            let mut best_gain = gain(old);
            let mut candidates: Vec<usize> = into.keys().copied().collect();
            candidates.sort_unstable();
            for c in candidates {
                let g = gain(c);
                if g > best_gain + 1e-12 {
                    best_c = c;
                    best_gain = g;
                }
            }
            if best_c != old {
                comm[v] = best_c;
                tot[best_c] += k[v];
                moved_this_pass += 1;
                any_moved = true;
            } else {
                comm[v] = old;
                tot[old] += k[v];
            }
        }
        if moved_this_pass == 0 {
            break;
        }
    }
    Ok(if any_moved { Some(comm) } else { None })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multi_phase_aggregation_keeps_projection_consistent() {
        // a long ring of cliques forces several aggregation phases whose
        // block renumbering differs from the raw move labels
        let pockets = 12;
        let size = 5;
        let n = pockets * size;
        let mut edges = Vec::new();
        for p in 0..pockets {
            for a in 0..size {
                for b in a + 1..size {
                    edges.push((p * size + a, p * size + b));
                }
            }
            let last = p * size + size - 1;
            let next = ((p + 1) % pockets) * size;
            edges.push((last.min(next), last.max(next)));
        }
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in &edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        for row in &mut adj {
            row.sort_unstable();
        }
        let (part, trace) = louvain(&adj, 3).unwrap();
        assert_eq!(part.node_count(), n);
        let q = modularity(&adj, &part).unwrap();
        assert!((q - trace.last().unwrap()).abs() < 1e-9, "{q} vs {trace:?}");
        assert!(q > 0.6, "ring of cliques should partition cleanly, got {q}");
    }

    fn adj_from_edges(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        for ns in &mut adj {
            ns.sort_unstable();
        }
        adj
    }

    fn two_triangles_bridge() -> Vec<Vec<usize>> {
        adj_from_edges(6, &[(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5), (2, 3)])
    }

    #[test]
    fn modularity_matches_hand_computed_values() {
        let adj = two_triangles_bridge();
        let split = Partition::from_assignment(vec![0, 0, 0, 1, 1, 1]);
        let q = modularity(&adj, &split).unwrap();
        assert!((q - 5.0 / 14.0).abs() < 1e-12, "got {q}");
        let one = Partition::from_assignment(vec![0; 6]);
        assert!(modularity(&adj, &one).unwrap().abs() < 1e-12);
    }

    #[test]
    fn modularity_is_undefined_without_edges() {
        let adj: Vec<Vec<usize>> = vec![Vec::new(); 3];
        assert!(modularity(&adj, &Partition::singletons(3)).is_err());
    }

    #[test]
    fn louvain_splits_bridged_triangles() {
        let adj = two_triangles_bridge();
        let (part, trace) = louvain(&adj, 7).unwrap();
        assert_eq!(part.blocks(), &[vec![0, 1, 2], vec![3, 4, 5]]);
        let q = *trace.last().unwrap();
        assert!((q - 5.0 / 14.0).abs() < 1e-9);
    }

    #[test]
    fn louvain_finds_both_cliques_when_disconnected() {
        let mut edges = Vec::new();
        for i in 0..4usize {
            for j in i + 1..4 {
                edges.push((i, j));
                edges.push((i + 4, j + 4));
            }
        }
        let adj = adj_from_edges(8, &edges);
        let (part, trace) = louvain(&adj, 3).unwrap();
        assert_eq!(part.blocks(), &[vec![0, 1, 2, 3], vec![4, 5, 6, 7]]);
        assert!((trace.last().unwrap() - 0.5).abs() < 1e-9);
    }

    #[test]
    fn louvain_separates_clique_and_triangle_pockets() {
        // K4 on 0..4, triangle on 4..7, bridge 3-4
        let mut edges = vec![(4, 5), (4, 6), (5, 6), (3, 4)];
        for i in 0..4usize {
            for j in i + 1..4 {
                edges.push((i, j));
            }
        }
        let adj = adj_from_edges(7, &edges);
        let (part, trace) = louvain(&adj, 11).unwrap();
        assert_eq!(part.blocks(), &[vec![0, 1, 2, 3], vec![4, 5, 6]]);
        assert!((trace.last().unwrap() - 0.355).abs() < 1e-9);
    }

    #[test]
    fn isolated_nodes_stay_singleton() {
        // triangle plus a node with no edges: no strictly positive gain ever
        // attaches the floater, so it keeps its own block
        let adj = adj_from_edges(4, &[(0, 1), (0, 2), (1, 2)]);
        let (part, _) = louvain(&adj, 5).unwrap();
        assert_eq!(part.blocks(), &[vec![0, 1, 2], vec![3]]);
    }

    #[test]
    fn single_edge_merges_into_one_block() {
        let adj = adj_from_edges(2, &[(0, 1)]);
        let (part, _) = louvain(&adj, 1).unwrap();
        assert_eq!(part.block_count(), 1);
    }

    #[test]
    fn trace_never_decreases() {
        let adj = two_triangles_bridge();
        for seed in 0..20u64 {
            let (_, trace) = louvain(&adj, seed).unwrap();
            for w in trace.windows(2) {
                assert!(w[1] >= w[0] - 1e-9, "trace fell: {trace:?}");
            }
        }
    }

    #[test]
    fn same_seed_same_partition() {
        let adj = two_triangles_bridge();
        let (a, _) = louvain(&adj, 42).unwrap();
        let (b, _) = louvain(&adj, 42).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn partition_blocks_are_numbered_by_smallest_member() {
        let p = Partition::from_assignment(vec![9, 4, 9, 4, 7]);
        assert_eq!(p.blocks(), &[vec![0, 2], vec![1, 3], vec![4]]);
        assert_eq!(p.block_of(3), 1);
    }

    #[test]
    fn largest_block_tie_goes_to_smallest_member() {
        let p = Partition::from_assignment(vec![0, 1, 0, 1]);
        assert_eq!(p.largest_block(), Some(0));
    }

    #[test]
    fn partition_csv_lists_nodes_ascending() {
        let p = Partition::from_assignment(vec![1, 0, 1]);
        let mut buf = Vec::new();
        p.write_csv(|n| format!("n{n}"), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "node,block_index\nn0,0\nn1,1\nn2,0\n");
    }
}
