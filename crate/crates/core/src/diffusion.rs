//! Threshold propagation over the network.
//!
//! A node activates once at least `k` of its neighbors are active, and
//! activation never retracts. The fixpoint of that rule, started from a
//! seed set, is the propagation reach used by the spread features.

use rayon::prelude::*;

/// One synchronous activation step: every inactive node with at least `k`
/// active neighbors turns active, all at once. Active nodes stay active.
pub fn step_activation(adj: &[Vec<usize>], state: &[bool], k: usize) -> Vec<bool> {
    let mut next = state.to_vec();
    for v in 0..adj.len() {
        if !state[v] {
            let hot = adj[v].iter().filter(|&&u| state[u]).count();
            if hot >= k {
                next[v] = true;
            }
        }
    }
    next
}

/// Runs activation to its fixpoint. Returns the final state and the number
/// of steps that changed anything, which is also the number of activation
/// waves and can never exceed the node count.
pub fn propagate_to_fixpoint(adj: &[Vec<usize>], seeds: &[bool], k: usize) -> (Vec<bool>, usize) {
    let n = adj.len();
    let mut active = seeds.to_vec();
    let mut hot = vec![0usize; n];
    for v in 0..n {
        if active[v] {
            for &u in &adj[v] {
                hot[u] += 1;
            }
        }
    }
    let mut frontier: Vec<usize> =
        (0..n).filter(|&v| !active[v] && hot[v] >= k).collect();
    let mut waves = 0usize;
    while !frontier.is_empty() {
        waves += 1;
        for &v in &frontier {
            active[v] = true;
        }
        let mut next = Vec::new();
        for &v in &frontier {
            for &u in &adj[v] {
                hot[u] += 1;
                // the count only ever grows, so the threshold is crossed
                // exactly once per node
                if !active[u] && hot[u] == k {
                    next.push(u);
                }
            }
        }
        frontier = next;
    }
    (active, waves)
}

/// For every node v, whether v ends up active when propagation is seeded
/// from the seed set with v itself removed. Nodes outside the seed set keep
/// their plain fixpoint state, since removing them from the seeds changes
/// nothing; each seed gets its own rerun.
pub fn reach_with_self_masked(adj: &[Vec<usize>], seeds: &[bool], k: usize) -> Vec<bool> {
    let (full, _) = propagate_to_fixpoint(adj, seeds, k);
    let reruns: Vec<usize> = (0..adj.len()).filter(|&v| seeds[v]).collect();
    let outcomes: Vec<bool> = reruns
        .par_iter()
        .map(|&v| {
            let mut s = seeds.to_vec();
            s[v] = false;
            propagate_to_fixpoint(adj, &s, k).0[v]
        })
        .collect();
    let mut result = full;
    for (&v, &o) in reruns.iter().zip(&outcomes) {
        result[v] = o;
    }
    result
}
