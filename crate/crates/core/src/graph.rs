//! Co-offender network: an undirected simple graph over offenders, with an
//! edge wherever two offenders share at least one arrest event.
//!
//! Each arrest event contributes a clique over its participants; repeat
//! co-arrests collapse to one edge; offenders never co-arrested (solo-only)
//! do not appear as nodes. Nodes are handled as dense indices assigned in
//! ascending offender-id order, so all iteration is deterministic.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::io::Write;

use chrono::NaiveDate;

use crate::community::Partition;
use crate::domain::{Dataset, OffenderId};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct CoOffenderNetwork {
    ids: Vec<OffenderId>,
    index: HashMap<OffenderId, usize>,
    adj: Vec<Vec<usize>>,
    edge_count: usize,
}

/// BFS result from one source: hop distance and shortest-path counts.
#[derive(Clone, Debug)]
pub struct PathCounts {
    /// `None` for unreachable nodes.
    pub dist: Vec<Option<u32>>,
    /// Number of distinct shortest paths from the source; 0 iff unreachable.
    pub sigma: Vec<u64>,
}

/// Induced subgraph with local adjacency and a mapping back to parent
/// indices.
#[derive(Clone, Debug)]
pub struct Subgraph {
    /// Parent node index per local node, ascending.
    pub nodes: Vec<usize>,
    /// Local adjacency, neighbor lists sorted.
    pub adj: Vec<Vec<usize>>,
}

impl Subgraph {
    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|n| n.len()).sum::<usize>() / 2
    }
}

impl CoOffenderNetwork {
    /// Build the network from a dataset, optionally restricted to records
    /// dated within `window` (inclusive on both ends).
    pub fn build(dataset: &Dataset, window: Option<(NaiveDate, NaiveDate)>) -> Self {
        let mut events: BTreeMap<&str, Vec<&OffenderId>> = BTreeMap::new();
        for r in dataset.records() {
            if let Some((from, to)) = window {
                if r.date < from || r.date > to {
                    continue;
                }
            }
            events.entry(r.arrest_id.as_str()).or_default().push(&r.offender_id);
        }
        let mut edges: BTreeSet<(&OffenderId, &OffenderId)> = BTreeSet::new();
        for members in events.values() {
            let mut m: Vec<&OffenderId> = members.clone();
            m.sort();
            m.dedup();
            for i in 0..m.len() {
                for j in i + 1..m.len() {
                    edges.insert((m[i], m[j]));
                }
            }
        }
        Self::from_edges(edges.into_iter())
    }

    /// Build directly from an edge iterator; used by `build` and by the
    /// synthetic generator. Self-loops are ignored, duplicates collapse.
    pub fn from_edges<'a>(pairs: impl Iterator<Item = (&'a OffenderId, &'a OffenderId)>) -> Self {
        let mut edges: BTreeSet<(&OffenderId, &OffenderId)> = BTreeSet::new();
        for (a, b) in pairs {
            if a == b {
                continue;
            }
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            edges.insert((lo, hi));
        }
        let mut ids: Vec<&OffenderId> = edges
            .iter()
            .flat_map(|(a, b)| [*a, *b])
            .collect();
        ids.sort();
        ids.dedup();
        let index: HashMap<OffenderId, usize> = ids
            .iter()
            .enumerate()
            .map(|(i, id)| ((*id).clone(), i))
            .collect();
        let mut adj = vec![Vec::new(); ids.len()];
        for (a, b) in &edges {
            let (ia, ib) = (index[*a], index[*b]);
            adj[ia].push(ib);
            adj[ib].push(ia);
        }
        for n in &mut adj {
            n.sort_unstable();
        }
        CoOffenderNetwork {
            ids: ids.into_iter().cloned().collect(),
            edge_count: edges.len(),
            index,
            adj,
        }
    }

    pub fn node_count(&self) -> usize {
        self.ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn mean_degree(&self) -> f64 {
        if self.ids.is_empty() {
            0.0
        } else {
            2.0 * self.edge_count as f64 / self.ids.len() as f64
        }
    }

    /// Node index for an offender, if they are in the network.
    pub fn node(&self, id: &OffenderId) -> Option<usize> {
        self.index.get(id).copied()
    }

    /// Like [`node`](Self::node) but an error naming the offender.
    pub fn require_node(&self, id: &OffenderId) -> Result<usize> {
        self.node(id).ok_or_else(|| Error::UnknownOffender(id.to_string()))
    }

    pub fn id(&self, node: usize) -> &OffenderId {
        &self.ids[node]
    }

    /// All node ids, ascending; index in this slice is the node index.
    pub fn ids(&self) -> &[OffenderId] {
        &self.ids
    }

    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.adj[node]
    }

    pub fn degree(&self, node: usize) -> usize {
        self.adj[node].len()
    }

    pub fn adjacency(&self) -> &[Vec<usize>] {
        &self.adj
    }

    /// Nodes at hop distance exactly `i` from `v`, ascending. `i = 0` is
    /// `[v]` itself.
    pub fn hop_neighborhood(&self, v: usize, i: u32) -> Vec<usize> {
        let mut out: Vec<usize> = Vec::new();
        let mut dist: Vec<Option<u32>> = vec![None; self.ids.len()];
        dist[v] = Some(0);
        let mut frontier = vec![v];
        let mut level = 0;
        while level < i && !frontier.is_empty() {
            let mut next = Vec::new();
            for &u in &frontier {
                for &w in &self.adj[u] {
                    if dist[w].is_none() {
                        dist[w] = Some(level + 1);
                        next.push(w);
                    }
                }
            }
            frontier = next;
            level += 1;
        }
        if i == 0 {
            return vec![v];
        }
        out.extend(frontier);
        out.sort_unstable();
        out
    }

    /// Union of hop neighborhoods 1..=i, ascending; never contains `v`.
    pub fn neighbors_within(&self, v: usize, i: u32) -> Vec<usize> {
        let mut dist: Vec<Option<u32>> = vec![None; self.ids.len()];
        dist[v] = Some(0);
        let mut q = VecDeque::from([v]);
        let mut out = Vec::new();
        while let Some(u) = q.pop_front() {
            let d = dist[u].unwrap();
            if d == i {
                continue;
            }
            for &w in &self.adj[u] {
                if dist[w].is_none() {
                    dist[w] = Some(d + 1);
                    out.push(w);
                    q.push_back(w);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Single-source BFS with shortest-path counting.
    pub fn bfs_counts(&self, source: usize) -> PathCounts {
        let n = self.ids.len();
        let mut dist: Vec<Option<u32>> = vec![None; n];
        let mut sigma = vec![0u64; n];
        dist[source] = Some(0);
        sigma[source] = 1;
        let mut q = VecDeque::from([source]);
        while let Some(u) = q.pop_front() {
            let du = dist[u].unwrap();
            for &w in &self.adj[u] {
                match dist[w] {
                    None => {
                        dist[w] = Some(du + 1);
                        sigma[w] = sigma[u];
                        q.push_back(w);
                    }
                    Some(dw) if dw == du + 1 => {
                        sigma[w] = sigma[w].saturating_add(sigma[u]);
                    }
                    _ => {}
                }
            }
        }
        PathCounts { dist, sigma }
    }

    /// Connected components as a partition, blocks ordered by their smallest
    /// member.
    pub fn connected_components(&self) -> Partition {
        let n = self.ids.len();
        let mut assignment = vec![usize::MAX; n];
        let mut next = 0;
        for s in 0..n {
            if assignment[s] != usize::MAX {
                continue;
            }
            assignment[s] = next;
            let mut q = VecDeque::from([s]);
            while let Some(u) = q.pop_front() {
                for &w in &self.adj[u] {
                    if assignment[w] == usize::MAX {
                        assignment[w] = next;
                        q.push_back(w);
                    }
                }
            }
            next += 1;
        }
        Partition::from_assignment(assignment)
    }

    /// Induced subgraph on the nodes where `keep` is true.
    pub fn induced(&self, keep: &[bool]) -> Subgraph {
        debug_assert_eq!(keep.len(), self.ids.len());
        let nodes: Vec<usize> = (0..self.ids.len()).filter(|&v| keep[v]).collect();
        let mut local = vec![usize::MAX; self.ids.len()];
        for (li, &v) in nodes.iter().enumerate() {
            local[v] = li;
        }
        let adj = nodes
            .iter()
            .map(|&v| {
                self.adj[v]
                    .iter()
                    .filter(|&&w| keep[w])
                    .map(|&w| local[w])
                    .collect()
            })
            .collect();
        Subgraph { nodes, adj }
    }

    /// Edge list as `u,v` lines, endpoints ascending within each line and
    /// lines in ascending lexicographic order.
    pub fn write_edge_list(&self, mut w: impl Write) -> Result<()> {
        let mut lines: Vec<(&str, &str)> = Vec::with_capacity(self.edge_count);
        for v in 0..self.ids.len() {
            for &u in &self.adj[v] {
                if v < u {
                    let (a, b) = (self.ids[v].as_str(), self.ids[u].as_str());
                    lines.push(if a < b { (a, b) } else { (b, a) });
                }
            }
        }
        lines.sort();
        for (a, b) in lines {
            writeln!(w, "{a},{b}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{ArrestRecord, CrimeCode};

    fn rec(arrest: &str, off: &str, date: &str) -> ArrestRecord {
        ArrestRecord {
            arrest_id: arrest.to_string(),
            offender_id: OffenderId::new(off),
            date: NaiveDate::parse_from_str(date, "%Y-%m-%d").unwrap(),
            crime: Some(CrimeCode { code: "theft".into(), violent: false }),
            district: "D1".into(),
            beat: "B11".into(),
            gang: None,
            homicide_victim: false,
        }
    }

    fn net(rows: Vec<ArrestRecord>) -> CoOffenderNetwork {
        CoOffenderNetwork::build(&Dataset::from_records(rows).unwrap(), None)
    }

    #[test]
    fn one_event_becomes_a_clique() {
        let g = net(vec![
            rec("E1", "a", "2012-01-01"),
            rec("E1", "b", "2012-01-02"),
            rec("E1", "c", "2012-01-03"),
        ]);
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 3);
        for v in 0..3 {
            assert_eq!(g.degree(v), 2);
        }
    }

    #[test]
    fn repeat_co_arrests_collapse_to_one_edge() {
        let g = net(vec![
            rec("E1", "a", "2012-01-01"),
            rec("E1", "b", "2012-01-02"),
            rec("E2", "a", "2012-02-01"),
            rec("E2", "b", "2012-02-02"),
        ]);
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn solo_offenders_are_not_nodes() {
        let g = net(vec![
            rec("E1", "a", "2012-01-01"),
            rec("E1", "b", "2012-01-02"),
            rec("E2", "loner", "2012-02-01"),
        ]);
        assert_eq!(g.node_count(), 2);
        assert!(g.node(&OffenderId::new("loner")).is_none());
    }

    #[test]
    fn nodes_are_indexed_in_ascending_id_order() {
        let g = net(vec![
            rec("E1", "zz", "2012-01-01"),
            rec("E1", "aa", "2012-01-02"),
            rec("E2", "mm", "2012-02-01"),
            rec("E2", "aa", "2012-02-02"),
        ]);
        let names: Vec<&str> = g.ids().iter().map(|i| i.as_str()).collect();
        assert_eq!(names, vec!["aa", "mm", "zz"]);
    }

    #[test]
    fn record_order_does_not_change_the_graph() {
        let rows = vec![
            rec("E1", "a", "2012-01-01"),
            rec("E1", "b", "2012-01-02"),
            rec("E2", "b", "2012-02-01"),
            rec("E2", "c", "2012-02-02"),
        ];
        let mut rev = rows.clone();
        rev.reverse();
        let g1 = net(rows);
        let g2 = net(rev);
        assert_eq!(g1.ids(), g2.ids());
        assert_eq!(g1.adjacency(), g2.adjacency());
    }

    #[test]
    fn window_limits_which_records_contribute() {
        let rows = vec![
            rec("E1", "a", "2012-01-01"),
            rec("E1", "b", "2012-01-02"),
            rec("E2", "b", "2012-06-01"),
            rec("E2", "c", "2012-06-02"),
        ];
        let d = Dataset::from_records(rows).unwrap();
        let from = NaiveDate::from_ymd_opt(2012, 5, 1).unwrap();
        let to = NaiveDate::from_ymd_opt(2012, 12, 31).unwrap();
        let g = CoOffenderNetwork::build(&d, Some((from, to)));
        assert_eq!(g.node_count(), 2);
        assert!(g.node(&OffenderId::new("a")).is_none());
    }

    #[test]
    fn bfs_counts_two_shortest_paths_through_a_diamond() {
        // a-b, a-c, b-d, c-d: two shortest a..d paths
        let g = net(vec![
            rec("E1", "a", "2012-01-01"),
            rec("E1", "b", "2012-01-02"),
            rec("E2", "a", "2012-02-01"),
            rec("E2", "c", "2012-02-02"),
            rec("E3", "b", "2012-03-01"),
            rec("E3", "d", "2012-03-02"),
            rec("E4", "c", "2012-04-01"),
            rec("E4", "d", "2012-04-02"),
        ]);
        let a = g.node(&OffenderId::new("a")).unwrap();
        let d = g.node(&OffenderId::new("d")).unwrap();
        let pc = g.bfs_counts(a);
        assert_eq!(pc.dist[d], Some(2));
        assert_eq!(pc.sigma[d], 2);
        assert_eq!(pc.sigma[a], 1);
    }

    #[test]
    fn unreachable_nodes_have_no_distance_and_zero_sigma() {
        let g = net(vec![
            rec("E1", "a", "2012-01-01"),
            rec("E1", "b", "2012-01-02"),
            rec("E2", "x", "2012-02-01"),
            rec("E2", "y", "2012-02-02"),
        ]);
        let a = g.node(&OffenderId::new("a")).unwrap();
        let x = g.node(&OffenderId::new("x")).unwrap();
        let pc = g.bfs_counts(a);
        assert_eq!(pc.dist[x], None);
        assert_eq!(pc.sigma[x], 0);
    }

    #[test]
    fn hop_neighborhoods_partition_the_component() {
        // path a-b-c-d plus separate pair x-y
        let g = net(vec![
            rec("E1", "a", "2012-01-01"),
            rec("E1", "b", "2012-01-02"),
            rec("E2", "b", "2012-02-01"),
            rec("E2", "c", "2012-02-02"),
            rec("E3", "c", "2012-03-01"),
            rec("E3", "d", "2012-03-02"),
            rec("E4", "x", "2012-04-01"),
            rec("E4", "y", "2012-04-02"),
        ]);
        let a = g.node(&OffenderId::new("a")).unwrap();
        let comp = g.connected_components();
        let comp_size = comp.block_members(comp.block_of(a)).len();
        let total: usize = (0..10).map(|i| g.hop_neighborhood(a, i).len()).sum();
        assert_eq!(total, comp_size);
        assert_eq!(g.hop_neighborhood(a, 0), vec![a]);
        assert_eq!(g.hop_neighborhood(a, 2).len(), 1);
        assert_eq!(g.neighbors_within(a, 2).len(), 2);
    }

    #[test]
    fn induced_subgraph_keeps_only_internal_edges() {
        let g = net(vec![
            rec("E1", "a", "2012-01-01"),
            rec("E1", "b", "2012-01-02"),
            rec("E1", "c", "2012-01-03"),
            rec("E2", "c", "2012-02-01"),
            rec("E2", "d", "2012-02-02"),
        ]);
        let keep: Vec<bool> = g
            .ids()
            .iter()
            .map(|id| id.as_str() != "d")
            .collect();
        let sub = g.induced(&keep);
        assert_eq!(sub.nodes.len(), 3);
        assert_eq!(sub.edge_count(), 3);
    }

    #[test]
    fn edge_list_is_sorted_and_ascending_within_lines() {
        let g = net(vec![
            rec("E1", "zz", "2012-01-01"),
            rec("E1", "aa", "2012-01-02"),
            rec("E2", "aa", "2012-02-01"),
            rec("E2", "mm", "2012-02-02"),
        ]);
        let mut buf = Vec::new();
        g.write_edge_list(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "aa,mm\naa,zz\n");
    }
}
