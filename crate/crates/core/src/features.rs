//! Per-offender feature matrix assembly.
//!
//! One row per network node, combining neighborhood, component, group,
//! path, geographic and temporal features with the supervised label
//! (whether the offender has any violent offense in the dataset).
//!
//! With `mask_own_labels` on (the default), every row is computed as if
//! that offender's own violent offenses were unlabeled: their membership
//! in the violent set and in violent-crime label sets is dropped for their
//! own row, and their own violent records do not count toward the
//! geographic violence tallies. Only the label-dependent features can
//! differ under masking, so rows of offenders with no violent history are
//! identical either way. The label column itself is never masked.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::Write;

use rayon::prelude::*;

use crate::centrality::{
    betweenness_wrt, closeness_wrt, closeness_wrt_self_masked, shell_numbers_wrt, NodeSubset,
};
use crate::community::louvain;
use crate::diffusion::{propagate_to_fixpoint, reach_with_self_masked};
use crate::domain::{Dataset, OffenderHistory, OffenderId, VIOLENT_CATEGORIES};
use crate::error::{Error, Result};
use crate::graph::CoOffenderNetwork;

/// The default feature columns, in emission order.
pub const DEFAULT_COLUMNS: [&str; 32] = [
    "degree",
    "degree_violent",
    "frac_1hop_violent",
    "frac_2hop_violent",
    "maj_both_violent",
    "maj_2hop_only_violent",
    "component_size_removed",
    "largest_violent_component_removed",
    "group_size",
    "group_edges",
    "group_violent_members",
    "group_triangles",
    "group_transitivity",
    "group_external_nodes",
    "gang_external_nodes",
    "betweenness",
    "betweenness_violent",
    "closeness",
    "closeness_violent",
    "shell",
    "shell_violent",
    "propagation_k2",
    "propagation_k3",
    "propagation_k4",
    "propagation_k5",
    "propagation_k6",
    "district_frequency",
    "beat_frequency",
    "beat_violence",
    "district_violence",
    "avg_interval",
    "violent_groups",
];

/// A set of offense labels used to restrict centrality measures.
#[derive(Clone, Debug)]
pub enum LabelSet {
    /// No restriction: every node belongs.
    Unrestricted,
    /// Offenders with at least one violent offense.
    Violent,
    /// Offenders with at least one offense carrying one of these codes.
    Codes(Vec<String>),
}

impl LabelSet {
    /// Resolve to the node subset of the given network.
    pub fn resolve(&self, dataset: &Dataset, g: &CoOffenderNetwork) -> NodeSubset {
        let n = g.node_count();
        match self {
            LabelSet::Unrestricted => NodeSubset::all("all", n),
            LabelSet::Violent => {
                let mask = (0..n)
                    .map(|v| dataset.history(g.id(v)).is_some_and(|h| h.has_violent()))
                    .collect();
                NodeSubset::new("violent", mask)
            }
            LabelSet::Codes(codes) => {
                let set: BTreeSet<String> = codes.iter().cloned().collect();
                let mask = (0..n)
                    .map(|v| dataset.history(g.id(v)).is_some_and(|h| h.committed_any(&set)))
                    .collect();
                NodeSubset::new(codes.join("+"), mask)
            }
        }
    }
}

/// Settings for [`assemble`].
#[derive(Clone, Debug)]
pub struct FeatureConfig {
    /// Compute each row as if that offender's own violent labels were
    /// unknown.
    pub mask_own_labels: bool,
    /// Seed for the group partition search inside each gang.
    pub seed: u64,
    /// Append betweenness/closeness/shell columns restricted to each of the
    /// five violent offense categories.
    pub per_crime: bool,
    /// Emit exactly these columns in this order instead of the default set.
    pub columns: Option<Vec<String>>,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        FeatureConfig { mask_own_labels: true, seed: 0, per_crime: false, columns: None }
    }
}

/// The assembled matrix: `rows[i]` belongs to `ids[i]` and holds one value
/// per entry of `columns`; `labels[i]` is the supervised target.
#[derive(Clone, Debug)]
pub struct FeatureMatrix {
    pub ids: Vec<OffenderId>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub labels: Vec<bool>,
}

impl FeatureMatrix {
    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// CSV with header `offender_id,<columns...>,label`; fractional values
    /// carry 12 significant digits.
    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        write!(w, "offender_id")?;
        for c in &self.columns {
            write!(w, ",{c}")?;
        }
        writeln!(w, ",label")?;
        for (i, id) in self.ids.iter().enumerate() {
            write!(w, "{}", id.as_str())?;
            for x in &self.rows[i] {
                write!(w, ",{}", fmt_value(*x))?;
            }
            writeln!(w, ",{}", u8::from(self.labels[i]))?;
        }
        Ok(())
    }
}

/// Formats a value with 12 significant digits, trimming trailing zeros;
/// whole numbers print without a decimal point.
pub fn fmt_value(x: f64) -> String {
    if x == x.trunc() && x.abs() < 1e12 {
        return format!("{}", x as i64);
    }
    let decimals = 11 - x.abs().log10().floor() as i64;
    let s = format!("{:.*}", decimals.max(0) as usize, x);
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn per_crime_columns() -> Vec<String> {
    let mut out = Vec::new();
    for code in VIOLENT_CATEGORIES {
        out.push(format!("betweenness_{code}"));
        out.push(format!("closeness_{code}"));
        out.push(format!("shell_{code}"));
    }
    out
}

/// Computes the full feature matrix for every node of `g`.
pub fn assemble(
    dataset: &Dataset,
    g: &CoOffenderNetwork,
    config: &FeatureConfig,
) -> Result<FeatureMatrix> {
    let n = g.node_count();
    let extra = per_crime_columns();
    let selected: Vec<String> = match &config.columns {
        None => {
            let mut cols: Vec<String> = DEFAULT_COLUMNS.iter().map(|s| s.to_string()).collect();
            if config.per_crime {
                cols.extend(extra.iter().cloned());
            }
            cols
        }
        Some(req) => {
            for name in req {
                let known = DEFAULT_COLUMNS.contains(&name.as_str()) || extra.contains(name);
                if !known {
                    return Err(Error::config(format!("unknown feature column `{name}`")));
                }
            }
            let mut seen = BTreeSet::new();
            for name in req {
                if !seen.insert(name.clone()) {
                    return Err(Error::config(format!("feature column `{name}` listed twice")));
                }
            }
            req.clone()
        }
    };
    let want = |name: &str| selected.iter().any(|c| c == name);
    let want_any = |names: &[&str]| names.iter().any(|c| want(c));

    let hist: Vec<&OffenderHistory> = (0..n)
        .map(|v| {
            dataset
                .history(g.id(v))
                .ok_or_else(|| Error::compute(format!("node {} missing from dataset", g.id(v))))
        })
        .collect::<Result<_>>()?;
    let violent: Vec<bool> = hist.iter().map(|h| h.has_violent()).collect();
    let masked = config.mask_own_labels;

    let mut cols: HashMap<String, Vec<f64>> = HashMap::new();
    let put = |cols: &mut HashMap<String, Vec<f64>>, name: &str, vals: Vec<f64>| {
        cols.insert(name.to_string(), vals);
    };

    if want_any(&[
        "degree",
        "degree_violent",
        "frac_1hop_violent",
        "frac_2hop_violent",
        "maj_both_violent",
        "maj_2hop_only_violent",
    ]) {
        let per: Vec<[f64; 6]> = (0..n)
            .into_par_iter()
            .map(|v| neighborhood_row(g, v, &violent))
            .collect();
        for (k, name) in [
            "degree",
            "degree_violent",
            "frac_1hop_violent",
            "frac_2hop_violent",
            "maj_both_violent",
            "maj_2hop_only_violent",
        ]
        .iter()
        .enumerate()
        {
            put(&mut cols, name, per.iter().map(|row| row[k]).collect());
        }
    }

    if want_any(&["component_size_removed", "largest_violent_component_removed"]) {
        let comps = g.connected_components();
        let per: Vec<[f64; 2]> = (0..n)
            .into_par_iter()
            .map(|v| removal_row(g, v, &comps, &violent))
            .collect();
        put(&mut cols, "component_size_removed", per.iter().map(|r| r[0]).collect());
        put(&mut cols, "largest_violent_component_removed", per.iter().map(|r| r[1]).collect());
    }

    if want_any(&[
        "group_size",
        "group_edges",
        "group_violent_members",
        "group_triangles",
        "group_transitivity",
        "group_external_nodes",
        "gang_external_nodes",
    ]) {
        let per = group_rows(g, &hist, &violent, config.seed)?;
        for (k, name) in [
            "group_size",
            "group_edges",
            "group_violent_members",
            "group_triangles",
            "group_transitivity",
            "group_external_nodes",
            "gang_external_nodes",
        ]
        .iter()
        .enumerate()
        {
            let vals: Vec<f64> = per
                .iter()
                .enumerate()
                .map(|(v, row)| {
                    // masking removes v itself from the violent-member tally
                    // (row[0] is the group size: zero means gangless)
                    if *name == "group_violent_members" && masked && violent[v] && row[0] > 0.0 {
                        row[2] - 1.0
                    } else {
                        row[k]
                    }
                })
                .collect();
            put(&mut cols, name, vals);
        }
    }

    let everyone = NodeSubset::all("all", n);
    let violent_subset = NodeSubset::new("violent", violent.clone());
    if want("betweenness") {
        put(&mut cols, "betweenness", betweenness_wrt(g, &everyone).values);
    }
    if want("betweenness_violent") {
        put(&mut cols, "betweenness_violent", betweenness_wrt(g, &violent_subset).values);
    }
    if want("closeness") {
        put(&mut cols, "closeness", closeness_wrt(g, &everyone).values);
    }
    if want("closeness_violent") {
        let scores = if masked {
            closeness_wrt_self_masked(g, &violent_subset)
        } else {
            closeness_wrt(g, &violent_subset)
        };
        put(&mut cols, "closeness_violent", scores.values);
    }
    if want("shell") {
        put(&mut cols, "shell", shell_numbers_wrt(g, &everyone).values);
    }
    if want("shell_violent") {
        put(&mut cols, "shell_violent", shell_numbers_wrt(g, &violent_subset).values);
    }
    for k in 2..=6u32 {
        let name = format!("propagation_k{k}");
        if want(&name) {
            let reach = if masked {
                reach_with_self_masked(g.adjacency(), &violent, k as usize)
            } else {
                propagate_to_fixpoint(g.adjacency(), &violent, k as usize).0
            };
            let vals = reach.iter().map(|&b| f64::from(u8::from(b))).collect();
            put(&mut cols, &name, vals);
        }
    }

    if want_any(&["district_frequency", "beat_frequency", "beat_violence", "district_violence"]) {
        let per = geographic_rows(dataset, g, &hist, masked);
        for (k, name) in
            ["district_frequency", "beat_frequency", "beat_violence", "district_violence"]
                .iter()
                .enumerate()
        {
            put(&mut cols, name, per.iter().map(|r| r[k]).collect());
        }
    }

    if want_any(&["avg_interval", "violent_groups"]) {
        let per = temporal_rows(dataset, &hist);
        put(&mut cols, "avg_interval", per.iter().map(|r| r[0]).collect());
        put(&mut cols, "violent_groups", per.iter().map(|r| r[1]).collect());
    }

    for code in VIOLENT_CATEGORIES {
        let b_name = format!("betweenness_{code}");
        let c_name = format!("closeness_{code}");
        let s_name = format!("shell_{code}");
        if !(want(&b_name) || want(&c_name) || want(&s_name)) {
            continue;
        }
        let subset = LabelSet::Codes(vec![code.to_string()]).resolve(dataset, g);
        if want(&b_name) {
            put(&mut cols, &b_name, betweenness_wrt(g, &subset).values);
        }
        if want(&c_name) {
            let scores = if masked {
                closeness_wrt_self_masked(g, &subset)
            } else {
                closeness_wrt(g, &subset)
            };
            put(&mut cols, &c_name, scores.values);
        }
        if want(&s_name) {
            put(&mut cols, &s_name, shell_numbers_wrt(g, &subset).values);
        }
    }

    let mut rows = vec![Vec::with_capacity(selected.len()); n];
    for name in &selected {
        let vals = &cols[name.as_str()];
        for (v, row) in rows.iter_mut().enumerate() {
            row.push(vals[v]);
        }
    }
    Ok(FeatureMatrix { ids: g.ids().to_vec(), columns: selected, rows, labels: violent })
}

fn neighborhood_row(g: &CoOffenderNetwork, v: usize, violent: &[bool]) -> [f64; 6] {
    let n1 = g.neighbors(v);
    let n2 = g.hop_neighborhood(v, 2);
    let deg = n1.len();
    let deg_v = n1.iter().filter(|&&u| violent[u]).count();
    let n2_v = n2.iter().filter(|&&u| violent[u]).count();
    let frac1 = if deg == 0 { 0.0 } else { deg_v as f64 / deg as f64 };
    let frac2 = if n2.is_empty() { 0.0 } else { n2_v as f64 / n2.len() as f64 };
    // majority pools: nodes within distance 1, and within distance 2;
    // the threshold is inclusive and an empty pool never carries a majority
    let maj1 = deg > 0 && 2 * deg_v >= deg;
    let pool2 = deg + n2.len();
    let maj2 = pool2 > 0 && 2 * (deg_v + n2_v) >= pool2;
    [
        deg as f64,
        deg_v as f64,
        frac1,
        frac2,
        f64::from(u8::from(maj1 && maj2)),
        f64::from(u8::from(!maj1 && maj2)),
    ]
}

/// Largest piece of v's component once v is deleted, and the largest such
/// piece still containing a violent node.
fn removal_row(
    g: &CoOffenderNetwork,
    v: usize,
    comps: &crate::community::Partition,
    violent: &[bool],
) -> [f64; 2] {
    let members = comps.block_members(comps.block_of(v));
    let mut visited: std::collections::HashSet<usize> =
        std::collections::HashSet::with_capacity(members.len());
    visited.insert(v);
    let mut best = 0usize;
    let mut best_violent = 0usize;
    for &start in members {
        if visited.contains(&start) {
            continue;
        }
        let mut size = 0usize;
        let mut has_violent = false;
        let mut stack = vec![start];
        visited.insert(start);
        while let Some(u) = stack.pop() {
            size += 1;
            has_violent |= violent[u];
            for &w in g.neighbors(u) {
                if w != v && visited.insert(w) {
                    stack.push(w);
                }
            }
        }
        best = best.max(size);
        if has_violent {
            best_violent = best_violent.max(size);
        }
    }
    [best as f64, best_violent as f64]
}

/// Per-node group features: size, intra-group edges, violent members (raw,
/// unmasked), triangles, transitivity, group boundary nodes, gang boundary
/// nodes. Gangless nodes get all zeros.
fn group_rows(
    g: &CoOffenderNetwork,
    hist: &[&OffenderHistory],
    violent: &[bool],
    seed: u64,
) -> Result<Vec<[f64; 7]>> {
    let n = g.node_count();
    let mut gangs: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for v in 0..n {
        if let Some(name) = hist[v].gang() {
            gangs.entry(name).or_default().push(v);
        }
    }
    let mut out = vec![[0.0; 7]; n];
    for members in gangs.values() {
        let mut local = HashMap::with_capacity(members.len());
        for (li, &v) in members.iter().enumerate() {
            local.insert(v, li);
        }
        let adj: Vec<Vec<usize>> = members
            .iter()
            .map(|&v| {
                g.neighbors(v).iter().filter_map(|w| local.get(w).copied()).collect::<Vec<_>>()
            })
            .collect();
        let edge_total: usize = adj.iter().map(Vec::len).sum::<usize>() / 2;
        let partition = if edge_total == 0 {
            crate::community::Partition::singletons(members.len())
        } else {
            louvain(&adj, seed)?.0
        };
        let gang_external = members
            .iter()
            .filter(|&&v| g.neighbors(v).iter().any(|w| !local.contains_key(w)))
            .count() as f64;
        for block in partition.blocks() {
            let inside: BTreeSet<usize> = block.iter().copied().collect();
            let degrees: Vec<usize> = block
                .iter()
                .map(|&u| adj[u].iter().filter(|w| inside.contains(w)).count())
                .collect();
            let edges = degrees.iter().sum::<usize>() / 2;
            let vio = block.iter().filter(|&&u| violent[members[u]]).count();
            let mut triangles = 0usize;
            for &u in &inside {
                let higher: Vec<usize> =
                    adj[u].iter().copied().filter(|&w| w > u && inside.contains(&w)).collect();
                for (i, &a) in higher.iter().enumerate() {
                    for &b in &higher[i + 1..] {
                        if adj[a].contains(&b) {
                            triangles += 1;
                        }
                    }
                }
            }
            let triples: usize = degrees.iter().map(|&d| d * d.saturating_sub(1) / 2).sum();
            let transitivity =
                if triples == 0 { 0.0 } else { 3.0 * triangles as f64 / triples as f64 };
            let external = block
                .iter()
                .filter(|&&u| {
                    let v = members[u];
                    g.neighbors(v)
                        .iter()
                        .any(|w| local.get(w).map_or(true, |lw| !inside.contains(lw)))
                })
                .count() as f64;
            for &u in block {
                out[members[u]] = [
                    block.len() as f64,
                    edges as f64,
                    vio as f64,
                    triangles as f64,
                    transitivity,
                    external,
                    gang_external,
                ];
            }
        }
    }
    Ok(out)
}

fn geographic_rows(
    dataset: &Dataset,
    g: &CoOffenderNetwork,
    hist: &[&OffenderHistory],
    masked: bool,
) -> Vec<[f64; 4]> {
    let mut district: HashMap<&str, (u64, u64)> = HashMap::new();
    let mut beat: HashMap<&str, (u64, u64)> = HashMap::new();
    for r in dataset.records() {
        let d = district.entry(r.district.as_str()).or_default();
        d.0 += 1;
        d.1 += u64::from(r.is_violent());
        let b = beat.entry(r.beat.as_str()).or_default();
        b.0 += 1;
        b.1 += u64::from(r.is_violent());
    }
    (0..g.node_count())
        .into_par_iter()
        .map(|v| {
            let mut my_districts = BTreeSet::new();
            let mut my_beats = BTreeSet::new();
            for &(_, idx) in hist[v].arrests() {
                let r = dataset.record(idx);
                my_districts.insert(r.district.as_str());
                my_beats.insert(r.beat.as_str());
            }
            let mut d_freq = 0u64;
            let mut d_vio = 0u64;
            for d in &my_districts {
                let (c, vc) = district[d];
                d_freq += c;
                d_vio += vc;
            }
            let mut b_freq = 0u64;
            let mut b_vio = 0u64;
            for b in &my_beats {
                let (c, vc) = beat[b];
                b_freq += c;
                b_vio += vc;
            }
            // each of this offender's own violent records sits in their own
            // district and beat history, so masking subtracts them whole
            let own = if masked { hist[v].violent().len() as u64 } else { 0 };
            [d_freq as f64, b_freq as f64, (b_vio - own) as f64, (d_vio - own) as f64]
        })
        .collect()
}

fn temporal_rows(dataset: &Dataset, hist: &[&OffenderHistory]) -> Vec<[f64; 2]> {
    let events: HashMap<&str, &[usize]> = dataset.events().collect();
    hist.par_iter()
        .map(|h| {
            let dates: Vec<_> = h.arrest_dates().collect();
            let gaps: i64 = dates.windows(2).map(|w| (w[1] - w[0]).num_days()).sum();
            let avg = if dates.is_empty() { 0.0 } else { gaps as f64 / dates.len() as f64 };
            let mut vg = 0u64;
            for &(_, idx) in h.arrests() {
                let event_id = dataset.record(idx).arrest_id.as_str();
                let hot = events[event_id]
                    .iter()
                    .any(|&other| other != idx && dataset.record(other).is_violent());
                vg += u64::from(hot);
            }
            [avg, vg as f64]
        })
        .collect()
}
