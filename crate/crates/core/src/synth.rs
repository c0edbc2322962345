//! Calibrated synthetic arrest-record generator.
//!
//! The generator grows a city's worth of arrest history with the broad
//! statistical shape of real co-offending data: a right-skewed activity
//! distribution, gangs with home turf, small co-arrest groups that give
//! the network a heavy-tailed degree distribution, summer-peaked
//! seasonality, and violence that concentrates near other violence in the
//! network. Everything is driven by one seed, so a config produces the
//! same records byte for byte on every run.

use std::collections::{BTreeMap, HashSet};

use chrono::{Datelike, NaiveDate};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::domain::{ArrestRecord, CrimeCode, Dataset, OffenderId};
use crate::error::{Error, Result};
use crate::graph::CoOffenderNetwork;

/// Relative frequencies of the violent offense categories.
const VIOLENT_MIX: [(&str, f64); 5] = [
    ("robbery", 0.411),
    ("aggravated_assault", 0.303),
    ("aggravated_battery", 0.188),
    ("homicide", 0.066),
    ("criminal_sexual_assault", 0.032),
];

/// Relative frequencies of the non-violent offense pool.
const NONVIOLENT_MIX: [(&str, f64); 8] = [
    ("narcotics", 0.30),
    ("theft", 0.22),
    ("burglary", 0.12),
    ("criminal_trespass", 0.08),
    ("weapons", 0.08),
    ("fraud", 0.07),
    ("dui", 0.07),
    ("vandalism", 0.06),
];

/// Co-arrest group sizes and their probabilities.
const EVENT_SIZES: [(usize, f64); 4] = [(2, 0.62), (3, 0.25), (4, 0.09), (5, 0.04)];

const DISTRICTS: usize = 22;
const BEATS_PER_DISTRICT: usize = 4;
/// Fraction of offenders with no gang affiliation.
const GANGLESS_RATE: f64 = 0.25;
/// Chance that a gang member's co-arrest stays inside the gang.
const HOMOPHILY: f64 = 0.7;
/// Chance a gang event happens on the gang's home beat rather than
/// elsewhere in its home district.
const HOME_BEAT_RATE: f64 = 0.6;
/// Expected solo arrests per month for an offender of average activity.
const SOLO_RATE: f64 = 0.04;
/// Spread of the lognormal activity distribution.
const ACTIVITY_SIGMA: f64 = 0.8;
/// Fraction of offenders flagged as homicide victims.
const VICTIM_RATE: f64 = 0.01;

#[derive(Clone, Debug, Serialize)]
pub struct GeneratorConfig {
    pub offenders: usize,
    pub months: u32,
    /// First month of the simulated window.
    pub start: NaiveDate,
    pub gangs: usize,
    /// Co-arrest events are generated until the network's mean degree
    /// reaches this.
    pub target_mean_degree: f64,
    /// Expected fraction of offense records that are violent.
    pub violent_record_fraction: f64,
    /// How strongly violence concentrates near the seeded violent
    /// offenders; 0 spreads it uniformly.
    pub contagion_strength: f64,
    /// Relative amplitude of the summer-peaked arrest seasonality.
    pub seasonality_amplitude: f64,
    pub seed: u64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            offenders: 2000,
            months: 36,
            start: NaiveDate::from_ymd_opt(2011, 8, 1).unwrap(),
            gangs: 30,
            target_mean_degree: 3.66,
            violent_record_fraction: 0.069,
            contagion_strength: 3.0,
            seasonality_amplitude: 0.4,
            seed: 7,
        }
    }
}

impl GeneratorConfig {
    fn check(&self) -> Result<()> {
        if self.offenders < 10 {
            return Err(Error::config("need at least 10 offenders"));
        }
        if self.months == 0 {
            return Err(Error::config("need at least one month"));
        }
        if self.gangs == 0 {
            return Err(Error::config("need at least one gang"));
        }
        if self.target_mean_degree <= 0.0 {
            return Err(Error::config("target mean degree must be positive"));
        }
        if self.target_mean_degree > (self.offenders - 1) as f64 {
            return Err(Error::config(format!(
                "target mean degree {} is impossible with {} offenders",
                self.target_mean_degree, self.offenders
            )));
        }
        if !(0.0..1.0).contains(&self.violent_record_fraction) {
            return Err(Error::config("violent record fraction must be in [0, 1)"));
        }
        if !(0.0..=100.0).contains(&self.contagion_strength) {
            return Err(Error::config("contagion strength must be in [0, 100]"));
        }
        if !(0.0..=1.0).contains(&self.seasonality_amplitude) {
            return Err(Error::config("seasonality amplitude must be in [0, 1]"));
        }
        Ok(())
    }
}

/// Summary statistics of a dataset and its co-offender network, for
/// checking a generated (or real) file against expectations.
#[derive(Clone, Debug, Serialize)]
pub struct NetworkStats {
    pub offenders: usize,
    pub records: usize,
    pub events: usize,
    pub nodes: usize,
    pub edges: usize,
    pub mean_degree: f64,
    pub avg_clustering: f64,
    pub transitivity: f64,
    pub components: usize,
    pub largest_component: usize,
    /// Fit quality of a log-log line through the degree histogram.
    pub degree_fit_r2: f64,
    /// Events per calendar month, January first, summed across years.
    pub monthly_events: Vec<u64>,
    pub violent_record_fraction: f64,
    pub victims: usize,
}

struct EventDraft {
    date: NaiveDate,
    district: String,
    beat: String,
    participants: Vec<usize>,
}

fn weighted_index(cum: &[f64], rng: &mut ChaCha8Rng) -> usize {
    let total = *cum.last().expect("nonempty weights");
    let x = rng.gen::<f64>() * total;
    cum.partition_point(|&c| c <= x).min(cum.len() - 1)
}

fn cumulative(weights: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut acc = 0.0;
    weights
        .map(|w| {
            acc += w;
            acc
        })
        .collect()
}

fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.gen::<f64>().max(1e-12);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

fn poisson(lambda: f64, rng: &mut ChaCha8Rng) -> usize {
    let l = (-lambda.min(30.0)).exp();
    let mut k = 0;
    let mut p = 1.0;
    loop {
        p *= rng.gen::<f64>();
        if p < l {
            return k;
        }
        k += 1;
    }
}

fn first_of_month(d: NaiveDate) -> NaiveDate {
    NaiveDate::from_ymd_opt(d.year(), d.month(), 1).unwrap()
}

fn add_months(d: NaiveDate, m: u32) -> NaiveDate {
    let total = d.year() * 12 + d.month() as i32 - 1 + m as i32;
    NaiveDate::from_ymd_opt(total.div_euclid(12), (total.rem_euclid(12) + 1) as u32, 1).unwrap()
}

fn days_in_month(first: NaiveDate) -> u32 {
    (add_months(first, 1) - first).num_days() as u32
}

/// Generate arrest records for `config`. The result always passes dataset
/// validation; [`generate`] wraps it into a [`Dataset`] directly.
pub fn generate_records(config: &GeneratorConfig) -> Result<Vec<ArrestRecord>> {
    config.check()?;
    let n = config.offenders;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    // gang homes: a district in rotation plus one of its beats
    let beat_name = |d: usize, b: usize| format!("B{:02}{}", d + 1, b + 1);
    let gang_home: Vec<(usize, usize)> = (0..config.gangs)
        .map(|g| (g % DISTRICTS, rng.gen_range(0..BEATS_PER_DISTRICT)))
        .collect();

    // membership by preferential attachment so gang sizes are uneven
    let mut gang_of: Vec<Option<usize>> = Vec::with_capacity(n);
    let mut gang_size = vec![0usize; config.gangs];
    for _ in 0..n {
        if rng.gen_bool(GANGLESS_RATE) {
            gang_of.push(None);
        } else {
            let cum = cumulative(gang_size.iter().map(|&s| s as f64 + 1.0));
            let g = weighted_index(&cum, &mut rng);
            gang_size[g] += 1;
            gang_of.push(Some(g));
        }
    }
    let mut gang_members: Vec<Vec<usize>> = vec![Vec::new(); config.gangs];
    for (i, g) in gang_of.iter().enumerate() {
        if let Some(g) = *g {
            gang_members[g].push(i);
        }
    }

    // right-skewed individual arrest propensity
    let activity: Vec<f64> =
        (0..n).map(|_| (ACTIVITY_SIGMA * standard_normal(&mut rng)).exp()).collect();
    let global_cum = cumulative(activity.iter().copied());
    let gang_cum: Vec<Vec<f64>> = gang_members
        .iter()
        .map(|members| cumulative(members.iter().map(|&i| activity[i])))
        .collect();

    // summer-peaked month weights across the whole window
    let base = first_of_month(config.start);
    let month_firsts: Vec<NaiveDate> = (0..config.months).map(|m| add_months(base, m)).collect();
    let month_cum = cumulative(month_firsts.iter().map(|f| {
        let phase = (f.month() as f64 - 7.0) / 12.0 * std::f64::consts::TAU;
        1.0 + config.seasonality_amplitude * phase.cos()
    }));
    let size_cum = cumulative(EVENT_SIZES.iter().map(|&(_, w)| w));

    let draw_date = |rng: &mut ChaCha8Rng| {
        let first = month_firsts[weighted_index(&month_cum, rng)];
        let day = rng.gen_range(1..=days_in_month(first));
        NaiveDate::from_ymd_opt(first.year(), first.month(), day).unwrap()
    };

    let mut used_dates: Vec<HashSet<NaiveDate>> = vec![HashSet::new(); n];
    let mut edges: HashSet<(usize, usize)> = HashSet::new();
    let mut linked: HashSet<usize> = HashSet::new();
    let mut events: Vec<EventDraft> = Vec::new();

    // grow the co-arrest network until it is dense enough
    let max_events = 30 * n;
    let mut attempts = 0;
    loop {
        if !linked.is_empty()
            && 2.0 * edges.len() as f64 / linked.len() as f64 >= config.target_mean_degree
        {
            break;
        }
        attempts += 1;
        if attempts > max_events {
            return Err(Error::config(format!(
                "target mean degree {} was not reached after {} events; lower it or add offenders",
                config.target_mean_degree, max_events
            )));
        }

        let size = EVENT_SIZES[weighted_index(&size_cum, &mut rng)].0;
        let seed = weighted_index(&global_cum, &mut rng);
        let mut group = vec![seed];
        let in_gang = gang_of[seed]
            .filter(|&g| gang_members[g].len() >= size)
            .filter(|_| rng.gen_bool(HOMOPHILY));
        let mut tries = 0;
        while group.len() < size && tries < 200 {
            tries += 1;
            let cand = match in_gang {
                Some(g) => gang_members[g][weighted_index(&gang_cum[g], &mut rng)],
                None => weighted_index(&global_cum, &mut rng),
            };
            if !group.contains(&cand) {
                group.push(cand);
            }
        }
        if group.len() < size {
            continue;
        }

        let mut date = draw_date(&mut rng);
        let mut date_tries = 0;
        while group.iter().any(|&p| used_dates[p].contains(&date)) {
            date_tries += 1;
            if date_tries > 40 {
                break;
            }
            date = draw_date(&mut rng);
        }
        if group.iter().any(|&p| used_dates[p].contains(&date)) {
            continue;
        }

        let (district, beat) = match gang_of[seed] {
            Some(g) => {
                let (d, home_beat) = gang_home[g];
                let b = if rng.gen_bool(HOME_BEAT_RATE) {
                    home_beat
                } else {
                    rng.gen_range(0..BEATS_PER_DISTRICT)
                };
                (d, b)
            }
            None => (rng.gen_range(0..DISTRICTS), rng.gen_range(0..BEATS_PER_DISTRICT)),
        };

        for &p in &group {
            used_dates[p].insert(date);
            linked.insert(p);
        }
        for i in 0..group.len() {
            for j in i + 1..group.len() {
                let (a, b) = (group[i].min(group[j]), group[i].max(group[j]));
                edges.insert((a, b));
            }
        }
        events.push(EventDraft {
            date,
            district: format!("D{:02}", district + 1),
            beat: beat_name(district, beat),
            participants: group,
        });
    }

    // solo arrests keep some offenders outside the network entirely
    for i in 0..n {
        let count = poisson(SOLO_RATE * config.months as f64 * activity[i], &mut rng);
        for _ in 0..count.min(12) {
            let mut date = draw_date(&mut rng);
            let mut date_tries = 0;
            while used_dates[i].contains(&date) && date_tries < 40 {
                date = draw_date(&mut rng);
                date_tries += 1;
            }
            if used_dates[i].contains(&date) {
                continue;
            }
            used_dates[i].insert(date);
            let (district, beat) = match gang_of[i] {
                Some(g) => (gang_home[g].0, rng.gen_range(0..BEATS_PER_DISTRICT)),
                None => (rng.gen_range(0..DISTRICTS), rng.gen_range(0..BEATS_PER_DISTRICT)),
            };
            events.push(EventDraft {
                date,
                district: format!("D{:02}", district + 1),
                beat: beat_name(district, beat),
                participants: vec![i],
            });
        }
    }

    // proximity to the seeded offenders halves per network hop; it drives
    // both where violence erupts and who ends up a victim
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(a, b) in &edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut linked_sorted: Vec<usize> = linked.iter().copied().collect();
    linked_sorted.sort_unstable();
    let seed_count = (n / 200).max(3).min(linked_sorted.len().max(1));
    let mut hot_seeds = Vec::new();
    while hot_seeds.len() < seed_count && !linked_sorted.is_empty() {
        let pick = linked_sorted[rng.gen_range(0..linked_sorted.len())];
        if !hot_seeds.contains(&pick) {
            hot_seeds.push(pick);
        }
    }
    let mut dist: Vec<Option<u32>> = vec![None; n];
    let mut queue: std::collections::VecDeque<usize> = hot_seeds.iter().copied().collect();
    for &s in &hot_seeds {
        dist[s] = Some(0);
    }
    while let Some(u) = queue.pop_front() {
        let du = dist[u].unwrap();
        for &w in &adj[u] {
            if dist[w].is_none() {
                dist[w] = Some(du + 1);
                queue.push_back(w);
            }
        }
    }
    let proximity: Vec<f64> =
        dist.iter().map(|d| d.map_or(0.0, |d| 0.5f64.powi(d as i32))).collect();

    // violence lives on arrest events: an event turns violent with a
    // chance that rises exponentially with its participants' proximity to
    // the seeded offenders, and everyone arrested in it faces the same
    // charge. The base rate is solved so the expected violent record
    // fraction matches the configured target
    let total_records: usize = events.iter().map(|e| e.participants.len()).sum();
    let event_weight: Vec<f64> = events
        .iter()
        .map(|e| {
            let hottest = e
                .participants
                .iter()
                .map(|&p| proximity[p])
                .fold(0.0f64, f64::max);
            (config.contagion_strength * hottest).exp()
        })
        .collect();
    let weighted: f64 = events
        .iter()
        .zip(&event_weight)
        .map(|(e, w)| e.participants.len() as f64 * w)
        .sum();
    let scale = if weighted > 0.0 {
        config.violent_record_fraction * total_records as f64 / weighted
    } else {
        0.0
    };

    let violent_cum = cumulative(VIOLENT_MIX.iter().map(|&(_, w)| w));
    let nonviolent_cum = cumulative(NONVIOLENT_MIX.iter().map(|&(_, w)| w));
    let mut crimes: Vec<Vec<CrimeCode>> = Vec::with_capacity(events.len());
    for (e, &w) in events.iter().zip(&event_weight) {
        let q = (scale * w).min(0.95);
        let code = if rng.gen_bool(q) {
            let (name, _) = VIOLENT_MIX[weighted_index(&violent_cum, &mut rng)];
            CrimeCode { code: name.to_string(), violent: true }
        } else {
            let (name, _) = NONVIOLENT_MIX[weighted_index(&nonviolent_cum, &mut rng)];
            CrimeCode { code: name.to_string(), violent: false }
        };
        crimes.push(vec![code; e.participants.len()]);
    }

    // a small set of homicide victims, biased toward the violent parts of
    // the network
    let with_records: Vec<usize> =
        (0..n).filter(|&i| !used_dates[i].is_empty()).collect();
    let victim_weight: Vec<f64> =
        with_records.iter().map(|&i| 0.2 + proximity[i]).collect();
    let weight_sum: f64 = victim_weight.iter().sum();
    let victim_scale = if weight_sum > 0.0 {
        VICTIM_RATE * n as f64 / weight_sum
    } else {
        0.0
    };
    let mut victim = vec![false; n];
    for (&i, &w) in with_records.iter().zip(&victim_weight) {
        victim[i] = rng.gen_bool((victim_scale * w).min(0.9));
    }

    // stable date order, then ids in final order
    let mut order: Vec<usize> = (0..events.len()).collect();
    order.sort_by_key(|&i| (events[i].date, i));
    let mut records = Vec::with_capacity(total_records);
    for (seq, &ei) in order.iter().enumerate() {
        let e = &events[ei];
        let arrest_id = format!("A{:06}", seq + 1);
        for (k, &p) in e.participants.iter().enumerate() {
            records.push(ArrestRecord {
                arrest_id: arrest_id.clone(),
                offender_id: OffenderId::new(format!("P{:05}", p + 1)),
                date: e.date,
                crime: Some(crimes[ei][k].clone()),
                district: e.district.clone(),
                beat: e.beat.clone(),
                gang: gang_of[p].map(|g| format!("G{:02}", g + 1)),
                homicide_victim: victim[p],
            });
        }
    }
    Ok(records)
}

/// Generate and validate a full dataset.
pub fn generate(config: &GeneratorConfig) -> Result<Dataset> {
    Dataset::from_records(generate_records(config)?)
}

/// Least-squares fit quality of `ln(count)` against `ln(degree)`. Degenerate
/// histograms (fewer than three occupied degrees) count as a perfect fit.
fn degree_fit_r2(degrees: &[usize]) -> f64 {
    let mut hist: BTreeMap<usize, usize> = BTreeMap::new();
    for &d in degrees {
        if d > 0 {
            *hist.entry(d).or_default() += 1;
        }
    }
    if hist.len() < 3 {
        return 1.0;
    }
    let pts: Vec<(f64, f64)> =
        hist.iter().map(|(&k, &c)| ((k as f64).ln(), (c as f64).ln())).collect();
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-12 {
        return 1.0;
    }
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    let mean_y = sy / n;
    let ss_tot: f64 = pts.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    let ss_res: f64 =
        pts.iter().map(|p| (p.1 - (intercept + slope * p.0)).powi(2)).sum();
    if ss_tot < 1e-12 {
        1.0
    } else {
        1.0 - ss_res / ss_tot
    }
}

/// Summary statistics of a dataset and the network it induces.
pub fn validate_stats(dataset: &Dataset) -> NetworkStats {
    let g = CoOffenderNetwork::build(dataset, None);
    let nodes = g.node_count();
    let degrees: Vec<usize> = (0..nodes).map(|v| g.degree(v)).collect();

    let mut triangles = vec![0usize; nodes];
    for v in 0..nodes {
        let nv = g.neighbors(v);
        for (i, &u) in nv.iter().enumerate() {
            for &w in &nv[i + 1..] {
                if g.neighbors(u).binary_search(&w).is_ok() {
                    triangles[v] += 1;
                }
            }
        }
    }
    let total_triangles: usize = triangles.iter().sum::<usize>() / 3;
    let triples: usize = degrees.iter().map(|&d| d * (d.saturating_sub(1)) / 2).sum();
    let avg_clustering = if nodes == 0 {
        0.0
    } else {
        (0..nodes)
            .map(|v| {
                let d = degrees[v];
                if d < 2 {
                    0.0
                } else {
                    2.0 * triangles[v] as f64 / (d * (d - 1)) as f64
                }
            })
            .sum::<f64>()
            / nodes as f64
    };
    let transitivity =
        if triples == 0 { 0.0 } else { 3.0 * total_triangles as f64 / triples as f64 };

    let (components, largest_component) = if nodes == 0 {
        (0, 0)
    } else {
        let p = g.connected_components();
        let largest = p.blocks().iter().map(|b| b.len()).max().unwrap_or(0);
        (p.blocks().len(), largest)
    };

    let mut monthly_events = vec![0u64; 12];
    let mut records = 0usize;
    let mut violent = 0usize;
    for (_, idxs) in dataset.events() {
        let first = dataset.record(idxs[0]);
        monthly_events[first.date.month0() as usize] += 1;
        for &i in idxs {
            records += 1;
            if dataset.record(i).is_violent() {
                violent += 1;
            }
        }
    }

    NetworkStats {
        offenders: dataset.offender_count(),
        records,
        events: dataset.event_count(),
        nodes,
        edges: g.edge_count(),
        mean_degree: g.mean_degree(),
        avg_clustering,
        transitivity,
        components,
        largest_component,
        degree_fit_r2: degree_fit_r2(&degrees),
        monthly_events,
        violent_record_fraction: if records == 0 {
            0.0
        } else {
            violent as f64 / records as f64
        },
        victims: dataset.victims().len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config(seed: u64) -> GeneratorConfig {
        GeneratorConfig {
            offenders: 400,
            months: 24,
            gangs: 12,
            seed,
            ..GeneratorConfig::default()
        }
    }

    #[test]
    fn generated_records_validate_and_hit_mean_degree() {
        let cfg = small_config(1);
        let ds = generate(&cfg).unwrap();
        let stats = validate_stats(&ds);
        assert!(stats.mean_degree >= cfg.target_mean_degree, "{}", stats.mean_degree);
        assert!(stats.mean_degree <= cfg.target_mean_degree * 1.25, "{}", stats.mean_degree);
        assert!(stats.offenders > stats.nodes, "everyone ended up co-arrested");
    }

    #[test]
    fn same_seed_reproduces_identical_records() {
        let a = generate_records(&small_config(9)).unwrap();
        let b = generate_records(&small_config(9)).unwrap();
        assert_eq!(a, b);
        let c = generate_records(&small_config(10)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn violent_fraction_lands_near_target() {
        let cfg = small_config(2);
        let ds = generate(&cfg).unwrap();
        let stats = validate_stats(&ds);
        let err = (stats.violent_record_fraction - cfg.violent_record_fraction).abs();
        assert!(err < 0.025, "violent fraction {}", stats.violent_record_fraction);
    }

    #[test]
    fn victims_are_rare_but_present() {
        let cfg = GeneratorConfig { offenders: 1200, ..small_config(3) };
        let ds = generate(&cfg).unwrap();
        let stats = validate_stats(&ds);
        assert!(stats.victims >= 1);
        assert!((stats.victims as f64) < 0.04 * stats.offenders as f64);
    }

    #[test]
    fn about_a_quarter_stay_gangless() {
        let ds = generate(&small_config(4)).unwrap();
        let gangless =
            ds.histories().filter(|h| h.gang().is_none()).count() as f64;
        let frac = gangless / ds.offender_count() as f64;
        assert!((0.13..0.38).contains(&frac), "gangless fraction {frac}");
    }

    #[test]
    fn summer_outpaces_january() {
        let ds = generate(&small_config(5)).unwrap();
        let stats = validate_stats(&ds);
        assert!(stats.monthly_events[6] > stats.monthly_events[0]);
    }

    #[test]
    fn violence_concentrates_near_the_seeds() {
        // with strong contagion, violent offenders should co-offend with
        // other violent offenders more often than chance
        let cfg = GeneratorConfig { contagion_strength: 6.0, ..small_config(6) };
        let ds = generate(&cfg).unwrap();
        let g = CoOffenderNetwork::build(&ds, None);
        let hot: Vec<bool> = (0..g.node_count())
            .map(|v| ds.history(g.id(v)).unwrap().has_violent())
            .collect();
        let overall = hot.iter().filter(|&&h| h).count() as f64 / hot.len() as f64;
        let mut hot_neighbor_pairs = 0usize;
        let mut hot_degree_sum = 0usize;
        for v in 0..g.node_count() {
            if hot[v] {
                hot_degree_sum += g.degree(v);
                hot_neighbor_pairs += g.neighbors(v).iter().filter(|&&u| hot[u]).count();
            }
        }
        let neighbor_rate = hot_neighbor_pairs as f64 / hot_degree_sum as f64;
        assert!(
            neighbor_rate > overall,
            "neighbors of the violent are not enriched: {neighbor_rate} vs {overall}"
        );
    }

    #[test]
    fn impossible_mean_degree_is_rejected() {
        let cfg = GeneratorConfig {
            offenders: 12,
            target_mean_degree: 11.5,
            ..GeneratorConfig::default()
        };
        let err = generate(&cfg).unwrap_err();
        assert!(err.to_string().contains("impossible"), "{err}");
    }

    #[test]
    fn degree_fit_handles_flat_histograms() {
        assert_eq!(degree_fit_r2(&[1, 1, 2, 2]), 1.0);
        let skewed: Vec<usize> = (1..=50).flat_map(|k| vec![k; 500 / (k * k)]).collect();
        assert!(degree_fit_r2(&skewed) > 0.8);
    }
}
