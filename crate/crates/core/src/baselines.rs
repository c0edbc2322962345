//! The two law-enforcement watchlist heuristics.
//!
//! Past Violent Activities (PVA) lists everyone with a violent offense on
//! record as of a date, optionally only looking back a fixed number of
//! days. The two-hop heuristic (THH) walks out one and two hops from each
//! homicide victim in the co-offender network and keeps the neighbors with
//! no violent history of their own.

use std::collections::BTreeSet;
use std::io::Write;

use chrono::{Duration, NaiveDate};

use crate::domain::{Dataset, OffenderId};
use crate::error::Result;
use crate::graph::CoOffenderNetwork;

/// Which heuristic produced a watchlist.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WatchlistMethod {
    Pva,
    Thh,
}

impl WatchlistMethod {
    pub fn name(self) -> &'static str {
        match self {
            WatchlistMethod::Pva => "pva",
            WatchlistMethod::Thh => "thh",
        }
    }
}

/// A heuristic's output: the flagged offenders, sorted by id.
#[derive(Clone, Debug)]
pub struct Watchlist {
    pub method: WatchlistMethod,
    /// The date the list was drawn up for; PVA only.
    pub as_of: Option<NaiveDate>,
    pub members: BTreeSet<OffenderId>,
}

impl Watchlist {
    pub fn contains(&self, id: &OffenderId) -> bool {
        self.members.contains(id)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// One offender id per line, ascending.
    pub fn write_text(&self, mut w: impl Write) -> Result<()> {
        for id in &self.members {
            writeln!(w, "{}", id.as_str())?;
        }
        Ok(())
    }

    pub fn summary(&self) -> String {
        match self.as_of {
            Some(d) => format!("{} as of {}: {} members", self.method.name(), d, self.len()),
            None => format!("{}: {} members", self.method.name(), self.len()),
        }
    }
}

/// Past Violent Activities: offenders with at least one violent offense
/// dated on or before `as_of`, restricted to the last `window_days` days
/// when given (inclusive at both ends). Works over the whole dataset, so
/// offenders outside the network qualify too.
pub fn pva(dataset: &Dataset, as_of: NaiveDate, window_days: Option<i64>) -> Watchlist {
    let floor = window_days.map(|d| as_of - Duration::days(d));
    let members = dataset
        .histories()
        .filter(|h| {
            h.violent()
                .iter()
                .any(|(d, _)| *d <= as_of && floor.is_none_or(|f| *d >= f))
        })
        .map(|h| h.id().clone())
        .collect();
    Watchlist { method: WatchlistMethod::Pva, as_of: Some(as_of), members }
}

/// Nodes within one or two hops of any homicide victim: the pool the
/// two-hop heuristic selects from before filtering on history.
pub fn two_hop_victim_pool(g: &CoOffenderNetwork, dataset: &Dataset) -> Vec<bool> {
    let mut pool = vec![false; g.node_count()];
    for victim in dataset.victims() {
        if let Some(u) = g.node(victim) {
            for w in g.neighbors_within(u, 2) {
                pool[w] = true;
            }
        }
    }
    pool
}

/// Two-hop heuristic: members of the victim pool whose own offense history
/// contains nothing violent. A victim can appear through another victim's
/// neighborhood if their history is clean.
pub fn thh(g: &CoOffenderNetwork, dataset: &Dataset) -> Watchlist {
    let pool = two_hop_victim_pool(g, dataset);
    let members = pool
        .iter()
        .enumerate()
        .filter(|(_, &inside)| inside)
        .map(|(v, _)| g.id(v))
        .filter(|id| dataset.history(id).is_some_and(|h| !h.has_violent()))
        .cloned()
        .collect();
    Watchlist { method: WatchlistMethod::Thh, as_of: None, members }
}
