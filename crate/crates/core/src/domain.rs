//! Arrest-record data model: offenders, offenses, validated datasets.
//!
//! The unit of input is one CSV row per (arrest event, offender) pair. A
//! multi-offender arrest shares one `arrest_id` across several rows. The
//! [`Dataset`] owns validated records plus derived per-offender histories,
//! and is the only road to the raw rows: time-restricted copies built with
//! [`Dataset::before`] carry a ceiling date and audit every read against it,
//! which is how the evaluation code proves it never looked at the future.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::{Read, Write};
use std::sync::atomic::{AtomicI64, AtomicU64, Ordering};

use chrono::{Datelike, NaiveDate};

use crate::error::{Error, Result};

/// The offense categories treated as violent unless a catalog override says
/// otherwise.
pub const VIOLENT_CATEGORIES: [&str; 5] = [
    "homicide",
    "criminal_sexual_assault",
    "robbery",
    "aggravated_assault",
    "aggravated_battery",
];

/// Expected CSV header, in order.
pub const CSV_HEADER: [&str; 9] = [
    "arrest_id",
    "offender_id",
    "date",
    "crime",
    "violent",
    "district",
    "beat",
    "gang",
    "homicide_victim",
];

/// Opaque offender identifier, ordered lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OffenderId(String);

impl OffenderId {
    pub fn new(s: impl Into<String>) -> Self {
        OffenderId(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for OffenderId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// An offense code together with its violent/non-violent classification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrimeCode {
    pub code: String,
    pub violent: bool,
}

/// Classification rules for offense codes. The five default violent
/// categories are pinned; other codes take whatever flag the data carries,
/// checked for consistency across the file. Overrides reclassify either way.
#[derive(Clone, Debug)]
pub struct CrimeCatalog {
    forced: BTreeMap<String, bool>,
}

impl Default for CrimeCatalog {
    fn default() -> Self {
        let forced = VIOLENT_CATEGORIES
            .iter()
            .map(|c| (c.to_string(), true))
            .collect();
        CrimeCatalog { forced }
    }
}

impl CrimeCatalog {
    /// Pin `code` to the given classification, replacing any default.
    pub fn reclassify(&mut self, code: impl Into<String>, violent: bool) {
        self.forced.insert(code.into(), violent);
    }

    /// The pinned classification for `code`, if any.
    pub fn expected(&self, code: &str) -> Option<bool> {
        self.forced.get(code).copied()
    }
}

/// One offender's involvement in one arrest event.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArrestRecord {
    pub arrest_id: String,
    pub offender_id: OffenderId,
    pub date: NaiveDate,
    /// `None` only for homicide-victim rows that carry no offense.
    pub crime: Option<CrimeCode>,
    pub district: String,
    pub beat: String,
    pub gang: Option<String>,
    pub homicide_victim: bool,
}

impl ArrestRecord {
    pub fn is_violent(&self) -> bool {
        self.crime.as_ref().map(|c| c.violent).unwrap_or(false)
    }
}

/// Everything known about a single offender, derived from their records.
#[derive(Clone, Debug)]
pub struct OffenderHistory {
    id: OffenderId,
    /// (date, record index), ascending by date.
    arrests: Vec<(NaiveDate, usize)>,
    /// Violent offense entries (date, code), ascending. One entry per record.
    violent: Vec<(NaiveDate, String)>,
    /// Non-violent offense entries, same shape.
    nonviolent: Vec<(NaiveDate, String)>,
    /// Most recent non-empty gang affiliation.
    gang: Option<String>,
    victim: bool,
}

impl OffenderHistory {
    pub fn id(&self) -> &OffenderId {
        &self.id
    }

    pub fn arrest_count(&self) -> usize {
        self.arrests.len()
    }

    /// (date, record index) pairs in ascending date order.
    pub fn arrests(&self) -> &[(NaiveDate, usize)] {
        &self.arrests
    }

    /// Arrest dates in ascending order.
    pub fn arrest_dates(&self) -> impl Iterator<Item = NaiveDate> + '_ {
        self.arrests.iter().map(|(d, _)| *d)
    }

    pub fn last_arrest(&self) -> Option<NaiveDate> {
        self.arrests.last().map(|(d, _)| *d)
    }

    pub fn violent(&self) -> &[(NaiveDate, String)] {
        &self.violent
    }

    pub fn nonviolent(&self) -> &[(NaiveDate, String)] {
        &self.nonviolent
    }

    pub fn has_violent(&self) -> bool {
        !self.violent.is_empty()
    }

    /// Any violent offense dated on or after `d`.
    pub fn has_violent_since(&self, d: NaiveDate) -> bool {
        self.violent.iter().any(|(vd, _)| *vd >= d)
    }

    /// True when any offense entry, violent or not, carries a code in `codes`.
    pub fn committed_any(&self, codes: &BTreeSet<String>) -> bool {
        self.violent.iter().chain(self.nonviolent.iter()).any(|(_, c)| codes.contains(c))
    }

    /// Like [`committed_any`](Self::committed_any) but ignoring the violent
    /// entries, which is how a label-masked membership test sees this
    /// offender.
    pub fn committed_any_nonviolent(&self, codes: &BTreeSet<String>) -> bool {
        self.nonviolent.iter().any(|(_, c)| codes.contains(c))
    }

    pub fn gang(&self) -> Option<&str> {
        self.gang.as_deref()
    }

    pub fn is_victim(&self) -> bool {
        self.victim
    }
}

/// A validated set of arrest records plus derived indexes.
#[derive(Debug)]
pub struct Dataset {
    records: Vec<ArrestRecord>,
    histories: BTreeMap<OffenderId, OffenderHistory>,
    events: BTreeMap<String, Vec<usize>>,
    /// When set, every record in here is dated strictly before this, and the
    /// audited accessors re-check that on every read.
    ceiling: Option<NaiveDate>,
    reads: AtomicU64,
    /// Latest record date handed out so far, as days-from-CE; `i64::MIN`
    /// until the first read.
    high_water: AtomicI64,
}

impl Dataset {
    /// Validate records and build the derived indexes, with the default
    /// offense catalog.
    pub fn from_records(records: Vec<ArrestRecord>) -> Result<Self> {
        Self::from_records_with_catalog(records, &CrimeCatalog::default())
    }

    pub fn from_records_with_catalog(records: Vec<ArrestRecord>, catalog: &CrimeCatalog) -> Result<Self> {
        validate(&records, catalog)?;
        let mut histories: BTreeMap<OffenderId, OffenderHistory> = BTreeMap::new();
        let mut events: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        for (i, r) in records.iter().enumerate() {
            events.entry(r.arrest_id.clone()).or_default().push(i);
            let h = histories
                .entry(r.offender_id.clone())
                .or_insert_with(|| OffenderHistory {
                    id: r.offender_id.clone(),
                    arrests: Vec::new(),
                    violent: Vec::new(),
                    nonviolent: Vec::new(),
                    gang: None,
                    victim: false,
                });
            h.arrests.push((r.date, i));
            if let Some(c) = &r.crime {
                if c.violent {
                    h.violent.push((r.date, c.code.clone()));
                } else {
                    h.nonviolent.push((r.date, c.code.clone()));
                }
            }
            h.victim |= r.homicide_victim;
        }
        for h in histories.values_mut() {
            h.arrests.sort();
            h.violent.sort();
            h.nonviolent.sort();
            // most recent non-empty affiliation wins; dates are unique per
            // offender so this is unambiguous
            h.gang = h
                .arrests
                .iter()
                .rev()
                .find_map(|(_, i)| records[*i].gang.clone());
            debug_assert_eq!(
                h.violent.len() + h.nonviolent.len(),
                h.arrests.iter().filter(|(_, i)| records[*i].crime.is_some()).count()
            );
        }
        Ok(Dataset {
            records,
            histories,
            events,
            ceiling: None,
            reads: AtomicU64::new(0),
            high_water: AtomicI64::new(i64::MIN),
        })
    }

    /// Parse the canonical CSV format. The header must match
    /// [`CSV_HEADER`] exactly; errors carry 1-based row numbers (the header
    /// is row 1).
    pub fn parse_csv(reader: impl Read) -> Result<Vec<ArrestRecord>> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        {
            let got = rdr
                .headers()
                .map_err(|e| Error::Parse { row: 1, msg: e.to_string() })?;
            let want: Vec<&str> = CSV_HEADER.to_vec();
            if got.iter().collect::<Vec<_>>() != want {
                return Err(Error::Parse {
                    row: 1,
                    msg: format!("header must be exactly `{}`", CSV_HEADER.join(",")),
                });
            }
        }
        let mut out = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let row = i + 2;
            let rec = rec.map_err(|e| Error::Parse { row, msg: e.to_string() })?;
            out.push(parse_row(&rec, row)?);
        }
        Ok(out)
    }

    /// Write records in the canonical CSV format. `parse_csv` of the output
    /// reproduces the input field-for-field.
    pub fn write_csv(records: &[ArrestRecord], writer: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(CSV_HEADER).map_err(csv_io)?;
        for r in records {
            w.write_record([
                r.arrest_id.as_str(),
                r.offender_id.as_str(),
                &r.date.format("%Y-%m-%d").to_string(),
                r.crime.as_ref().map(|c| c.code.as_str()).unwrap_or(""),
                if r.is_violent() { "1" } else { "0" },
                r.district.as_str(),
                r.beat.as_str(),
                r.gang.as_deref().unwrap_or(""),
                if r.homicide_victim { "1" } else { "0" },
            ])
            .map_err(csv_io)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Copy restricted to records dated strictly before `cutoff`. The copy
    /// remembers the cutoff as its ceiling and audits all reads against it.
    pub fn before(&self, cutoff: NaiveDate) -> Result<Dataset> {
        let keep: Vec<ArrestRecord> = self
            .records
            .iter()
            .filter(|r| r.date < cutoff)
            .cloned()
            .collect();
        let mut d = Dataset::from_records(keep)?;
        d.ceiling = Some(cutoff);
        Ok(d)
    }

    /// Audited pass over all records in input order.
    pub fn records(&self) -> impl Iterator<Item = &ArrestRecord> + '_ {
        self.records.iter().inspect(|r| self.audit(r))
    }

    /// Audited access to a single record by index (indexes come from
    /// [`events`](Self::events) or [`OffenderHistory::arrests`]).
    pub fn record(&self, idx: usize) -> &ArrestRecord {
        let r = &self.records[idx];
        self.audit(r);
        r
    }

    fn audit(&self, r: &ArrestRecord) {
        self.reads.fetch_add(1, Ordering::Relaxed);
        let days = i64::from(r.date.num_days_from_ce());
        self.high_water.fetch_max(days, Ordering::Relaxed);
        if let Some(c) = self.ceiling {
            assert!(
                r.date < c,
                "record dated {} read through a dataset restricted to before {}",
                r.date,
                c
            );
        }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn ceiling(&self) -> Option<NaiveDate> {
        self.ceiling
    }

    /// How many audited record reads have happened.
    pub fn audited_reads(&self) -> u64 {
        self.reads.load(Ordering::Relaxed)
    }

    /// Latest record date any audited read has returned, if any read
    /// happened.
    pub fn high_water_mark(&self) -> Option<NaiveDate> {
        let v = self.high_water.load(Ordering::Relaxed);
        if v == i64::MIN {
            None
        } else {
            NaiveDate::from_num_days_from_ce_opt(v as i32)
        }
    }

    pub fn history(&self, id: &OffenderId) -> Option<&OffenderHistory> {
        self.histories.get(id)
    }

    /// Per-offender histories in ascending id order.
    pub fn histories(&self) -> impl Iterator<Item = &OffenderHistory> + '_ {
        self.histories.values()
    }

    pub fn offender_count(&self) -> usize {
        self.histories.len()
    }

    /// Arrest events as (arrest_id, record indices), ascending by id. The
    /// indices line up with the order [`records`](Self::records) yields.
    pub fn events(&self) -> impl Iterator<Item = (&str, &[usize])> + '_ {
        self.events.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }

    pub fn event_count(&self) -> usize {
        self.events.len()
    }

    /// Offenders flagged as homicide victims on any record, ascending.
    pub fn victims(&self) -> Vec<&OffenderId> {
        self.histories.values().filter(|h| h.is_victim()).map(|h| h.id()).collect()
    }

    pub fn min_date(&self) -> Option<NaiveDate> {
        self.records.iter().map(|r| r.date).min()
    }

    pub fn max_date(&self) -> Option<NaiveDate> {
        self.records.iter().map(|r| r.date).max()
    }
}

fn csv_io(e: csv::Error) -> Error {
    Error::Compute(format!("csv write failed: {e}"))
}

fn parse_row(rec: &csv::StringRecord, row: usize) -> Result<ArrestRecord> {
    let field = |i: usize| rec.get(i).unwrap_or("").trim();
    let err = |msg: String| Error::Parse { row, msg };

    let arrest_id = field(0).to_string();
    if arrest_id.is_empty() {
        return Err(err("empty arrest_id".into()));
    }
    let offender = field(1).to_string();
    if offender.is_empty() {
        return Err(err("empty offender_id".into()));
    }
    let date = NaiveDate::parse_from_str(field(2), "%Y-%m-%d")
        .map_err(|_| err(format!("bad date `{}` (want YYYY-MM-DD)", field(2))))?;
    let violent = parse_flag(field(4)).ok_or_else(|| err(format!("violent must be 0 or 1, got `{}`", field(4))))?;
    let victim = parse_flag(field(8)).ok_or_else(|| err(format!("homicide_victim must be 0 or 1, got `{}`", field(8))))?;
    let crime = if field(3).is_empty() {
        if !victim {
            return Err(err("empty crime is only allowed on homicide_victim rows".into()));
        }
        if violent {
            return Err(err("a row without a crime cannot be flagged violent".into()));
        }
        None
    } else {
        Some(CrimeCode { code: field(3).to_string(), violent })
    };
    let district = field(5).to_string();
    if district.is_empty() {
        return Err(err("empty district".into()));
    }
    let beat = field(6).to_string();
    if beat.is_empty() {
        return Err(err("empty beat".into()));
    }
    let gang = if field(7).is_empty() { None } else { Some(field(7).to_string()) };
    Ok(ArrestRecord {
        arrest_id,
        offender_id: OffenderId::new(offender),
        date,
        crime,
        district,
        beat,
        gang,
        homicide_victim: victim,
    })
}

fn parse_flag(s: &str) -> Option<bool> {
    match s {
        "0" => Some(false),
        "1" => Some(true),
        _ => None,
    }
}

fn validate(records: &[ArrestRecord], catalog: &CrimeCatalog) -> Result<()> {
    // row numbers in messages count the header as row 1, matching parse_csv
    let mut by_pair: BTreeMap<(&OffenderId, &str), usize> = BTreeMap::new();
    let mut by_day: BTreeMap<(&OffenderId, NaiveDate), usize> = BTreeMap::new();
    let mut flag_seen: BTreeMap<&str, (bool, usize)> = BTreeMap::new();
    for (i, r) in records.iter().enumerate() {
        let row = i + 2;
        if let Some(prev) = by_pair.insert((&r.offender_id, r.arrest_id.as_str()), row) {
            return Err(Error::validation(format!(
                "rows {prev} and {row}: offender {} listed twice under arrest {}",
                r.offender_id, r.arrest_id
            )));
        }
        if let Some(prev) = by_day.insert((&r.offender_id, r.date), row) {
            return Err(Error::validation(format!(
                "rows {prev} and {row}: offender {} arrested more than once on {}",
                r.offender_id, r.date
            )));
        }
        if let Some(c) = &r.crime {
            if let Some(want) = catalog.expected(&c.code) {
                if c.violent != want {
                    return Err(Error::validation(format!(
                        "row {row}: crime `{}` must be flagged {}",
                        c.code,
                        if want { "violent" } else { "non-violent" }
                    )));
                }
            }
            match flag_seen.get(c.code.as_str()) {
                None => {
                    flag_seen.insert(&c.code, (c.violent, row));
                }
                Some((flag, prev)) if *flag != c.violent => {
                    return Err(Error::validation(format!(
                        "rows {prev} and {row}: crime `{}` flagged both violent and non-violent",
                        c.code
                    )));
                }
                _ => {}
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(arrest: &str, off: &str, date: &str, crime: &str, violent: bool) -> ArrestRecord {
        ArrestRecord {
            arrest_id: arrest.to_string(),
            offender_id: OffenderId::new(off),
            date: NaiveDate::parse_from_str(date, "%Y-%m-%d").unwrap(),
            crime: if crime.is_empty() {
                None
            } else {
                Some(CrimeCode { code: crime.to_string(), violent })
            },
            district: "D1".into(),
            beat: "B11".into(),
            gang: None,
            homicide_victim: crime.is_empty(),
        }
    }

    #[test]
    fn csv_round_trip_preserves_fields() {
        let mut a = rec("E1", "o1", "2012-01-05", "robbery", true);
        a.gang = Some("GA".into());
        let b = rec("E1", "o2", "2012-01-05", "theft", false);
        let c = rec("E2", "o3", "2012-02-01", "", false);
        let original = vec![a, b, c];
        let mut buf = Vec::new();
        Dataset::write_csv(&original, &mut buf).unwrap();
        let parsed = Dataset::parse_csv(buf.as_slice()).unwrap();
        assert_eq!(parsed, original);
    }

    #[test]
    fn header_must_match_exactly() {
        let text = "arrest_id,offender,date,crime,violent,district,beat,gang,homicide_victim\n";
        let err = Dataset::parse_csv(text.as_bytes()).unwrap_err();
        assert!(err.to_string().contains("header"));
    }

    #[test]
    fn rejects_duplicate_offender_in_one_arrest() {
        let rows = vec![
            rec("E1", "o1", "2012-01-05", "theft", false),
            rec("E1", "o1", "2012-01-06", "theft", false),
        ];
        let err = Dataset::from_records(rows).unwrap_err();
        assert!(err.to_string().contains("listed twice under arrest E1"), "{err}");
    }

    #[test]
    fn rejects_two_arrests_same_day() {
        let rows = vec![
            rec("E1", "o1", "2012-01-05", "theft", false),
            rec("E2", "o1", "2012-01-05", "theft", false),
        ];
        let err = Dataset::from_records(rows).unwrap_err();
        assert!(err.to_string().contains("more than once on 2012-01-05"), "{err}");
    }

    #[test]
    fn rejects_inconsistent_crime_flags() {
        let rows = vec![
            rec("E1", "o1", "2012-01-05", "mischief", false),
            rec("E2", "o2", "2012-01-06", "mischief", true),
        ];
        let err = Dataset::from_records(rows).unwrap_err();
        assert!(err.to_string().contains("flagged both"), "{err}");
    }

    #[test]
    fn canonical_categories_must_be_violent() {
        let rows = vec![rec("E1", "o1", "2012-01-05", "robbery", false)];
        let err = Dataset::from_records(rows).unwrap_err();
        assert!(err.to_string().contains("must be flagged violent"), "{err}");
    }

    #[test]
    fn catalog_override_reclassifies() {
        let rows = vec![rec("E1", "o1", "2012-01-05", "robbery", false)];
        let mut catalog = CrimeCatalog::default();
        catalog.reclassify("robbery", false);
        assert!(Dataset::from_records_with_catalog(rows, &catalog).is_ok());
    }

    #[test]
    fn victim_only_row_allowed_without_crime() {
        let rows = vec![rec("E1", "o1", "2012-01-05", "", false)];
        let d = Dataset::from_records(rows).unwrap();
        let h = d.history(&OffenderId::new("o1")).unwrap();
        assert!(h.is_victim());
        assert_eq!(h.violent().len() + h.nonviolent().len(), 0);
        assert_eq!(h.arrest_count(), 1);
    }

    #[test]
    fn history_splits_offenses_and_tracks_latest_gang() {
        let mut r1 = rec("E1", "o1", "2012-01-05", "robbery", true);
        r1.gang = Some("GA".into());
        let mut r2 = rec("E2", "o1", "2012-03-01", "theft", false);
        r2.gang = Some("GB".into());
        let r3 = rec("E3", "o1", "2012-04-01", "narcotics", false);
        let d = Dataset::from_records(vec![r3, r1, r2]).unwrap();
        let h = d.history(&OffenderId::new("o1")).unwrap();
        assert_eq!(h.violent().len(), 1);
        assert_eq!(h.nonviolent().len(), 2);
        assert_eq!(h.arrest_count(), 3);
        // r3 carries no gang, so the March affiliation is the latest known
        assert_eq!(h.gang(), Some("GB"));
        let dates: Vec<_> = h.arrest_dates().collect();
        assert!(dates.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn before_restricts_and_audits() {
        let rows = vec![
            rec("E1", "o1", "2012-01-05", "theft", false),
            rec("E2", "o2", "2012-02-05", "theft", false),
            rec("E3", "o3", "2012-03-05", "theft", false),
        ];
        let d = Dataset::from_records(rows).unwrap();
        let cutoff = NaiveDate::from_ymd_opt(2012, 3, 1).unwrap();
        let p = d.before(cutoff).unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(p.ceiling(), Some(cutoff));
        assert_eq!(p.audited_reads(), 0);
        let n = p.records().count();
        assert_eq!(n, 2);
        assert_eq!(p.audited_reads(), 2);
        let hw = p.high_water_mark().unwrap();
        assert!(hw < cutoff);
    }
}
