//! The two evaluation protocols.
//!
//! Known-network: the full co-offender network is built once, features are
//! computed with own-label masking, and stratified cross-validation scores
//! each offender exactly once while they are held out. The label is
//! having any violent offense anywhere in the dataset.
//!
//! Network-emerges-over-time: for each evaluation month, the model sees
//! only records dated before the first of that month. The network,
//! features and training labels all come from that prefix; the evaluation
//! label is whether the offender commits a violent offense on or after the
//! cutoff, read from the full dataset on the ground-truth side only. The
//! prefix dataset audits every record it hands out, so each month carries
//! probes showing nothing past the cutoff was read.

use chrono::{Datelike, Duration, NaiveDate};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::baselines::{pva, thh, two_hop_victim_pool};
use crate::domain::Dataset;
use crate::error::{Error, Result};
use crate::features::{assemble, FeatureConfig};
use crate::graph::CoOffenderNetwork;
use crate::learn::forest::{fit_forest, ForestParams};
use crate::learn::metrics::{prf, slice_from_predictions, slice_from_scores, SliceMetrics};
use crate::learn::smote::smote;
use crate::learn::tree::{fit_tree, TreeParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassifierKind {
    DecisionTree,
    RandomForest,
}

impl ClassifierKind {
    pub fn name(self) -> &'static str {
        match self {
            ClassifierKind::DecisionTree => "dt",
            ClassifierKind::RandomForest => "rf",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaselineMethod {
    Pva,
    Thh,
}

/// Classifier and oversampling settings shared by both protocols.
#[derive(Clone, Debug, Serialize)]
pub struct ClassifierParams {
    pub kind: ClassifierKind,
    /// Forest size; ignored by the single tree.
    pub trees: usize,
    pub max_depth: Option<usize>,
    pub min_leaf: usize,
    pub use_smote: bool,
    pub smote_k: usize,
    /// Synthetic rows as a multiple of the minority count; None balances
    /// the classes.
    pub smote_amount: Option<f64>,
}

impl Default for ClassifierParams {
    fn default() -> Self {
        ClassifierParams {
            kind: ClassifierKind::RandomForest,
            trees: 100,
            max_depth: None,
            min_leaf: 1,
            use_smote: true,
            smote_k: 5,
            smote_amount: None,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct KfoldParams {
    pub classifier: ClassifierParams,
    pub folds: usize,
    pub seed: u64,
    /// Add two-hop-heuristic rows to every slice for comparison.
    pub compare_thh: bool,
}

impl Default for KfoldParams {
    fn default() -> Self {
        KfoldParams {
            classifier: ClassifierParams::default(),
            folds: 10,
            seed: 7,
            compare_thh: false,
        }
    }
}

/// Which offenders a monthly model is asked to score.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CandidatePool {
    /// Every node of the prefix network.
    All,
    /// Only nodes arrested within the recency window before the cutoff.
    RecentlyActive,
}

#[derive(Clone, Debug, Serialize)]
pub struct TemporalParams {
    pub classifier: ClassifierParams,
    pub seed: u64,
    /// First evaluated month as an offset from the dataset's first month.
    pub start_offset: usize,
    /// Recency window (days) for the filtered variant and the
    /// recently-active pool.
    pub frf_days: i64,
    pub pool: CandidatePool,
    /// Look-back window for the past-violence baseline; None uses all
    /// history.
    pub pva_window_days: Option<i64>,
    pub compare: Vec<BaselineMethod>,
}

impl Default for TemporalParams {
    fn default() -> Self {
        TemporalParams {
            classifier: ClassifierParams::default(),
            seed: 7,
            start_offset: 18,
            frf_days: 200,
            pool: CandidatePool::All,
            pva_window_days: None,
            compare: Vec::new(),
        }
    }
}

/// Serializable result of one protocol run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EvalReport {
    pub protocol: String,
    pub params: serde_json::Value,
    pub seeds: serde_json::Value,
    pub slices: Vec<SliceMetrics>,
    pub aggregate: Vec<SliceMetrics>,
}

/// Cross-validation result plus the pooled held-out scores, in network
/// node order.
#[derive(Clone, Debug)]
pub struct KfoldOutcome {
    pub report: EvalReport,
    pub scores: Vec<f64>,
    pub truth: Vec<bool>,
}

/// One evaluated month, including the audit probes of its training
/// dataset: `audited_reads` record reads were handed out, none dated at or
/// past `cutoff`, and `high_water` is the latest date among them.
#[derive(Clone, Debug, Serialize)]
pub struct MonthDetail {
    pub month: String,
    pub cutoff: String,
    pub network_nodes: usize,
    pub candidates: usize,
    pub future_positives: usize,
    /// Offenders the classifier flagged, ascending.
    pub predicted: Vec<String>,
    /// The flagged offenders that also pass the recent-activity filter;
    /// always a subset of `predicted`.
    pub predicted_frf: Vec<String>,
    pub audited_reads: u64,
    pub high_water: Option<String>,
}

#[derive(Clone, Debug)]
pub struct TemporalOutcome {
    pub report: EvalReport,
    pub months: Vec<MonthDetail>,
    pub warnings: Vec<String>,
}

fn to_json<T: Serialize>(value: &T) -> Result<serde_json::Value> {
    serde_json::to_value(value).map_err(|e| Error::compute(e.to_string()))
}

/// Oversamples (when asked), fits the configured classifier and scores the
/// evaluation rows. When the minority class is too small for the neighbor
/// count, strict mode errors and lenient mode records a warning and trains
/// without synthetic rows.
fn train_and_score(
    x_train: &[Vec<f64>],
    y_train: &[bool],
    x_eval: &[Vec<f64>],
    cp: &ClassifierParams,
    smote_seed: u64,
    model_seed: u64,
    strict_smote: bool,
    warnings: &mut Vec<String>,
) -> Result<Vec<f64>> {
    let mut x = x_train.to_vec();
    let mut y = y_train.to_vec();
    if cp.use_smote {
        let pos = y.iter().filter(|&&l| l).count();
        let neg = y.len() - pos;
        let minority_label = pos <= neg;
        let (min_n, maj_n) = if minority_label { (pos, neg) } else { (neg, pos) };
        let amount = cp.smote_amount.unwrap_or(if min_n == 0 {
            0.0
        } else {
            maj_n as f64 / min_n as f64 - 1.0
        });
        if amount > 0.0 && min_n > 0 {
            if min_n > cp.smote_k {
                let minority: Vec<Vec<f64>> = x
                    .iter()
                    .zip(&y)
                    .filter(|(_, &l)| l == minority_label)
                    .map(|(r, _)| r.clone())
                    .collect();
                let synthetic = smote(&minority, cp.smote_k, amount, smote_seed)?;
                for row in synthetic {
                    x.push(row);
                    y.push(minority_label);
                }
            } else if strict_smote {
                return Err(Error::validation(format!(
                    "oversampling with k={} needs more than {} minority rows, found {min_n}",
                    cp.smote_k, cp.smote_k
                )));
            } else {
                warnings.push(format!(
                    "minority class has {min_n} rows, too few for k={}; trained without oversampling",
                    cp.smote_k
                ));
            }
        }
    }
    match cp.kind {
        ClassifierKind::DecisionTree => {
            let params = TreeParams {
                max_depth: cp.max_depth,
                min_leaf: cp.min_leaf,
                feature_subset: None,
                seed: model_seed,
            };
            let model = fit_tree(&x, &y, &params)?;
            Ok(x_eval.iter().map(|r| model.score(r)).collect())
        }
        ClassifierKind::RandomForest => {
            let params = ForestParams {
                trees: cp.trees,
                min_leaf: cp.min_leaf,
                max_depth: cp.max_depth,
                bootstrap: true,
                features_per_split: None,
                seed: model_seed,
            };
            let model = fit_forest(&x, &y, &params)?;
            Ok(x_eval.iter().map(|r| model.score(r)).collect())
        }
    }
}

/// Stratified k-fold cross-validation on the full network.
pub fn eval_kfold(dataset: &Dataset, params: &KfoldParams) -> Result<KfoldOutcome> {
    let k = params.folds;
    if k < 2 {
        return Err(Error::validation("cross-validation needs at least two folds"));
    }
    let g = CoOffenderNetwork::build(dataset, None);
    let fc = FeatureConfig { seed: params.seed, ..FeatureConfig::default() };
    let fm = assemble(dataset, &g, &fc)?;
    let n = fm.rows.len();
    let truth = fm.labels.clone();
    let pos_total = truth.iter().filter(|&&t| t).count();
    if pos_total < k {
        return Err(Error::validation(format!(
            "stratified {k}-fold needs at least {k} positive rows, found {pos_total}"
        )));
    }

    let mut master = ChaCha8Rng::seed_from_u64(params.seed);
    let mut pos: Vec<usize> = (0..n).filter(|&v| truth[v]).collect();
    let mut neg: Vec<usize> = (0..n).filter(|&v| !truth[v]).collect();
    pos.shuffle(&mut master);
    neg.shuffle(&mut master);
    let mut fold_of = vec![0usize; n];
    for (i, &v) in pos.iter().enumerate() {
        fold_of[v] = i % k;
    }
    for (i, &v) in neg.iter().enumerate() {
        fold_of[v] = i % k;
    }
    let fold_seeds: Vec<(u64, u64)> = (0..k).map(|_| (master.gen(), master.gen())).collect();
    let thh_pool = params.compare_thh.then(|| two_hop_victim_pool(&g, dataset));

    let mut warnings = Vec::new();
    let mut scores = vec![0.0f64; n];
    let mut slices = Vec::new();
    for f in 0..k {
        let train: Vec<usize> = (0..n).filter(|&v| fold_of[v] != f).collect();
        let test: Vec<usize> = (0..n).filter(|&v| fold_of[v] == f).collect();
        if test.is_empty() {
            continue;
        }
        let x_train: Vec<Vec<f64>> = train.iter().map(|&v| fm.rows[v].clone()).collect();
        let y_train: Vec<bool> = train.iter().map(|&v| truth[v]).collect();
        let x_test: Vec<Vec<f64>> = test.iter().map(|&v| fm.rows[v].clone()).collect();
        let y_test: Vec<bool> = test.iter().map(|&v| truth[v]).collect();
        let (smote_seed, model_seed) = fold_seeds[f];
        let s = train_and_score(
            &x_train,
            &y_train,
            &x_test,
            &params.classifier,
            smote_seed,
            model_seed,
            true,
            &mut warnings,
        )?;
        slices.push(slice_from_scores(
            format!("fold-{f}"),
            params.classifier.kind.name(),
            &s,
            &y_test,
            0.5,
        ));
        if let Some(pool) = &thh_pool {
            let pred: Vec<bool> = test.iter().map(|&v| pool[v]).collect();
            slices.push(slice_from_predictions(format!("fold-{f}"), "thh", &pred, &y_test));
        }
        for (j, &v) in test.iter().enumerate() {
            scores[v] = s[j];
        }
    }

    let mut aggregate = vec![slice_from_scores(
        "aggregate",
        params.classifier.kind.name(),
        &scores,
        &truth,
        0.5,
    )];
    if let Some(pool) = &thh_pool {
        aggregate.push(slice_from_predictions("aggregate", "thh", pool, &truth));
    }
    let report = EvalReport {
        protocol: "kfold".into(),
        params: to_json(params)?,
        seeds: json!({ "master": params.seed }),
        slices,
        aggregate,
    };
    Ok(KfoldOutcome { report, scores, truth })
}

fn first_of_month(d: NaiveDate) -> NaiveDate {
    NaiveDate::from_ymd_opt(d.year(), d.month(), 1).unwrap()
}

fn next_month(d: NaiveDate) -> NaiveDate {
    if d.month() == 12 {
        NaiveDate::from_ymd_opt(d.year() + 1, 1, 1).unwrap()
    } else {
        NaiveDate::from_ymd_opt(d.year(), d.month() + 1, 1).unwrap()
    }
}

fn pool_counts(pooled: &mut Vec<(String, [u64; 3])>, s: &SliceMetrics) {
    let counts = [s.tp, s.fp, s.fn_];
    if let Some((_, acc)) = pooled.iter_mut().find(|(m, _)| *m == s.method) {
        for (a, c) in acc.iter_mut().zip(counts) {
            *a += c;
        }
    } else {
        pooled.push((s.method.clone(), counts));
    }
}

/// Monthly network-emerges-over-time evaluation.
pub fn eval_temporal(dataset: &Dataset, params: &TemporalParams) -> Result<TemporalOutcome> {
    let first = dataset
        .min_date()
        .ok_or_else(|| Error::validation("dataset has no records"))?;
    let last = dataset.max_date().expect("nonempty dataset has a max date");
    let mut month_starts = Vec::new();
    let mut m = first_of_month(first);
    while m <= last {
        month_starts.push(m);
        m = next_month(m);
    }
    if params.start_offset >= month_starts.len() {
        return Err(Error::validation(format!(
            "start offset {} is outside the {}-month data span",
            params.start_offset,
            month_starts.len()
        )));
    }
    let mut master = ChaCha8Rng::seed_from_u64(params.seed);
    let month_seeds: Vec<(u64, u64)> =
        month_starts.iter().map(|_| (master.gen(), master.gen())).collect();

    let cls = params.classifier.kind.name();
    let frf_name = format!("{cls}+frf");
    let mut warnings = Vec::new();
    let mut months = Vec::new();
    let mut slices = Vec::new();
    let mut pooled: Vec<(String, [u64; 3])> = Vec::new();

    for (mi, &cutoff) in month_starts.iter().enumerate().skip(params.start_offset) {
        let month_id = cutoff.format("%Y-%m").to_string();
        let prefix = dataset.before(cutoff)?;
        if prefix.is_empty() {
            warnings.push(format!("{month_id}: empty training prefix, skipped"));
            continue;
        }
        let g = CoOffenderNetwork::build(&prefix, None);
        if g.node_count() == 0 {
            warnings.push(format!("{month_id}: no co-offender edges yet, skipped"));
            continue;
        }
        let fc = FeatureConfig { seed: params.seed, ..FeatureConfig::default() };
        let fm = assemble(&prefix, &g, &fc)?;
        let (smote_seed, model_seed) = month_seeds[mi];
        let scores_all = train_and_score(
            &fm.rows,
            &fm.labels,
            &fm.rows,
            &params.classifier,
            smote_seed,
            model_seed,
            false,
            &mut warnings,
        )?;

        let recent = |v: usize| {
            prefix
                .history(g.id(v))
                .and_then(|h| h.last_arrest())
                .is_some_and(|d| cutoff - d <= Duration::days(params.frf_days))
        };
        let candidates: Vec<usize> = match params.pool {
            CandidatePool::All => (0..g.node_count()).collect(),
            CandidatePool::RecentlyActive => (0..g.node_count()).filter(|&v| recent(v)).collect(),
        };
        if candidates.is_empty() {
            warnings.push(format!("{month_id}: empty candidate pool, skipped"));
            continue;
        }
        // ground-truth side: the full dataset says who turns violent later
        let future: Vec<bool> = candidates
            .iter()
            .map(|&v| dataset.history(g.id(v)).is_some_and(|h| h.has_violent_since(cutoff)))
            .collect();
        let cand_scores: Vec<f64> = candidates.iter().map(|&v| scores_all[v]).collect();
        let cls_slice = slice_from_scores(&month_id, cls, &cand_scores, &future, 0.5);
        pool_counts(&mut pooled, &cls_slice);
        slices.push(cls_slice);

        let pred_frf: Vec<bool> = candidates
            .iter()
            .zip(&cand_scores)
            .map(|(&v, &s)| s >= 0.5 && recent(v))
            .collect();
        let frf_slice = slice_from_predictions(&month_id, &frf_name, &pred_frf, &future);
        pool_counts(&mut pooled, &frf_slice);
        slices.push(frf_slice);

        for b in &params.compare {
            let slice = match b {
                BaselineMethod::Pva => {
                    let w = pva(&prefix, cutoff - Duration::days(1), params.pva_window_days);
                    // the past-violence list covers offenders outside the
                    // network, so its universe is everyone known so far
                    let ids: Vec<_> = prefix.histories().map(|h| h.id().clone()).collect();
                    let pred: Vec<bool> = ids.iter().map(|id| w.contains(id)).collect();
                    let tr: Vec<bool> = ids
                        .iter()
                        .map(|id| {
                            dataset.history(id).is_some_and(|h| h.has_violent_since(cutoff))
                        })
                        .collect();
                    slice_from_predictions(&month_id, "pva", &pred, &tr)
                }
                BaselineMethod::Thh => {
                    let w = thh(&g, &prefix);
                    let pred: Vec<bool> =
                        (0..g.node_count()).map(|v| w.contains(g.id(v))).collect();
                    let tr: Vec<bool> = (0..g.node_count())
                        .map(|v| {
                            dataset
                                .history(g.id(v))
                                .is_some_and(|h| h.has_violent_since(cutoff))
                        })
                        .collect();
                    slice_from_predictions(&month_id, "thh", &pred, &tr)
                }
            };
            pool_counts(&mut pooled, &slice);
            slices.push(slice);
        }

        let predicted: Vec<String> = candidates
            .iter()
            .zip(&cand_scores)
            .filter(|(_, &s)| s >= 0.5)
            .map(|(&v, _)| g.id(v).as_str().to_string())
            .collect();
        let predicted_frf: Vec<String> = candidates
            .iter()
            .zip(&pred_frf)
            .filter(|(_, &p)| p)
            .map(|(&v, _)| g.id(v).as_str().to_string())
            .collect();
        months.push(MonthDetail {
            month: month_id,
            cutoff: cutoff.to_string(),
            network_nodes: g.node_count(),
            candidates: candidates.len(),
            future_positives: future.iter().filter(|&&t| t).count(),
            predicted,
            predicted_frf,
            audited_reads: prefix.audited_reads(),
            high_water: prefix.high_water_mark().map(|d| d.to_string()),
        });
    }

    if months.is_empty() {
        return Err(Error::validation("no month had a usable training prefix"));
    }
    let aggregate: Vec<SliceMetrics> = pooled
        .iter()
        .map(|(method, counts)| {
            let [tp, fp, fn_] = *counts;
            let (precision, recall, f1) = prf(tp, fp, fn_);
            SliceMetrics {
                id: "aggregate".into(),
                method: method.clone(),
                precision,
                recall,
                f1,
                auc: None,
                tp,
                fp,
                fn_,
            }
        })
        .collect();
    let report = EvalReport {
        protocol: "temporal".into(),
        params: to_json(params)?,
        seeds: json!({ "master": params.seed }),
        slices,
        aggregate,
    };
    Ok(TemporalOutcome { report, months, warnings })
}

/// Distinct fold labels of a stratified assignment differ by at most one
/// positive; exposed for tests and callers that need the fold layout
/// without running the full protocol.
pub fn stratified_folds(labels: &[bool], k: usize, seed: u64) -> Result<Vec<usize>> {
    let n = labels.len();
    let pos_total = labels.iter().filter(|&&t| t).count();
    if pos_total < k {
        return Err(Error::validation(format!(
            "stratified {k}-fold needs at least {k} positive rows, found {pos_total}"
        )));
    }
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    let mut pos: Vec<usize> = (0..n).filter(|&v| labels[v]).collect();
    let mut neg: Vec<usize> = (0..n).filter(|&v| !labels[v]).collect();
    pos.shuffle(&mut master);
    neg.shuffle(&mut master);
    let mut fold_of = vec![0usize; n];
    for (i, &v) in pos.iter().enumerate() {
        fold_of[v] = i % k;
    }
    for (i, &v) in neg.iter().enumerate() {
        fold_of[v] = i % k;
    }
    Ok(fold_of)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{ArrestRecord, CrimeCode, OffenderId};
    use std::collections::BTreeSet;

    #[test]
    fn stratified_fold_positive_counts_differ_by_at_most_one() {
        let labels: Vec<bool> = (0..97).map(|i| i % 7 == 0).collect();
        let folds = stratified_folds(&labels, 5, 3).unwrap();
        let mut pos_per = vec![0usize; 5];
        let mut tot_per = vec![0usize; 5];
        for (v, &f) in folds.iter().enumerate() {
            tot_per[f] += 1;
            if labels[v] {
                pos_per[f] += 1;
            }
        }
        assert_eq!(pos_per.iter().max().unwrap() - pos_per.iter().min().unwrap(), 1);
        assert!(tot_per.iter().max().unwrap() - tot_per.iter().min().unwrap() <= 2);
    }

    #[test]
    fn too_few_positives_is_an_error() {
        let labels = vec![true, false, false, false];
        let err = stratified_folds(&labels, 3, 0).unwrap_err();
        assert!(err.to_string().contains("positive rows"));
    }

    fn synthetic_mini_dataset() -> Dataset {
        // 40 offenders in co-arrest pairs; violence clusters on one side
        let mut recs = Vec::new();
        let mut event = 0;
        for i in 0..40usize {
            let partner = (i + 1) % 40;
            event += 1;
            let date = NaiveDate::from_ymd_opt(2012, 1 + (event % 12) as u32, 1 + (i % 27) as u32)
                .unwrap();
            let violent = i % 4 == 0;
            for (who, hot) in [(i, violent), (partner, false)] {
                recs.push(ArrestRecord {
                    arrest_id: format!("E{event}"),
                    offender_id: OffenderId::new(format!("p{who:02}")),
                    date,
                    crime: Some(if hot {
                        CrimeCode { code: "robbery".into(), violent: true }
                    } else {
                        CrimeCode { code: "theft".into(), violent: false }
                    }),
                    district: format!("D{}", i % 3),
                    beat: format!("B{}", i % 6),
                    gang: None,
                    homicide_victim: i % 9 == 0 && !hot,
                });
            }
        }
        Dataset::from_records(recs).unwrap()
    }

    #[test]
    fn kfold_report_has_k_slices_and_an_aggregate() {
        let d = synthetic_mini_dataset();
        let params = KfoldParams {
            folds: 5,
            classifier: ClassifierParams {
                trees: 10,
                use_smote: false,
                ..ClassifierParams::default()
            },
            seed: 3,
            compare_thh: true,
        };
        let out = eval_kfold(&d, &params).unwrap();
        let rf_slices = out.report.slices.iter().filter(|s| s.method == "rf").count();
        let thh_slices = out.report.slices.iter().filter(|s| s.method == "thh").count();
        assert_eq!(rf_slices, 5);
        assert_eq!(thh_slices, 5);
        assert_eq!(out.report.aggregate.len(), 2);
        assert_eq!(out.scores.len(), out.truth.len());
    }

    #[test]
    fn kfold_is_deterministic_for_a_fixed_seed() {
        let d = synthetic_mini_dataset();
        let params = KfoldParams {
            folds: 4,
            classifier: ClassifierParams {
                trees: 8,
                use_smote: true,
                ..ClassifierParams::default()
            },
            seed: 11,
            compare_thh: false,
        };
        let a = eval_kfold(&d, &params).unwrap();
        let b = eval_kfold(&d, &params).unwrap();
        assert_eq!(a.scores, b.scores);
        assert_eq!(
            serde_json::to_string(&a.report).unwrap(),
            serde_json::to_string(&b.report).unwrap()
        );
    }

    fn spread_dataset() -> Dataset {
        // two years of monthly pair arrests so the temporal walk has a
        // meaningful prefix at every cutoff
        let mut recs = Vec::new();
        let mut event = 0;
        for month in 0..24u32 {
            let y = 2012 + (month / 12) as i32;
            let mo = 1 + month % 12;
            for pair in 0..6u32 {
                event += 1;
                let a = (pair * 2 + month) % 20;
                let b = (pair * 2 + 1 + month) % 20;
                let date = NaiveDate::from_ymd_opt(y, mo, 2 + pair * 4).unwrap();
                let violent = (a + month) % 5 == 0;
                for (who, hot) in [(a, violent), (b, false)] {
                    recs.push(ArrestRecord {
                        arrest_id: format!("E{event}"),
                        offender_id: OffenderId::new(format!("q{who:02}")),
                        date,
                        crime: Some(if hot {
                            CrimeCode { code: "robbery".into(), violent: true }
                        } else {
                            CrimeCode { code: "narcotics".into(), violent: false }
                        }),
                        district: "D1".into(),
                        beat: format!("B{}", pair % 3),
                        gang: None,
                        homicide_victim: false,
                    });
                }
            }
        }
        Dataset::from_records(recs).unwrap()
    }

    #[test]
    fn temporal_walk_trains_only_on_the_past() {
        let d = spread_dataset();
        let params = TemporalParams {
            classifier: ClassifierParams {
                trees: 5,
                use_smote: false,
                ..ClassifierParams::default()
            },
            seed: 5,
            start_offset: 12,
            compare: vec![BaselineMethod::Pva],
            ..TemporalParams::default()
        };
        let out = eval_temporal(&d, &params).unwrap();
        assert!(!out.months.is_empty());
        for m in &out.months {
            assert!(m.audited_reads > 0, "{}: no audited reads recorded", m.month);
            let hw = m.high_water.as_deref().expect("features touched no record");
            assert!(hw < m.cutoff.as_str(), "{}: read {hw} at or past {}", m.month, m.cutoff);
            // the filtered watchlist never adds anyone
            let base: BTreeSet<&String> = m.predicted.iter().collect();
            for id in &m.predicted_frf {
                assert!(base.contains(id), "{}: {id} appears only after filtering", m.month);
            }
        }
        let methods: BTreeSet<&str> =
            out.report.slices.iter().map(|s| s.method.as_str()).collect();
        assert_eq!(methods, BTreeSet::from(["rf", "rf+frf", "pva"]));
    }

    #[test]
    fn temporal_start_offset_out_of_range_errors() {
        let d = spread_dataset();
        let params = TemporalParams { start_offset: 500, ..TemporalParams::default() };
        assert!(eval_temporal(&d, &params).is_err());
    }
}
