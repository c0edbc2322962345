//! Classification metrics for one evaluation slice.
//!
//! Degenerate cases keep explicit conventions: precision is 0 when nothing
//! was predicted positive, recall and F1 are undefined (None) when the
//! slice has no positive rows, and AUC is undefined when only one class is
//! present.

use serde::{Deserialize, Serialize};

/// Metrics of one method on one slice (a fold, a month, or the pooled
/// aggregate).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SliceMetrics {
    pub id: String,
    pub method: String,
    pub precision: f64,
    pub recall: Option<f64>,
    pub f1: Option<f64>,
    pub auc: Option<f64>,
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

/// (tp, fp, fn, tn) of binary predictions against truth.
pub fn confusion(pred: &[bool], truth: &[bool]) -> (u64, u64, u64, u64) {
    let mut tp = 0;
    let mut fp = 0;
    let mut fn_ = 0;
    let mut tn = 0;
    for (&p, &t) in pred.iter().zip(truth) {
        match (p, t) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            (false, false) => tn += 1,
        }
    }
    (tp, fp, fn_, tn)
}

/// Precision, recall and F1 from confusion counts, with the degenerate
/// conventions above.
pub fn prf(tp: u64, fp: u64, fn_: u64) -> (f64, Option<f64>, Option<f64>) {
    let precision = if tp + fp == 0 { 0.0 } else { tp as f64 / (tp + fp) as f64 };
    let recall = if tp + fn_ == 0 { None } else { Some(tp as f64 / (tp + fn_) as f64) };
    let f1 = recall.map(|r| {
        if precision + r == 0.0 {
            0.0
        } else {
            2.0 * precision * r / (precision + r)
        }
    });
    (precision, recall, f1)
}

/// Area under the ROC curve as the rank statistic: the probability that a
/// random positive outscores a random negative, ties counted half. None
/// when only one class is present.
pub fn auc(scores: &[f64], truth: &[bool]) -> Option<f64> {
    let n = scores.len();
    let pos = truth.iter().filter(|&&t| t).count();
    let neg = n - pos;
    if pos == 0 || neg == 0 {
        return None;
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| scores[a].partial_cmp(&scores[b]).unwrap().then(a.cmp(&b)));
    // average ranks within tie groups
    let mut rank = vec![0.0f64; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        let avg = (i + 1 + j + 1) as f64 / 2.0;
        for &o in &order[i..=j] {
            rank[o] = avg;
        }
        i = j + 1;
    }
    let pos_rank_sum: f64 = (0..n).filter(|&v| truth[v]).map(|v| rank[v]).sum();
    let pos_f = pos as f64;
    Some((pos_rank_sum - pos_f * (pos_f + 1.0) / 2.0) / (pos_f * neg as f64))
}

/// Slice metrics from continuous scores thresholded at `threshold`
/// (prediction positive when score >= threshold), with AUC from the scores.
pub fn slice_from_scores(
    id: impl Into<String>,
    method: impl Into<String>,
    scores: &[f64],
    truth: &[bool],
    threshold: f64,
) -> SliceMetrics {
    let pred: Vec<bool> = scores.iter().map(|&s| s >= threshold).collect();
    let (tp, fp, fn_, _) = confusion(&pred, truth);
    let (precision, recall, f1) = prf(tp, fp, fn_);
    SliceMetrics {
        id: id.into(),
        method: method.into(),
        precision,
        recall,
        f1,
        auc: auc(scores, truth),
        tp,
        fp,
        fn_,
    }
}

/// Slice metrics from hard predictions; AUC is left undefined since a
/// member/non-member list carries no ranking.
pub fn slice_from_predictions(
    id: impl Into<String>,
    method: impl Into<String>,
    pred: &[bool],
    truth: &[bool],
) -> SliceMetrics {
    let (tp, fp, fn_, _) = confusion(pred, truth);
    let (precision, recall, f1) = prf(tp, fp, fn_);
    SliceMetrics {
        id: id.into(),
        method: method.into(),
        precision,
        recall,
        f1,
        auc: None,
        tp,
        fp,
        fn_,
    }
}

/// Points of the ROC curve swept over all distinct score thresholds:
/// (false positive rate, true positive rate) pairs including (0,0) and
/// (1,1), ordered by increasing FPR.
pub fn roc_points(scores: &[f64], truth: &[bool]) -> Vec<(f64, f64)> {
    let pos = truth.iter().filter(|&&t| t).count();
    let neg = truth.len() - pos;
    if pos == 0 || neg == 0 {
        return vec![(0.0, 0.0), (1.0, 1.0)];
    }
    let mut order: Vec<usize> = (0..truth.len()).collect();
    order.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).unwrap().then(a.cmp(&b)));
    let mut points = vec![(0.0, 0.0)];
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut i = 0;
    while i < order.len() {
        let s = scores[order[i]];
        while i < order.len() && scores[order[i]] == s {
            if truth[order[i]] {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        points.push((fp as f64 / neg as f64, tp as f64 / pos as f64));
    }
    points
}
