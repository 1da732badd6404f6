//! Ranking metrics: average precision and ROC AUC.

use std::cmp::Ordering;

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::rng::child_rng;

/// Tie-break seed used by [`aupr`].
pub const DEFAULT_TIE_SEED: u64 = 0;

fn check(scores: &[f64], labels: &[bool]) -> Result<(usize, usize)> {
    if scores.len() != labels.len() {
        return Err(Error::Invalid(format!(
            "{} scores but {} labels",
            scores.len(),
            labels.len()
        )));
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::Invalid("NaN score".into()));
    }
    let pos = labels.iter().filter(|&&l| l).count();
    Ok((pos, labels.len() - pos))
}

/// Area under the precision-recall curve in average-precision form.
pub fn aupr(scores: &[f64], labels: &[bool]) -> Result<f64> {
    average_precision(scores, labels, DEFAULT_TIE_SEED)
}

/// `AP = sum_k (R_k - R_{k-1}) P_k` over the ranks holding positives.
///
/// Points are ranked by descending score; equal scores keep the order of a
/// pre-shuffle keyed by `tie_seed`.
pub fn average_precision(scores: &[f64], labels: &[bool], tie_seed: u64) -> Result<f64> {
    let (pos, _) = check(scores, labels)?;
    if pos == 0 {
        return Err(Error::Empty("positives"));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.shuffle(&mut child_rng(tie_seed, &[scores.len() as u64]));
    order.sort_by(|&i, &j| scores[j].partial_cmp(&scores[i]).unwrap_or(Ordering::Equal));
    let mut hits = 0usize;
    let mut ap = 0.0;
    for (rank, &i) in order.iter().enumerate() {
        if labels[i] {
            hits += 1;
            ap += hits as f64 / (rank + 1) as f64;
        }
    }
    Ok(ap / pos as f64)
}

/// Mann-Whitney form of the ROC AUC: the fraction of (positive, negative)
/// pairs ranked correctly, ties counting one half.
pub fn auroc(scores: &[f64], labels: &[bool]) -> Result<f64> {
    let (pos, neg) = check(scores, labels)?;
    if pos == 0 {
        return Err(Error::Empty("positives"));
    }
    if neg == 0 {
        return Err(Error::Empty("negatives"));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&i, &j| scores[i].partial_cmp(&scores[j]).unwrap_or(Ordering::Equal));
    // Sum of midranks of positives.
    let mut rank_sum = 0.0;
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && scores[order[end]] == scores[order[start]] {
            end += 1;
        }
        let midrank = (start + end + 1) as f64 / 2.0;
        let group_pos = order[start..end].iter().filter(|&&i| labels[i]).count();
        rank_sum += midrank * group_pos as f64;
        start = end;
    }
    let (p, n) = (pos as f64, neg as f64);
    Ok((rank_sum - p * (p + 1.0) / 2.0) / (p * n))
}
