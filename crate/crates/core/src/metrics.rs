//! Partition agreement and detection scores.

use std::collections::{HashMap, HashSet};
use std::ops::Deref;

use serde::Serialize;

use crate::error::{HitmixError, Result};

/// Per-item category ids.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LabelVector(pub Vec<usize>);

impl Deref for LabelVector {
    type Target = [usize];

    fn deref(&self) -> &[usize] {
        &self.0
    }
}

impl From<Vec<usize>> for LabelVector {
    fn from(v: Vec<usize>) -> Self {
        LabelVector(v)
    }
}

impl FromIterator<bool> for LabelVector {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        LabelVector(iter.into_iter().map(usize::from).collect())
    }
}

fn pairs(n: u64) -> f64 {
    (n * n.saturating_sub(1) / 2) as f64
}

/// Hubert–Arabie adjusted Rand index.
///
/// When the chance-corrected denominator vanishes (both partitions all
/// singletons, or both a single cluster) the result is 1 for identical
/// partitions and 0 otherwise.
pub fn adjusted_rand_index(a: &[usize], b: &[usize]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(HitmixError::DimensionMismatch {
            expected: a.len(),
            actual: b.len(),
        });
    }
    if a.len() < 2 {
        return Err(HitmixError::InvalidArgument(
            "adjusted Rand index needs at least 2 items".into(),
        ));
    }
    let mut cells: HashMap<(usize, usize), u64> = HashMap::new();
    let mut rows: HashMap<usize, u64> = HashMap::new();
    let mut cols: HashMap<usize, u64> = HashMap::new();
    for (&x, &y) in a.iter().zip(b) {
        *cells.entry((x, y)).or_default() += 1;
        *rows.entry(x).or_default() += 1;
        *cols.entry(y).or_default() += 1;
    }
    // Sorted sums keep the result independent of hash order and symmetric.
    let sum_pairs = |counts: Vec<u64>| {
        let mut v: Vec<f64> = counts.into_iter().map(pairs).collect();
        v.sort_by(f64::total_cmp);
        v.iter().sum::<f64>()
    };
    let index = sum_pairs(cells.values().copied().collect());
    let sum_a = sum_pairs(rows.values().copied().collect());
    let sum_b = sum_pairs(cols.values().copied().collect());
    let total = pairs(a.len() as u64);
    let expected = sum_a * sum_b / total;
    let max_index = (sum_a + sum_b) / 2.0;
    let denom = max_index - expected;
    if denom == 0.0 {
        let identical = cells.len() == rows.len() && cells.len() == cols.len();
        return Ok(if identical { 1.0 } else { 0.0 });
    }
    Ok((index - expected) / denom)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Prf1 {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Precision, recall and F1 of `predicted` against `truth`. Empty predicted
/// or truth sets score zero.
pub fn precision_recall_f1<P, Q>(predicted: P, truth: Q, universe_size: usize) -> Prf1
where
    P: IntoIterator<Item = usize>,
    Q: IntoIterator<Item = usize>,
{
    let predicted: HashSet<usize> = predicted.into_iter().collect();
    let truth: HashSet<usize> = truth.into_iter().collect();
    debug_assert!(predicted.iter().chain(&truth).all(|&v| v < universe_size));
    let overlap = predicted.intersection(&truth).count() as f64;
    let precision = if predicted.is_empty() {
        0.0
    } else {
        overlap / predicted.len() as f64
    };
    let recall = if truth.is_empty() {
        0.0
    } else {
        overlap / truth.len() as f64
    };
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    Prf1 {
        precision,
        recall,
        f1,
    }
}

/// Linear-interpolation quantiles of the sorted sample (R type 7).
pub fn percentiles(values: &[f64], probs: &[f64]) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(HitmixError::InvalidArgument(
            "percentiles of an empty sample".into(),
        ));
    }
    if let Some(p) = probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(HitmixError::InvalidArgument(format!(
            "probability {p} outside [0, 1]"
        )));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    Ok(probs
        .iter()
        .map(|&p| {
            let h = p * (n - 1) as f64;
            let lo = h.floor() as usize;
            let hi = (lo + 1).min(n - 1);
            sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
        })
        .collect())
}
