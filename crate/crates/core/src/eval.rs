//! Pixel-wise ROC/AUC scoring against ground-truth masks.
//!
//! Pixels are pooled across all frames of a sequence and swept over 256
//! evenly spaced thresholds in `[0, 1]` plus the two infinite endpoints;
//! AUC is the trapezoidal area under the resulting curve.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::field::ScalarField;

const GRID: usize = 256;

/// An ROC curve from a pooled threshold sweep.
#[derive(Debug, Clone)]
pub struct RocCurve {
    /// `(FPR, TPR)` pairs ordered from (0, 0) to (1, 1).
    pub points: Vec<(f64, f64)>,
    pub auc: f64,
}

/// Streaming pooled-pixel counts, so full sequences never need to be held
/// in memory.
#[derive(Debug, Clone)]
pub struct RocAccumulator {
    pos: [u64; GRID],
    neg: [u64; GRID],
}

impl Default for RocAccumulator {
    fn default() -> Self {
        Self::new()
    }
}

impl RocAccumulator {
    pub fn new() -> Self {
        Self {
            pos: [0; GRID],
            neg: [0; GRID],
        }
    }

    /// Index of the largest grid threshold `j/255` that is `<= s`, computed
    /// so that bucketed counts agree exactly with per-threshold `>=`
    /// comparisons.
    #[inline]
    fn bucket(s: f64) -> usize {
        let mut b = (s * (GRID - 1) as f64) as i64;
        b = b.clamp(0, (GRID - 1) as i64);
        // Guard against rounding at the bucket boundaries.
        while b + 1 <= (GRID - 1) as i64 && (b + 1) as f64 / (GRID - 1) as f64 <= s {
            b += 1;
        }
        while b > 0 && b as f64 / (GRID - 1) as f64 > s {
            b -= 1;
        }
        b as usize
    }

    pub fn add_frame(&mut self, scores: &ScalarField, truth: &[bool]) -> Result<()> {
        if scores.len() != truth.len() {
            return Err(Error::Argument(format!(
                "scores have {} pixels but truth has {}",
                scores.len(),
                truth.len()
            )));
        }
        for (&s, &t) in scores.values().iter().zip(truth) {
            let b = Self::bucket(s);
            if t {
                self.pos[b] += 1;
            } else {
                self.neg[b] += 1;
            }
        }
        Ok(())
    }

    pub fn positives(&self) -> u64 {
        self.pos.iter().sum()
    }

    pub fn negatives(&self) -> u64 {
        self.neg.iter().sum()
    }

    pub fn finish(&self) -> Result<RocCurve> {
        let p = self.positives();
        let n = self.negatives();
        if p == 0 || n == 0 {
            return Err(Error::Evaluation(format!(
                "need both positive and negative pixels (got {p} positives, {n} negatives)"
            )));
        }
        let mut points = Vec::with_capacity(GRID + 2);
        // Threshold +infinity: nothing predicted positive.
        points.push((0.0, 0.0));
        let mut tp = 0u64;
        let mut fp = 0u64;
        for j in (0..GRID).rev() {
            tp += self.pos[j];
            fp += self.neg[j];
            points.push((fp as f64 / n as f64, tp as f64 / p as f64));
        }
        // Threshold -infinity: everything predicted positive.
        points.push((1.0, 1.0));
        let mut auc = 0.0;
        for w in points.windows(2) {
            let (x0, y0) = w[0];
            let (x1, y1) = w[1];
            auc += (x1 - x0) * (y0 + y1) / 2.0;
        }
        Ok(RocCurve { points, auc })
    }
}

/// Pooled pixel-wise ROC over a sequence of anomaly maps and truth masks.
pub fn roc(scores: &[ScalarField], truth: &[Vec<bool>]) -> Result<RocCurve> {
    if scores.len() != truth.len() {
        return Err(Error::Argument(format!(
            "{} score maps but {} truth masks",
            scores.len(),
            truth.len()
        )));
    }
    let mut acc = RocAccumulator::new();
    for (s, t) in scores.iter().zip(truth) {
        acc.add_frame(s, t)?;
    }
    acc.finish()
}

/// Per-category and overall arithmetic means of per-sequence AUCs.
#[derive(Debug, Clone, PartialEq)]
pub struct Aggregated {
    /// Category name -> mean AUC, ordered by name.
    pub per_category: Vec<(String, f64)>,
    pub overall: f64,
}

pub fn aggregate(entries: &[(String, f64)]) -> Result<Aggregated> {
    if entries.is_empty() {
        return Err(Error::Argument("aggregate needs at least one AUC".into()));
    }
    let mut by_cat: BTreeMap<&str, (f64, usize)> = BTreeMap::new();
    let mut total = 0.0;
    for (cat, auc) in entries {
        let e = by_cat.entry(cat).or_insert((0.0, 0));
        e.0 += auc;
        e.1 += 1;
        total += auc;
    }
    Ok(Aggregated {
        per_category: by_cat
            .into_iter()
            .map(|(k, (sum, n))| (k.to_string(), sum / n as f64))
            .collect(),
        overall: total / entries.len() as f64,
    })
}
