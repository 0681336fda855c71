//! Two-way Bayesian integration of the orientation and magnitude anomaly
//! maps.
//!
//! Each map takes a turn as the prior while the other provides the
//! evidence: the prior map is thresholded at its mean into abnormal/normal
//! regions, the evidence map's values are histogrammed over both regions
//! into likelihood tables, and the per-pixel posteriors from both role
//! assignments are averaged.

use crate::error::{Error, Result};
use crate::field::ScalarField;

/// Likelihood tables over `m` evidence bins in `[0, 1]`.
///
/// Tables are Laplace smoothed (+1 per bin, +m on the denominator) so empty
/// regions degrade to uniform likelihoods instead of 0/0; each table sums
/// to 1. A value of exactly 1.0 falls in the last interval.
#[derive(Debug, Clone)]
pub struct LikelihoodTable {
    m: usize,
    p_given_abnormal: Vec<f64>,
    p_given_normal: Vec<f64>,
    abnormal_pixels: usize,
    normal_pixels: usize,
}

impl LikelihoodTable {
    pub fn bins(&self) -> usize {
        self.m
    }

    pub fn p_given_abnormal(&self) -> &[f64] {
        &self.p_given_abnormal
    }

    pub fn p_given_normal(&self) -> &[f64] {
        &self.p_given_normal
    }

    pub fn abnormal_pixels(&self) -> usize {
        self.abnormal_pixels
    }

    pub fn normal_pixels(&self) -> usize {
        self.normal_pixels
    }

    #[inline]
    fn bin(&self, v: f64) -> usize {
        ((v * self.m as f64) as usize).min(self.m - 1)
    }
}

/// Threshold an anomaly map at its mean: abnormal iff strictly above.
pub fn binarize_prior(map: &ScalarField) -> Vec<bool> {
    let mean = map.mean();
    map.values().iter().map(|&v| v > mean).collect()
}

/// Histogram the evidence map over the abnormal and normal regions of the
/// prior's binary mask.
pub fn likelihoods(evidence: &ScalarField, mask: &[bool], m: usize) -> Result<LikelihoodTable> {
    if evidence.len() != mask.len() {
        return Err(Error::Argument(format!(
            "evidence has {} pixels but mask has {}",
            evidence.len(),
            mask.len()
        )));
    }
    if m < 2 {
        return Err(Error::Argument(format!("need at least 2 bins, got {m}")));
    }
    let mut abnormal = vec![0u64; m];
    let mut normal = vec![0u64; m];
    let mut n_abnormal = 0usize;
    let mut n_normal = 0usize;
    for (&v, &in_a) in evidence.values().iter().zip(mask) {
        let bin = ((v * m as f64) as usize).min(m - 1);
        if in_a {
            abnormal[bin] += 1;
            n_abnormal += 1;
        } else {
            normal[bin] += 1;
            n_normal += 1;
        }
    }
    let smooth = |counts: &[u64], total: usize| -> Vec<f64> {
        let denom = (total + m) as f64;
        counts.iter().map(|&c| (c as f64 + 1.0) / denom).collect()
    };
    Ok(LikelihoodTable {
        m,
        p_given_abnormal: smooth(&abnormal, n_abnormal),
        p_given_normal: smooth(&normal, n_normal),
        abnormal_pixels: n_abnormal,
        normal_pixels: n_normal,
    })
}

/// Per-pixel posterior of abnormality with `prior` as the prior map and
/// `evidence` feeding the likelihood table:
/// `p = S*p(e|A) / (S*p(e|A) + (1-S)*p(e|N))`, falling back to the prior
/// where the denominator vanishes.
pub fn posterior(
    prior: &ScalarField,
    evidence: &ScalarField,
    table: &LikelihoodTable,
) -> ScalarField {
    debug_assert!(prior.same_dims(evidence));
    let values = prior
        .values()
        .iter()
        .zip(evidence.values())
        .map(|(&s, &e)| {
            let bin = table.bin(e);
            let pa = table.p_given_abnormal[bin];
            let pn = table.p_given_normal[bin];
            let num = s * pa;
            let denom = num + (1.0 - s) * pn;
            if denom == 0.0 {
                s
            } else {
                num / denom
            }
        })
        .collect();
    ScalarField::new(prior.width(), prior.height(), values).expect("posterior values are finite")
}

/// Fuse the two anomaly maps by averaging the posteriors obtained with each
/// map serving as the prior in turn.
pub fn fuse(s_orient: &ScalarField, s_mag: &ScalarField, m: usize) -> Result<ScalarField> {
    if !s_orient.same_dims(s_mag) {
        return Err(Error::Argument(format!(
            "anomaly maps {}x{} and {}x{} differ in size",
            s_orient.width(),
            s_orient.height(),
            s_mag.width(),
            s_mag.height()
        )));
    }
    let table_o = likelihoods(s_mag, &binarize_prior(s_orient), m)?;
    let post_o = posterior(s_orient, s_mag, &table_o);
    let table_m = likelihoods(s_orient, &binarize_prior(s_mag), m)?;
    let post_m = posterior(s_mag, s_orient, &table_m);
    let values = post_o
        .values()
        .iter()
        .zip(post_m.values())
        .map(|(&a, &b)| (a + b) / 2.0)
        .collect();
    ScalarField::new(s_orient.width(), s_orient.height(), values)
}
