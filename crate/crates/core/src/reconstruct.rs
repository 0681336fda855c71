//! Per-superpixel abnormality scoring against a dictionary.
//!
//! Orientation features are reconstructed by lasso over their K spatially
//! nearest atoms and scored by the EMD between the feature and its
//! reconstruction; magnitude features are scored by a Gaussian-weighted mean
//! EMD to the same kind of spatial-near set. Raw per-superpixel scores are
//! max-min normalized into a per-frame anomaly map.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};

use crate::descriptor::{emd_l1, MotionFeature};
use crate::dictionary::Dictionary;
use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::superpixel::SegmentationMap;

/// Reconstructions with less total mass than this map to the ceiling score.
const MIN_RECONSTRUCTION_MASS: f64 = 1e-6;

/// The K dictionary atoms closest to a query centroid.
#[derive(Debug, Clone)]
pub struct SpatialNearSet {
    /// Atom indices ordered by ascending distance (ties toward lower index).
    pub atom_indices: Vec<usize>,
    /// Euclidean centroid distances matching `atom_indices`.
    pub distances: Vec<f64>,
}

/// Select the `k` atoms nearest to `z` by centroid distance. A dictionary
/// smaller than `k` falls back to all atoms.
pub fn spatial_near(dict: &Dictionary, z: (f64, f64), k: usize) -> Result<SpatialNearSet> {
    if dict.is_empty() {
        return Err(Error::State("spatial_near on an empty dictionary".into()));
    }
    if k == 0 {
        return Err(Error::Argument("spatial-near size k must be positive".into()));
    }
    let mut order: Vec<(usize, f64)> = dict
        .locations()
        .iter()
        .enumerate()
        .map(|(i, &(x, y))| {
            let dx = x - z.0;
            let dy = y - z.1;
            (i, (dx * dx + dy * dy).sqrt())
        })
        .collect();
    order.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap().then(a.0.cmp(&b.0)));
    order.truncate(k);
    Ok(SpatialNearSet {
        atom_indices: order.iter().map(|&(i, _)| i).collect(),
        distances: order.iter().map(|&(_, d)| d).collect(),
    })
}

/// Minimize `||y - D*alpha||^2 + lambda2*||alpha||_1` by cyclic coordinate
/// descent, iterating until the KKT residual is at most 1e-6.
pub fn solve_lasso(y: ArrayView1<f64>, d_l: ArrayView2<f64>, lambda2: f64) -> Result<Array1<f64>> {
    let (d, k) = d_l.dim();
    if y.len() != d {
        return Err(Error::Argument(format!(
            "target length {} does not match atom dimension {d}",
            y.len()
        )));
    }
    if k == 0 {
        return Err(Error::Argument("lasso needs at least one atom".into()));
    }
    if lambda2 < 0.0 {
        return Err(Error::Argument("lambda2 must be non-negative".into()));
    }
    if y.iter().any(|v| !v.is_finite()) || d_l.iter().any(|v| !v.is_finite()) {
        return Err(Error::Data("lasso input contains non-finite values".into()));
    }

    let col_sq: Vec<f64> = (0..k)
        .map(|j| d_l.column(j).iter().map(|v| v * v).sum())
        .collect();
    let mut alpha = Array1::<f64>::zeros(k);
    // Residual r = y - D*alpha, maintained incrementally.
    let mut r: Array1<f64> = y.to_owned();
    const KKT_TOL: f64 = 1e-6;
    const MAX_SWEEPS: usize = 100_000;

    for _ in 0..MAX_SWEEPS {
        for j in 0..k {
            if col_sq[j] <= f64::MIN_POSITIVE {
                continue;
            }
            let aj = alpha[j];
            // rho = D_j^T (r + D_j * aj)
            let rho = d_l.column(j).dot(&r) + col_sq[j] * aj;
            let a_new = soft_threshold(rho, lambda2 / 2.0) / col_sq[j];
            if a_new != aj {
                let delta = a_new - aj;
                r.scaled_add(-delta, &d_l.column(j));
                alpha[j] = a_new;
            }
        }
        // KKT check: for active coordinates the subgradient must vanish, for
        // inactive ones it must lie inside [-lambda2, lambda2].
        let mut ok = true;
        for j in 0..k {
            let g = -2.0 * d_l.column(j).dot(&r);
            if alpha[j] != 0.0 {
                if (g + lambda2 * alpha[j].signum()).abs() > KKT_TOL {
                    ok = false;
                    break;
                }
            } else if g.abs() > lambda2 + KKT_TOL {
                ok = false;
                break;
            }
        }
        if ok {
            break;
        }
    }
    Ok(alpha)
}

#[inline]
fn soft_threshold(v: f64, t: f64) -> f64 {
    if v > t {
        v - t
    } else if v < -t {
        v + t
    } else {
        0.0
    }
}

/// Lasso reconstruction cost of an orientation feature over its spatial-near
/// dictionary: `EMD(y, normalize(D_l * alpha))`.
///
/// When the reconstruction carries (almost) no mass the feature is maximally
/// abnormal and the EMD diameter `d - 1` is returned.
pub fn orientation_anomaly(
    feature: &MotionFeature,
    dict: &Dictionary,
    lambda2: f64,
    k: usize,
) -> Result<f64> {
    let near = spatial_near(dict, feature.centroid, k)?;
    let bins = dict.bins();
    let mut d_l = Array2::zeros((bins, near.atom_indices.len()));
    for (col, &idx) in near.atom_indices.iter().enumerate() {
        d_l.column_mut(col).assign(&dict.atom(idx));
    }
    let y = Array1::from_vec(feature.histogram.clone());
    let alpha = solve_lasso(y.view(), d_l.view(), lambda2)?;
    let recon = d_l.dot(&alpha);
    let mass: f64 = recon.sum();
    if mass < MIN_RECONSTRUCTION_MASS {
        return Ok((bins - 1) as f64);
    }
    let normalized: Vec<f64> = recon.iter().map(|v| v / mass).collect();
    emd_l1(&feature.histogram, &normalized)
}

/// Gaussian-weighted mean EMD between a magnitude feature and its
/// spatial-near atoms: `(1/K) * sum_j exp(-dist_j^2) * EMD(y, atom_j)` with
/// centroid distances normalized by the image diagonal so the weights stay
/// resolution independent.
pub fn magnitude_anomaly(
    feature: &MotionFeature,
    dict: &Dictionary,
    k: usize,
    image_diagonal: f64,
) -> Result<f64> {
    if image_diagonal <= 0.0 {
        return Err(Error::Argument(
            "image diagonal must be positive".into(),
        ));
    }
    let near = spatial_near(dict, feature.centroid, k)?;
    let k_actual = near.atom_indices.len() as f64;
    let mut total = 0.0;
    for (&idx, &dist) in near.atom_indices.iter().zip(&near.distances) {
        let nd = dist / image_diagonal;
        let weight = (-nd * nd).exp();
        let atom: Vec<f64> = dict.atom(idx).to_vec();
        total += weight * emd_l1(&feature.histogram, &atom)?;
    }
    Ok(total / k_actual)
}

/// A per-frame anomaly map: the max-min normalized per-superpixel scores
/// painted onto the pixel grid, with the raw scores retained for the
/// dictionary-update gate and debugging dumps.
#[derive(Debug, Clone)]
pub struct AnomalyMap {
    map: ScalarField,
    raw: Vec<f64>,
    normalized: Vec<f64>,
}

impl AnomalyMap {
    /// The `[0, 1]` per-pixel map.
    pub fn map(&self) -> &ScalarField {
        &self.map
    }

    pub fn into_map(self) -> ScalarField {
        self.map
    }

    /// Raw per-superpixel scores, indexed by label.
    pub fn raw_scores(&self) -> &[f64] {
        &self.raw
    }

    /// Max-min normalized per-superpixel scores, indexed by label.
    pub fn normalized_scores(&self) -> &[f64] {
        &self.normalized
    }
}

/// Max-min normalize raw per-superpixel scores and fill the pixel map by
/// superpixel membership. A constant frame normalizes to all zeros.
pub fn normalize_map(raw: &[f64], seg: &SegmentationMap) -> Result<AnomalyMap> {
    if raw.len() != seg.count() {
        return Err(Error::Argument(format!(
            "{} scores for {} superpixels",
            raw.len(),
            seg.count()
        )));
    }
    if raw.is_empty() {
        return Err(Error::Argument("normalize_map needs at least one score".into()));
    }
    let min = raw.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = raw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let normalized: Vec<f64> = if max == min {
        vec![0.0; raw.len()]
    } else {
        let inv = 1.0 / (max - min);
        raw.iter().map(|&s| (s - min) * inv).collect()
    };
    let mut values = Vec::with_capacity(seg.labels().len());
    for &l in seg.labels() {
        values.push(normalized[l as usize]);
    }
    let map = ScalarField::new(seg.width(), seg.height(), values)?;
    Ok(AnomalyMap {
        map,
        raw: raw.to_vec(),
        normalized,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dictionary::select_representatives;
    use crate::field::FieldKind;
    use rand::{Rng, SeedableRng};

    fn dict_from(atoms: Vec<Vec<f64>>, locations: Vec<(f64, f64)>) -> Dictionary {
        let bins = atoms[0].len();
        let n = atoms.len();
        let mut y = Array2::zeros((bins, n));
        for (j, a) in atoms.iter().enumerate() {
            y.column_mut(j).assign(&Array1::from_vec(a.clone()));
        }
        // Give every column a distinct nonzero row norm so selection keeps
        // the original order.
        let mut c = Array2::zeros((n, n));
        for j in 0..n {
            c[[j, (j + 1) % n]] = (n - j) as f64;
        }
        let (dict, _) =
            select_representatives(&y, &locations, &c, n, FieldKind::Orientation).unwrap();
        dict
    }

    fn delta(d: usize, i: usize) -> Vec<f64> {
        let mut h = vec![0.0; d];
        h[i] = 1.0;
        h
    }

    fn peaked(d: usize, i: usize, eps: f64) -> Vec<f64> {
        let mut h = vec![eps / (d as f64 - 1.0); d];
        h[i] = 1.0 - eps;
        h
    }

    fn feature(hist: Vec<f64>, centroid: (f64, f64)) -> MotionFeature {
        MotionFeature {
            histogram: hist,
            centroid,
            frame: 1,
            field_kind: FieldKind::Orientation,
        }
    }

    #[test]
    fn spatial_near_falls_back_when_small() {
        let dict = dict_from(
            vec![delta(6, 0), delta(6, 1), delta(6, 2)],
            vec![(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)],
        );
        let near = spatial_near(&dict, (0.0, 0.0), 10).unwrap();
        assert_eq!(near.atom_indices.len(), 3);
    }

    #[test]
    fn spatial_near_orders_by_distance() {
        let dict = dict_from(
            vec![delta(6, 0), delta(6, 1), delta(6, 2)],
            vec![(3.0, 0.0), (1.0, 0.0), (2.0, 0.0)],
        );
        let near = spatial_near(&dict, (0.0, 0.0), 2).unwrap();
        assert_eq!(near.atom_indices, vec![1, 2]);
        assert_eq!(near.distances, vec![1.0, 2.0]);
    }

    #[test]
    fn spatial_near_matches_exhaustive_sort() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(41);
        let atoms: Vec<Vec<f64>> = (0..100).map(|i| delta(30, i % 30)).collect();
        let locations: Vec<(f64, f64)> = (0..100)
            .map(|_| (rng.gen::<f64>() * 640.0, rng.gen::<f64>() * 480.0))
            .collect();
        let dict = dict_from(atoms, locations.clone());
        let z = (123.0, 234.0);
        let near = spatial_near(&dict, z, 10).unwrap();
        let mut all: Vec<(usize, f64)> = locations
            .iter()
            .enumerate()
            .map(|(i, &(x, y))| (i, ((x - z.0).powi(2) + (y - z.1).powi(2)).sqrt()))
            .collect();
        all.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap().then(a.0.cmp(&b.0)));
        // Selection scores reorder the dictionary, so compare via locations.
        let expect: Vec<(f64, f64)> = all[..10].iter().map(|&(i, _)| locations[i]).collect();
        let got: Vec<(f64, f64)> = near
            .atom_indices
            .iter()
            .map(|&i| dict.locations()[i])
            .collect();
        assert_eq!(got, expect);
    }

    #[test]
    fn spatial_near_rejects_empty_dictionary() {
        let dict = Dictionary::empty(30, FieldKind::Orientation);
        assert!(matches!(
            spatial_near(&dict, (0.0, 0.0), 5),
            Err(Error::State(_))
        ));
    }

    #[test]
    fn lasso_concentrates_on_matching_atom() {
        let mut d_l = Array2::zeros((8, 3));
        d_l.column_mut(0).assign(&Array1::from_vec(peaked(8, 1, 0.05)));
        d_l.column_mut(1).assign(&Array1::from_vec(peaked(8, 4, 0.05)));
        d_l.column_mut(2).assign(&Array1::from_vec(peaked(8, 7, 0.05)));
        let y = Array1::from_vec(peaked(8, 4, 0.05));
        let alpha = solve_lasso(y.view(), d_l.view(), 0.01).unwrap();
        assert!(alpha[1] > 0.9, "alpha = {alpha:?}");
        assert!(alpha[0].abs() + alpha[2].abs() < 0.1);
    }

    #[test]
    fn lasso_zeroes_out_under_large_lambda() {
        let mut d_l = Array2::zeros((5, 2));
        d_l.column_mut(0).assign(&Array1::from_vec(delta(5, 0)));
        d_l.column_mut(1).assign(&Array1::from_vec(delta(5, 3)));
        let y = Array1::from_vec(delta(5, 0));
        let max_corr = 2.0 * (0..2)
            .map(|j| d_l.column(j).dot(&y).abs())
            .fold(0.0f64, f64::max);
        let alpha = solve_lasso(y.view(), d_l.view(), max_corr + 0.1).unwrap();
        assert!(alpha.iter().all(|&a| a == 0.0));
    }

    #[test]
    fn lasso_satisfies_kkt_on_random_instances() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
        for _ in 0..50 {
            let d = rng.gen_range(3..12);
            let k = rng.gen_range(1..8);
            let mut d_l = Array2::zeros((d, k));
            for j in 0..k {
                let mut h: Vec<f64> = (0..d).map(|_| rng.gen::<f64>()).collect();
                let s: f64 = h.iter().sum();
                for v in h.iter_mut() {
                    *v /= s;
                }
                d_l.column_mut(j).assign(&Array1::from_vec(h));
            }
            let y = Array1::from_vec({
                let mut h: Vec<f64> = (0..d).map(|_| rng.gen::<f64>()).collect();
                let s: f64 = h.iter().sum();
                h.iter_mut().for_each(|v| *v /= s);
                h
            });
            let lambda2 = rng.gen_range(0.001..1.0);
            let alpha = solve_lasso(y.view(), d_l.view(), lambda2).unwrap();
            let r = &y - &d_l.dot(&alpha);
            for j in 0..k {
                let g = -2.0 * d_l.column(j).dot(&r);
                if alpha[j] != 0.0 {
                    assert!((g + lambda2 * alpha[j].signum()).abs() <= 1e-6);
                } else {
                    assert!(g.abs() <= lambda2 + 1e-6);
                }
            }
        }
    }

    #[test]
    fn orientation_anomaly_near_zero_for_known_pattern() {
        let atoms: Vec<Vec<f64>> = (0..5).map(|i| peaked(30, 3 * i, 0.1)).collect();
        let locations: Vec<(f64, f64)> = (0..5).map(|i| (i as f64 * 10.0, 0.0)).collect();
        let dict = dict_from(atoms, locations);
        let y = feature(peaked(30, 0, 0.1), (0.0, 0.0));
        let a = orientation_anomaly(&y, &dict, 0.01, 10).unwrap();
        assert!(a < 0.1, "anomaly = {a}");
    }

    #[test]
    fn orientation_anomaly_ceiling_when_lasso_dies() {
        let dict = dict_from(
            vec![delta(30, 2), delta(30, 9)],
            vec![(0.0, 0.0), (5.0, 0.0)],
        );
        let y = feature(delta(30, 20), (0.0, 0.0));
        // Enormous lambda2 forces alpha = 0, so the score hits d - 1.
        let a = orientation_anomaly(&y, &dict, 1e9, 10).unwrap();
        assert_eq!(a, 29.0);
    }

    #[test]
    fn orientation_anomaly_invariant_to_atom_order() {
        let atoms: Vec<Vec<f64>> = (0..6).map(|i| peaked(30, 5 * i, 0.2)).collect();
        let locations: Vec<(f64, f64)> =
            (0..6).map(|i| (i as f64 * 7.0, (i % 2) as f64 * 3.0)).collect();
        let dict = dict_from(atoms.clone(), locations.clone());
        // Same atoms in reversed order.
        let rev_atoms: Vec<Vec<f64>> = atoms.into_iter().rev().collect();
        let rev_locations: Vec<(f64, f64)> = locations.into_iter().rev().collect();
        let dict_rev = dict_from(rev_atoms, rev_locations);
        let y = feature(peaked(30, 12, 0.2), (13.0, 1.0));
        let a = orientation_anomaly(&y, &dict, 0.5, 4).unwrap();
        let b = orientation_anomaly(&y, &dict_rev, 0.5, 4).unwrap();
        assert!((a - b).abs() < 1e-9, "{a} vs {b}");
    }

    #[test]
    fn magnitude_anomaly_degenerate_and_exact_matches() {
        // K=1 atom co-located with the query: weight 1, plain EMD.
        let dict = dict_from(vec![delta(30, 4)], vec![(10.0, 10.0)]);
        let y = feature(delta(30, 7), (10.0, 10.0));
        let a = magnitude_anomaly(&y, &dict, 1, 800.0).unwrap();
        assert!((a - 3.0).abs() < 1e-12);

        // Identical to all atoms: zero.
        let dict = dict_from(
            vec![delta(30, 5), delta(30, 5), delta(30, 5)],
            vec![(0.0, 0.0), (3.0, 0.0), (9.0, 0.0)],
        );
        let y = feature(delta(30, 5), (1.0, 0.0));
        assert_eq!(magnitude_anomaly(&y, &dict, 3, 800.0).unwrap(), 0.0);
    }

    #[test]
    fn magnitude_anomaly_copy_never_increases_score() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let k = 5;
            let atoms: Vec<Vec<f64>> = (0..k).map(|_| {
                let mut h: Vec<f64> = (0..12).map(|_| rng.gen::<f64>()).collect();
                let s: f64 = h.iter().sum();
                h.iter_mut().for_each(|v| *v /= s);
                h
            }).collect();
            let locations: Vec<(f64, f64)> = (0..k)
                .map(|_| (rng.gen::<f64>() * 100.0, rng.gen::<f64>() * 100.0))
                .collect();
            let mut h: Vec<f64> = (0..12).map(|_| rng.gen::<f64>()).collect();
            let s: f64 = h.iter().sum();
            h.iter_mut().for_each(|v| *v /= s);
            let y = feature(h.clone(), (50.0, 50.0));

            let base = magnitude_anomaly(&y, &dict_from(atoms.clone(), locations.clone()), k, 141.4)
                .unwrap();
            for replace in 0..k {
                let mut copied = atoms.clone();
                copied[replace] = h.clone();
                let with_copy =
                    magnitude_anomaly(&y, &dict_from(copied, locations.clone()), k, 141.4)
                        .unwrap();
                assert!(with_copy <= base + 1e-12);
            }
        }
    }

    #[test]
    fn normalize_map_examples() {
        let seg = SegmentationMap::from_labels(3, 1, vec![0, 1, 2]).unwrap();
        let m = normalize_map(&[2.0, 4.0, 6.0], &seg).unwrap();
        assert_eq!(m.normalized_scores(), &[0.0, 0.5, 1.0]);
        assert_eq!(m.map().values(), &[0.0, 0.5, 1.0]);

        let flat = normalize_map(&[3.0, 3.0, 3.0], &seg).unwrap();
        assert_eq!(flat.normalized_scores(), &[0.0, 0.0, 0.0]);

        // argmax superpixel is preserved.
        let m = normalize_map(&[0.4, 0.9, 0.1], &seg).unwrap();
        let argmax_raw = 1;
        let argmax_norm = m
            .normalized_scores()
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap()
            .0;
        assert_eq!(argmax_raw, argmax_norm);
    }
}
