//! Dictionaries of representative normal motion patterns.
//!
//! Normal-pattern selection solves the row-group-sparse self-expression
//! problem `min_C lambda1*||C||_{1,2} + 0.5*||Y - YC||_F^2` subject to
//! `diag(C) = 0`, then keeps the data columns whose coefficient rows have
//! the largest l2 norms. The dictionary also stores each atom's superpixel
//! centroid so reconstruction can stay spatially local, and is relearned
//! every `T` frames from the old atoms plus newly buffered normal features.

use std::fmt::Write as _;
use std::path::Path;

use ndarray::{Array1, Array2, ArrayView1};

use crate::descriptor::MotionFeature;
use crate::error::{Error, Result};
use crate::field::FieldKind;

/// Ordered atoms (histogram columns), their spatial locations, and their
/// selection scores, sorted by non-increasing score.
#[derive(Debug, Clone)]
pub struct Dictionary {
    atoms: Array2<f64>,
    locations: Vec<(f64, f64)>,
    scores: Vec<f64>,
    field_kind: FieldKind,
}

impl Dictionary {
    pub fn empty(bins: usize, field_kind: FieldKind) -> Self {
        Self {
            atoms: Array2::zeros((bins, 0)),
            locations: Vec::new(),
            scores: Vec::new(),
            field_kind,
        }
    }

    /// Number of atoms.
    #[inline]
    pub fn len(&self) -> usize {
        self.locations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Histogram dimension d.
    pub fn bins(&self) -> usize {
        self.atoms.nrows()
    }

    /// Atom histograms as a d x M matrix, one column per atom.
    pub fn atoms(&self) -> &Array2<f64> {
        &self.atoms
    }

    pub fn atom(&self, j: usize) -> ArrayView1<'_, f64> {
        self.atoms.column(j)
    }

    pub fn locations(&self) -> &[(f64, f64)] {
        &self.locations
    }

    /// Row-norm importance scores, non-increasing.
    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn field_kind(&self) -> FieldKind {
        self.field_kind
    }

    /// Write the dictionary as CSV: a comment header carrying the field
    /// kind, atom count and histogram dimension, then one row per atom.
    pub fn write_checkpoint(&self, path: &Path) -> Result<()> {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# field_kind={} M={} d={}",
            self.field_kind.as_str(),
            self.len(),
            self.bins()
        );
        let mut header = String::from("rank,score,x,y");
        for b in 0..self.bins() {
            let _ = write!(header, ",h{b}");
        }
        let _ = writeln!(out, "{header}");
        for j in 0..self.len() {
            let (x, y) = self.locations[j];
            let _ = write!(out, "{j},{:.9},{x:.3},{y:.3}", self.scores[j]);
            for v in self.atoms.column(j) {
                let _ = write!(out, ",{v:.9}");
            }
            out.push('\n');
        }
        std::fs::write(path, out).map_err(|e| Error::io(path, e))
    }
}

/// Whether representative selection filled the requested dictionary size.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectionStatus {
    Complete,
    /// Fewer nonzero coefficient rows than requested atoms.
    Underfilled { requested: usize, selected: usize },
}

/// What a periodic dictionary update actually did.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UpdateOutcome {
    /// Nothing was buffered; the dictionary is unchanged.
    SkippedEmpty,
    /// Fewer than two candidate columns; relearning is impossible.
    SkippedTooSmall,
    Relearned(SelectionStatus),
}

/// Normal features accumulated between dictionary relearns.
#[derive(Debug, Clone)]
pub struct UpdateBuffer {
    pending: Vec<MotionFeature>,
    period: usize,
    frames_seen: usize,
}

impl UpdateBuffer {
    pub fn new(period: usize) -> Self {
        Self {
            pending: Vec::new(),
            period,
            frames_seen: 0,
        }
    }

    /// Admit a feature that passed the normality gate.
    pub fn push(&mut self, feature: MotionFeature) {
        self.pending.push(feature);
    }

    /// Count one processed frame; returns true when an update is due.
    pub fn record_frame(&mut self) -> bool {
        self.frames_seen += 1;
        self.is_due()
    }

    pub fn is_due(&self) -> bool {
        self.frames_seen >= self.period
    }

    pub fn pending(&self) -> &[MotionFeature] {
        &self.pending
    }

    pub fn frames_seen(&self) -> usize {
        self.frames_seen
    }

    pub fn reset(&mut self) {
        self.pending.clear();
        self.frames_seen = 0;
    }
}

/// Largest eigenvalue of the (PSD) Gram matrix `Y*Y^T` by power iteration.
fn spectral_norm_sq(y: &Array2<f64>) -> f64 {
    let gram = y.dot(&y.t());
    let c = gram.nrows();
    let mut v = Array1::from_elem(c, 1.0 / (c as f64).sqrt());
    let mut lambda = 0.0f64;
    for _ in 0..10_000 {
        let w = gram.dot(&v);
        let norm = w.dot(&w).sqrt();
        if norm <= f64::MIN_POSITIVE {
            return 0.0;
        }
        let next = v.dot(&w);
        v = w / norm;
        if (next - lambda).abs() <= 1e-13 * next.abs().max(1e-300) {
            lambda = next;
            break;
        }
        lambda = next;
    }
    lambda.max(0.0)
}

/// `out = beta*out + a * b`, parallelized over column chunks of `b`.
fn par_matmul(
    a: &ndarray::ArrayView2<f64>,
    b: &ndarray::ArrayView2<f64>,
    beta: f64,
    out: &mut Array2<f64>,
) {
    use ndarray::linalg::general_mat_mul;
    use ndarray::Axis;
    use rayon::prelude::*;

    let cols = b.ncols();
    let chunk = (cols / (2 * rayon::current_num_threads().max(1))).max(128);
    if cols <= chunk {
        general_mat_mul(1.0, a, b, beta, out);
        return;
    }
    out.axis_chunks_iter_mut(Axis(1), chunk)
        .into_par_iter()
        .zip(b.axis_chunks_iter(Axis(1), chunk).into_par_iter())
        .for_each(|(mut oc, bc)| general_mat_mul(1.0, a, &bc, beta, &mut oc));
}

/// Solve `min_C lambda1*||C||_{1,2} + 0.5*||Y - YC||_F^2, diag(C) = 0` by
/// proximal gradient descent and return the iterate trace of objective
/// values together with the solution.
///
/// Each iterate takes a gradient step with step size `1/sigma_max(Y)^2`,
/// zeroes the diagonal, and applies the row-wise group soft-threshold with
/// threshold `lambda1/sigma_max(Y)^2`; this is the exact proximal step of
/// the nonsmooth part, so the objective never increases. Iteration stops
/// when the relative objective decrease drops below `tol` or after
/// `max_iter` steps.
pub fn solve_row_group_lasso_traced(
    y: &Array2<f64>,
    lambda1: f64,
    tol: f64,
    max_iter: usize,
) -> Result<(Array2<f64>, Vec<f64>)> {
    let (_c, n) = y.dim();
    if n < 2 {
        return Err(Error::Argument(format!(
            "self-expression needs at least 2 columns, got {n}"
        )));
    }
    if lambda1 <= 0.0 || tol <= 0.0 || max_iter == 0 {
        return Err(Error::Argument(
            "lambda1, tol and max_iter must be positive".into(),
        ));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::Data("feature matrix contains non-finite values".into()));
    }

    let sigma_sq = spectral_norm_sq(y) * (1.0 + 1e-9);
    if sigma_sq <= f64::MIN_POSITIVE {
        return Ok((Array2::zeros((n, n)), vec![0.5 * y.iter().map(|v| v * v).sum::<f64>()]));
    }
    let step = 1.0 / sigma_sq;
    let thresh = lambda1 * step;

    let feat_dim = y.nrows();
    let yt = y.t().to_owned();
    let mut c_cur = Array2::<f64>::zeros((n, n));
    let mut c_next = Array2::<f64>::zeros((n, n));
    // Residual R = Y*C - Y; starts at -Y.
    let mut r = -y.clone();
    let mut obj = 0.5 * r.iter().map(|v| v * v).sum::<f64>();
    let mut trace = vec![obj];

    for _ in 0..max_iter {
        use ndarray::linalg::general_mat_mul;
        use ndarray::{s, Axis};
        use rayon::prelude::*;

        // Gradient step, diagonal projection, then the row group prox,
        // processed in row blocks so each block's gradient stays in cache.
        // Zeroing the diagonal first makes the shrink the exact proximal
        // operator of lambda1*||.||_{1,2} restricted to {diag = 0}.
        let row_chunk = (n / (4 * rayon::current_num_threads().max(1))).clamp(32, 256);
        let r_view = r.view();
        let chunk_results: Vec<(f64, Vec<usize>)> = c_next
            .axis_chunks_iter_mut(Axis(0), row_chunk)
            .into_par_iter()
            .zip(c_cur.axis_chunks_iter(Axis(0), row_chunk).into_par_iter())
            .zip(yt.axis_chunks_iter(Axis(0), row_chunk).into_par_iter())
            .enumerate()
            .map_init(
                || Array2::<f64>::zeros((row_chunk, n)),
                |grad_buf, (chunk_idx, ((mut out_chunk, cur_chunk), yt_chunk))| {
                    let rows = out_chunk.nrows();
                    let base = chunk_idx * row_chunk;
                    let mut grad_block = grad_buf.slice_mut(s![..rows, ..]);
                    general_mat_mul(1.0, &yt_chunk, &r_view, 0.0, &mut grad_block);
                    let mut penalty = 0.0;
                    let mut active = Vec::new();
                    for local in 0..rows {
                        let i = base + local;
                        let ci = cur_chunk.row(local);
                        let ci = ci.as_slice().expect("row-major");
                        let gi = grad_block.row(local);
                        let gi = gi.as_slice().expect("row-major");
                        let mut out_row = out_chunk.row_mut(local);
                        let out = out_row.as_slice_mut().expect("row-major");
                        let mut norm_sq = 0.0;
                        for j in 0..n {
                            let v = ci[j] - step * gi[j];
                            out[j] = v;
                            norm_sq += v * v;
                        }
                        let diag = out[i];
                        out[i] = 0.0;
                        let norm = (norm_sq - diag * diag).max(0.0).sqrt();
                        if norm > thresh {
                            let scale = 1.0 - thresh / norm;
                            for o in out.iter_mut() {
                                *o *= scale;
                            }
                            penalty += norm - thresh;
                            active.push(i);
                        } else {
                            out.fill(0.0);
                        }
                    }
                    (penalty, active)
                },
            )
            .collect();
        let mut penalty = 0.0;
        let mut active: Vec<usize> = Vec::new();
        for (p, a) in chunk_results {
            penalty += p;
            active.extend(a);
        }

        // Residual for the new iterate. Zero rows of C contribute nothing to
        // Y*C, so when C is row-sparse the product only needs the matching
        // columns of Y.
        r.assign(y);
        r.mapv_inplace(|v| -v);
        if active.len() * 10 < n * 7 {
            if !active.is_empty() {
                let mut y_act = Array2::<f64>::zeros((feat_dim, active.len()));
                let mut c_act = Array2::<f64>::zeros((active.len(), n));
                for (k, &i) in active.iter().enumerate() {
                    y_act.column_mut(k).assign(&y.column(i));
                    c_act.row_mut(k).assign(&c_next.row(i));
                }
                par_matmul(&y_act.view(), &c_act.view(), 1.0, &mut r);
            }
        } else {
            par_matmul(&y.view(), &c_next.view(), 1.0, &mut r);
        }
        let obj_next = lambda1 * penalty + 0.5 * r.iter().map(|v| v * v).sum::<f64>();
        debug_assert!(
            obj_next <= obj * (1.0 + 1e-12) + 1e-12,
            "group-lasso objective rose: {obj} -> {obj_next}"
        );
        trace.push(obj_next);
        std::mem::swap(&mut c_cur, &mut c_next);
        let rel = (obj - obj_next) / obj.max(f64::MIN_POSITIVE);
        obj = obj_next;
        if rel < tol {
            break;
        }
    }
    Ok((c_cur, trace))
}

/// See [`solve_row_group_lasso_traced`]; this drops the objective trace.
pub fn solve_row_group_lasso(
    y: &Array2<f64>,
    lambda1: f64,
    tol: f64,
    max_iter: usize,
) -> Result<Array2<f64>> {
    solve_row_group_lasso_traced(y, lambda1, tol, max_iter).map(|(c, _)| c)
}

/// Keep the columns of `Y` whose coefficient rows have the largest l2
/// norms, in descending order with ties broken toward the lower column
/// index. Zero-norm rows are never selected; if fewer than `m` rows are
/// nonzero the dictionary comes back smaller with a warning status.
pub fn select_representatives(
    y: &Array2<f64>,
    locations: &[(f64, f64)],
    coeffs: &Array2<f64>,
    m: usize,
    field_kind: FieldKind,
) -> Result<(Dictionary, SelectionStatus)> {
    let n = y.ncols();
    if coeffs.nrows() != n || coeffs.ncols() != n || locations.len() != n {
        return Err(Error::Argument(format!(
            "inconsistent shapes: Y has {n} columns, C is {}x{}, {} locations",
            coeffs.nrows(),
            coeffs.ncols(),
            locations.len()
        )));
    }
    let mut ranked: Vec<(usize, f64)> = (0..n)
        .map(|i| {
            let norm = coeffs.row(i).iter().map(|v| v * v).sum::<f64>().sqrt();
            (i, norm)
        })
        .filter(|&(_, norm)| norm > 0.0)
        .collect();
    ranked.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    ranked.truncate(m);

    let selected = ranked.len();
    let mut atoms = Array2::zeros((y.nrows(), selected));
    let mut locs = Vec::with_capacity(selected);
    let mut scores = Vec::with_capacity(selected);
    for (out, &(idx, norm)) in ranked.iter().enumerate() {
        atoms.column_mut(out).assign(&y.column(idx));
        locs.push(locations[idx]);
        scores.push(norm);
    }
    let status = if selected < m {
        SelectionStatus::Underfilled {
            requested: m,
            selected,
        }
    } else {
        SelectionStatus::Complete
    };
    Ok((
        Dictionary {
            atoms,
            locations: locs,
            scores,
            field_kind,
        },
        status,
    ))
}

/// Learn a dictionary from pooled features (the training bootstrap).
pub fn learn_dictionary(
    features: &[MotionFeature],
    lambda1: f64,
    m: usize,
    tol: f64,
    max_iter: usize,
    field_kind: FieldKind,
) -> Result<(Dictionary, SelectionStatus)> {
    if features.len() < 2 {
        return Err(Error::Argument(format!(
            "dictionary learning needs at least 2 features, got {}",
            features.len()
        )));
    }
    let bins = features[0].histogram.len();
    let mut y = Array2::zeros((bins, features.len()));
    let mut locations = Vec::with_capacity(features.len());
    for (j, f) in features.iter().enumerate() {
        if f.histogram.len() != bins {
            return Err(Error::Argument(
                "features disagree on histogram dimension".into(),
            ));
        }
        y.column_mut(j)
            .assign(&Array1::from_vec(f.histogram.clone()));
        locations.push(f.centroid);
    }
    let coeffs = solve_row_group_lasso(&y, lambda1, tol, max_iter)?;
    select_representatives(&y, &locations, &coeffs, m, field_kind)
}

/// Relearn the dictionary from its current atoms plus the buffered normal
/// features, clearing the buffer. An empty buffer leaves the dictionary
/// untouched.
pub fn update(
    dict: &Dictionary,
    buffer: &mut UpdateBuffer,
    lambda1: f64,
    m: usize,
    tol: f64,
    max_iter: usize,
) -> Result<(Dictionary, UpdateOutcome)> {
    if buffer.pending.is_empty() {
        buffer.reset();
        return Ok((dict.clone(), UpdateOutcome::SkippedEmpty));
    }
    let bins = if dict.is_empty() {
        buffer.pending[0].histogram.len()
    } else {
        dict.bins()
    };
    let total = dict.len() + buffer.pending.len();
    if total < 2 {
        buffer.reset();
        return Ok((dict.clone(), UpdateOutcome::SkippedTooSmall));
    }
    let mut y = Array2::zeros((bins, total));
    let mut locations = Vec::with_capacity(total);
    for j in 0..dict.len() {
        y.column_mut(j).assign(&dict.atoms.column(j));
        locations.push(dict.locations[j]);
    }
    for (k, f) in buffer.pending.iter().enumerate() {
        if f.histogram.len() != bins {
            return Err(Error::Argument(
                "buffered feature histogram dimension mismatch".into(),
            ));
        }
        y.column_mut(dict.len() + k)
            .assign(&Array1::from_vec(f.histogram.clone()));
        locations.push(f.centroid);
    }
    let coeffs = solve_row_group_lasso(&y, lambda1, tol, max_iter)?;
    let (next, status) =
        select_representatives(&y, &locations, &coeffs, m, dict.field_kind)?;
    buffer.reset();
    Ok((next, UpdateOutcome::Relearned(status)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn delta_hist(d: usize, i: usize) -> Vec<f64> {
        let mut h = vec![0.0; d];
        h[i] = 1.0;
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

    /// Noisy copies of `k` delta prototypes, cluster sizes as given. Each
    /// cluster's first member is a near-exact copy, the natural
    /// representative; the rest carry the full noise amplitude.
    fn prototype_columns(
        rng: &mut impl Rng,
        bins: usize,
        proto_bins: &[usize],
        sizes: &[usize],
        noise: f64,
    ) -> (Array2<f64>, Vec<usize>) {
        let n: usize = sizes.iter().sum();
        let mut y = Array2::zeros((bins, n));
        let mut owner = Vec::with_capacity(n);
        let mut col = 0;
        for (k, &sz) in sizes.iter().enumerate() {
            for member in 0..sz {
                let amp = if member == 0 { noise / 25.0 } else { noise };
                let mut h = vec![0.0f64; bins];
                h[proto_bins[k]] = 1.0;
                for v in h.iter_mut() {
                    *v += rng.gen::<f64>() * amp;
                }
                let s: f64 = h.iter().sum();
                for v in h.iter_mut() {
                    *v /= s;
                }
                y.column_mut(col).assign(&ndarray::Array1::from_vec(h));
                owner.push(k);
                col += 1;
            }
        }
        (y, owner)
    }

    #[test]
    fn twin_columns_reconstruct_each_other() {
        let mut y = Array2::zeros((30, 2));
        let h = delta_hist(30, 4);
        y.column_mut(0).assign(&ndarray::Array1::from_vec(h.clone()));
        y.column_mut(1).assign(&ndarray::Array1::from_vec(h));
        let c = solve_row_group_lasso(&y, 0.01, 1e-10, 5000).unwrap();
        assert_eq!(c[[0, 0]], 0.0);
        assert_eq!(c[[1, 1]], 0.0);
        assert!((c[[0, 1]] - 1.0).abs() <= 1e-2 + 1e-4, "c01 = {}", c[[0, 1]]);
        assert!((c[[1, 0]] - 1.0).abs() <= 1e-2 + 1e-4, "c10 = {}", c[[1, 0]]);
    }

    #[test]
    fn huge_lambda_kills_every_row() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let (y, _) = prototype_columns(&mut rng, 30, &[3, 15, 27], &[4, 4, 4], 0.05);
        let c = solve_row_group_lasso(&y, 1e6, 1e-6, 500).unwrap();
        assert!(c.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn diagonal_is_exactly_zero() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        let (y, _) = prototype_columns(&mut rng, 30, &[5, 20], &[6, 6], 0.1);
        let c = solve_row_group_lasso(&y, 0.1, 1e-8, 300).unwrap();
        for i in 0..12 {
            assert_eq!(c[[i, i]], 0.0);
        }
    }

    #[test]
    fn objective_trace_is_monotone() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        for _ in 0..10 {
            let n = rng.gen_range(5..30);
            let mut y = Array2::zeros((30, n));
            for j in 0..n {
                let mut h: Vec<f64> = (0..30).map(|_| rng.gen::<f64>()).collect();
                let s: f64 = h.iter().sum();
                for v in h.iter_mut() {
                    *v /= s;
                }
                y.column_mut(j).assign(&ndarray::Array1::from_vec(h));
            }
            let lambda = rng.gen_range(0.01..2.0);
            let (_, trace) = solve_row_group_lasso_traced(&y, lambda, 1e-9, 400).unwrap();
            for w in trace.windows(2) {
                assert!(w[1] <= w[0] * (1.0 + 1e-12) + 1e-12);
            }
        }
    }

    #[test]
    fn three_prototypes_are_recovered() {
        for seed in 0..5 {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let (y, owner) = prototype_columns(&mut rng, 30, &[3, 15, 27], &[7, 7, 6], 0.01);
            let locations: Vec<(f64, f64)> = (0..20).map(|i| (i as f64, 0.0)).collect();
            let c = solve_row_group_lasso(&y, 0.5, 1e-8, 2000).unwrap();
            let (dict, _) =
                select_representatives(&y, &locations, &c, 3, FieldKind::Orientation).unwrap();
            assert_eq!(dict.len(), 3);
            // The three selected columns must come from three distinct clusters.
            let mut seen = [false; 3];
            for j in 0..3 {
                let (x, _) = dict.locations()[j];
                let col = x as usize;
                seen[owner[col]] = true;
            }
            assert!(seen.iter().all(|&s| s), "clusters covered: {seen:?} (seed {seed})");
        }
    }

    #[test]
    fn select_handles_zero_and_single_rows() {
        let mut y = Array2::zeros((4, 3));
        for j in 0..3 {
            y[[0, j]] = 1.0;
        }
        let locations = vec![(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)];
        let zero = Array2::zeros((3, 3));
        let (dict, status) =
            select_representatives(&y, &locations, &zero, 2, FieldKind::Magnitude).unwrap();
        assert!(dict.is_empty());
        assert_eq!(
            status,
            SelectionStatus::Underfilled {
                requested: 2,
                selected: 0
            }
        );

        let mut one_row = Array2::zeros((3, 3));
        one_row[[1, 0]] = 0.7;
        let (dict, status) =
            select_representatives(&y, &locations, &one_row, 2, FieldKind::Magnitude).unwrap();
        assert_eq!(dict.len(), 1);
        assert_eq!(dict.locations()[0], (1.0, 0.0));
        assert!(matches!(status, SelectionStatus::Underfilled { selected: 1, .. }));
    }

    #[test]
    fn select_breaks_ties_toward_lower_index() {
        let mut y = Array2::zeros((4, 4));
        for j in 0..4 {
            y[[j, j]] = 1.0;
        }
        let locations: Vec<(f64, f64)> = (0..4).map(|i| (i as f64, 0.0)).collect();
        let mut c = Array2::zeros((4, 4));
        // Rows 1 and 3 share a norm; row 2 is larger.
        c[[1, 0]] = 0.5;
        c[[3, 0]] = 0.5;
        c[[2, 0]] = 0.9;
        let (dict, _) =
            select_representatives(&y, &locations, &c, 3, FieldKind::Orientation).unwrap();
        assert_eq!(dict.locations(), &[(2.0, 0.0), (1.0, 0.0), (3.0, 0.0)]);
        let s = dict.scores();
        assert!(s[0] >= s[1] && s[1] >= s[2]);
    }

    #[test]
    fn update_with_empty_buffer_is_identity() {
        let mut y = Array2::zeros((6, 3));
        for j in 0..3 {
            y[[j, j]] = 1.0;
        }
        let locations = vec![(0.0, 0.0), (5.0, 0.0), (9.0, 0.0)];
        let mut c = Array2::zeros((3, 3));
        c[[0, 1]] = 1.0;
        c[[1, 0]] = 1.0;
        c[[2, 0]] = 0.5;
        let (dict, _) =
            select_representatives(&y, &locations, &c, 3, FieldKind::Orientation).unwrap();
        let mut buffer = UpdateBuffer::new(5);
        for _ in 0..5 {
            buffer.record_frame();
        }
        assert!(buffer.is_due());
        let (next, outcome) = update(&dict, &mut buffer, 0.5, 3, 1e-6, 500).unwrap();
        assert_eq!(outcome, UpdateOutcome::SkippedEmpty);
        assert_eq!(next.len(), dict.len());
        assert_eq!(next.atoms(), dict.atoms());
        assert_eq!(buffer.frames_seen(), 0);
    }

    #[test]
    fn update_with_atom_copies_stays_within_original_set() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        let (y, _) = prototype_columns(&mut rng, 30, &[4, 16, 26], &[5, 5, 5], 0.03);
        let locations: Vec<(f64, f64)> = (0..15).map(|i| (i as f64 * 3.0, 1.0)).collect();
        let c = solve_row_group_lasso(&y, 0.3, 1e-8, 1000).unwrap();
        let (dict, _) =
            select_representatives(&y, &locations, &c, 6, FieldKind::Orientation).unwrap();
        assert!(!dict.is_empty());

        let mut buffer = UpdateBuffer::new(5);
        for j in 0..dict.len() {
            buffer.push(feature(dict.atom(j).to_vec(), dict.locations()[j]));
        }
        let (next, outcome) = update(&dict, &mut buffer, 0.3, 6, 1e-8, 1000).unwrap();
        assert!(matches!(outcome, UpdateOutcome::Relearned(_)));
        for j in 0..next.len() {
            let col = next.atom(j);
            let found = (0..dict.len()).any(|k| {
                dict.atom(k)
                    .iter()
                    .zip(col.iter())
                    .all(|(a, b)| (a - b).abs() < 1e-9)
            });
            assert!(found, "updated atom {j} is not one of the originals");
        }
        assert!(buffer.pending().is_empty());
    }

    #[test]
    fn checkpoint_has_expected_shape() {
        let mut y = Array2::zeros((5, 2));
        y[[1, 0]] = 1.0;
        y[[3, 1]] = 1.0;
        let mut c = Array2::zeros((2, 2));
        c[[0, 1]] = 1.0;
        c[[1, 0]] = 0.5;
        let (dict, _) = select_representatives(
            &y,
            &[(2.0, 3.0), (7.0, 1.0)],
            &c,
            2,
            FieldKind::Magnitude,
        )
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("dict.csv");
        dict.write_checkpoint(&path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "# field_kind=magnitude M=2 d=5");
        assert_eq!(lines.next().unwrap(), "rank,score,x,y,h0,h1,h2,h3,h4");
        assert_eq!(lines.count(), 2);
    }
}
