//! SLIC over-segmentation of grayscale motion fields.
//!
//! Superpixels provide the spatial anchors for everything downstream: each
//! one yields a motion histogram and a centroid that together form a
//! feature. Segmentation is deterministic: seeds on a regular grid, fixed
//! iteration count, ties broken toward the existing or lowest label.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::field::ScalarField;

/// Fixed iteration count; SLIC stabilizes well within ten sweeps and a
/// fixed count keeps the output deterministic.
const SLIC_ITERATIONS: usize = 10;

/// Per-pixel superpixel labels plus per-superpixel centroids.
///
/// Labels partition the grid: every pixel carries a label in `[0, count)`,
/// every label owns at least one pixel, and each label's pixel set is
/// 4-connected after the enforcement pass.
#[derive(Debug, Clone)]
pub struct SegmentationMap {
    width: usize,
    height: usize,
    labels: Vec<u32>,
    count: usize,
    centroids: Vec<(f64, f64)>,
}

impl SegmentationMap {
    /// Build a segmentation from an existing label map.
    ///
    /// Labels must be dense in `[0, count)` with every label used at least
    /// once; connectivity is the caller's responsibility.
    pub fn from_labels(width: usize, height: usize, labels: Vec<u32>) -> Result<Self> {
        if labels.len() != width * height {
            return Err(Error::Argument(format!(
                "label map length {} does not match {width}x{height}",
                labels.len()
            )));
        }
        let count = match labels.iter().max() {
            Some(&m) => m as usize + 1,
            None => return Err(Error::Argument("empty label map".into())),
        };
        let mut used = vec![false; count];
        for &l in &labels {
            used[l as usize] = true;
        }
        if !used.iter().all(|&u| u) {
            return Err(Error::Argument("label ids are not dense".into()));
        }
        let centroids = compute_centroids(width, &labels, count);
        Ok(Self {
            width,
            height,
            labels,
            count,
            centroids,
        })
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    #[inline]
    pub fn label_at(&self, x: usize, y: usize) -> u32 {
        self.labels[y * self.width + x]
    }

    /// Number of superpixels.
    #[inline]
    pub fn count(&self) -> usize {
        self.count
    }

    /// Per-superpixel centroid (x, y) in pixel coordinates.
    #[inline]
    pub fn centroids(&self) -> &[(f64, f64)] {
        &self.centroids
    }
}

/// Arithmetic mean of member pixel coordinates per label.
pub fn compute_centroids(
    width: usize,
    labels: &[u32],
    count: usize,
) -> Vec<(f64, f64)> {
    let mut sx = vec![0.0f64; count];
    let mut sy = vec![0.0f64; count];
    let mut n = vec![0u64; count];
    for (i, &l) in labels.iter().enumerate() {
        let l = l as usize;
        sx[l] += (i % width) as f64;
        sy[l] += (i / width) as f64;
        n[l] += 1;
    }
    (0..count)
        .map(|l| (sx[l] / n[l] as f64, sy[l] / n[l] as f64))
        .collect()
}

struct Cluster {
    x: f64,
    y: f64,
    intensity: f64,
}

/// Over-segment a `[0, 1]` grayscale image into roughly `n_target` compact
/// superpixels.
///
/// The SLIC distance is `D^2 = dc^2 + (ds/S)^2 * delta^2` where `dc` is the
/// intensity difference scaled to 0-255 (so `compactness = 10` matches the
/// usual 8-bit convention), `ds` the Euclidean pixel distance, and
/// `S = sqrt(w*h/n_target)` the grid interval.
pub fn slic(image: &ScalarField, n_target: usize, compactness: f64) -> Result<SegmentationMap> {
    if n_target < 4 {
        return Err(Error::Argument(format!(
            "n_target must be at least 4, got {n_target}"
        )));
    }
    if compactness <= 0.0 {
        return Err(Error::Argument(format!(
            "compactness must be positive, got {compactness}"
        )));
    }
    let (w, h) = (image.width(), image.height());
    let spacing = ((w * h) as f64 / n_target as f64).sqrt();
    if (w as f64) < spacing || (h as f64) < spacing {
        return Err(Error::Argument(format!(
            "image {w}x{h} is smaller than one grid cell (S = {spacing:.1})"
        )));
    }

    let mut clusters = init_seeds(image, spacing);
    let n = w * h;
    let mut labels = vec![u32::MAX; n];
    let mut dist = vec![f64::INFINITY; n];
    let spatial_weight = (compactness / spacing) * (compactness / spacing);
    let reach = spacing.ceil() as usize;

    for _ in 0..SLIC_ITERATIONS {
        dist.fill(f64::INFINITY);
        for (k, c) in clusters.iter().enumerate() {
            let cx = c.x;
            let cy = c.y;
            let x0 = (cx as isize - reach as isize).max(0) as usize;
            let x1 = ((cx as isize + reach as isize) as usize).min(w - 1);
            let y0 = (cy as isize - reach as isize).max(0) as usize;
            let y1 = ((cy as isize + reach as isize) as usize).min(h - 1);
            let label = k as u32;
            for y in y0..=y1 {
                let dy = y as f64 - cy;
                let dy_sq = dy * dy * spatial_weight;
                let row = y * w;
                let vals = &image.values()[row + x0..=row + x1];
                let dists = &mut dist[row + x0..=row + x1];
                let labs = &mut labels[row + x0..=row + x1];
                let mut dx = x0 as f64 - cx;
                for ((v, di), l) in vals.iter().zip(dists.iter_mut()).zip(labs.iter_mut()) {
                    let dc = (v - c.intensity) * 255.0;
                    let d = dc * dc + dx * dx * spatial_weight + dy_sq;
                    // Strict < keeps the existing assignment on exact ties,
                    // and the lowest candidate label otherwise (clusters are
                    // scanned in increasing order).
                    if d < *di {
                        *di = d;
                        *l = label;
                    }
                    dx += 1.0;
                }
            }
        }
        // Recompute cluster means; empty clusters keep their position.
        let mut sx = vec![0.0f64; clusters.len()];
        let mut sy = vec![0.0f64; clusters.len()];
        let mut si = vec![0.0f64; clusters.len()];
        let mut cn = vec![0u64; clusters.len()];
        for (i, &l) in labels.iter().enumerate() {
            debug_assert_ne!(l, u32::MAX, "pixel left unassigned");
            let l = l as usize;
            sx[l] += (i % w) as f64;
            sy[l] += (i / w) as f64;
            si[l] += image.values()[i];
            cn[l] += 1;
        }
        for (k, c) in clusters.iter_mut().enumerate() {
            if cn[k] > 0 {
                let inv = 1.0 / cn[k] as f64;
                c.x = sx[k] * inv;
                c.y = sy[k] * inv;
                c.intensity = si[k] * inv;
            }
        }
    }

    let (labels, count) = enforce_connectivity(w, h, &labels);
    let centroids = compute_centroids(w, &labels, count);
    Ok(SegmentationMap {
        width: w,
        height: h,
        labels,
        count,
        centroids,
    })
}

/// Seeds on a regular grid, each moved to the strictly lowest-gradient pixel
/// in its 3x3 neighborhood to avoid seeding on an edge. The seed stays put on
/// gradient ties, which keeps constant images on the exact grid.
fn init_seeds(image: &ScalarField, spacing: f64) -> Vec<Cluster> {
    let (w, h) = (image.width(), image.height());
    let nx = ((w as f64 / spacing).round() as usize).max(1);
    let ny = ((h as f64 / spacing).round() as usize).max(1);
    let sx = w as f64 / nx as f64;
    let sy = h as f64 / ny as f64;
    let grad = |x: usize, y: usize| -> f64 {
        let xm = x.saturating_sub(1);
        let xp = (x + 1).min(w - 1);
        let ym = y.saturating_sub(1);
        let yp = (y + 1).min(h - 1);
        let gx = image.get(xp, y) - image.get(xm, y);
        let gy = image.get(x, yp) - image.get(x, ym);
        gx * gx + gy * gy
    };
    let mut clusters = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let mut x = (((i as f64 + 0.5) * sx).floor() as usize).min(w - 1);
            let mut y = (((j as f64 + 0.5) * sy).floor() as usize).min(h - 1);
            let mut best = grad(x, y);
            let (cx, cy) = (x, y);
            for ny_ in cy.saturating_sub(1)..=(cy + 1).min(h - 1) {
                for nx_ in cx.saturating_sub(1)..=(cx + 1).min(w - 1) {
                    let g = grad(nx_, ny_);
                    if g < best {
                        best = g;
                        x = nx_;
                        y = ny_;
                    }
                }
            }
            clusters.push(Cluster {
                x: x as f64,
                y: y as f64,
                intensity: image.get(x, y),
            });
        }
    }
    clusters
}

/// One 4-connected component of a single label.
struct Piece {
    label: u32,
    size: usize,
}

/// Merge every non-largest component of each label into the largest adjacent
/// superpixel, then compact label ids by row-major first occurrence.
fn enforce_connectivity(w: usize, h: usize, labels: &[u32]) -> (Vec<u32>, usize) {
    let n = w * h;
    // Flood-fill pieces in row-major discovery order.
    let mut piece_of = vec![usize::MAX; n];
    let mut pieces: Vec<Piece> = Vec::new();
    let mut stack = Vec::new();
    for start in 0..n {
        if piece_of[start] != usize::MAX {
            continue;
        }
        let label = labels[start];
        let id = pieces.len();
        let mut size = 0usize;
        piece_of[start] = id;
        stack.push(start);
        while let Some(i) = stack.pop() {
            size += 1;
            let x = i % w;
            let y = i / w;
            let mut visit = |j: usize| {
                if piece_of[j] == usize::MAX && labels[j] == label {
                    piece_of[j] = id;
                    stack.push(j);
                }
            };
            if x > 0 {
                visit(i - 1);
            }
            if x + 1 < w {
                visit(i + 1);
            }
            if y > 0 {
                visit(i - w);
            }
            if y + 1 < h {
                visit(i + w);
            }
        }
        pieces.push(Piece { label, size });
    }

    // Static piece adjacency from pixel 4-neighborhoods. Lists may hold
    // duplicates; every consumer below either sets or sort-dedups.
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); pieces.len()];
    for i in 0..n {
        let x = i % w;
        let a = piece_of[i];
        if x + 1 < w {
            let b = piece_of[i + 1];
            if a != b {
                adj[a].push(b);
                adj[b].push(a);
            }
        }
        if i + w < n {
            let b = piece_of[i + w];
            if a != b {
                adj[a].push(b);
                adj[b].push(a);
            }
        }
    }

    // Union-find over pieces; each root carries the component's current
    // label, size, and member pieces.
    let mut parent: Vec<usize> = (0..pieces.len()).collect();
    let mut comp_label: Vec<u32> = pieces.iter().map(|p| p.label).collect();
    let mut comp_size: Vec<usize> = pieces.iter().map(|p| p.size).collect();
    let mut comp_members: Vec<Vec<usize>> = (0..pieces.len()).map(|i| vec![i]).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    let label_count = pieces.iter().map(|p| p.label).max().unwrap_or(0) as usize + 1;
    let mut label_total = vec![0usize; label_count];
    for p in &pieces {
        label_total[p.label as usize] += p.size;
    }
    // The designated keeper piece of each label: its largest piece, ties to
    // the earliest discovery.
    let mut keeper_piece = vec![usize::MAX; label_count];
    for (i, p) in pieces.iter().enumerate() {
        let k = keeper_piece[p.label as usize];
        if k == usize::MAX || pieces[i].size > pieces[k].size {
            keeper_piece[p.label as usize] = i;
        }
    }

    // Every non-keeper piece is an orphan; repeatedly merge orphans into
    // the largest adjacent label until each component contains a keeper.
    // Each merge performs at least one union, so the queue drains.
    let mut queue: std::collections::VecDeque<usize> = (0..pieces.len())
        .filter(|&i| keeper_piece[pieces[i].label as usize] != i)
        .collect();
    while let Some(entry) = queue.pop_front() {
        let root = find(&mut parent, entry);
        if root != entry {
            continue; // Stale entry; the component is tracked elsewhere.
        }
        let own_label = comp_label[root];
        if find(&mut parent, keeper_piece[own_label as usize]) == root {
            continue; // Reached its label's keeper; connected.
        }
        // Neighboring labels of this component.
        let mut candidates: BTreeSet<u32> = BTreeSet::new();
        let mut neighbor_roots: Vec<usize> = Vec::new();
        for &m in &comp_members[root] {
            for &a in &adj[m] {
                let r = find(&mut parent, a);
                if r != root && comp_label[r] != own_label {
                    candidates.insert(comp_label[r]);
                    neighbor_roots.push(r);
                }
            }
        }
        let Some(&target) = candidates.iter().max_by(|&&a, &&b| {
            label_total[a as usize]
                .cmp(&label_total[b as usize])
                .then(b.cmp(&a))
        }) else {
            // A maximal component is always adjacent to some other label.
            debug_assert!(false, "orphan component with no foreign neighbor");
            continue;
        };
        // Relabel and union with adjacent components of the target label;
        // merging along adjacency edges keeps the result connected.
        label_total[own_label as usize] -= comp_size[root];
        label_total[target as usize] += comp_size[root];
        comp_label[root] = target;
        neighbor_roots.sort_unstable();
        neighbor_roots.dedup();
        let mut base = root;
        for r in neighbor_roots {
            let r = find(&mut parent, r);
            if r != base && comp_label[r] == target {
                parent[r] = base;
                comp_size[base] += comp_size[r];
                let members = std::mem::take(&mut comp_members[r]);
                comp_members[base].extend(members);
            }
        }
        // Still detached from the target label's keeper? Go around again.
        if find(&mut parent, keeper_piece[target as usize]) != base {
            queue.push_back(base);
        }
    }

    // Compact final labels by first occurrence in row-major order.
    let mut final_of_root: std::collections::HashMap<usize, u32> = Default::default();
    let mut out = vec![0u32; n];
    let mut next = 0u32;
    for i in 0..n {
        let root = find(&mut parent, piece_of[i]);
        let l = *final_of_root.entry(root).or_insert_with(|| {
            let l = next;
            next += 1;
            l
        });
        out[i] = l;
    }
    (out, next as usize)
}
