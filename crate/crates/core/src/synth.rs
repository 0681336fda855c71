//! Synthetic dashcam-like flow sequences with planted anomalies.
//!
//! Scenes consist of a global background flow (the apparent ego-motion of
//! the scene) with i.i.d. Gaussian pixel noise, plus moving regions whose
//! flow differs from the background. Overtaking-style scenes use a fast
//! region whose apparent motion opposes the background stream, crossing
//! scenes use orthogonal motion of comparable speed, and pedestrian-style
//! scenes use a small slow orthogonal region. Ground-truth masks mark the
//! anomaly pixels from each region's onset frame.

use std::fmt::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::flow::FlowField;
use crate::io::{flo::write_flo, pgm::write_pgm_mask};

/// Earliest allowed anomaly onset: after the ten training frames.
pub const MIN_ONSET: usize = 11;

#[derive(Debug, Clone, PartialEq)]
pub enum Region {
    Rect { x: f64, y: f64, w: f64, h: f64 },
    Ellipse { cx: f64, cy: f64, rx: f64, ry: f64 },
}

impl Region {
    /// Axis-aligned bounds (x0, y0, x1, y1) at a given offset.
    fn bounds(&self, offset: (f64, f64)) -> (f64, f64, f64, f64) {
        match *self {
            Region::Rect { x, y, w, h } => {
                (x + offset.0, y + offset.1, x + w + offset.0, y + h + offset.1)
            }
            Region::Ellipse { cx, cy, rx, ry } => (
                cx - rx + offset.0,
                cy - ry + offset.1,
                cx + rx + offset.0,
                cy + ry + offset.1,
            ),
        }
    }

    fn contains(&self, px: f64, py: f64, offset: (f64, f64)) -> bool {
        match *self {
            Region::Rect { x, y, w, h } => {
                let (x0, y0) = (x + offset.0, y + offset.1);
                px >= x0 && px < x0 + w && py >= y0 && py < y0 + h
            }
            Region::Ellipse { cx, cy, rx, ry } => {
                let dx = (px - cx - offset.0) / rx;
                let dy = (py - cy - offset.1) / ry;
                dx * dx + dy * dy <= 1.0
            }
        }
    }
}

/// One planted anomaly: a region that appears at `onset` and then moves by
/// its own flow each frame.
#[derive(Debug, Clone, PartialEq)]
pub struct AnomalySpec {
    pub region: Region,
    /// Flow (u, v) assigned to the region's pixels, one entry per frame.
    pub flow: Vec<(f64, f64)>,
    /// 1-based frame index where the anomaly appears; at least [`MIN_ONSET`].
    pub onset: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SceneSpec {
    pub name: String,
    pub category: String,
    pub width: usize,
    pub height: usize,
    pub frames: usize,
    /// Background (ego-induced) flow per frame.
    pub ego: Vec<(f64, f64)>,
    /// Standard deviation of the i.i.d. per-pixel flow noise.
    pub noise_sigma: f64,
    pub anomalies: Vec<AnomalySpec>,
    pub seed: u64,
}

impl SceneSpec {
    pub fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 || self.frames == 0 {
            return Err(Error::Argument("scene dimensions and frame count must be positive".into()));
        }
        if self.ego.len() != self.frames {
            return Err(Error::Argument(format!(
                "ego flow has {} entries for {} frames",
                self.ego.len(),
                self.frames
            )));
        }
        if !(self.noise_sigma.is_finite() && self.noise_sigma >= 0.0) {
            return Err(Error::Argument("noise_sigma must be finite and non-negative".into()));
        }
        for (i, a) in self.anomalies.iter().enumerate() {
            if a.onset < MIN_ONSET {
                return Err(Error::Argument(format!(
                    "anomaly {i} onset {} before the training frames end (minimum {MIN_ONSET})",
                    a.onset
                )));
            }
            if a.onset > self.frames {
                return Err(Error::Argument(format!(
                    "anomaly {i} onset {} exceeds frame count {}",
                    a.onset, self.frames
                )));
            }
            if a.flow.len() != self.frames {
                return Err(Error::Argument(format!(
                    "anomaly {i} flow has {} entries for {} frames",
                    a.flow.len(),
                    self.frames
                )));
            }
            // The region must stay in bounds over its whole active life.
            let mut offset = (0.0, 0.0);
            for t in a.onset..=self.frames {
                let (x0, y0, x1, y1) = a.region.bounds(offset);
                if x0 < 0.0 || y0 < 0.0 || x1 > self.width as f64 || y1 > self.height as f64 {
                    return Err(Error::Argument(format!(
                        "anomaly {i} leaves the frame at t={t} (bounds {x0:.1},{y0:.1}..{x1:.1},{y1:.1})"
                    )));
                }
                let (fu, fv) = a.flow[t - 1];
                offset.0 += fu;
                offset.1 += fv;
            }
        }
        Ok(())
    }

    /// Serialize as a `key = value` text file.
    pub fn describe(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "name = {}", self.name);
        let _ = writeln!(out, "category = {}", self.category);
        let _ = writeln!(out, "width = {}", self.width);
        let _ = writeln!(out, "height = {}", self.height);
        let _ = writeln!(out, "frames = {}", self.frames);
        let _ = writeln!(out, "noise_sigma = {}", self.noise_sigma);
        let _ = writeln!(out, "seed = {}", self.seed);
        let _ = writeln!(out, "anomalies = {}", self.anomalies.len());
        for (i, a) in self.anomalies.iter().enumerate() {
            let _ = writeln!(out, "anomaly_{i}_onset = {}", a.onset);
            let (u, v) = a.flow[a.onset - 1];
            let _ = writeln!(out, "anomaly_{i}_flow_at_onset = {u} {v}");
        }
        out
    }
}

/// Constant per-frame flow program.
pub fn constant_flow(frames: usize, uv: (f64, f64)) -> Vec<(f64, f64)> {
    vec![uv; frames]
}

/// Streaming frame generator; frames are produced in order from one seeded
/// RNG, so two iterators over the same spec yield bit-identical output.
pub struct SceneFrames {
    spec: SceneSpec,
    rng: ChaCha8Rng,
    next_frame: usize,
    offsets: Vec<(f64, f64)>,
}

impl SceneFrames {
    pub fn spec(&self) -> &SceneSpec {
        &self.spec
    }
}

/// One standard normal sample via Box-Muller, kept local so generation is
/// reproducible regardless of RNG-crate distribution changes.
#[inline]
fn normal_pair(rng: &mut ChaCha8Rng) -> (f64, f64) {
    let mut u1: f64 = rng.gen();
    if u1 < 1e-300 {
        u1 = 1e-300;
    }
    let r = (-2.0 * u1.ln()).sqrt();
    let theta = 2.0 * std::f64::consts::PI * rng.gen::<f64>();
    (r * theta.cos(), r * theta.sin())
}

impl Iterator for SceneFrames {
    type Item = (FlowField, Vec<bool>);

    fn next(&mut self) -> Option<Self::Item> {
        if self.next_frame > self.spec.frames {
            return None;
        }
        let t = self.next_frame;
        self.next_frame += 1;
        let (w, h) = (self.spec.width, self.spec.height);
        let n = w * h;
        let (eu, ev) = self.spec.ego[t - 1];
        let sigma = self.spec.noise_sigma;
        let mut u = Vec::with_capacity(n);
        let mut v = Vec::with_capacity(n);
        for _ in 0..n {
            let (nu, nv) = normal_pair(&mut self.rng);
            u.push(eu + sigma * nu);
            v.push(ev + sigma * nv);
        }
        let mut mask = vec![false; n];
        for (a, offset) in self.spec.anomalies.iter().zip(self.offsets.iter_mut()) {
            if t >= a.onset {
                let (au, av) = a.flow[t - 1];
                let (x0, y0, x1, y1) = a.region.bounds(*offset);
                let px0 = x0.floor().max(0.0) as usize;
                let py0 = y0.floor().max(0.0) as usize;
                let px1 = (x1.ceil() as usize).min(w);
                let py1 = (y1.ceil() as usize).min(h);
                for py in py0..py1 {
                    for px in px0..px1 {
                        if a.region.contains(px as f64, py as f64, *offset) {
                            let i = py * w + px;
                            // Keep the pixel's noise sample, swap the mean.
                            u[i] = u[i] - eu + au;
                            v[i] = v[i] - ev + av;
                            mask[i] = true;
                        }
                    }
                }
                offset.0 += au;
                offset.1 += av;
            }
        }
        let flow = FlowField::new(w, h, u, v).expect("generated flow is finite");
        Some((flow, mask))
    }
}

/// Generate the scene's flow-field and truth-mask sequence.
pub fn generate(spec: &SceneSpec) -> Result<SceneFrames> {
    spec.validate()?;
    Ok(SceneFrames {
        rng: ChaCha8Rng::seed_from_u64(spec.seed),
        next_frame: 1,
        offsets: vec![(0.0, 0.0); spec.anomalies.len()],
        spec: spec.clone(),
    })
}

/// Write a scene as `.flo` frames plus `masks/*.pgm` and a `scene.txt`
/// description, in the layout the CLI consumes.
pub fn write_scene(spec: &SceneSpec, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mask_dir = dir.join("masks");
    std::fs::create_dir_all(&mask_dir).map_err(|e| Error::io(&mask_dir, e))?;
    for (i, (flow, mask)) in generate(spec)?.enumerate() {
        let stem = format!("{:06}", i + 1);
        write_flo(&dir.join(format!("{stem}.flo")), &flow)?;
        write_pgm_mask(
            &mask_dir.join(format!("{stem}.pgm")),
            spec.width,
            spec.height,
            &mask,
        )?;
    }
    let desc = dir.join("scene.txt");
    std::fs::write(&desc, spec.describe()).map_err(|e| Error::io(&desc, e))
}

const SUITE_FRAMES: usize = 180;
const SUITE_W: usize = 640;
const SUITE_H: usize = 480;
const SUITE_NOISE: f64 = 0.5;

fn scene(
    name: &str,
    category: &str,
    ego: Vec<(f64, f64)>,
    anomalies: Vec<AnomalySpec>,
    seed: u64,
) -> SceneSpec {
    SceneSpec {
        name: name.into(),
        category: category.into(),
        width: SUITE_W,
        height: SUITE_H,
        frames: SUITE_FRAMES,
        ego,
        noise_sigma: SUITE_NOISE,
        anomalies,
        seed,
    }
}

/// The nine-scene standard suite: three overtaking-style scenes (fast region
/// running against the background stream at 2-3x the ego magnitude), four
/// crossing-style scenes (orthogonal motion of comparable magnitude), and
/// two pedestrian-style scenes (small slow orthogonal region). Two scenes
/// carry time-varying ego speed.
pub fn standard_suite() -> Vec<SceneSpec> {
    let f = SUITE_FRAMES;
    let mut suite = Vec::new();

    // vt1: constant diagonal ego; anomaly opposes the stream at 2.4x.
    let ego = constant_flow(f, (2.3, 2.3));
    suite.push(scene(
        "vt1",
        "VT",
        ego.clone(),
        vec![AnomalySpec {
            region: Region::Rect { x: 500.0, y: 380.0, w: 110.0, h: 85.0 },
            flow: ego.iter().map(|&(u, v)| (-2.4 * u, -2.4 * v)).collect(),
            onset: 115,
        }],
        1001,
    ));

    // vt2: ego speed ramps up 2.5 -> 5.5; anomaly tracks -2.2x throughout.
    let dir = (0.45f64, 0.89f64);
    let ego: Vec<(f64, f64)> = (0..f)
        .map(|t| {
            let speed = 2.5 + 3.0 * t as f64 / (f - 1) as f64;
            (dir.0 * speed, dir.1 * speed)
        })
        .collect();
    suite.push(scene(
        "vt2",
        "VT",
        ego.clone(),
        vec![AnomalySpec {
            region: Region::Rect { x: 430.0, y: 395.0, w: 110.0, h: 80.0 },
            flow: ego.iter().map(|&(u, v)| (-2.2 * u, -2.2 * v)).collect(),
            onset: 144,
        }],
        1002,
    ));

    // vt3: vertical ego; elliptical overtaker at exactly 2x.
    let ego = constant_flow(f, (0.0, 3.6));
    suite.push(scene(
        "vt3",
        "VT",
        ego.clone(),
        vec![AnomalySpec {
            region: Region::Ellipse { cx: 320.0, cy: 400.0, rx: 60.0, ry: 48.0 },
            flow: constant_flow(f, (0.0, -7.2)),
            onset: 132,
        }],
        1003,
    ));

    // vc1: orthogonal crossing at 0.83x the ego magnitude.
    suite.push(scene(
        "vc1",
        "VC",
        constant_flow(f, (0.0, 4.0)),
        vec![AnomalySpec {
            region: Region::Rect { x: 40.0, y: 170.0, w: 120.0, h: 80.0 },
            flow: constant_flow(f, (3.3, 0.0)),
            onset: 40,
        }],
        1004,
    ));

    // vc2: tilted ego, crossing region runs down-left.
    suite.push(scene(
        "vc2",
        "VC",
        constant_flow(f, (-1.1, 3.9)),
        vec![AnomalySpec {
            region: Region::Rect { x: 460.0, y: 150.0, w: 130.0, h: 85.0 },
            flow: constant_flow(f, (-3.55, -1.0)),
            onset: 55,
        }],
        1005,
    ));

    // vc3: tilted ego, elliptically-bounded rectangle crossing left.
    suite.push(scene(
        "vc3",
        "VC",
        constant_flow(f, (1.2, 4.3)),
        vec![AnomalySpec {
            region: Region::Rect { x: 505.0, y: 95.0, w: 115.0, h: 95.0 },
            flow: constant_flow(f, (-3.86, 1.08)),
            onset: 50,
        }],
        1006,
    ));

    // vc4: sinusoidally varying ego speed, constant crossing anomaly.
    let ego: Vec<(f64, f64)> = (0..f)
        .map(|t| {
            let speed = 4.5 + 1.5 * (2.0 * std::f64::consts::PI * t as f64 / 90.0).sin();
            (0.0, speed)
        })
        .collect();
    suite.push(scene(
        "vc4",
        "VC",
        ego,
        vec![AnomalySpec {
            region: Region::Rect { x: 55.0, y: 280.0, w: 125.0, h: 90.0 },
            flow: constant_flow(f, (3.9, 0.0)),
            onset: 65,
        }],
        1007,
    ));

    // pc1: small slow crossing region present almost from the start.
    suite.push(scene(
        "pc1",
        "PC",
        constant_flow(f, (0.0, 4.1)),
        vec![AnomalySpec {
            region: Region::Rect { x: 270.0, y: 200.0, w: 70.0, h: 55.0 },
            flow: constant_flow(f, (1.3, 0.0)),
            onset: 12,
        }],
        1008,
    ));

    // pc2: small slow ellipse drifting against the tilt.
    suite.push(scene(
        "pc2",
        "PC",
        constant_flow(f, (0.9, 3.8)),
        vec![AnomalySpec {
            region: Region::Ellipse { cx: 520.0, cy: 255.0, rx: 38.0, ry: 30.0 },
            flow: constant_flow(f, (-1.56, 0.37)),
            onset: 20,
        }],
        1009,
    ));

    suite
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_scene(noise: f64, anomalies: Vec<AnomalySpec>) -> SceneSpec {
        SceneSpec {
            name: "test".into(),
            category: "T".into(),
            width: 32,
            height: 24,
            frames: 15,
            ego: constant_flow(15, (1.0, 2.0)),
            noise_sigma: noise,
            anomalies,
            seed: 42,
        }
    }

    #[test]
    fn zero_noise_no_anomaly_is_exactly_ego() {
        let spec = small_scene(0.0, vec![]);
        for (flow, mask) in generate(&spec).unwrap() {
            assert!(flow.u().iter().all(|&c| c == 1.0));
            assert!(flow.v().iter().all(|&c| c == 2.0));
            assert!(mask.iter().all(|&m| !m));
        }
    }

    #[test]
    fn rect_mask_area_is_exact_each_post_onset_frame() {
        let spec = small_scene(
            0.3,
            vec![AnomalySpec {
                region: Region::Rect { x: 4.0, y: 5.0, w: 7.0, h: 6.0 },
                flow: constant_flow(15, (0.6, 0.2)),
                onset: 12,
            }],
        );
        for (t, (_, mask)) in generate(&spec).unwrap().enumerate() {
            let frame = t + 1;
            let area = mask.iter().filter(|&&m| m).count();
            if frame >= 12 {
                assert_eq!(area, 42, "frame {frame}");
            } else {
                assert_eq!(area, 0, "frame {frame}");
            }
        }
    }

    #[test]
    fn anomaly_pixels_carry_anomaly_flow() {
        let spec = small_scene(
            0.0,
            vec![AnomalySpec {
                region: Region::Rect { x: 20.0, y: 8.0, w: 5.0, h: 5.0 },
                flow: constant_flow(15, (-3.0, 0.5)),
                onset: 11,
            }],
        );
        let (flow, mask) = generate(&spec).unwrap().nth(11).unwrap();
        for (i, &m) in mask.iter().enumerate() {
            if m {
                assert_eq!(flow.u()[i], -3.0);
                assert_eq!(flow.v()[i], 0.5);
            } else {
                assert_eq!(flow.u()[i], 1.0);
            }
        }
    }

    #[test]
    fn fixed_seed_is_bit_identical() {
        let spec = small_scene(0.7, vec![]);
        let a: Vec<_> = generate(&spec).unwrap().collect();
        let b: Vec<_> = generate(&spec).unwrap().collect();
        assert_eq!(a.len(), b.len());
        for ((fa, ma), (fb, mb)) in a.iter().zip(&b) {
            assert_eq!(fa, fb);
            assert_eq!(ma, mb);
        }
    }

    #[test]
    fn validation_rejects_early_onset_and_escapes() {
        let early = small_scene(
            0.0,
            vec![AnomalySpec {
                region: Region::Rect { x: 1.0, y: 1.0, w: 2.0, h: 2.0 },
                flow: constant_flow(15, (0.0, 0.0)),
                onset: 5,
            }],
        );
        assert!(matches!(generate(&early), Err(Error::Argument(_))));

        let escapes = small_scene(
            0.0,
            vec![AnomalySpec {
                region: Region::Rect { x: 20.0, y: 8.0, w: 5.0, h: 5.0 },
                flow: constant_flow(15, (30.0, 0.0)),
                onset: 12,
            }],
        );
        assert!(matches!(generate(&escapes), Err(Error::Argument(_))));
    }

    #[test]
    fn suite_shape_and_invariants() {
        let suite = standard_suite();
        assert_eq!(suite.len(), 9);
        assert_eq!(suite.iter().filter(|s| s.category == "VT").count(), 3);
        assert_eq!(suite.iter().filter(|s| s.category == "VC").count(), 4);
        assert_eq!(suite.iter().filter(|s| s.category == "PC").count(), 2);
        for s in &suite {
            s.validate().unwrap();
            assert_eq!(s.frames, 180);
            assert_eq!((s.width, s.height), (640, 480));
            assert!(!s.anomalies.is_empty());
            for a in &s.anomalies {
                assert!(a.onset >= MIN_ONSET);
            }
        }
        // Overtaking scenes keep the stated magnitude ratio in [2, 3].
        for s in suite.iter().filter(|s| s.category == "VT") {
            for a in &s.anomalies {
                for t in (a.onset - 1)..s.frames {
                    let (eu, ev) = s.ego[t];
                    let (au, av) = a.flow[t];
                    let ratio = (au * au + av * av).sqrt() / (eu * eu + ev * ev).sqrt();
                    assert!(
                        (2.0..=3.0).contains(&ratio),
                        "{}: ratio {ratio} at t={t}",
                        s.name
                    );
                }
            }
        }
        // Masks appear exactly from onset (checked on one representative).
        let spec = &suite[3];
        let onset = spec.anomalies[0].onset;
        for (i, (_, mask)) in generate(spec).unwrap().enumerate().take(onset + 3) {
            let any = mask.iter().any(|&m| m);
            assert_eq!(any, i + 1 >= onset);
        }
    }

    #[test]
    fn written_scene_roundtrips() {
        let spec = small_scene(
            0.2,
            vec![AnomalySpec {
                region: Region::Ellipse { cx: 16.0, cy: 12.0, rx: 4.0, ry: 3.0 },
                flow: constant_flow(15, (0.1, -0.1)),
                onset: 13,
            }],
        );
        let dir = tempfile::tempdir().unwrap();
        write_scene(&spec, dir.path()).unwrap();
        let flo = crate::io::flo::read_flo(&dir.path().join("000003.flo")).unwrap();
        assert_eq!((flo.width(), flo.height()), (32, 24));
        let (w, h, mask) = crate::io::pgm::read_pgm_mask(&dir.path().join("masks/000013.pgm")).unwrap();
        assert_eq!((w, h), (32, 24));
        assert!(mask.iter().any(|&m| m));
        assert!(dir.path().join("scene.txt").exists());
        let direct: Vec<_> = generate(&spec).unwrap().collect();
        // On-disk flow survives the f32 round-trip close to the original.
        for (i, &c) in flo.u().iter().enumerate() {
            assert!((c - direct[2].0.u()[i]).abs() < 1e-6);
        }
    }
}
