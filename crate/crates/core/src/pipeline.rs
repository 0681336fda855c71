//! Per-sequence orchestration: training, scoring, fusion, dictionary
//! updates, exports and metrics.
//!
//! Frames are processed strictly in order because the dictionaries evolve
//! over the sequence; within a frame the orientation and magnitude paths
//! (grayscale conversion, segmentation, feature extraction, scoring) run in
//! parallel and join at fusion. Dictionary updates happen between frames
//! under exclusive access.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::config::{FlowSource, PipelineConfig};
use crate::descriptor::{extract_features, MotionFeature};
use crate::dictionary::{learn_dictionary, update, Dictionary, UpdateBuffer};
use crate::error::{Error, Result};
use crate::eval::{RocAccumulator, RocCurve};
use crate::field::{to_gray, FieldKind, ScalarField};
use crate::flow::{horn_schunck, split_fields, FlowField};
use crate::fusion::fuse;
use crate::io::{flo, overlay, pgm};
use crate::reconstruct::{magnitude_anomaly, normalize_map, orientation_anomaly, AnomalyMap};
use crate::superpixel::{slic, SegmentationMap};

/// Everything produced for one scored frame, handed to the sink before the
/// next frame starts.
pub struct FrameOutput {
    /// 1-based frame index within the sequence.
    pub frame: usize,
    pub orientation: AnomalyMap,
    pub magnitude: AnomalyMap,
    pub fused: ScalarField,
    pub orientation_features: Vec<MotionFeature>,
    pub magnitude_features: Vec<MotionFeature>,
    pub orientation_seg: SegmentationMap,
    pub magnitude_seg: SegmentationMap,
}

/// Receives scored frames as they are produced.
pub trait FrameSink {
    fn frame(&mut self, out: &FrameOutput) -> Result<()>;
}

/// Discards all frame output; used when only the report matters.
pub struct NullSink;

impl FrameSink for NullSink {
    fn frame(&mut self, _out: &FrameOutput) -> Result<()> {
        Ok(())
    }
}

/// Pixel-wise AUCs of the two single-clue maps and the two fusions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SequenceMetrics {
    pub auc_orientation: f64,
    pub auc_magnitude: f64,
    /// Inner-product fusion baseline.
    pub auc_product: f64,
    /// Bayesian fusion.
    pub auc_bayes: f64,
}

#[derive(Debug)]
pub struct SequenceReport {
    pub frames_total: usize,
    pub frames_scored: usize,
    /// Mean fused-map value per scored frame.
    pub fused_frame_means: Vec<f64>,
    pub metrics: Option<SequenceMetrics>,
    /// ROC curve of the Bayesian-fused map, when masks were provided.
    pub bayes_roc: Option<RocCurve>,
    pub elapsed: Duration,
    pub mean_seconds_per_frame: f64,
}

/// Dictionary and update buffer for one motion channel.
struct PathState {
    dict: Option<Dictionary>,
    buffer: UpdateBuffer,
    training_pool: Vec<MotionFeature>,
}

/// Sequential pipeline state across the frames of one sequence.
pub struct PipelineState {
    orientation: PathState,
    magnitude: PathState,
    frames_seen: usize,
}

impl PipelineState {
    pub fn new(config: &PipelineConfig) -> Self {
        Self {
            orientation: PathState {
                dict: None,
                buffer: UpdateBuffer::new(config.update_period),
                training_pool: Vec::new(),
            },
            magnitude: PathState {
                dict: None,
                buffer: UpdateBuffer::new(config.update_period),
                training_pool: Vec::new(),
            },
            frames_seen: 0,
        }
    }

    pub fn orientation_dictionary(&self) -> Option<&Dictionary> {
        self.orientation.dict.as_ref()
    }

    pub fn magnitude_dictionary(&self) -> Option<&Dictionary> {
        self.magnitude.dict.as_ref()
    }
}

/// Segmentation and features of one field for one frame.
struct PathFrame {
    seg: SegmentationMap,
    features: Vec<MotionFeature>,
}

fn analyze_path(
    field: ScalarField,
    kind: FieldKind,
    config: &PipelineConfig,
    frame: usize,
) -> Result<PathFrame> {
    let gray = to_gray(&field, kind, config.v_max)?;
    let seg = slic(&gray, config.n_superpixels, config.compactness)?;
    let features = extract_features(
        &field,
        &seg,
        kind,
        config.v_max,
        config.histogram_bins,
        frame,
    )?;
    Ok(PathFrame { seg, features })
}

/// Raw anomaly score per superpixel for one path.
fn score_path(
    path: &PathFrame,
    dict: &Dictionary,
    config: &PipelineConfig,
    diagonal: f64,
) -> Result<Vec<f64>> {
    match dict.field_kind() {
        FieldKind::Orientation => path
            .features
            .par_iter()
            .map(|f| orientation_anomaly(f, dict, config.lambda2, config.spatial_near))
            .collect(),
        FieldKind::Magnitude => path
            .features
            .par_iter()
            .map(|f| magnitude_anomaly(f, dict, config.spatial_near, diagonal))
            .collect(),
    }
}

/// Push gate-passing features into the update buffer and relearn the
/// dictionary when the period elapses.
fn absorb_and_update(
    state: &mut PathState,
    features: &[MotionFeature],
    map: &AnomalyMap,
    config: &PipelineConfig,
) -> Result<()> {
    for (f, &score) in features.iter().zip(map.normalized_scores()) {
        if score < config.buffer_gate {
            state.buffer.push(f.clone());
        }
    }
    if state.buffer.record_frame() {
        let dict = state.dict.as_ref().expect("dictionary exists after training");
        let (next, _outcome) = update(
            dict,
            &mut state.buffer,
            config.lambda1,
            config.dictionary_size,
            config.solver_tol,
            config.solver_max_iter,
        )?;
        state.dict = Some(next);
    }
    Ok(())
}

/// Run the pipeline over a stream of flow fields with optional truth masks.
///
/// The first `training_frames` fields build the initial dictionaries;
/// subsequent fields are scored, fused and handed to the sink. A stream
/// shorter than the training phase is a configuration error. Masks must be
/// supplied for either every frame or none.
pub fn run_stream<I>(
    frames: I,
    config: &PipelineConfig,
    sink: &mut dyn FrameSink,
) -> Result<SequenceReport>
where
    I: IntoIterator<Item = Result<(FlowField, Option<Vec<bool>>)>>,
{
    let mut state = PipelineState::new(config);
    run_stream_with_state(frames, config, sink, &mut state)
}

/// [`run_stream`] with caller-owned state, so the final dictionaries remain
/// inspectable (and exportable) after the run.
pub fn run_stream_with_state<I>(
    frames: I,
    config: &PipelineConfig,
    sink: &mut dyn FrameSink,
    state: &mut PipelineState,
) -> Result<SequenceReport>
where
    I: IntoIterator<Item = Result<(FlowField, Option<Vec<bool>>)>>,
{
    config.validate()?;
    let start = Instant::now();
    let mut dims: Option<(usize, usize)> = None;
    let mut masks_expected: Option<bool> = None;

    let mut acc_orientation = RocAccumulator::new();
    let mut acc_magnitude = RocAccumulator::new();
    let mut acc_product = RocAccumulator::new();
    let mut acc_bayes = RocAccumulator::new();
    let mut fused_frame_means = Vec::new();
    let mut frames_scored = 0usize;

    for item in frames {
        let (flow, mask) = item?;
        state.frames_seen += 1;
        let frame = state.frames_seen;

        if !flow.meets_pipeline_minimum() {
            return Err(Error::Argument(format!(
                "frame {frame}: {}x{} below the {}x{} pipeline minimum",
                flow.width(),
                flow.height(),
                crate::flow::MIN_PIPELINE_DIM,
                crate::flow::MIN_PIPELINE_DIM
            )));
        }
        match dims {
            None => dims = Some((flow.width(), flow.height())),
            Some((w, h)) => {
                if flow.width() != w || flow.height() != h {
                    return Err(Error::Argument(format!(
                        "frame {frame}: dimensions {}x{} differ from sequence {w}x{h}",
                        flow.width(),
                        flow.height()
                    )));
                }
            }
        }
        match masks_expected {
            None => masks_expected = Some(mask.is_some()),
            Some(expected) => {
                if mask.is_some() != expected {
                    return Err(Error::Argument(format!(
                        "frame {frame}: masks must be provided for every frame or none"
                    )));
                }
            }
        }
        if let Some(m) = &mask {
            if m.len() != flow.width() * flow.height() {
                return Err(Error::Argument(format!(
                    "frame {frame}: mask has {} pixels for a {}x{} frame",
                    m.len(),
                    flow.width(),
                    flow.height()
                )));
            }
        }

        let (w, h) = dims.unwrap();
        let diagonal = ((w * w + h * h) as f64).sqrt();
        let (orient_field, mag_field) = split_fields(&flow);
        let (orient_res, mag_res) = rayon::join(
            || analyze_path(orient_field, FieldKind::Orientation, config, frame),
            || analyze_path(mag_field, FieldKind::Magnitude, config, frame),
        );
        let orient = orient_res?;
        let mag = mag_res?;

        if frame <= config.training_frames {
            state.orientation.training_pool.extend(orient.features);
            state.magnitude.training_pool.extend(mag.features);
            if frame == config.training_frames {
                let (od, md) = rayon::join(
                    || {
                        learn_dictionary(
                            &state.orientation.training_pool,
                            config.lambda1,
                            config.dictionary_size,
                            config.solver_tol,
                            config.solver_max_iter,
                            FieldKind::Orientation,
                        )
                    },
                    || {
                        learn_dictionary(
                            &state.magnitude.training_pool,
                            config.lambda1,
                            config.dictionary_size,
                            config.solver_tol,
                            config.solver_max_iter,
                            FieldKind::Magnitude,
                        )
                    },
                );
                let (od, _) = od?;
                let (md, _) = md?;
                if od.is_empty() || md.is_empty() {
                    return Err(Error::State(
                        "training produced an empty dictionary".into(),
                    ));
                }
                state.orientation.dict = Some(od);
                state.magnitude.dict = Some(md);
                state.orientation.training_pool.clear();
                state.magnitude.training_pool.clear();
            }
            continue;
        }

        let odict = state.orientation.dict.as_ref().ok_or_else(|| {
            Error::State("scoring before the training phase completed".into())
        })?;
        let mdict = state.magnitude.dict.as_ref().unwrap();
        let (o_scores, m_scores) = rayon::join(
            || score_path(&orient, odict, config, diagonal),
            || score_path(&mag, mdict, config, diagonal),
        );
        let o_map = normalize_map(&o_scores?, &orient.seg)?;
        let m_map = normalize_map(&m_scores?, &mag.seg)?;
        let fused = fuse(o_map.map(), m_map.map(), config.fusion_bins)?;

        if let Some(mask) = &mask {
            acc_orientation.add_frame(o_map.map(), mask)?;
            acc_magnitude.add_frame(m_map.map(), mask)?;
            let product_values: Vec<f64> = o_map
                .map()
                .values()
                .iter()
                .zip(m_map.map().values())
                .map(|(&a, &b)| a * b)
                .collect();
            let product = ScalarField::new(w, h, product_values)?;
            acc_product.add_frame(&product, mask)?;
            acc_bayes.add_frame(&fused, mask)?;
        }
        fused_frame_means.push(fused.mean());
        frames_scored += 1;

        let output = FrameOutput {
            frame,
            fused,
            orientation: o_map,
            magnitude: m_map,
            orientation_features: orient.features,
            magnitude_features: mag.features,
            orientation_seg: orient.seg,
            magnitude_seg: mag.seg,
        };
        sink.frame(&output)?;

        absorb_and_update(
            &mut state.orientation,
            &output.orientation_features,
            &output.orientation,
            config,
        )?;
        absorb_and_update(
            &mut state.magnitude,
            &output.magnitude_features,
            &output.magnitude,
            config,
        )?;
    }

    if state.frames_seen < config.training_frames {
        return Err(Error::Config(format!(
            "sequence has {} frames but training needs {}",
            state.frames_seen, config.training_frames
        )));
    }

    let (metrics, bayes_roc) = if masks_expected == Some(true) && frames_scored > 0 {
        let bayes = acc_bayes.finish()?;
        let metrics = SequenceMetrics {
            auc_orientation: acc_orientation.finish()?.auc,
            auc_magnitude: acc_magnitude.finish()?.auc,
            auc_product: acc_product.finish()?.auc,
            auc_bayes: bayes.auc,
        };
        (Some(metrics), Some(bayes))
    } else {
        (None, None)
    };

    let elapsed = start.elapsed();
    Ok(SequenceReport {
        frames_total: state.frames_seen,
        frames_scored,
        fused_frame_means,
        metrics,
        bayes_roc,
        elapsed,
        mean_seconds_per_frame: if state.frames_seen > 0 {
            elapsed.as_secs_f64() / state.frames_seen as f64
        } else {
            0.0
        },
    })
}

/// What `run_directory` writes besides the metrics files.
#[derive(Debug, Clone)]
pub struct RunOptions {
    /// Write the fused map of every scored frame as `fused_NNNNNN.pgm`.
    pub write_fused_maps: bool,
    /// Also write the per-field maps as `orientation_NNNNNN.pgm` /
    /// `magnitude_NNNNNN.pgm`.
    pub write_field_maps: bool,
    /// Per-frame CSV of raw and normalized superpixel scores.
    pub write_score_csv: bool,
    /// Per-frame CSV of motion features.
    pub write_feature_csv: bool,
    /// Superpixel label maps (16-bit PGM) and centroid CSVs.
    pub write_superpixel_debug: bool,
    /// Tint source-frame pixels whose fused value exceeds the threshold.
    pub overlay_threshold: Option<f64>,
    /// Dump the final dictionaries as CSV checkpoints.
    pub write_dictionaries: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            write_fused_maps: true,
            write_field_maps: false,
            write_score_csv: false,
            write_feature_csv: false,
            write_superpixel_debug: false,
            overlay_threshold: None,
            write_dictionaries: false,
        }
    }
}

struct DirSink<'a> {
    out_dir: &'a Path,
    options: &'a RunOptions,
    /// Source frame image per flow index, for overlays.
    images: Vec<PathBuf>,
}

impl DirSink<'_> {
    fn write_scores_csv(&self, out: &FrameOutput) -> Result<()> {
        let path = self.out_dir.join(format!("scores_{:06}.csv", out.frame));
        let mut text = String::from("field_kind,label,raw,normalized\n");
        for (kind, map) in [
            ("orientation", &out.orientation),
            ("magnitude", &out.magnitude),
        ] {
            for (label, (&raw, &norm)) in map
                .raw_scores()
                .iter()
                .zip(map.normalized_scores())
                .enumerate()
            {
                let _ = writeln!(text, "{kind},{label},{raw:.9},{norm:.9}");
            }
        }
        std::fs::write(&path, text).map_err(|e| Error::io(&path, e))
    }

    fn write_features_csv(&self, out: &FrameOutput) -> Result<()> {
        let path = self.out_dir.join(format!("features_{:06}.csv", out.frame));
        let bins = out
            .orientation_features
            .first()
            .map(|f| f.histogram.len())
            .unwrap_or(0);
        let mut text = String::from("frame,field_kind,label,cx,cy");
        for b in 0..bins {
            let _ = write!(text, ",h{b}");
        }
        text.push('\n');
        for features in [&out.orientation_features, &out.magnitude_features] {
            for (label, f) in features.iter().enumerate() {
                let _ = write!(
                    text,
                    "{},{},{label},{:.3},{:.3}",
                    out.frame,
                    f.field_kind.as_str(),
                    f.centroid.0,
                    f.centroid.1
                );
                for v in &f.histogram {
                    let _ = write!(text, ",{v:.9}");
                }
                text.push('\n');
            }
        }
        std::fs::write(&path, text).map_err(|e| Error::io(&path, e))
    }

    fn write_superpixel_debug(&self, out: &FrameOutput) -> Result<()> {
        for (kind, seg) in [
            ("orientation", &out.orientation_seg),
            ("magnitude", &out.magnitude_seg),
        ] {
            let labels_path = self
                .out_dir
                .join(format!("superpixels_{kind}_{:06}.pgm", out.frame));
            pgm::write_pgm_labels(&labels_path, seg.width(), seg.height(), seg.labels())?;
            let csv_path = self
                .out_dir
                .join(format!("centroids_{kind}_{:06}.csv", out.frame));
            let mut text = String::from("label,x,y\n");
            for (label, &(x, y)) in seg.centroids().iter().enumerate() {
                let _ = writeln!(text, "{label},{x:.3},{y:.3}");
            }
            std::fs::write(&csv_path, text).map_err(|e| Error::io(&csv_path, e))?;
        }
        Ok(())
    }
}

impl FrameSink for DirSink<'_> {
    fn frame(&mut self, out: &FrameOutput) -> Result<()> {
        if self.options.write_fused_maps {
            let path = self.out_dir.join(format!("fused_{:06}.pgm", out.frame));
            pgm::write_pgm_gray(&path, &out.fused)?;
        }
        if self.options.write_field_maps {
            let o = self.out_dir.join(format!("orientation_{:06}.pgm", out.frame));
            pgm::write_pgm_gray(&o, out.orientation.map())?;
            let m = self.out_dir.join(format!("magnitude_{:06}.pgm", out.frame));
            pgm::write_pgm_gray(&m, out.magnitude.map())?;
        }
        if self.options.write_score_csv {
            self.write_scores_csv(out)?;
        }
        if self.options.write_feature_csv {
            self.write_features_csv(out)?;
        }
        if self.options.write_superpixel_debug {
            self.write_superpixel_debug(out)?;
        }
        if let Some(threshold) = self.options.overlay_threshold {
            // Frame indices are 1-based.
            let image_path = self.images.get(out.frame - 1).ok_or_else(|| {
                Error::Argument(format!("no source image for frame {}", out.frame))
            })?;
            let frame_img = read_frame_image(image_path)?;
            let path = self.out_dir.join(format!("overlay_{:06}.png", out.frame));
            overlay::write_overlay_png(&path, &frame_img, &out.fused, threshold)?;
        }
        Ok(())
    }
}

fn read_frame_image(path: &Path) -> Result<ScalarField> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("pgm") => pgm::read_pgm_gray(path),
        _ => overlay::read_png_gray(path),
    }
}

fn sorted_files_with_ext(dir: &Path, exts: &[&str]) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        let path = entry.path();
        if path.is_file() {
            if let Some(ext) = path.extension().and_then(|e| e.to_str()) {
                if exts.contains(&ext) {
                    files.push(path);
                }
            }
        }
    }
    files.sort();
    Ok(files)
}

/// The metrics CSV layout shared by library and CLI output.
pub const METRICS_CSV_HEADER: &str =
    "sequence,category,auc_orientation,auc_magnitude,auc_product,auc_bayes";

pub fn metrics_csv_row(name: &str, category: &str, m: &SequenceMetrics) -> String {
    format!(
        "{name},{category},{:.6},{:.6},{:.6},{:.6}",
        m.auc_orientation, m.auc_magnitude, m.auc_product, m.auc_bayes
    )
}

/// Sequence name and category for a directory, from `scene.txt` when
/// present, otherwise derived from the directory name.
pub fn sequence_identity(input_dir: &Path) -> (String, String) {
    let name = input_dir
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "sequence".into());
    let scene = input_dir.join("scene.txt");
    if let Ok(text) = std::fs::read_to_string(&scene) {
        let mut found_name = None;
        let mut found_cat = None;
        for line in text.lines() {
            if let Some((k, v)) = line.split_once('=') {
                match k.trim() {
                    "name" => found_name = Some(v.trim().to_string()),
                    "category" => found_cat = Some(v.trim().to_string()),
                    _ => {}
                }
            }
        }
        if let (Some(n), Some(c)) = (found_name, found_cat) {
            return (n, c);
        }
    }
    let category: String = name
        .chars()
        .take_while(|c| c.is_ascii_alphabetic())
        .collect::<String>()
        .to_uppercase();
    let category = if category.is_empty() { "NA".into() } else { category };
    (name, category)
}

/// Run the full pipeline over a sequence directory.
///
/// In `files` mode the directory holds ordered `.flo` frames; in
/// `horn_schunck` mode it holds ordered grayscale frames (PGM or PNG) from
/// which flow is estimated pairwise. An optional `masks/` subdirectory
/// provides one truth mask per flow field and triggers the metrics CSV.
pub fn run_directory(
    input_dir: &Path,
    config: &PipelineConfig,
    output_dir: &Path,
    options: &RunOptions,
) -> Result<SequenceReport> {
    config.validate()?;
    std::fs::create_dir_all(output_dir).map_err(|e| Error::io(output_dir, e))?;

    let images = sorted_files_with_ext(input_dir, &["pgm", "png"])?;
    let mask_dir = input_dir.join("masks");
    let mask_files = if mask_dir.is_dir() {
        Some(sorted_files_with_ext(&mask_dir, &["pgm"])?)
    } else {
        None
    };

    // Build the lazy frame stream.
    let frame_stream: Box<dyn Iterator<Item = Result<(FlowField, Option<Vec<bool>>)>>> =
        match config.flow_source {
            FlowSource::Files => {
                let flo_files = sorted_files_with_ext(input_dir, &["flo"])?;
                if flo_files.is_empty() {
                    return Err(Error::Argument(format!(
                        "no .flo files in {}",
                        input_dir.display()
                    )));
                }
                check_mask_count(&mask_files, flo_files.len())?;
                let masks = mask_files.clone();
                Box::new(flo_files.into_iter().enumerate().map(move |(i, path)| {
                    let flow = flo::read_flo(&path)?;
                    let mask = match &masks {
                        Some(files) => Some(read_mask(&files[i], &flow)?),
                        None => None,
                    };
                    Ok((flow, mask))
                }))
            }
            FlowSource::HornSchunck => {
                if images.len() < 2 {
                    return Err(Error::Argument(format!(
                        "horn_schunck mode needs at least 2 frames in {}",
                        input_dir.display()
                    )));
                }
                check_mask_count(&mask_files, images.len() - 1)?;
                let masks = mask_files.clone();
                let pairs: Vec<(PathBuf, PathBuf)> = images
                    .windows(2)
                    .map(|w| (w[0].clone(), w[1].clone()))
                    .collect();
                let smoothness = config.hs_smoothness;
                let iterations = config.hs_iterations;
                Box::new(pairs.into_iter().enumerate().map(move |(i, (a, b))| {
                    let prev = read_frame_image(&a)?;
                    let next = read_frame_image(&b)?;
                    let flow = horn_schunck(&prev, &next, smoothness, iterations)?;
                    let mask = match &masks {
                        Some(files) => Some(read_mask(&files[i], &flow)?),
                        None => None,
                    };
                    Ok((flow, mask))
                }))
            }
        };

    if options.overlay_threshold.is_some() && images.is_empty() {
        return Err(Error::Argument(
            "overlay export needs source frame images in the input directory".into(),
        ));
    }

    let mut sink = DirSink {
        out_dir: output_dir,
        options,
        images,
    };
    let mut state = PipelineState::new(config);
    let report = run_stream_with_state(frame_stream, config, &mut sink, &mut state)?;

    if options.write_dictionaries {
        if let Some(dict) = state.orientation_dictionary() {
            dict.write_checkpoint(&output_dir.join("dictionary_orientation.csv"))?;
        }
        if let Some(dict) = state.magnitude_dictionary() {
            dict.write_checkpoint(&output_dir.join("dictionary_magnitude.csv"))?;
        }
    }

    if let Some(metrics) = &report.metrics {
        let (name, category) = sequence_identity(input_dir);
        let csv_path = output_dir.join("metrics.csv");
        let text = format!(
            "{METRICS_CSV_HEADER}\n{}\n",
            metrics_csv_row(&name, &category, metrics)
        );
        std::fs::write(&csv_path, text).map_err(|e| Error::io(&csv_path, e))?;
        if let Some(curve) = &report.bayes_roc {
            let roc_path = output_dir.join("roc_points.csv");
            let mut text = String::from("fpr,tpr\n");
            for &(fpr, tpr) in &curve.points {
                let _ = writeln!(text, "{fpr:.6},{tpr:.6}");
            }
            std::fs::write(&roc_path, text).map_err(|e| Error::io(&roc_path, e))?;
        }
    }
    Ok(report)
}

fn check_mask_count(mask_files: &Option<Vec<PathBuf>>, frames: usize) -> Result<()> {
    if let Some(files) = mask_files {
        if files.len() != frames {
            return Err(Error::Argument(format!(
                "masks/ holds {} files but the sequence has {frames} flow frames",
                files.len()
            )));
        }
    }
    Ok(())
}

fn read_mask(path: &Path, flow: &FlowField) -> Result<Vec<bool>> {
    let (w, h, mask) = pgm::read_pgm_mask(path)?;
    if w != flow.width() || h != flow.height() {
        return Err(Error::Argument(format!(
            "mask {} is {w}x{h} but the flow is {}x{}",
            path.display(),
            flow.width(),
            flow.height()
        )));
    }
    Ok(mask)
}
