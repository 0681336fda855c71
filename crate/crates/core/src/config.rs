//! Pipeline configuration and its `key = value` file format.

use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlowSource {
    /// Read precomputed `.flo` files from the input directory.
    Files,
    /// Estimate flow from consecutive grayscale frames.
    HornSchunck,
}

/// All tunables of the detection pipeline, with published defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    /// Target superpixel count N per field.
    pub n_superpixels: usize,
    /// SLIC compactness delta.
    pub compactness: f64,
    /// Histogram dimension d (bins per motion feature).
    pub histogram_bins: usize,
    /// Row-group-lasso weight for dictionary learning.
    pub lambda1: f64,
    /// Lasso weight for spatial-near reconstruction.
    pub lambda2: f64,
    /// Dictionary size M.
    pub dictionary_size: usize,
    /// Dictionary update period T in scored frames.
    pub update_period: usize,
    /// Spatial-near set size K.
    pub spatial_near: usize,
    /// Magnitude rescaling ceiling in pixels/frame.
    pub v_max: f64,
    /// Likelihood bins m for Bayesian fusion.
    pub fusion_bins: usize,
    /// Normalized-anomaly gate tau_u under which features enter the update
    /// buffer.
    pub buffer_gate: f64,
    /// Frames treated as all-normal training data.
    pub training_frames: usize,
    pub flow_source: FlowSource,
    /// Horn-Schunck smoothness weight (flow_source = horn_schunck).
    pub hs_smoothness: f64,
    /// Horn-Schunck iteration count.
    pub hs_iterations: usize,
    /// Relative-objective tolerance of the dictionary solver.
    pub solver_tol: f64,
    /// Iteration cap of the dictionary solver.
    pub solver_max_iter: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            n_superpixels: 125,
            compactness: 10.0,
            histogram_bins: 30,
            lambda1: 0.5,
            lambda2: 0.5,
            dictionary_size: 300,
            update_period: 5,
            spatial_near: 10,
            v_max: 20.0,
            fusion_bins: 10,
            buffer_gate: 0.3,
            training_frames: 10,
            flow_source: FlowSource::Files,
            hs_smoothness: 0.1,
            hs_iterations: 200,
            solver_tol: 1e-6,
            solver_max_iter: 500,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("n_superpixels", self.n_superpixels as f64),
            ("compactness", self.compactness),
            ("d", self.histogram_bins as f64),
            ("lambda1", self.lambda1),
            ("lambda2", self.lambda2),
            ("M", self.dictionary_size as f64),
            ("T", self.update_period as f64),
            ("K", self.spatial_near as f64),
            ("v_max", self.v_max),
            ("m_fusion_bins", self.fusion_bins as f64),
            ("tau_u", self.buffer_gate),
            ("training_frames", self.training_frames as f64),
            ("hs_smoothness", self.hs_smoothness),
            ("hs_iterations", self.hs_iterations as f64),
            ("solver_tol", self.solver_tol),
            ("solver_max_iter", self.solver_max_iter as f64),
        ];
        for (name, v) in positive {
            if !(v > 0.0) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if self.spatial_near > self.dictionary_size {
            return Err(Error::Config(format!(
                "K ({}) must not exceed M ({})",
                self.spatial_near, self.dictionary_size
            )));
        }
        if self.fusion_bins < 2 {
            return Err(Error::Config("m_fusion_bins must be at least 2".into()));
        }
        Ok(())
    }
}

/// Parse a `key = value` configuration file; `#` starts a comment, unknown
/// keys are rejected, unspecified keys keep their defaults.
pub fn parse_config(path: &Path) -> Result<PipelineConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config_str(&text)
}

pub fn parse_config_str(text: &str) -> Result<PipelineConfig> {
    let mut config = PipelineConfig::default();
    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw_line.find('#') {
            Some(p) => &raw_line[..p],
            None => raw_line,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::Config(format!(
                "line {line_no}: expected `key = value`, got `{line}`"
            )));
        };
        let key = key.trim();
        let value = value.trim();
        apply_key(&mut config, key, value)
            .map_err(|msg| Error::Config(format!("line {line_no}: {msg}")))?;
    }
    config.validate()?;
    Ok(config)
}

fn apply_key(config: &mut PipelineConfig, key: &str, value: &str) -> std::result::Result<(), String> {
    fn as_usize(key: &str, value: &str) -> std::result::Result<usize, String> {
        value
            .parse()
            .map_err(|_| format!("cannot parse `{value}` as an integer for {key}"))
    }
    fn as_f64(key: &str, value: &str) -> std::result::Result<f64, String> {
        value
            .parse()
            .map_err(|_| format!("cannot parse `{value}` as a number for {key}"))
    }
    match key {
        "n_superpixels" => config.n_superpixels = as_usize(key, value)?,
        "compactness" => config.compactness = as_f64(key, value)?,
        "d" => config.histogram_bins = as_usize(key, value)?,
        "lambda1" => config.lambda1 = as_f64(key, value)?,
        "lambda2" => config.lambda2 = as_f64(key, value)?,
        "M" => config.dictionary_size = as_usize(key, value)?,
        "T" => config.update_period = as_usize(key, value)?,
        "K" => config.spatial_near = as_usize(key, value)?,
        "v_max" => config.v_max = as_f64(key, value)?,
        "m_fusion_bins" => config.fusion_bins = as_usize(key, value)?,
        "tau_u" => config.buffer_gate = as_f64(key, value)?,
        "training_frames" => config.training_frames = as_usize(key, value)?,
        "flow_source" => {
            config.flow_source = match value {
                "files" => FlowSource::Files,
                "horn_schunck" | "hs" => FlowSource::HornSchunck,
                other => return Err(format!("unknown flow_source `{other}`")),
            }
        }
        "hs_smoothness" => config.hs_smoothness = as_f64(key, value)?,
        "hs_iterations" => config.hs_iterations = as_usize(key, value)?,
        "solver_tol" => config.solver_tol = as_f64(key, value)?,
        "solver_max_iter" => config.solver_max_iter = as_usize(key, value)?,
        other => return Err(format!("unknown key `{other}`")),
    }
    Ok(())
}
