//! Batch CLI for dash-cam motion anomaly detection.
//!
//! `detect` runs the full pipeline over a sequence directory, `synth`
//! materializes the synthetic benchmark scenes, and `eval` scores exported
//! anomaly maps against ground-truth masks.

use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};

use motion_anomaly::config::{parse_config, FlowSource, PipelineConfig};
use motion_anomaly::eval::RocAccumulator;
use motion_anomaly::io::pgm;
use motion_anomaly::pipeline::{run_directory, RunOptions};
use motion_anomaly::synth::{standard_suite, write_scene};

#[derive(Parser)]
#[command(
    name = "motion-anomaly",
    about = "Detect anomalously moving objects in dash-cam style video",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FlowArg {
    /// Read precomputed Middlebury .flo files.
    Files,
    /// Estimate flow from consecutive grayscale frames (Horn-Schunck).
    Hs,
}

#[derive(Subcommand)]
enum Command {
    /// Run the detection pipeline over a sequence directory.
    Detect {
        /// Directory of ordered .flo files (or image frames with --flow hs),
        /// optionally holding a masks/ subdirectory for evaluation.
        #[arg(long)]
        input: PathBuf,
        /// Output directory for anomaly maps and metrics.
        #[arg(long)]
        output: PathBuf,
        /// Configuration file (`key = value` lines).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Flow source; overrides the config file.
        #[arg(long, value_enum)]
        flow: Option<FlowArg>,
        /// Evaluate against masks/ and write metrics.csv (requires masks).
        #[arg(long)]
        eval: bool,
        /// Also export per-field anomaly maps.
        #[arg(long)]
        field_maps: bool,
        /// Per-frame CSV of raw and normalized superpixel scores.
        #[arg(long)]
        score_csv: bool,
        /// Per-frame CSV of motion features.
        #[arg(long)]
        feature_csv: bool,
        /// Superpixel label maps and centroid CSVs.
        #[arg(long)]
        superpixel_debug: bool,
        /// Tint source frames where the fused anomaly exceeds this value.
        #[arg(long)]
        overlay: Option<f64>,
        /// Dump the final dictionaries as CSV checkpoints.
        #[arg(long)]
        dictionaries: bool,
    },
    /// Generate synthetic benchmark scenes with ground truth.
    Synth {
        /// Write all nine standard scenes.
        #[arg(long)]
        suite: bool,
        /// Output directory; one subdirectory per scene.
        #[arg(long)]
        output: PathBuf,
    },
    /// Score exported anomaly maps against ground-truth masks.
    Eval {
        /// Directory of per-frame anomaly map PGMs.
        #[arg(long)]
        scores: PathBuf,
        /// Directory of ground-truth mask PGMs (same count and order).
        #[arg(long)]
        masks: PathBuf,
        /// Metrics CSV to write (`sequence,auc`).
        #[arg(long)]
        csv: PathBuf,
        /// Optional ROC points CSV.
        #[arg(long)]
        points: Option<PathBuf>,
    },
}

fn main() {
    if let Err(err) = run() {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}

fn run() -> anyhow::Result<()> {
    match Cli::parse().command {
        Command::Detect {
            input,
            output,
            config,
            flow,
            eval,
            field_maps,
            score_csv,
            feature_csv,
            superpixel_debug,
            overlay,
            dictionaries,
        } => {
            let mut cfg = match &config {
                Some(path) => parse_config(path)
                    .with_context(|| format!("loading {}", path.display()))?,
                None => PipelineConfig::default(),
            };
            if let Some(flow) = flow {
                cfg.flow_source = match flow {
                    FlowArg::Files => FlowSource::Files,
                    FlowArg::Hs => FlowSource::HornSchunck,
                };
            }
            if eval && !input.join("masks").is_dir() {
                bail!("--eval needs a masks/ subdirectory in {}", input.display());
            }
            let options = RunOptions {
                write_fused_maps: true,
                write_field_maps: field_maps,
                write_score_csv: score_csv,
                write_feature_csv: feature_csv,
                write_superpixel_debug: superpixel_debug,
                overlay_threshold: overlay,
                write_dictionaries: dictionaries,
            };
            let report = run_directory(&input, &cfg, &output, &options)
                .with_context(|| format!("processing {}", input.display()))?;
            eprintln!(
                "processed {} frames ({} scored) in {:.1}s ({:.2}s/frame)",
                report.frames_total,
                report.frames_scored,
                report.elapsed.as_secs_f64(),
                report.mean_seconds_per_frame
            );
            if let Some(metrics) = &report.metrics {
                eprintln!(
                    "AUC: orientation {:.4}, magnitude {:.4}, product {:.4}, bayes {:.4}",
                    metrics.auc_orientation,
                    metrics.auc_magnitude,
                    metrics.auc_product,
                    metrics.auc_bayes
                );
            }
            Ok(())
        }
        Command::Synth { suite, output } => {
            if !suite {
                bail!("only --suite generation is supported");
            }
            for spec in standard_suite() {
                let dir = output.join(&spec.name);
                eprintln!("writing {} ...", dir.display());
                write_scene(&spec, &dir)?;
            }
            Ok(())
        }
        Command::Eval {
            scores,
            masks,
            csv,
            points,
        } => {
            let list = |dir: &PathBuf| -> anyhow::Result<Vec<PathBuf>> {
                let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
                    .with_context(|| format!("reading {}", dir.display()))?
                    .filter_map(|e| e.ok().map(|e| e.path()))
                    .filter(|p| p.extension().is_some_and(|e| e == "pgm"))
                    .collect();
                files.sort();
                Ok(files)
            };
            let score_files = list(&scores)?;
            let mask_files = list(&masks)?;
            if score_files.is_empty() {
                bail!("no .pgm score maps in {}", scores.display());
            }
            if score_files.len() != mask_files.len() {
                bail!(
                    "{} score maps but {} masks",
                    score_files.len(),
                    mask_files.len()
                );
            }
            let mut acc = RocAccumulator::new();
            for (sp, mp) in score_files.iter().zip(&mask_files) {
                let map = pgm::read_pgm_gray(sp)?;
                let (w, h, mask) = pgm::read_pgm_mask(mp)?;
                if (w, h) != (map.width(), map.height()) {
                    bail!(
                        "{} is {w}x{h} but {} is {}x{}",
                        mp.display(),
                        sp.display(),
                        map.width(),
                        map.height()
                    );
                }
                acc.add_frame(&map, &mask)?;
            }
            let curve = acc.finish()?;
            let name = scores
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_else(|| "sequence".into());
            std::fs::write(&csv, format!("sequence,auc\n{name},{:.6}\n", curve.auc))
                .with_context(|| format!("writing {}", csv.display()))?;
            if let Some(points_path) = points {
                let mut text = String::from("fpr,tpr\n");
                for (fpr, tpr) in &curve.points {
                    text.push_str(&format!("{fpr:.6},{tpr:.6}\n"));
                }
                std::fs::write(&points_path, text)
                    .with_context(|| format!("writing {}", points_path.display()))?;
            }
            println!("AUC {:.6}", curve.auc);
            Ok(())
        }
    }
}
