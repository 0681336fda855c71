//! Scratch experiment: fused-map means on no-anomaly scenes across scales.

use motion_anomaly::config::PipelineConfig;
use motion_anomaly::pipeline::{run_stream, NullSink};
use motion_anomaly::synth::{constant_flow, generate, SceneSpec};

fn main() {
    for &(w, h, n_sp, sigma, ego) in &[
        (320usize, 240usize, 32usize, 0.5f64, (0.0f64, 4.0f64)),
        (320, 240, 30, 0.5, (0.0, 4.0)),
        (256, 192, 20, 0.5, (0.0, 4.0)),
    ] {
        let frames = 18;
        let spec = SceneSpec {
            name: "calm".into(),
            category: "T".into(),
            width: w,
            height: h,
            frames,
            ego: constant_flow(frames, ego),
            noise_sigma: sigma,
            anomalies: vec![],
            seed: 9,
        };
        let mut config = PipelineConfig::default();
        config.n_superpixels = n_sp;
        config.dictionary_size = 300.min(n_sp * 10);
        let stream: Vec<_> = generate(&spec)
            .unwrap()
            .map(|(f, _)| Ok((f, None)))
            .collect();
        let t0 = std::time::Instant::now();
        let report = run_stream(stream, &config, &mut NullSink).unwrap();
        let means = &report.fused_frame_means;
        let max = means.iter().cloned().fold(0.0f64, f64::max);
        let avg = means.iter().sum::<f64>() / means.len() as f64;
        println!(
            "{w}x{h} n={n_sp} sigma={sigma} ego={ego:?}: mean-of-means {avg:.3}, max {max:.3}, elapsed {:.1}s",
            t0.elapsed().as_secs_f64()
        );
    }
}
