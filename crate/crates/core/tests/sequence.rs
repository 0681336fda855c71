//! Sequence-level behavior of the full pipeline at dashcam resolution.

use motion_anomaly::config::PipelineConfig;
use motion_anomaly::pipeline::{run_stream, NullSink};
use motion_anomaly::synth::{constant_flow, generate, SceneSpec};

/// A normal-traffic scene must stay calm: no post-training fused map may
/// average above 0.3.
#[test]
fn no_anomaly_sequence_stays_calm() {
    let frames = 20;
    let spec = SceneSpec {
        name: "calm".into(),
        category: "NA".into(),
        width: 640,
        height: 480,
        frames,
        ego: constant_flow(frames, (0.0, 4.0)),
        noise_sigma: 0.5,
        anomalies: vec![],
        seed: 9,
    };
    let stream: Vec<_> = generate(&spec).unwrap().map(|(f, _)| Ok((f, None))).collect();
    let report = run_stream(stream, &PipelineConfig::default(), &mut NullSink).unwrap();
    assert_eq!(report.frames_scored, 10);
    for (i, mean) in report.fused_frame_means.iter().enumerate() {
        assert!(mean < &0.3, "frame {} fused mean {mean}", i + 11);
    }
}
