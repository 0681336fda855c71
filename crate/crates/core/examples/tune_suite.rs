//! Scratch experiment: run selected standard-suite scenes end to end and
//! print the four AUCs.

use motion_anomaly::config::PipelineConfig;
use motion_anomaly::pipeline::{run_stream, NullSink};
use motion_anomaly::synth::{generate, standard_suite};

fn main() {
    let filter: Vec<String> = std::env::args().skip(1).collect();
    let config = PipelineConfig::default();
    for spec in standard_suite() {
        if !filter.is_empty() && !filter.contains(&spec.name) {
            continue;
        }
        let stream = generate(&spec)
            .unwrap()
            .map(|(flow, mask)| Ok((flow, Some(mask))));
        let t0 = std::time::Instant::now();
        let report = run_stream(stream, &config, &mut NullSink).unwrap();
        let m = report.metrics.unwrap();
        println!(
            "{}: O={:.4} M={:.4} MO={:.4} B-MO={:.4}  ({:.0}s, {:.2}s/frame)",
            spec.name,
            m.auc_orientation,
            m.auc_magnitude,
            m.auc_product,
            m.auc_bayes,
            t0.elapsed().as_secs_f64(),
            report.mean_seconds_per_frame,
        );
    }
}
