//! Scratch experiment: per-path normalized score distributions on
//! no-anomaly scenes, plus solver cost.

use motion_anomaly::config::PipelineConfig;
use motion_anomaly::pipeline::{run_stream, FrameOutput, FrameSink};
use motion_anomaly::synth::{constant_flow, generate, SceneSpec};

struct Probe {
    o_means: Vec<f64>,
    m_means: Vec<f64>,
    f_means: Vec<f64>,
    o_quantiles: Option<Vec<f64>>,
}

impl FrameSink for Probe {
    fn frame(&mut self, out: &FrameOutput) -> motion_anomaly::Result<()> {
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        self.o_means.push(mean(out.orientation.normalized_scores()));
        self.m_means.push(mean(out.magnitude.normalized_scores()));
        self.f_means.push(out.fused.mean());
        if self.o_quantiles.is_none() {
            let mut o: Vec<f64> = out.orientation.normalized_scores().to_vec();
            o.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let q = |p: f64| o[(p * (o.len() - 1) as f64) as usize];
            self.o_quantiles = Some(vec![q(0.1), q(0.25), q(0.5), q(0.75), q(0.9), q(1.0)]);
            let mut m: Vec<f64> = out.magnitude.normalized_scores().to_vec();
            m.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let qm = |p: f64| m[(p * (m.len() - 1) as f64) as usize];
            eprintln!(
                "    M quantiles: {:?}",
                [qm(0.1), qm(0.25), qm(0.5), qm(0.75), qm(0.9), qm(1.0)]
            );
        }
        Ok(())
    }
}

fn main() {
    for &(sigma, max_iter) in &[(0.5f64, 500usize), (0.5, 150), (0.3, 500)] {
        let frames = 16;
        let spec = SceneSpec {
            name: "calm".into(),
            category: "T".into(),
            width: 320,
            height: 240,
            frames,
            ego: constant_flow(frames, (0.0, 4.0)),
            noise_sigma: sigma,
            anomalies: vec![],
            seed: 9,
        };
        let mut config = PipelineConfig::default();
        config.n_superpixels = 125;
        config.solver_max_iter = max_iter;
        let stream: Vec<_> = generate(&spec)
            .unwrap()
            .map(|(f, _)| Ok((f, None)))
            .collect();
        let mut probe = Probe {
            o_means: vec![],
            m_means: vec![],
            f_means: vec![],
            o_quantiles: None,
        };
        let t0 = std::time::Instant::now();
        run_stream(stream, &config, &mut probe).unwrap();
        let avg = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        println!(
            "sigma={sigma} max_iter={max_iter}: O-mean {:.3} M-mean {:.3} fused {:.3} ({:.1}s)",
            avg(&probe.o_means),
            avg(&probe.m_means),
            avg(&probe.f_means),
            t0.elapsed().as_secs_f64()
        );
        println!("    O quantiles: {:?}", probe.o_quantiles.unwrap());
    }
}
