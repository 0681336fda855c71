use motion_anomaly::field::{to_gray, FieldKind, ScalarField};
use motion_anomaly::flow::split_fields;
use motion_anomaly::superpixel::slic;
use motion_anomaly::synth::{constant_flow, generate, SceneSpec};
use std::time::Instant;
fn main() {
    let spec = SceneSpec {
        name: "s".into(), category: "T".into(),
        width: 640, height: 480, frames: 1,
        ego: constant_flow(1, (2.3, 2.3)),
        noise_sigma: 0.5, anomalies: vec![], seed: 5,
    };
    let (flow, _) = generate(&spec).unwrap().next().unwrap();
    let (of, mf) = split_fields(&flow);
    for (name, field, kind) in [("orient", &of, FieldKind::Orientation), ("magnitude", &mf, FieldKind::Magnitude)] {
        let g = to_gray(field, kind, 20.0).unwrap();
        let t = Instant::now();
        let seg = slic(&g, 125, 10.0).unwrap();
        println!("{name}: total {:.1} ms count {}", t.elapsed().as_secs_f64()*1e3, seg.count());
    }
    let uniform = ScalarField::new(640, 480, vec![0.5; 640*480]).unwrap();
    let t = Instant::now();
    let _ = slic(&uniform, 125, 10.0).unwrap();
    println!("uniform: total {:.1} ms", t.elapsed().as_secs_f64()*1e3);
}
