//! Scratch experiment: where does per-frame time go at suite scale?

use motion_anomaly::config::PipelineConfig;
use motion_anomaly::descriptor::extract_features;
use motion_anomaly::dictionary::{learn_dictionary, solve_row_group_lasso_traced};
use motion_anomaly::field::{to_gray, FieldKind};
use motion_anomaly::flow::split_fields;
use motion_anomaly::reconstruct::{magnitude_anomaly, orientation_anomaly};
use motion_anomaly::superpixel::slic;
use motion_anomaly::synth::{constant_flow, generate, SceneSpec};
use ndarray::Array2;
use std::time::Instant;

fn main() {
    let frames = 12;
    let spec = SceneSpec {
        name: "perf".into(),
        category: "T".into(),
        width: 640,
        height: 480,
        frames,
        ego: constant_flow(frames, (2.3, 2.3)),
        noise_sigma: 0.5,
        anomalies: vec![],
        seed: 5,
    };
    let config = PipelineConfig::default();
    let all: Vec<_> = generate(&spec).unwrap().collect();

    // Phase timings on the first frame.
    let t0 = Instant::now();
    let (of, mf) = split_fields(&all[0].0);
    println!("split: {:.3}s", t0.elapsed().as_secs_f64());
    let t0 = Instant::now();
    let og = to_gray(&of, FieldKind::Orientation, 20.0).unwrap();
    let oseg = slic(&og, 125, 10.0).unwrap();
    println!("slic (one field): {:.3}s, count {}", t0.elapsed().as_secs_f64(), oseg.count());
    let t0 = Instant::now();
    let ofeats = extract_features(&of, &oseg, FieldKind::Orientation, 20.0, 30, 1).unwrap();
    println!("features: {:.3}s", t0.elapsed().as_secs_f64());

    // Pool training features from 10 frames (orientation path only).
    let mut pool = Vec::new();
    let mut mpool = Vec::new();
    for (i, (flow, _)) in all.iter().take(10).enumerate() {
        let (of, mfld) = split_fields(flow);
        let og = to_gray(&of, FieldKind::Orientation, 20.0).unwrap();
        let seg = slic(&og, 125, 10.0).unwrap();
        pool.extend(extract_features(&of, &seg, FieldKind::Orientation, 20.0, 30, i + 1).unwrap());
        let mg = to_gray(&mfld, FieldKind::Magnitude, 20.0).unwrap();
        let mseg = slic(&mg, 125, 10.0).unwrap();
        mpool.extend(
            extract_features(&mfld, &mseg, FieldKind::Magnitude, 20.0, 30, i + 1).unwrap(),
        );
    }
    println!("pooled {} orientation features", pool.len());

    // Bootstrap solve with iteration trace.
    let bins = 30;
    let mut y = Array2::zeros((bins, pool.len()));
    for (j, f) in pool.iter().enumerate() {
        y.column_mut(j).assign(&ndarray::Array1::from_vec(f.histogram.clone()));
    }
    let t0 = Instant::now();
    let (cc, trace) = solve_row_group_lasso_traced(&y, 0.5, 1e-6, 500).unwrap();
    let active = (0..pool.len()).filter(|&i| cc.row(i).iter().any(|&v| v != 0.0)).count();
    println!(
        "bootstrap group lasso: {:.2}s, {} iterations, obj {:.4} -> {:.4}, {} active rows, rel-last {:.2e}",
        t0.elapsed().as_secs_f64(),
        trace.len() - 1,
        trace[0],
        trace.last().unwrap(),
        active,
        (trace[trace.len()-2] - trace[trace.len()-1]) / trace[trace.len()-2]
    );

    // Update-shaped problem: 300 atoms + 600 fresh features.
    let mut yu = Array2::zeros((bins, 900));
    for j in 0..900 {
        yu.column_mut(j).assign(&y.column(j % pool.len()));
    }
    let t0 = Instant::now();
    let (cu, trace) = solve_row_group_lasso_traced(&yu, 0.5, 1e-6, 500).unwrap();
    let active = (0..900).filter(|&i| cu.row(i).iter().any(|&v| v != 0.0)).count();
    println!(
        "update-size group lasso (N=900): {:.2}s, {} iterations, {} active rows",
        t0.elapsed().as_secs_f64(),
        trace.len() - 1,
        active
    );

    let t0 = Instant::now();
    let (odict, _) =
        learn_dictionary(&pool, 0.5, 300, 1e-6, 500, FieldKind::Orientation).unwrap();
    println!("learn_dictionary O: {:.2}s, {} atoms", t0.elapsed().as_secs_f64(), odict.len());
    let t0 = Instant::now();
    let (mdict, _) = learn_dictionary(&mpool, 0.5, 300, 1e-6, 500, FieldKind::Magnitude).unwrap();
    println!("learn_dictionary M: {:.2}s, {} atoms", t0.elapsed().as_secs_f64(), mdict.len());

    // Score one frame's features, timing the lasso path.
    let (flow, _) = &all[10];
    let (of, mfld) = split_fields(flow);
    let og = to_gray(&of, FieldKind::Orientation, 20.0).unwrap();
    let seg = slic(&og, 125, 10.0).unwrap();
    let feats = extract_features(&of, &seg, FieldKind::Orientation, 20.0, 30, 11).unwrap();
    let t0 = Instant::now();
    let mut total = 0.0;
    for f in &feats {
        total += orientation_anomaly(f, &odict, 0.5, 10).unwrap();
    }
    println!(
        "orientation scoring x{}: {:.2}s (sum {total:.2})",
        feats.len(),
        t0.elapsed().as_secs_f64()
    );
    let mg = to_gray(&mfld, FieldKind::Magnitude, 20.0).unwrap();
    let mseg = slic(&mg, 125, 10.0).unwrap();
    let mfeats = extract_features(&mfld, &mseg, FieldKind::Magnitude, 20.0, 30, 11).unwrap();
    let t0 = Instant::now();
    let mut total = 0.0;
    for f in &mfeats {
        total += magnitude_anomaly(f, &mdict, 10, 800.0).unwrap();
    }
    println!(
        "magnitude scoring x{}: {:.2}s (sum {total:.2})",
        mfeats.len(),
        t0.elapsed().as_secs_f64()
    );
}
