//! Scratch micro-benchmark of the ISTA gemm shapes.

use ndarray::linalg::general_mat_mul;
use ndarray::Array2;
use std::time::Instant;

fn main() {
    let n = 900;
    let c = 30;
    let y = Array2::from_shape_fn((c, n), |(i, j)| ((i * 31 + j * 7) % 97) as f64 / 97.0);
    let cm = Array2::from_shape_fn((n, n), |(i, j)| ((i * 13 + j * 3) % 89) as f64 / 89.0);
    let r = Array2::from_shape_fn((c, n), |(i, j)| ((i * 5 + j * 11) % 83) as f64 / 83.0);

    // Forward: Y (c x n) * C (n x n) -> c x n
    let mut out = Array2::zeros((c, n));
    let t = Instant::now();
    let reps = 20;
    for _ in 0..reps {
        general_mat_mul(1.0, &y, &cm, 0.0, &mut out);
    }
    let el = t.elapsed().as_secs_f64() / reps as f64;
    let flops = 2.0 * c as f64 * n as f64 * n as f64;
    println!("forward  Y*C        : {:.1} ms, {:.1} Gflop/s", el * 1e3, flops / el / 1e9);

    // Gradient with transposed view: Y^T (n x c view) * R (c x n) -> n x n
    let mut grad = Array2::zeros((n, n));
    let t = Instant::now();
    for _ in 0..reps {
        general_mat_mul(1.0, &y.t(), &r, 0.0, &mut grad);
    }
    let el = t.elapsed().as_secs_f64() / reps as f64;
    println!("gradient Y'.t()*R   : {:.1} ms, {:.1} Gflop/s", el * 1e3, flops / el / 1e9);

    // Gradient with materialized transpose (standard layout).
    let yt = y.t().to_owned();
    let t = Instant::now();
    for _ in 0..reps {
        general_mat_mul(1.0, &yt, &r, 0.0, &mut grad);
    }
    let el = t.elapsed().as_secs_f64() / reps as f64;
    println!("gradient YT_owned*R : {:.1} ms, {:.1} Gflop/s", el * 1e3, flops / el / 1e9);

    // Parallel column-chunked variants on 2 threads.
    use ndarray::Axis;
    use rayon::prelude::*;
    let chunk = n / 4;
    let t = Instant::now();
    for _ in 0..reps {
        grad.axis_chunks_iter_mut(Axis(1), chunk)
            .into_par_iter()
            .zip(r.axis_chunks_iter(Axis(1), chunk).into_par_iter())
            .for_each(|(mut oc, rc)| general_mat_mul(1.0, &yt, &rc, 0.0, &mut oc));
    }
    let el = t.elapsed().as_secs_f64() / reps as f64;
    println!("gradient par-chunk  : {:.1} ms, {:.1} Gflop/s", el * 1e3, flops / el / 1e9);

    let t = Instant::now();
    for _ in 0..reps {
        out.axis_chunks_iter_mut(Axis(1), chunk)
            .into_par_iter()
            .zip(cm.axis_chunks_iter(Axis(1), chunk).into_par_iter())
            .for_each(|(mut oc, cc)| general_mat_mul(1.0, &y, &cc, 0.0, &mut oc));
    }
    let el = t.elapsed().as_secs_f64() / reps as f64;
    println!("forward  par-chunk  : {:.1} ms, {:.1} Gflop/s", el * 1e3, flops / el / 1e9);
}
