//! Scratch experiment: scan lambda1 for the 3-prototype recovery setup.

use motion_anomaly::dictionary::{select_representatives, solve_row_group_lasso};
use motion_anomaly::field::FieldKind;
use ndarray::Array2;
use rand::{Rng, SeedableRng};

fn prototype_columns(
    rng: &mut impl Rng,
    bins: usize,
    proto_bins: &[usize],
    sizes: &[usize],
    noise: f64,
) -> (Array2<f64>, Vec<usize>) {
    let n: usize = sizes.iter().sum();
    let mut y = Array2::zeros((bins, n));
    let mut owner = Vec::with_capacity(n);
    let mut col = 0;
    for (k, &sz) in sizes.iter().enumerate() {
        for member in 0..sz {
            let amp = if member == 0 { noise / 25.0 } else { noise };
            let mut h = vec![0.0f64; bins];
            h[proto_bins[k]] = 1.0;
            for v in h.iter_mut() {
                *v += rng.gen::<f64>() * amp;
            }
            let s: f64 = h.iter().sum();
            for v in h.iter_mut() {
                *v /= s;
            }
            y.column_mut(col).assign(&ndarray::Array1::from_vec(h));
            owner.push(k);
            col += 1;
        }
    }
    (y, owner)
}

fn main() {
    for &noise in &[0.01, 0.02, 0.05] {
        for &lambda in &[0.02, 0.05, 0.1, 0.2, 0.3, 0.5, 0.8] {
            let mut covered_all = 0;
            let mut nonzero_rows_total = 0;
            for seed in 0..40u64 {
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
                let (y, owner) = prototype_columns(&mut rng, 30, &[3, 15, 27], &[7, 7, 6], noise);
                let c = solve_row_group_lasso(&y, lambda, 1e-8, 3000).unwrap();
                let nonzero = (0..20)
                    .filter(|&i| c.row(i).iter().any(|&v| v != 0.0))
                    .count();
                nonzero_rows_total += nonzero;
                let locations: Vec<(f64, f64)> = (0..20).map(|i| (i as f64, 0.0)).collect();
                let (dict, _) =
                    select_representatives(&y, &locations, &c, 3, FieldKind::Orientation).unwrap();
                if dict.len() == 3 {
                    let mut seen = [false; 3];
                    for j in 0..3 {
                        seen[owner[dict.locations()[j].0 as usize]] = true;
                    }
                    if seen.iter().all(|&s| s) {
                        covered_all += 1;
                    }
                }
            }
            println!(
                "noise={noise} lambda={lambda}: covered {covered_all}/40, mean nonzero rows {:.1}",
                nonzero_rows_total as f64 / 40.0
            );
        }
    }
}
