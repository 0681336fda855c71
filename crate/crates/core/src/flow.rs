//! Dense optical flow fields and the built-in Horn–Schunck estimator.

use crate::error::{Error, Result};
use crate::field::ScalarField;

/// Minimum frame side length accepted by the detection pipeline.
pub const MIN_PIPELINE_DIM: usize = 8;

/// Per-pixel 2-D displacement vectors for one frame pair, row-major.
///
/// Construction checks length and finiteness only; the pipeline-minimum
/// dimension check (`>= 8x8`) is applied at pipeline entry so small fields
/// remain usable in I/O round-trips and unit tests.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowField {
    width: usize,
    height: usize,
    u: Vec<f64>,
    v: Vec<f64>,
}

impl FlowField {
    pub fn new(width: usize, height: usize, u: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        let n = width * height;
        if u.len() != n || v.len() != n {
            return Err(Error::Argument(format!(
                "flow field expects {}x{}={} values per component, got u={} v={}",
                width,
                height,
                n,
                u.len(),
                v.len()
            )));
        }
        if u.iter().chain(v.iter()).any(|c| !c.is_finite()) {
            return Err(Error::Data("flow field contains non-finite values".into()));
        }
        Ok(Self {
            width,
            height,
            u,
            v,
        })
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn u(&self) -> &[f64] {
        &self.u
    }

    #[inline]
    pub fn v(&self) -> &[f64] {
        &self.v
    }

    pub fn meets_pipeline_minimum(&self) -> bool {
        self.width >= MIN_PIPELINE_DIM && self.height >= MIN_PIPELINE_DIM
    }
}

/// Separate a flow field into its orientation and magnitude fields.
///
/// Orientation is the angle of `(u, v)` mapped into `[0, 2*pi)`; pixels with
/// zero magnitude get orientation 0 since they carry no direction evidence.
pub fn split_fields(flow: &FlowField) -> (ScalarField, ScalarField) {
    let two_pi = 2.0 * std::f64::consts::PI;
    let n = flow.u.len();
    let mut orient = Vec::with_capacity(n);
    let mut mag = Vec::with_capacity(n);
    for i in 0..n {
        let (u, v) = (flow.u[i], flow.v[i]);
        let m = (u * u + v * v).sqrt();
        let a = if m == 0.0 {
            0.0
        } else {
            let a = v.atan2(u);
            let a = if a < 0.0 { a + two_pi } else { a };
            // atan2 of a tiny negative value can round straight back to 2*pi.
            if a >= two_pi {
                0.0
            } else {
                a
            }
        };
        orient.push(a);
        mag.push(m);
    }
    let orientation = ScalarField::new(flow.width, flow.height, orient).expect("angles are finite");
    let magnitude = ScalarField::new(flow.width, flow.height, mag).expect("magnitudes are finite");
    (orientation, magnitude)
}

/// Spatio-temporal image gradients shared by the solver and the energy.
struct Gradients {
    ix: Vec<f64>,
    iy: Vec<f64>,
    it: Vec<f64>,
}

/// Forward-difference gradient estimate averaged over the 2x2x2 cube around
/// each pixel, with replicated borders.
fn gradients(prev: &ScalarField, next: &ScalarField) -> Gradients {
    let (w, h) = (prev.width(), prev.height());
    let n = w * h;
    let mut ix = vec![0.0; n];
    let mut iy = vec![0.0; n];
    let mut it = vec![0.0; n];
    let at = |f: &ScalarField, x: usize, y: usize| f.get(x.min(w - 1), y.min(h - 1));
    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            let mut dx = 0.0;
            let mut dy = 0.0;
            let mut dt = 0.0;
            for f in [prev, next] {
                dx += at(f, x + 1, y) - at(f, x, y) + at(f, x + 1, y + 1) - at(f, x, y + 1);
                dy += at(f, x, y + 1) - at(f, x, y) + at(f, x + 1, y + 1) - at(f, x + 1, y);
            }
            for (xx, yy) in [(x, y), (x + 1, y), (x, y + 1), (x + 1, y + 1)] {
                dt += at(next, xx, yy) - at(prev, xx, yy);
            }
            ix[i] = dx / 4.0;
            iy[i] = dy / 4.0;
            it[i] = dt / 4.0;
        }
    }
    Gradients { ix, iy, it }
}

/// Estimate dense flow between two grayscale frames with Horn–Schunck
/// fixed-point (Jacobi) iterations.
///
/// `smoothness` weights the flow-gradient penalty against the brightness
/// constancy term. The iteration is the exact Jacobi update of the discrete
/// energy evaluated by [`flow_energy`], which makes the energy non-increasing
/// across iterations.
pub fn horn_schunck(
    prev: &ScalarField,
    next: &ScalarField,
    smoothness: f64,
    iterations: usize,
) -> Result<FlowField> {
    if !prev.same_dims(next) {
        return Err(Error::Argument(format!(
            "frame dimensions differ: {}x{} vs {}x{}",
            prev.width(),
            prev.height(),
            next.width(),
            next.height()
        )));
    }
    if smoothness <= 0.0 {
        return Err(Error::Argument(format!(
            "smoothness must be positive, got {smoothness}"
        )));
    }
    if iterations == 0 {
        return Err(Error::Argument("iterations must be positive".into()));
    }
    let (w, h) = (prev.width(), prev.height());
    if w < 2 || h < 2 {
        return Err(Error::Argument(
            "horn_schunck needs frames of at least 2x2".into(),
        ));
    }
    let g = gradients(prev, next);
    let n = w * h;
    let mut u = vec![0.0; n];
    let mut v = vec![0.0; n];
    let mut u_next = vec![0.0; n];
    let mut v_next = vec![0.0; n];
    for _ in 0..iterations {
        for y in 0..h {
            for x in 0..w {
                let i = y * w + x;
                let mut su = 0.0;
                let mut sv = 0.0;
                let mut deg = 0.0;
                if x > 0 {
                    su += u[i - 1];
                    sv += v[i - 1];
                    deg += 1.0;
                }
                if x + 1 < w {
                    su += u[i + 1];
                    sv += v[i + 1];
                    deg += 1.0;
                }
                if y > 0 {
                    su += u[i - w];
                    sv += v[i - w];
                    deg += 1.0;
                }
                if y + 1 < h {
                    su += u[i + w];
                    sv += v[i + w];
                    deg += 1.0;
                }
                let (ix, iy, it) = (g.ix[i], g.iy[i], g.it[i]);
                u_next[i] = (smoothness * su - ix * (iy * v[i] + it)) / (ix * ix + smoothness * deg);
                v_next[i] = (smoothness * sv - iy * (ix * u[i] + it)) / (iy * iy + smoothness * deg);
            }
        }
        std::mem::swap(&mut u, &mut u_next);
        std::mem::swap(&mut v, &mut v_next);
    }
    FlowField::new(w, h, u, v)
}

/// The discrete Horn–Schunck energy of a candidate flow: brightness
/// constancy residual plus `smoothness` times the squared flow differences
/// over 4-neighbor edges.
pub fn flow_energy(prev: &ScalarField, next: &ScalarField, flow: &FlowField, smoothness: f64) -> f64 {
    let g = gradients(prev, next);
    let (w, h) = (flow.width(), flow.height());
    let mut data = 0.0;
    let mut smooth = 0.0;
    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            let r = g.ix[i] * flow.u[i] + g.iy[i] * flow.v[i] + g.it[i];
            data += r * r;
            if x + 1 < w {
                let du = flow.u[i] - flow.u[i + 1];
                let dv = flow.v[i] - flow.v[i + 1];
                smooth += du * du + dv * dv;
            }
            if y + 1 < h {
                let du = flow.u[i] - flow.u[i + w];
                let dv = flow.v[i] - flow.v[i + w];
                smooth += du * du + dv * dv;
            }
        }
    }
    data + smoothness * smooth
}
