//! Single-channel pixel grids: orientation/magnitude fields, grayscale
//! frames, anomaly and posterior maps.

use crate::error::{Error, Result};

/// Which motion channel a field or feature describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldKind {
    Orientation,
    Magnitude,
}

impl FieldKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FieldKind::Orientation => "orientation",
            FieldKind::Magnitude => "magnitude",
        }
    }
}

/// A dense single-channel grid of finite reals, row-major.
///
/// The value range depends on what the field holds: orientation fields live
/// in `[0, 2*pi)`, magnitude fields are non-negative, grayscale images and
/// anomaly maps live in `[0, 1]`. Those range contracts are enforced by the
/// operations that produce each kind of field, not by the container.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(width: usize, height: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != width * height {
            return Err(Error::Argument(format!(
                "scalar field expects {}x{}={} values, got {}",
                width,
                height,
                width * height,
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Data("scalar field contains non-finite values".into()));
        }
        Ok(Self {
            width,
            height,
            values,
        })
    }

    pub fn zeros(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            values: vec![0.0; width * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut values = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                values.push(f(x, y));
            }
        }
        Self {
            width,
            height,
            values,
        }
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
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.width + x]
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn mean(&self) -> f64 {
        if self.values.is_empty() {
            return 0.0;
        }
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn same_dims(&self, other: &ScalarField) -> bool {
        self.width == other.width && self.height == other.height
    }
}

/// Rescale a raw motion field into a `[0, 1]` grayscale image.
///
/// Orientation divides by `2*pi`; magnitude clamps to `[0, v_max]` and
/// divides by `v_max`. The result stays in real `[0, 1]`; quantization to
/// 8 bits happens only on image export.
pub fn to_gray(field: &ScalarField, kind: FieldKind, v_max: f64) -> Result<ScalarField> {
    if v_max <= 0.0 {
        return Err(Error::Argument(format!("v_max must be positive, got {v_max}")));
    }
    let values = match kind {
        FieldKind::Orientation => field
            .values
            .iter()
            .map(|&v| v / (2.0 * std::f64::consts::PI))
            .collect(),
        FieldKind::Magnitude => field
            .values
            .iter()
            .map(|&v| v.clamp(0.0, v_max) / v_max)
            .collect(),
    };
    Ok(ScalarField {
        width: field.width,
        height: field.height,
        values,
    })
}
