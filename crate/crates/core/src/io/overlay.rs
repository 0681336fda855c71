//! Color overlays of anomaly maps on source frames.

use std::path::Path;

use crate::error::{Error, Result};
use crate::field::ScalarField;

/// Tint pixels whose anomaly value exceeds `threshold` red over the
/// grayscale frame and save as PNG.
pub fn write_overlay_png(
    path: &Path,
    frame: &ScalarField,
    anomaly: &ScalarField,
    threshold: f64,
) -> Result<()> {
    if !frame.same_dims(anomaly) {
        return Err(Error::Argument(format!(
            "frame {}x{} and anomaly map {}x{} dimensions differ",
            frame.width(),
            frame.height(),
            anomaly.width(),
            anomaly.height()
        )));
    }
    let (w, h) = (frame.width(), frame.height());
    let mut img = image::RgbImage::new(w as u32, h as u32);
    for y in 0..h {
        for x in 0..w {
            let g = (frame.get(x, y).clamp(0.0, 1.0) * 255.0).round() as u8;
            let a = anomaly.get(x, y);
            let px = if a > threshold {
                // Blend toward pure red with the anomaly value as alpha.
                let alpha = a.clamp(0.0, 1.0);
                let r = (g as f64 * (1.0 - alpha) + 255.0 * alpha).round() as u8;
                let keep = (g as f64 * (1.0 - alpha)).round() as u8;
                image::Rgb([r, keep, keep])
            } else {
                image::Rgb([g, g, g])
            };
            img.put_pixel(x as u32, y as u32, px);
        }
    }
    img.save(path)
        .map_err(|e| Error::io(path, std::io::Error::other(e)))
}

/// Load a grayscale frame from PNG (any color type, converted to luma).
pub fn read_png_gray(path: &Path) -> Result<ScalarField> {
    let img = image::open(path).map_err(|e| Error::format(path, e.to_string()))?;
    let luma = img.to_luma8();
    let (w, h) = (luma.width() as usize, luma.height() as usize);
    let values = luma.pixels().map(|p| p.0[0] as f64 / 255.0).collect();
    ScalarField::new(w, h, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overlay_tints_above_threshold() {
        let frame = ScalarField::new(2, 1, vec![0.5, 0.5]).unwrap();
        let anomaly = ScalarField::new(2, 1, vec![0.0, 1.0]).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("o.png");
        write_overlay_png(&path, &frame, &anomaly, 0.5).unwrap();
        let img = image::open(&path).unwrap().to_rgb8();
        assert_eq!(img.get_pixel(0, 0).0, [128, 128, 128]);
        assert_eq!(img.get_pixel(1, 0).0, [255, 0, 0]);
    }

    #[test]
    fn png_gray_roundtrip() {
        let frame = ScalarField::from_fn(4, 3, |x, y| ((x * 20 + y * 60) as f64) / 255.0);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.png");
        let img = image::GrayImage::from_fn(4, 3, |x, y| {
            image::Luma([((x as usize * 20 + y as usize * 60) as f64) as u8])
        });
        img.save(&path).unwrap();
        let back = read_png_gray(&path).unwrap();
        for (a, b) in frame.values().iter().zip(back.values()) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
