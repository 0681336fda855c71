//! Binary PGM (P5) reading and writing.
//!
//! 8-bit PGM is used for grayscale frames, anomaly maps and masks; 16-bit
//! PGM only for the superpixel label-map debug export.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::field::ScalarField;

/// Write a `[0, 1]` field as an 8-bit binary PGM, quantizing by
/// `round(value * 255)`.
pub fn write_pgm_gray(path: &Path, field: &ScalarField) -> Result<()> {
    let mut bytes = format!("P5\n{} {}\n255\n", field.width(), field.height()).into_bytes();
    bytes.extend(
        field
            .values()
            .iter()
            .map(|&v| (v.clamp(0.0, 1.0) * 255.0).round() as u8),
    );
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Write a binary mask as an 8-bit PGM with values 0/255.
pub fn write_pgm_mask(path: &Path, width: usize, height: usize, mask: &[bool]) -> Result<()> {
    if mask.len() != width * height {
        return Err(Error::Argument(format!(
            "mask length {} does not match {width}x{height}",
            mask.len()
        )));
    }
    let mut bytes = format!("P5\n{width} {height}\n255\n").into_bytes();
    bytes.extend(mask.iter().map(|&m| if m { 255u8 } else { 0u8 }));
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Write a superpixel label map as a 16-bit (big-endian sample) binary PGM.
pub fn write_pgm_labels(path: &Path, width: usize, height: usize, labels: &[u32]) -> Result<()> {
    if labels.len() != width * height {
        return Err(Error::Argument(format!(
            "label map length {} does not match {width}x{height}",
            labels.len()
        )));
    }
    if let Some(&max) = labels.iter().max() {
        if max > u16::MAX as u32 {
            return Err(Error::Argument(format!(
                "label {max} exceeds 16-bit PGM range"
            )));
        }
    }
    let mut bytes = format!("P5\n{width} {height}\n65535\n").into_bytes();
    for &l in labels {
        bytes.extend_from_slice(&(l as u16).to_be_bytes());
    }
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

struct PgmHeader {
    width: usize,
    height: usize,
    maxval: u32,
    data_offset: usize,
}

fn parse_header(path: &Path, bytes: &[u8]) -> Result<PgmHeader> {
    if bytes.len() < 2 || &bytes[0..2] != b"P5" {
        return Err(Error::format(path, "not a binary PGM (missing P5 magic)"));
    }
    // Header tokens separated by whitespace, with '#' comments to end of line.
    let mut pos = 2;
    let mut fields = [0u32; 3];
    for field in fields.iter_mut() {
        // Skip whitespace and comments.
        loop {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < bytes.len() && bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
            } else {
                break;
            }
        }
        let start = pos;
        while pos < bytes.len() && bytes[pos].is_ascii_digit() {
            pos += 1;
        }
        if start == pos {
            return Err(Error::format(path, "truncated PGM header"));
        }
        let token = std::str::from_utf8(&bytes[start..pos]).unwrap();
        *field = token
            .parse()
            .map_err(|_| Error::format(path, format!("bad header token {token}")))?;
    }
    // Exactly one whitespace byte separates the header from the raster.
    if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
        return Err(Error::format(path, "missing raster separator"));
    }
    pos += 1;
    let [width, height, maxval] = fields;
    if width == 0 || height == 0 {
        return Err(Error::format(path, "zero PGM dimension"));
    }
    Ok(PgmHeader {
        width: width as usize,
        height: height as usize,
        maxval,
        data_offset: pos,
    })
}

/// Read an 8-bit binary PGM into a `[0, 1]` grayscale field.
pub fn read_pgm_gray(path: &Path) -> Result<ScalarField> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let h = parse_header(path, &bytes)?;
    if h.maxval == 0 || h.maxval > 255 {
        return Err(Error::format(
            path,
            format!("unsupported maxval {} (expected 1..=255)", h.maxval),
        ));
    }
    let n = h.width * h.height;
    let data = &bytes[h.data_offset..];
    if data.len() != n {
        return Err(Error::format(
            path,
            format!("raster length {} does not match {n} pixels", data.len()),
        ));
    }
    let maxval = h.maxval as f64;
    let values = data.iter().map(|&b| b as f64 / maxval).collect();
    ScalarField::new(h.width, h.height, values)
}

/// Read an 8-bit binary PGM as a binary mask: any nonzero pixel is positive.
pub fn read_pgm_mask(path: &Path) -> Result<(usize, usize, Vec<bool>)> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let h = parse_header(path, &bytes)?;
    if h.maxval == 0 || h.maxval > 255 {
        return Err(Error::format(
            path,
            format!("unsupported maxval {} (expected 1..=255)", h.maxval),
        ));
    }
    let n = h.width * h.height;
    let data = &bytes[h.data_offset..];
    if data.len() != n {
        return Err(Error::format(
            path,
            format!("raster length {} does not match {n} pixels", data.len()),
        ));
    }
    Ok((h.width, h.height, data.iter().map(|&b| b != 0).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gray_roundtrip_on_quantized_values() {
        let field = ScalarField::from_fn(6, 4, |x, y| ((x + 6 * y) as f64 * 9.0).round() / 255.0);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.pgm");
        write_pgm_gray(&path, &field).unwrap();
        let back = read_pgm_gray(&path).unwrap();
        for (a, b) in field.values().iter().zip(back.values()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn mask_roundtrip() {
        let mask: Vec<bool> = (0..20).map(|i| i % 3 == 0).collect();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.pgm");
        write_pgm_mask(&path, 5, 4, &mask).unwrap();
        let (w, h, back) = read_pgm_mask(&path).unwrap();
        assert_eq!((w, h), (5, 4));
        assert_eq!(back, mask);
    }

    #[test]
    fn header_comments_are_skipped() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.pgm");
        fs::write(&path, b"P5\n# a comment\n2 1\n255\n\x00\xff").unwrap();
        let f = read_pgm_gray(&path).unwrap();
        assert_eq!(f.values(), &[0.0, 1.0]);
    }

    #[test]
    fn rejects_truncated_raster() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.pgm");
        fs::write(&path, b"P5\n4 4\n255\n\x00\x01").unwrap();
        assert!(matches!(read_pgm_gray(&path), Err(Error::Format { .. })));
    }

    #[test]
    fn labels_written_as_16_bit() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("l.pgm");
        write_pgm_labels(&path, 2, 1, &[1, 300]).unwrap();
        let bytes = fs::read(&path).unwrap();
        let header = b"P5\n2 1\n65535\n";
        assert_eq!(&bytes[..header.len()], header);
        assert_eq!(&bytes[header.len()..], &[0, 1, 1, 44]);
    }
}
