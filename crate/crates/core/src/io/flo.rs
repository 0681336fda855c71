//! Middlebury `.flo` optical flow files.
//!
//! Layout: 4-byte little-endian IEEE-754 magic `202021.25`, 32-bit
//! little-endian signed width and height, then `width*height` interleaved
//! `(u, v)` pairs of 32-bit little-endian floats in row-major order.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::flow::FlowField;

const FLO_MAGIC: f32 = 202021.25;
/// Components at or beyond this magnitude mark unknown flow in the wild.
const SENTINEL: f32 = 1e9;
const MAX_DIM: i32 = 1 << 20;

pub fn read_flo(path: &Path) -> Result<FlowField> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.len() < 12 {
        return Err(Error::format(path, "file too short for a .flo header"));
    }
    let magic = f32::from_le_bytes(bytes[0..4].try_into().unwrap());
    if magic != FLO_MAGIC {
        return Err(Error::format(
            path,
            format!("bad magic number {magic} (expected {FLO_MAGIC})"),
        ));
    }
    let width = i32::from_le_bytes(bytes[4..8].try_into().unwrap());
    let height = i32::from_le_bytes(bytes[8..12].try_into().unwrap());
    if width <= 0 || height <= 0 || width > MAX_DIM || height > MAX_DIM {
        return Err(Error::format(
            path,
            format!("implausible dimensions {width}x{height}"),
        ));
    }
    let (w, h) = (width as usize, height as usize);
    let expected = 12 + w * h * 8;
    if bytes.len() != expected {
        return Err(Error::format(
            path,
            format!(
                "payload length mismatch: header declares {w}x{h} ({expected} bytes), file has {}",
                bytes.len()
            ),
        ));
    }
    let mut u = Vec::with_capacity(w * h);
    let mut v = Vec::with_capacity(w * h);
    for pair in bytes[12..].chunks_exact(8) {
        let uu = f32::from_le_bytes(pair[0..4].try_into().unwrap());
        let vv = f32::from_le_bytes(pair[4..8].try_into().unwrap());
        for c in [uu, vv] {
            if !c.is_finite() {
                return Err(Error::Data(format!(
                    "{}: non-finite flow component",
                    path.display()
                )));
            }
            if c.abs() > SENTINEL {
                return Err(Error::Data(format!(
                    "{}: sentinel flow component {c}",
                    path.display()
                )));
            }
        }
        u.push(uu as f64);
        v.push(vv as f64);
    }
    FlowField::new(w, h, u, v)
}

pub fn write_flo(path: &Path, flow: &FlowField) -> Result<()> {
    let (w, h) = (flow.width(), flow.height());
    let mut bytes = Vec::with_capacity(12 + w * h * 8);
    bytes.extend_from_slice(&FLO_MAGIC.to_le_bytes());
    bytes.extend_from_slice(&(w as i32).to_le_bytes());
    bytes.extend_from_slice(&(h as i32).to_le_bytes());
    for i in 0..w * h {
        bytes.extend_from_slice(&(flow.u()[i] as f32).to_le_bytes());
        bytes.extend_from_slice(&(flow.v()[i] as f32).to_le_bytes());
    }
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Build .flo bytes directly from the format definition, independent of
    /// the writer.
    fn raw_flo(width: i32, height: i32, pairs: &[(f32, f32)]) -> Vec<u8> {
        let mut b = Vec::new();
        b.extend_from_slice(&202021.25f32.to_le_bytes());
        b.extend_from_slice(&width.to_le_bytes());
        b.extend_from_slice(&height.to_le_bytes());
        for &(u, v) in pairs {
            b.extend_from_slice(&u.to_le_bytes());
            b.extend_from_slice(&v.to_le_bytes());
        }
        b
    }

    fn write_tmp(bytes: &[u8]) -> tempfile::NamedTempFile {
        use std::io::Write;
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(bytes).unwrap();
        f.flush().unwrap();
        f
    }

    #[test]
    fn reads_reference_bytes() {
        let f = write_tmp(&raw_flo(2, 1, &[(1.0, 0.0), (0.0, -2.5)]));
        let flow = read_flo(f.path()).unwrap();
        assert_eq!(flow.width(), 2);
        assert_eq!(flow.height(), 1);
        assert_eq!(flow.u(), &[1.0, 0.0]);
        assert_eq!(flow.v(), &[0.0, -2.5]);
    }

    #[test]
    fn rejects_bad_magic() {
        let mut bytes = raw_flo(1, 1, &[(0.0, 0.0)]);
        bytes[0..4].copy_from_slice(&123.0f32.to_le_bytes());
        let f = write_tmp(&bytes);
        assert!(matches!(read_flo(f.path()), Err(Error::Format { .. })));
    }

    #[test]
    fn rejects_length_mismatch() {
        // Header declares 3x3 but only 8 vectors follow.
        let pairs: Vec<(f32, f32)> = (0..8).map(|i| (i as f32, 0.0)).collect();
        let f = write_tmp(&raw_flo(3, 3, &pairs));
        assert!(matches!(read_flo(f.path()), Err(Error::Format { .. })));
    }

    #[test]
    fn rejects_sentinel_and_non_finite() {
        let f = write_tmp(&raw_flo(1, 1, &[(2e9, 0.0)]));
        assert!(matches!(read_flo(f.path()), Err(Error::Data(_))));
        let f = write_tmp(&raw_flo(1, 1, &[(f32::NAN, 0.0)]));
        assert!(matches!(read_flo(f.path()), Err(Error::Data(_))));
    }

    #[test]
    fn roundtrip_preserves_f32_values() {
        let u: Vec<f64> = (0..12).map(|i| i as f64 * 0.25 - 1.5).collect();
        let v: Vec<f64> = (0..12).map(|i| -(i as f64) * 0.5).collect();
        let flow = FlowField::new(4, 3, u, v).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.flo");
        write_flo(&path, &flow).unwrap();
        let back = read_flo(&path).unwrap();
        assert_eq!(back, flow);
    }
}
