//! On-disk formats: Middlebury `.flo` flow files, binary PGM images, and
//! PNG overlays.

pub mod flo;
pub mod overlay;
pub mod pgm;
