//! File formats for every artifact the pipeline produces or consumes.
//!
//! Depth travels as 16-bit grayscale PNG in integer sensor units (millimeters
//! by default) or as raw little-endian f32 with a small header. Reliability
//! is 8-bit PNG for inspection and f32 binary for lossless pipelines.
//! Normal maps are a flat binary record stream. Intrinsics, sample lists,
//! and comparison tables are plain text. All writers are deterministic:
//! identical inputs produce byte-identical files.

mod binary;
mod png;
mod text;

pub use binary::{
    read_depth_f32, read_normals_bin, read_reliability_f32, write_depth_f32, write_normals_bin,
    write_reliability_f32,
};
pub use png::{
    read_depth_png, write_curvature_png, write_depth_png, write_normals_rgb_png,
    write_reliability_png,
};
pub use text::{
    format_depth_6sig, read_intrinsics, read_kv, read_samples, write_comparison_csv,
    write_intrinsics, write_samples,
};

use crate::error::{Error, Result};

/// How metric depth is packed into 16-bit integer pixels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DepthEncoding {
    /// Integer units per meter; 1000 stores millimeters, the NYU convention.
    pub scale: u32,
}

impl DepthEncoding {
    pub const BIT_DEPTH: u32 = 16;

    pub fn new(scale: u32) -> Result<Self> {
        let enc = Self { scale };
        enc.validate()?;
        Ok(enc)
    }

    pub fn validate(&self) -> Result<()> {
        if self.scale == 0 {
            return Err(Error::invalid("depth encoding: scale must be positive"));
        }
        Ok(())
    }

    /// Largest depth in meters the encoding can store.
    pub fn max_depth(&self) -> f64 {
        65535.0 / self.scale as f64
    }
}

impl Default for DepthEncoding {
    fn default() -> Self {
        Self { scale: 1000 }
    }
}
