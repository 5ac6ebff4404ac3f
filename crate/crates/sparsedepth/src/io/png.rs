//! PNG images: 16-bit depth, 8-bit reliability and curvature, RGB normals.

use std::path::Path;

use image::{GrayImage, ImageBuffer, ImageFormat, ImageReader, Luma, Rgb, RgbImage};

use super::DepthEncoding;
use crate::camera::DepthMap;
use crate::error::{Error, Result};
use crate::normals::NormalMap;
use crate::reliability::ReliabilityMap;
use crate::scalar::{real, to_f64, Real};

fn save_png<P>(img: &ImageBuffer<P, Vec<P::Subpixel>>, path: &Path) -> Result<()>
where
    P: image::PixelWithColorType,
    [P::Subpixel]: image::EncodableLayout,
{
    img.save_with_format(path, ImageFormat::Png)
        .map_err(|e| match e {
            image::ImageError::IoError(io) => Error::io(path, io),
            other => Error::format(path, other.to_string()),
        })
}

/// Writes a depth map as a single-channel 16-bit PNG.
///
/// Valid depths are quantized round-to-nearest (halves away from zero) to
/// `depth * scale` integer units; invalid pixels become 0. Depths beyond
/// 65535 units are a range error. Depths that quantize to 0 are stored as 0
/// and will read back invalid; the format cannot distinguish them.
pub fn write_depth_png<T: Real>(d: &DepthMap<T>, path: &Path, enc: DepthEncoding) -> Result<()> {
    enc.validate()?;
    let mut img = ImageBuffer::<Luma<u16>, Vec<u16>>::new(d.width() as u32, d.height() as u32);
    for (i, px) in img.pixels_mut().enumerate() {
        let q = if d.is_valid(i) {
            let units = (to_f64(d.value(i)) * enc.scale as f64).round();
            if !(0.0..=65535.0).contains(&units) {
                return Err(Error::Range(format!(
                    "depth {} m does not fit a 16-bit image at {} units/m",
                    d.value(i),
                    enc.scale
                )));
            }
            units as u16
        } else {
            0
        };
        *px = Luma([q]);
    }
    save_png(&img, path)
}

/// Reads a single-channel 16-bit PNG written by [`write_depth_png`].
/// Pixel value 0 decodes to an invalid pixel, q > 0 to q/scale meters.
pub fn read_depth_png<T: Real>(path: &Path, enc: DepthEncoding) -> Result<DepthMap<T>> {
    enc.validate()?;
    let img = ImageReader::open(path)
        .map_err(|e| Error::io(path, e))?
        .decode()
        .map_err(|e| Error::format(path, e.to_string()))?;
    let gray = match img {
        image::DynamicImage::ImageLuma16(g) => g,
        other => {
            return Err(Error::format(
                path,
                format!(
                    "expected single-channel 16-bit PNG, got {:?}",
                    other.color()
                ),
            ))
        }
    };
    let width = gray.width() as usize;
    let height = gray.height() as usize;
    let scale = real::<T>(enc.scale as f64);
    let mut values = vec![T::zero(); width * height];
    let mut valid = vec![false; width * height];
    for (i, Luma([q])) in gray.pixels().enumerate() {
        if *q > 0 {
            values[i] = real::<T>(*q as f64) / scale;
            valid[i] = true;
        }
    }
    DepthMap::from_parts(width, height, values, valid)
}

/// Writes a reliability map as 8-bit grayscale: pixel = round(255 r),
/// halves away from zero; invalid pixels are 0. Brighter means more
/// reliable. A valid score of exactly 0 is indistinguishable from an
/// invalid pixel in this format.
pub fn write_reliability_png<T: Real>(rel: &ReliabilityMap<T>, path: &Path) -> Result<()> {
    let mut img = GrayImage::new(rel.width() as u32, rel.height() as u32);
    for (i, px) in img.pixels_mut().enumerate() {
        let q = if rel.is_valid(i) {
            (to_f64(rel.score(i)) * 255.0).round().clamp(0.0, 255.0) as u8
        } else {
            0
        };
        *px = Luma([q]);
    }
    save_png(&img, path)
}

/// Writes curvature as 8-bit grayscale. Curvature lives in [0, 1/3], so the
/// stored value is round(255 min(3 kappa, 1)): flat surfaces are black,
/// isotropic neighborhoods are white. Invalid pixels are 0.
pub fn write_curvature_png<T: Real>(nm: &NormalMap<T>, path: &Path) -> Result<()> {
    let mut img = GrayImage::new(nm.width() as u32, nm.height() as u32);
    for (i, px) in img.pixels_mut().enumerate() {
        let q = if nm.is_valid(i) {
            let k3 = (to_f64(nm.curvature(i)) * 3.0).min(1.0);
            (k3 * 255.0).round().clamp(0.0, 255.0) as u8
        } else {
            0
        };
        *px = Luma([q]);
    }
    save_png(&img, path)
}

/// Writes normals as an RGB inspection image with each component mapped
/// from [-1, 1] to [0, 255] via (n + 1)/2. Invalid pixels are black.
pub fn write_normals_rgb_png<T: Real>(nm: &NormalMap<T>, path: &Path) -> Result<()> {
    let mut img = RgbImage::new(nm.width() as u32, nm.height() as u32);
    for (i, px) in img.pixels_mut().enumerate() {
        *px = if nm.is_valid(i) {
            let n = nm.normal(i);
            let ch = |c: T| ((to_f64(c) + 1.0) * 0.5 * 255.0).round().clamp(0.0, 255.0) as u8;
            Rgb([ch(n.x), ch(n.y), ch(n.z)])
        } else {
            Rgb([0, 0, 0])
        };
    }
    save_png(&img, path)
}
