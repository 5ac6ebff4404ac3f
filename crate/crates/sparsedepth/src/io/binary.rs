//! Raw little-endian float containers for lossless pipelines.
//!
//! Depth and reliability files carry a 16-byte header (8-byte magic, then
//! width and height as u32) followed by one f32 per pixel, row-major.
//! Normal maps are a headerless record stream, 17 bytes per pixel: a
//! validity byte, then nx, ny, nz, kappa as f32. The stream is headerless
//! so the reader must be told the image shape.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::camera::{DepthMap, Point3};
use crate::error::{Error, Result};
use crate::normals::NormalMap;
use crate::reliability::ReliabilityMap;
use crate::scalar::{real, to_f64, Real};

pub(crate) const DEPTH_MAGIC: [u8; 8] = *b"DPTHF32\0";
pub(crate) const RELIABILITY_MAGIC: [u8; 8] = *b"RELIF32\0";

const NORMAL_RECORD_BYTES: usize = 17;

fn open_reader(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(
        File::open(path).map_err(|e| Error::io(path, e))?,
    ))
}

fn open_writer(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(
        File::create(path).map_err(|e| Error::io(path, e))?,
    ))
}

fn write_header<W: Write>(w: &mut W, magic: &[u8; 8], width: usize, height: usize) -> std::io::Result<()> {
    w.write_all(magic)?;
    w.write_all(&(width as u32).to_le_bytes())?;
    w.write_all(&(height as u32).to_le_bytes())
}

fn read_header(r: &mut impl Read, magic: &[u8; 8], path: &Path) -> Result<(usize, usize)> {
    let mut head = [0u8; 16];
    r.read_exact(&mut head)
        .map_err(|_| Error::format(path, "file shorter than the 16-byte header"))?;
    if head[..8] != magic[..] {
        return Err(Error::format(
            path,
            format!(
                "bad magic {:?}, expected {:?}",
                &head[..8],
                String::from_utf8_lossy(magic)
            ),
        ));
    }
    let width = u32::from_le_bytes(head[8..12].try_into().unwrap()) as usize;
    let height = u32::from_le_bytes(head[12..16].try_into().unwrap()) as usize;
    Ok((width, height))
}

fn read_payload_f32(r: &mut impl Read, count: usize, path: &Path) -> Result<Vec<f32>> {
    let mut bytes = vec![0u8; count * 4];
    r.read_exact(&mut bytes)
        .map_err(|_| Error::format(path, format!("payload shorter than {count} f32 values")))?;
    let mut extra = [0u8; 1];
    if r.read(&mut extra).map_err(|e| Error::io(path, e))? != 0 {
        return Err(Error::format(path, "trailing bytes after payload"));
    }
    Ok(bytes
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
        .collect())
}

fn write_depth_f32_to<T: Real>(d: &DepthMap<T>, w: &mut impl Write) -> std::io::Result<()> {
    write_header(w, &DEPTH_MAGIC, d.width(), d.height())?;
    for i in 0..d.len() {
        let v = if d.is_valid(i) {
            to_f64(d.value(i)) as f32
        } else {
            0.0
        };
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()
}

/// Writes depth as headered f32; invalid pixels are stored as 0.
pub fn write_depth_f32<T: Real>(d: &DepthMap<T>, path: &Path) -> Result<()> {
    let mut w = open_writer(path)?;
    write_depth_f32_to(d, &mut w).map_err(|e| Error::io(path, e))
}

/// Reads headered f32 depth. Non-positive or non-finite entries decode to
/// invalid pixels, mirroring the PNG convention.
pub fn read_depth_f32<T: Real>(path: &Path) -> Result<DepthMap<T>> {
    let mut r = open_reader(path)?;
    let (width, height) = read_header(&mut r, &DEPTH_MAGIC, path)?;
    let raw = read_payload_f32(&mut r, width * height, path)?;
    let values: Vec<T> = raw.into_iter().map(|v| real::<T>(v as f64)).collect();
    DepthMap::from_values(width, height, values)
}

fn write_reliability_f32_to<T: Real>(
    rel: &ReliabilityMap<T>,
    w: &mut impl Write,
) -> std::io::Result<()> {
    write_header(w, &RELIABILITY_MAGIC, rel.width(), rel.height())?;
    for i in 0..rel.len() {
        let v = if rel.is_valid(i) {
            to_f64(rel.score(i)) as f32
        } else {
            0.0
        };
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()
}

/// Writes reliability scores as headered f32; invalid pixels store 0.
pub fn write_reliability_f32<T: Real>(rel: &ReliabilityMap<T>, path: &Path) -> Result<()> {
    let mut w = open_writer(path)?;
    write_reliability_f32_to(rel, &mut w).map_err(|e| Error::io(path, e))
}

/// Reads headered f32 reliability scores. The container stores scores only;
/// pixels written as invalid come back as score 0 and cannot be told apart
/// from a valid score of exactly 0.
pub fn read_reliability_f32<T: Real>(path: &Path) -> Result<(usize, usize, Vec<T>)> {
    let mut r = open_reader(path)?;
    let (width, height) = read_header(&mut r, &RELIABILITY_MAGIC, path)?;
    let raw = read_payload_f32(&mut r, width * height, path)?;
    Ok((
        width,
        height,
        raw.into_iter().map(|v| real::<T>(v as f64)).collect(),
    ))
}

fn write_normals_bin_to<T: Real>(nm: &NormalMap<T>, w: &mut impl Write) -> std::io::Result<()> {
    for i in 0..nm.len() {
        if nm.is_valid(i) {
            let n = nm.normal(i);
            w.write_all(&[1u8])?;
            for c in [n.x, n.y, n.z, nm.curvature(i)] {
                w.write_all(&(to_f64(c) as f32).to_le_bytes())?;
            }
        } else {
            w.write_all(&[0u8; NORMAL_RECORD_BYTES])?;
        }
    }
    w.flush()
}

/// Writes the normal map as a headerless record stream, one 17-byte record
/// per pixel in row-major order: valid u8, then nx ny nz kappa as f32 LE.
/// Invalid pixels write a zero record.
pub fn write_normals_bin<T: Real>(nm: &NormalMap<T>, path: &Path) -> Result<()> {
    let mut w = open_writer(path)?;
    write_normals_bin_to(nm, &mut w).map_err(|e| Error::io(path, e))
}

/// Reads a normal-map record stream. The caller supplies the image shape
/// because the stream has no header; the file length must be exactly
/// width x height records. Validity bytes other than 0 or 1 are rejected.
pub fn read_normals_bin<T: Real>(path: &Path, width: usize, height: usize) -> Result<NormalMap<T>> {
    let mut r = open_reader(path)?;
    let n = width * height;
    let mut bytes = Vec::with_capacity(n * NORMAL_RECORD_BYTES);
    r.read_to_end(&mut bytes).map_err(|e| Error::io(path, e))?;
    if bytes.len() != n * NORMAL_RECORD_BYTES {
        return Err(Error::format(
            path,
            format!(
                "expected {} bytes for {width}x{height} ({NORMAL_RECORD_BYTES} per pixel), got {}",
                n * NORMAL_RECORD_BYTES,
                bytes.len()
            ),
        ));
    }

    let mut normals = vec![Point3::zero(); n];
    let mut curvature = vec![T::zero(); n];
    let mut valid = vec![false; n];
    for (i, rec) in bytes.chunks_exact(NORMAL_RECORD_BYTES).enumerate() {
        let f = |k: usize| {
            real::<T>(f32::from_le_bytes(rec[1 + 4 * k..5 + 4 * k].try_into().unwrap()) as f64)
        };
        match rec[0] {
            0 => {}
            1 => {
                normals[i] = Point3::new(f(0), f(1), f(2));
                curvature[i] = f(3);
                valid[i] = true;
            }
            other => {
                return Err(Error::format(
                    path,
                    format!("record {i}: validity byte must be 0 or 1, got {other}"),
                ))
            }
        }
    }
    NormalMap::from_parts(width, height, normals, curvature, valid)
}
