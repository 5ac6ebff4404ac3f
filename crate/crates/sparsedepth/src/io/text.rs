//! Plain-text formats: intrinsics, sample lists, key-value files, CSV.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::camera::CameraIntrinsics;
use crate::completion::{summarize_comparison, ComparisonRow};
use crate::error::{Error, Result};
use crate::sampler::SampleSet;
use crate::scalar::{real, to_f64, Real};

/// Parses a key-value text file: one `key value` pair per line, split on
/// the first whitespace run. Blank lines and lines starting with `#` are
/// skipped. Later occurrences of a key are kept alongside earlier ones;
/// precedence is the caller's business.
pub fn read_kv(path: &Path) -> Result<Vec<(String, String)>> {
    let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut pairs = Vec::new();
    for (lineno, line) in content.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match line.split_once(char::is_whitespace) {
            Some((k, v)) => pairs.push((k.to_string(), v.trim().to_string())),
            None => {
                return Err(Error::format(
                    path,
                    format!("line {}: expected `key value`, got `{line}`", lineno + 1),
                ))
            }
        }
    }
    Ok(pairs)
}

/// Reads camera intrinsics from a key-value file with keys fx, fy, cx, cy.
///
/// The parser only checks presence and numeric syntax; geometric validity
/// (positive focal lengths, finiteness) is enforced later when the
/// intrinsics are paired with an image. A missing or malformed key is a
/// format error naming that key.
pub fn read_intrinsics<T: Real>(path: &Path) -> Result<CameraIntrinsics<T>> {
    let pairs = read_kv(path)?;
    let lookup = |key: &str| -> Result<T> {
        let raw = pairs
            .iter()
            .rev()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
            .ok_or_else(|| Error::format(path, format!("missing key `{key}`")))?;
        let num: f64 = raw
            .parse()
            .map_err(|_| Error::format(path, format!("key `{key}`: `{raw}` is not a number")))?;
        Ok(real::<T>(num))
    };
    Ok(CameraIntrinsics {
        fx: lookup("fx")?,
        fy: lookup("fy")?,
        cx: lookup("cx")?,
        cy: lookup("cy")?,
    })
}

pub fn write_intrinsics<T: Real>(k: &CameraIntrinsics<T>, path: &Path) -> Result<()> {
    let body = format!(
        "fx {}\nfy {}\ncx {}\ncy {}\n",
        to_f64(k.fx),
        to_f64(k.fy),
        to_f64(k.cx),
        to_f64(k.cy)
    );
    fs::write(path, body).map_err(|e| Error::io(path, e))
}

/// Formats a positive depth with 6 significant digits in plain decimal.
pub fn format_depth_6sig(d: f64) -> String {
    if !d.is_finite() || d <= 0.0 {
        return format!("{d:.6}");
    }
    let prec = (5 - d.log10().floor() as i64).max(0) as usize;
    format!("{d:.prec$}")
}

/// Writes one line per sample: `u v depth_m`, depth with 6 significant
/// digits, in draw order.
pub fn write_samples<T: Real>(samples: &SampleSet<T>, path: &Path) -> Result<()> {
    let mut out = String::new();
    for (j, &d) in samples.depths.iter().enumerate() {
        let (u, v) = samples.pos(j);
        out.push_str(&format!("{u} {v} {}\n", format_depth_6sig(to_f64(d))));
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Reads a sample list back as (u, v, depth) triples in file order.
pub fn read_samples(path: &Path) -> Result<Vec<(usize, usize, f64)>> {
    let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut rows = Vec::new();
    for (lineno, line) in content.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let parsed = (|| -> Option<(usize, usize, f64)> {
            let [u, v, d] = fields.as_slice() else { return None };
            Some((u.parse().ok()?, v.parse().ok()?, d.parse().ok()?))
        })();
        match parsed {
            Some(row) => rows.push(row),
            None => {
                return Err(Error::format(
                    path,
                    format!("line {}: expected `u v depth`, got `{line}`", lineno + 1),
                ))
            }
        }
    }
    Ok(rows)
}

/// Writes the comparison table as CSV: header, one row per
/// (strategy, k, seed), then per-(strategy, k) summary rows whose seed
/// column reads `mean`. Numbers use the shortest representation that
/// round-trips, so identical runs produce identical bytes.
pub fn write_comparison_csv(rows: &[ComparisonRow], path: &Path) -> Result<()> {
    let f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = std::io::BufWriter::new(f);
    let go = |w: &mut dyn Write| -> std::io::Result<()> {
        writeln!(w, "strategy,k,seed,mae,rmse,evaluated_pixels")?;
        for r in rows {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                r.strategy, r.k, r.seed, r.metrics.mae, r.metrics.rmse, r.metrics.evaluated_pixels
            )?;
        }
        for s in summarize_comparison(rows) {
            let pixels: usize = rows
                .iter()
                .filter(|r| r.strategy == s.strategy && r.k == s.k)
                .map(|r| r.metrics.evaluated_pixels)
                .sum();
            let mean_pixels = pixels as f64 / s.seeds as f64;
            writeln!(
                w,
                "{},{},mean,{},{},{}",
                s.strategy, s.k, s.mean_mae, s.mean_rmse, mean_pixels
            )?;
        }
        w.flush()
    };
    go(&mut w).map_err(|e| Error::io(path, e))
}
