//! Incidence-angle depth reliability scores and sampling probabilities.
//!
//! A pixel whose surface is seen head-on gets r = 1; the score falls off as
//! cos^beta of the incidence angle between the surface normal and the
//! viewing ray, reaching 0 at grazing incidence. Scores normalize into a
//! discrete sampling distribution over the valid pixels.

use crate::camera::{Point3, PointCloud};
use crate::error::{Error, Result};
use crate::normals::NormalMap;
use crate::scalar::{real, Real};

const UNIT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReliabilityConfig<T> {
    /// Grazing-angle exponent, >= 1.
    pub beta: T,
    /// Optional planarity gate: when set to kappa_max, the score is
    /// multiplied by max(0, 1 - kappa/kappa_max). Off by default so the
    /// score is the pure angle term.
    pub kappa_max: Option<T>,
}

impl<T: Real> ReliabilityConfig<T> {
    pub fn new(beta: T) -> Result<Self> {
        let cfg = Self {
            beta,
            kappa_max: None,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_curvature_gate(beta: T, kappa_max: T) -> Result<Self> {
        let cfg = Self {
            beta,
            kappa_max: Some(kappa_max),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.beta.is_finite() || self.beta < T::one() {
            return Err(Error::invalid(format!(
                "reliability: beta must be finite and >= 1, got {}",
                self.beta
            )));
        }
        if let Some(km) = self.kappa_max {
            if !km.is_finite() || km <= T::zero() {
                return Err(Error::invalid(format!(
                    "reliability: kappa_max must be positive and finite, got {km}"
                )));
            }
        }
        Ok(())
    }
}

impl<T: Real> Default for ReliabilityConfig<T> {
    /// beta = 2, no curvature gate.
    fn default() -> Self {
        Self {
            beta: real(2.0),
            kappa_max: None,
        }
    }
}

/// Per-pixel scores in [0, 1]; invalid pixels carry 0.
#[derive(Debug, Clone, PartialEq)]
pub struct ReliabilityMap<T> {
    width: usize,
    height: usize,
    scores: Vec<T>,
    valid: Vec<bool>,
}

impl<T: Real> ReliabilityMap<T> {
    pub fn from_parts(width: usize, height: usize, scores: Vec<T>, valid: Vec<bool>) -> Result<Self> {
        let n = width * height;
        if scores.len() != n || valid.len() != n {
            return Err(Error::invalid(format!(
                "reliability map: expected {n} entries for {width}x{height}, got {}/{}",
                scores.len(),
                valid.len()
            )));
        }
        for (i, (&r, &ok)) in scores.iter().zip(&valid).enumerate() {
            if ok {
                if !r.is_finite() || r < T::zero() || r > T::one() {
                    return Err(Error::invalid(format!(
                        "reliability map: score at {i} outside [0, 1]"
                    )));
                }
            } else if r != T::zero() {
                return Err(Error::invalid(format!(
                    "reliability map: invalid pixel at {i} carries nonzero score"
                )));
            }
        }
        Ok(Self {
            width,
            height,
            scores,
            valid,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub fn idx(&self, u: usize, v: usize) -> usize {
        v * self.width + u
    }

    pub fn score(&self, idx: usize) -> T {
        self.scores[idx]
    }

    pub fn is_valid(&self, idx: usize) -> bool {
        self.valid[idx]
    }

    pub fn get(&self, u: usize, v: usize) -> Option<T> {
        let i = self.idx(u, v);
        self.valid[i].then(|| self.scores[i])
    }

    pub fn scores(&self) -> &[T] {
        &self.scores
    }

    pub fn valid_mask(&self) -> &[bool] {
        &self.valid
    }

    pub fn valid_count(&self) -> usize {
        self.valid.iter().filter(|&&b| b).count()
    }

    /// Invalidates (and zeroes) every pixel where `mask` is false. Used to
    /// restrict sampling eligibility, e.g. to pixels that survived sensor
    /// dropout.
    pub fn restrict(&mut self, mask: &[bool]) -> Result<()> {
        if mask.len() != self.scores.len() {
            return Err(Error::invalid("reliability restrict: mask length mismatch"));
        }
        for (i, &keep) in mask.iter().enumerate() {
            if !keep {
                self.valid[i] = false;
                self.scores[i] = T::zero();
            }
        }
        Ok(())
    }
}

/// Discrete sampling distribution over pixel linear indices.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityVector<T> {
    pub indices: Vec<usize>,
    pub probs: Vec<T>,
    /// True when all reliability mass was zero and the distribution fell
    /// back to uniform over the valid pixels.
    pub uniform_fallback: bool,
}

/// Unit vector from the camera center to `p`.
pub fn viewing_direction<T: Real>(p: Point3<T>) -> Result<Point3<T>> {
    p.normalized()
        .ok_or_else(|| Error::invalid("viewing_direction: zero-length point"))
}

/// |n . v| clamped to [0, 1]. Both inputs must be unit length within 1e-6.
pub fn incidence_cosine<T: Real>(n: Point3<T>, v: Point3<T>) -> Result<T> {
    let tol = real::<T>(UNIT_TOL);
    if (n.norm() - T::one()).abs() > tol || (v.norm() - T::one()).abs() > tol {
        return Err(Error::invalid("incidence_cosine: inputs must be unit vectors"));
    }
    Ok(n.dot(v).abs().min(T::one()))
}

/// cos^beta theta. Identity at beta = 1; larger beta penalizes grazing
/// angles harder.
pub fn angle_score<T: Real>(cos_theta: T, beta: T) -> T {
    if beta == T::one() {
        cos_theta
    } else {
        cos_theta.powf(beta)
    }
}

/// Scores every pixel that has both a valid point and a valid normal;
/// everything else comes out invalid with r = 0.
pub fn reliability_map<T: Real>(
    normals: &NormalMap<T>,
    cloud: &PointCloud<T>,
    cfg: &ReliabilityConfig<T>,
) -> Result<ReliabilityMap<T>> {
    cfg.validate()?;
    if normals.width() != cloud.width() || normals.height() != cloud.height() {
        return Err(Error::invalid(format!(
            "reliability_map: normal map {}x{} does not match cloud {}x{}",
            normals.width(),
            normals.height(),
            cloud.width(),
            cloud.height()
        )));
    }
    let n = cloud.len();
    let mut scores = vec![T::zero(); n];
    let mut valid = vec![false; n];
    for i in 0..n {
        if !cloud.is_valid(i) || !normals.is_valid(i) {
            continue;
        }
        let p = cloud.point(i);
        let v = match p.normalized() {
            Some(v) => v,
            None => continue,
        };
        let cos = normals.normal(i).dot(v).abs().min(T::one());
        let mut r = angle_score(cos, cfg.beta);
        if let Some(km) = cfg.kappa_max {
            r *= (T::one() - normals.curvature(i) / km).max(T::zero());
        }
        scores[i] = r;
        valid[i] = true;
    }
    Ok(ReliabilityMap {
        width: cloud.width(),
        height: cloud.height(),
        scores,
        valid,
    })
}

/// Normalizes reliability scores into sampling probabilities over the valid
/// pixels with r > 0. A frame whose reliability mass is all zero falls back
/// to the uniform distribution over all valid pixels, flagged in the result.
pub fn to_probabilities<T: Real>(rel: &ReliabilityMap<T>) -> Result<ProbabilityVector<T>> {
    let valid_count = rel.valid_count();
    if valid_count == 0 {
        return Err(Error::invalid("to_probabilities: no valid pixels"));
    }
    let mut indices = Vec::new();
    let mut weights = Vec::new();
    // Compensated summation so the normalizer does not depend on pixel
    // count at float precision.
    let mut sum = T::zero();
    let mut comp = T::zero();
    for i in 0..rel.len() {
        if rel.is_valid(i) && rel.score(i) > T::zero() {
            indices.push(i);
            weights.push(rel.score(i));
            let y = rel.score(i) - comp;
            let t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
    }
    if indices.is_empty() || sum.is_nan() || sum <= T::zero() {
        let uniform = T::one() / real::<T>(valid_count as f64);
        let indices: Vec<usize> = (0..rel.len()).filter(|&i| rel.is_valid(i)).collect();
        let probs = vec![uniform; indices.len()];
        return Ok(ProbabilityVector {
            indices,
            probs,
            uniform_fallback: true,
        });
    }
    let probs = weights.iter().map(|&w| w / sum).collect();
    Ok(ProbabilityVector {
        indices,
        probs,
        uniform_fallback: false,
    })
}
