//! Per-pixel PCA surface normals and curvature over organized point clouds.
//!
//! The neighborhood of a pixel is its k x k window intersected with a 3D
//! radius ball around the center point; the radius cutoff rejects points
//! across depth discontinuities, the dominant failure mode of windowed PCA
//! at object edges. The normal is the eigenvector of the smallest
//! covariance eigenvalue, oriented to face the camera; curvature is the
//! smallest eigenvalue over the eigenvalue sum.

use crate::camera::{Point3, PointCloud};
use crate::eigen::eigen_symmetric3;
use crate::error::{Error, Result};
use crate::scalar::{real, Real};

/// Degenerate, nearly collinear neighborhoods (no unique least-variance
/// direction) are rejected when lambda2/lambda3 falls below this ratio.
const COLLINEARITY_RATIO: f64 = 1e-6;

/// Neighborhood selection parameters for the PCA.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeighborhoodConfig<T> {
    /// Odd pixel window side length, >= 3.
    pub window: usize,
    /// Maximum 3D distance from the center point, in meters.
    pub radius: T,
    /// Minimum neighbor count (center included) for a valid PCA.
    pub min_points: usize,
}

impl<T: Real> NeighborhoodConfig<T> {
    pub fn new(window: usize, radius: T, min_points: usize) -> Result<Self> {
        let cfg = Self {
            window,
            radius,
            min_points,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.window < 3 || self.window.is_multiple_of(2) {
            return Err(Error::invalid(format!(
                "neighborhood: window must be odd and >= 3, got {}",
                self.window
            )));
        }
        if !self.radius.is_finite() || self.radius <= T::zero() {
            return Err(Error::invalid(format!(
                "neighborhood: radius must be positive and finite, got {}",
                self.radius
            )));
        }
        if self.min_points < 3 {
            return Err(Error::invalid(format!(
                "neighborhood: min_points must be >= 3, got {}",
                self.min_points
            )));
        }
        Ok(())
    }
}

impl<T: Real> Default for NeighborhoodConfig<T> {
    /// window 5, radius 5 mm, min_points 5.
    fn default() -> Self {
        Self {
            window: 5,
            radius: real(0.005),
            min_points: 5,
        }
    }
}

/// Per-pixel unit normals, curvature, and validity. Invalid pixels carry a
/// zero normal and zero curvature.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalMap<T> {
    width: usize,
    height: usize,
    normals: Vec<Point3<T>>,
    curvature: Vec<T>,
    valid: Vec<bool>,
}

impl<T: Real> NormalMap<T> {
    pub fn from_parts(
        width: usize,
        height: usize,
        normals: Vec<Point3<T>>,
        curvature: Vec<T>,
        valid: Vec<bool>,
    ) -> Result<Self> {
        let n = width * height;
        if normals.len() != n || curvature.len() != n || valid.len() != n {
            return Err(Error::invalid(format!(
                "normal map: expected {n} entries for {width}x{height}, got {}/{}/{}",
                normals.len(),
                curvature.len(),
                valid.len()
            )));
        }
        let unit_tol = real::<T>(1e-6);
        let third = real::<T>(1.0 / 3.0) + real::<T>(1e-6);
        for i in 0..n {
            if !valid[i] {
                continue;
            }
            if !normals[i].is_finite() || (normals[i].norm() - T::one()).abs() > unit_tol {
                return Err(Error::invalid(format!(
                    "normal map: entry {i} is not unit length"
                )));
            }
            if curvature[i] < T::zero() || curvature[i] > third {
                return Err(Error::invalid(format!(
                    "normal map: curvature at {i} outside [0, 1/3]"
                )));
            }
        }
        Ok(Self {
            width,
            height,
            normals,
            curvature,
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
        self.normals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.normals.is_empty()
    }

    pub fn idx(&self, u: usize, v: usize) -> usize {
        v * self.width + u
    }

    pub fn normal(&self, idx: usize) -> Point3<T> {
        self.normals[idx]
    }

    pub fn curvature(&self, idx: usize) -> T {
        self.curvature[idx]
    }

    pub fn is_valid(&self, idx: usize) -> bool {
        self.valid[idx]
    }

    /// Normal and curvature at (u, v), or `None` when invalid.
    pub fn get(&self, u: usize, v: usize) -> Option<(Point3<T>, T)> {
        let i = self.idx(u, v);
        self.valid[i].then(|| (self.normals[i], self.curvature[i]))
    }

    pub fn normals(&self) -> &[Point3<T>] {
        &self.normals
    }

    pub fn curvatures(&self) -> &[T] {
        &self.curvature
    }

    pub fn valid_mask(&self) -> &[bool] {
        &self.valid
    }

    pub fn valid_count(&self) -> usize {
        self.valid.iter().filter(|&&b| b).count()
    }
}

/// Collects the valid points of the k x k window around (u, v) that lie
/// within `radius` of the center point, center included. Windows are
/// truncated at image borders. Returns an empty list when the center pixel
/// itself is invalid.
pub fn gather_neighborhood<T: Real>(
    cloud: &PointCloud<T>,
    u: usize,
    v: usize,
    cfg: &NeighborhoodConfig<T>,
) -> Vec<Point3<T>> {
    let center = match cloud.get(u, v) {
        Some(p) => p,
        None => return Vec::new(),
    };
    let half = cfg.window / 2;
    let r2 = cfg.radius * cfg.radius;
    let u0 = u.saturating_sub(half);
    let v0 = v.saturating_sub(half);
    let u1 = (u + half).min(cloud.width() - 1);
    let v1 = (v + half).min(cloud.height() - 1);
    let mut out = Vec::with_capacity(cfg.window * cfg.window);
    for vv in v0..=v1 {
        for uu in u0..=u1 {
            if let Some(p) = cloud.get(uu, vv) {
                if (p - center).norm_squared() <= r2 {
                    out.push(p);
                }
            }
        }
    }
    out
}

/// Arithmetic centroid and (biased, 1/N) covariance of a point set.
pub fn local_mean_and_covariance<T: Real>(points: &[Point3<T>]) -> Result<(Point3<T>, [[T; 3]; 3])> {
    if points.is_empty() {
        return Err(Error::invalid("local_mean_and_covariance: empty point set"));
    }
    let inv_n = T::one() / real::<T>(points.len() as f64);
    let mut sum = Point3::zero();
    for &p in points {
        sum = sum + p;
    }
    let mean = sum.scaled(inv_n);

    // Two-pass accumulation: subtracting the mean first keeps the entries
    // well conditioned when the cloud is far from the origin.
    let mut c = [[T::zero(); 3]; 3];
    for &p in points {
        let d = p - mean;
        let row = [d.x, d.y, d.z];
        for i in 0..3 {
            for j in 0..3 {
                c[i][j] += row[i] * row[j];
            }
        }
    }
    for row in &mut c {
        for e in row {
            *e *= inv_n;
        }
    }
    Ok((mean, c))
}

/// Flips `n` so it faces the camera: returns `n` when `n . p < 0`,
/// otherwise `-n` (the boundary `n . p = 0` flips too). The output always
/// satisfies `n . p <= 0`.
///
/// Degenerate case: `p` at the origin has no viewing direction; `n` is
/// returned unchanged.
pub fn orient_to_camera<T: Real>(n: Point3<T>, p: Point3<T>) -> Point3<T> {
    if p.norm_squared() == T::zero() {
        return n;
    }
    if n.dot(p) < T::zero() {
        n
    } else {
        -n
    }
}

/// PCA normal and curvature of one neighborhood, camera-oriented against the
/// center point. Returns `None` when the neighborhood is too small, has a
/// zero-trace covariance, or is degenerately collinear.
pub fn estimate_normal<T: Real>(
    points: &[Point3<T>],
    center: Point3<T>,
    min_points: usize,
) -> Option<(Point3<T>, T)> {
    if points.len() < min_points {
        return None;
    }
    let (_, c) = local_mean_and_covariance(points).ok()?;
    let eig = eigen_symmetric3(c).ok()?;
    let [l1, l2, l3] = eig.eigenvalues;
    let l1 = l1.max(T::zero());
    let trace = l1 + l2 + l3;
    if trace.is_nan() || trace <= T::zero() {
        return None;
    }
    if l2 / l3 < real::<T>(COLLINEARITY_RATIO) {
        return None;
    }
    // Division can land one ulp above the representable 1/3; clamp so the
    // documented bound holds exactly.
    let kappa = (l1 / trace).min(real::<T>(1.0 / 3.0));
    let n = orient_to_camera(eig.eigenvectors[0], center);
    Some((n, kappa))
}

/// Runs the full per-pixel pipeline: gather, covariance, eigen, orient.
///
/// Pixels that are invalid in the cloud, fail `min_points`, or have a
/// degenerate neighborhood come out invalid. `cfg` must already satisfy its
/// own invariants.
pub fn estimate_normal_map<T: Real>(cloud: &PointCloud<T>, cfg: &NeighborhoodConfig<T>) -> NormalMap<T> {
    cfg.validate().expect("neighborhood config must be valid");
    let n = cloud.len();
    let mut normals = vec![Point3::zero(); n];
    let mut curvature = vec![T::zero(); n];
    let mut valid = vec![false; n];
    for v in 0..cloud.height() {
        for u in 0..cloud.width() {
            let i = cloud.idx(u, v);
            if !cloud.is_valid(i) {
                continue;
            }
            let pts = gather_neighborhood(cloud, u, v, cfg);
            if let Some((nrm, kappa)) = estimate_normal(&pts, cloud.point(i), cfg.min_points) {
                normals[i] = nrm;
                curvature[i] = kappa;
                valid[i] = true;
            }
        }
    }
    NormalMap {
        width: cloud.width(),
        height: cloud.height(),
        normals,
        curvature,
        valid,
    }
}
