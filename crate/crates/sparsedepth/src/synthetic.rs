//! Analytic test scenes and a geometry-dependent sensor noise model.
//!
//! Scenes (plane, sphere, two-plane corner) render exact depth along the
//! back-projection ray of every pixel together with the analytic surface
//! normal, giving the rest of the pipeline a ground-truth oracle. The noise
//! model grows the depth standard deviation with tan^2 of the incidence
//! angle, the usual geometric amplification of range error under oblique
//! viewing, and drops pixels past a cutoff angle.

use crate::camera::{CameraIntrinsics, DepthMap, Point3, PointCloud};
use crate::error::{Error, Result};
use crate::normals::{orient_to_camera, NormalMap};
use crate::rng::{keyed_rng, DOMAIN_NOISE};
use crate::scalar::{real, Real};
use rand::Rng;

const UNIT_TOL: f64 = 1e-6;
/// sigma(theta) never exceeds 100 * sigma0.
const SIGMA_CAP_FACTOR: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SceneKind<T> {
    /// Points p with n . p = offset; n must be unit length.
    Plane { normal: Point3<T>, offset: T },
    Sphere { center: Point3<T>, radius: T },
    /// Two planes; each pixel sees whichever intersects its ray first.
    Corner {
        normal1: Point3<T>,
        offset1: T,
        normal2: Point3<T>,
        offset2: T,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SceneSpec<T> {
    pub kind: SceneKind<T>,
    pub width: usize,
    pub height: usize,
    pub intrinsics: CameraIntrinsics<T>,
}

impl<T: Real> SceneSpec<T> {
    pub fn validate(&self) -> Result<()> {
        self.intrinsics.check_image(self.width, self.height)?;
        let unit_tol = real::<T>(UNIT_TOL);
        let check_unit = |n: Point3<T>, what: &str| -> Result<()> {
            if !n.is_finite() || (n.norm() - T::one()).abs() > unit_tol {
                return Err(Error::invalid(format!("scene: {what} must be a unit vector")));
            }
            Ok(())
        };
        match self.kind {
            SceneKind::Plane { normal, offset } => {
                check_unit(normal, "plane normal")?;
                if !offset.is_finite() {
                    return Err(Error::invalid("scene: plane offset must be finite"));
                }
            }
            SceneKind::Sphere { center, radius } => {
                if !center.is_finite() {
                    return Err(Error::invalid("scene: sphere center must be finite"));
                }
                if !radius.is_finite() || radius <= T::zero() {
                    return Err(Error::invalid("scene: sphere radius must be positive"));
                }
            }
            SceneKind::Corner {
                normal1,
                offset1,
                normal2,
                offset2,
            } => {
                check_unit(normal1, "corner normal1")?;
                check_unit(normal2, "corner normal2")?;
                if !offset1.is_finite() || !offset2.is_finite() {
                    return Err(Error::invalid("scene: corner offsets must be finite"));
                }
                if normal1.cross(normal2).norm() < real::<T>(1e-9) {
                    return Err(Error::invalid(
                        "scene: corner planes are parallel, no edge exists",
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Incidence-dependent depth noise:
/// sigma(theta) = sigma0 * min(1 + angle_gain * tan^2 theta, 100), and
/// pixels with theta > dropout_angle are invalidated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel<T> {
    /// Depth noise standard deviation at normal incidence, meters.
    pub sigma0: T,
    pub angle_gain: T,
    /// Radians, in (0, pi/2].
    pub dropout_angle: T,
    pub seed: u64,
}

impl<T: Real> NoiseModel<T> {
    pub fn new(sigma0: T, angle_gain: T, dropout_angle: T, seed: u64) -> Result<Self> {
        let nm = Self {
            sigma0,
            angle_gain,
            dropout_angle,
            seed,
        };
        nm.validate()?;
        Ok(nm)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.sigma0.is_finite() || self.sigma0 < T::zero() {
            return Err(Error::invalid(format!(
                "noise: sigma0 must be finite and >= 0, got {}",
                self.sigma0
            )));
        }
        if !self.angle_gain.is_finite() || self.angle_gain < T::zero() {
            return Err(Error::invalid(format!(
                "noise: angle_gain must be finite and >= 0, got {}",
                self.angle_gain
            )));
        }
        let half_pi = real::<T>(std::f64::consts::FRAC_PI_2);
        if !self.dropout_angle.is_finite() || self.dropout_angle <= T::zero() || self.dropout_angle > half_pi
        {
            return Err(Error::invalid(format!(
                "noise: dropout_angle must lie in (0, pi/2], got {}",
                self.dropout_angle
            )));
        }
        Ok(())
    }
}

fn ray_plane<T: Real>(dir: Point3<T>, normal: Point3<T>, offset: T) -> Option<T> {
    let denom = normal.dot(dir);
    if denom == T::zero() {
        return None;
    }
    let t = offset / denom;
    (t.is_finite() && t > T::zero()).then_some(t)
}

fn ray_sphere<T: Real>(dir: Point3<T>, center: Point3<T>, radius: T) -> Option<T> {
    let a = dir.norm_squared();
    let b = dir.dot(center);
    let c = center.norm_squared() - radius * radius;
    let disc = b * b - a * c;
    if disc < T::zero() {
        return None;
    }
    let sq = disc.sqrt();
    let t0 = (b - sq) / a;
    if t0.is_finite() && t0 > T::zero() {
        return Some(t0);
    }
    let t1 = (b + sq) / a;
    (t1.is_finite() && t1 > T::zero()).then_some(t1)
}

/// Renders exact per-pixel depth and camera-oriented analytic normals.
///
/// Depth is the z-depth of the first ray-surface intersection along each
/// pixel's back-projection ray (the ray direction has unit z, so the ray
/// parameter is the depth). Pixels that miss the surface are invalid. The
/// ground-truth curvature channel is zero: analytic surfaces prescribe
/// normals, not a PCA neighborhood.
pub fn render_scene<T: Real>(spec: &SceneSpec<T>) -> Result<(DepthMap<T>, NormalMap<T>)> {
    spec.validate()?;
    let k = &spec.intrinsics;
    let n = spec.width * spec.height;
    let mut depth = vec![T::zero(); n];
    let mut normals = vec![Point3::zero(); n];
    let mut valid = vec![false; n];

    for v in 0..spec.height {
        for u in 0..spec.width {
            let i = v * spec.width + u;
            let uu = real::<T>(u as f64);
            let vv = real::<T>(v as f64);
            let dir = Point3::new((uu - k.cx) / k.fx, (vv - k.cy) / k.fy, T::one());
            let hit = match spec.kind {
                SceneKind::Plane { normal, offset } => {
                    ray_plane(dir, normal, offset).map(|t| (t, normal))
                }
                SceneKind::Sphere { center, radius } => ray_sphere(dir, center, radius).map(|t| {
                    let p = dir.scaled(t);
                    let nrm = (p - center)
                        .normalized()
                        .unwrap_or(Point3::new(T::zero(), T::zero(), -T::one()));
                    (t, nrm)
                }),
                SceneKind::Corner {
                    normal1,
                    offset1,
                    normal2,
                    offset2,
                } => {
                    let h1 = ray_plane(dir, normal1, offset1);
                    let h2 = ray_plane(dir, normal2, offset2);
                    match (h1, h2) {
                        (Some(t1), Some(t2)) => {
                            if t1 <= t2 {
                                Some((t1, normal1))
                            } else {
                                Some((t2, normal2))
                            }
                        }
                        (Some(t1), None) => Some((t1, normal1)),
                        (None, Some(t2)) => Some((t2, normal2)),
                        (None, None) => None,
                    }
                }
            };
            if let Some((t, nrm)) = hit {
                let p = dir.scaled(t);
                depth[i] = t;
                normals[i] = orient_to_camera(nrm, p);
                valid[i] = true;
            }
        }
    }

    if !valid.iter().any(|&b| b) {
        return Err(Error::invalid("scene: surface is not visible from the camera"));
    }
    let depth = DepthMap::from_parts(spec.width, spec.height, depth, valid.clone())?;
    let curvature = vec![T::zero(); n];
    let nm = NormalMap::from_parts(spec.width, spec.height, normals, curvature, valid)?;
    Ok((depth, nm))
}

/// Applies the noise model to a clean frame.
///
/// Per pixel with valid depth and a valid normal: theta is the incidence
/// angle between the normal and the viewing ray; pixels past the dropout
/// angle are invalidated, the rest receive additive zero-mean Gaussian
/// noise with standard deviation sigma(theta). Noisy depths that come out
/// non-positive are invalidated (a range sensor cannot report them).
/// Pixels lacking a valid normal pass through unchanged. Every pixel draws
/// from its own seeded RNG stream, so the result is bit-exact for a given
/// seed regardless of traversal order.
///
/// Returns the noisy map plus the per-pixel absolute error |noisy - clean|
/// in meters (zero at pixels that are invalid in the output).
pub fn apply_noise<T: Real>(
    depth: &DepthMap<T>,
    gt_normals: &NormalMap<T>,
    cloud: &PointCloud<T>,
    nm: &NoiseModel<T>,
) -> (DepthMap<T>, Vec<T>) {
    nm.validate().expect("noise model must be valid");
    assert!(
        depth.width() == gt_normals.width()
            && depth.height() == gt_normals.height()
            && depth.width() == cloud.width()
            && depth.height() == cloud.height(),
        "apply_noise: shape mismatch"
    );

    let n = depth.len();
    let mut values = vec![T::zero(); n];
    let mut valid = vec![false; n];
    let mut err = vec![T::zero(); n];
    let cap = real::<T>(SIGMA_CAP_FACTOR);

    for i in 0..n {
        if !depth.is_valid(i) {
            continue;
        }
        if !gt_normals.is_valid(i) || !cloud.is_valid(i) {
            values[i] = depth.value(i);
            valid[i] = true;
            continue;
        }
        let p = cloud.point(i);
        let v = match p.normalized() {
            Some(v) => v,
            None => {
                values[i] = depth.value(i);
                valid[i] = true;
                continue;
            }
        };
        let cos = gt_normals.normal(i).dot(v).abs().min(T::one());
        let theta = cos.acos();
        if theta > nm.dropout_angle {
            continue;
        }
        let tan2 = if cos > T::zero() {
            let c2 = cos * cos;
            ((T::one() - c2) / c2).min(cap)
        } else {
            cap
        };
        let sigma = nm.sigma0 * (T::one() + nm.angle_gain * tan2).min(cap);
        let z: f64 = keyed_rng(nm.seed, DOMAIN_NOISE, i as u64).sample(rand_distr::StandardNormal);
        let noisy = depth.value(i) + sigma * real::<T>(z);
        if noisy.is_finite() && noisy > T::zero() {
            values[i] = noisy;
            valid[i] = true;
            err[i] = (noisy - depth.value(i)).abs();
        }
    }

    let out = DepthMap::from_parts(depth.width(), depth.height(), values, valid)
        .expect("noise output satisfies depth map invariants");
    (out, err)
}
