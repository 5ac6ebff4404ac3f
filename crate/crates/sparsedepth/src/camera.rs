//! Camera model and back-projection from depth maps to organized point clouds.
//!
//! Conventions: right-handed camera frame with +z forward, zero-based pixel
//! indexing, and no half-pixel center offset. Pixel (u, v) with depth d maps
//! to (d*(u-cx)/fx, d*(v-cy)/fy, d). Depth value 0 marks a missing pixel and
//! never enters geometry; every map carries an explicit validity mask.

use crate::error::{Error, Result};
use crate::scalar::{real, Real};

/// Pinhole intrinsic parameters, all in pixels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CameraIntrinsics<T> {
    pub fx: T,
    pub fy: T,
    pub cx: T,
    pub cy: T,
}

impl<T: Real> CameraIntrinsics<T> {
    /// Builds validated intrinsics: focal lengths must be positive and all
    /// parameters finite.
    pub fn new(fx: T, fy: T, cx: T, cy: T) -> Result<Self> {
        let k = Self { fx, fy, cx, cy };
        k.validate()?;
        Ok(k)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("fx", self.fx),
            ("fy", self.fy),
            ("cx", self.cx),
            ("cy", self.cy),
        ] {
            if !v.is_finite() {
                return Err(Error::invalid(format!("intrinsics: {name} is not finite")));
            }
        }
        if self.fx <= T::zero() || self.fy <= T::zero() {
            return Err(Error::invalid("intrinsics: focal lengths must be positive"));
        }
        Ok(())
    }

    /// Checks that the principal point falls inside a width x height image.
    /// Called when intrinsics are paired with a concrete frame.
    pub fn check_image(&self, width: usize, height: usize) -> Result<()> {
        self.validate()?;
        let w = real::<T>(width as f64);
        let h = real::<T>(height as f64);
        if self.cx < T::zero() || self.cx >= w || self.cy < T::zero() || self.cy >= h {
            return Err(Error::invalid(format!(
                "intrinsics: principal point ({}, {}) outside {width}x{height} image",
                self.cx, self.cy
            )));
        }
        Ok(())
    }

    /// Projects a camera-frame point (z > 0) to pixel coordinates.
    pub fn project(&self, p: Point3<T>) -> (T, T) {
        (
            self.fx * p.x / p.z + self.cx,
            self.fy * p.y / p.z + self.cy,
        )
    }
}

/// A camera-frame 3D point (or direction), in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point3<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Real> Point3<T> {
    pub fn new(x: T, y: T, z: T) -> Self {
        Self { x, y, z }
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero())
    }

    pub fn dot(self, o: Self) -> T {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Self) -> Self {
        Self::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm_squared(self) -> T {
        self.dot(self)
    }

    pub fn norm(self) -> T {
        self.norm_squared().sqrt()
    }

    pub fn scaled(self, s: T) -> Self {
        Self::new(self.x * s, self.y * s, self.z * s)
    }

    /// Unit vector in the same direction; `None` for the zero vector.
    pub fn normalized(self) -> Option<Self> {
        let n = self.norm();
        if n > T::zero() {
            Some(self.scaled(T::one() / n))
        } else {
            None
        }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

impl<T: Real> std::ops::Add for Point3<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl<T: Real> std::ops::Sub for Point3<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl<T: Real> std::ops::Neg for Point3<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y, -self.z)
    }
}

/// H x W metric depth with a validity mask. Invalid pixels always carry the
/// value 0; valid pixels are positive and finite.
#[derive(Debug, Clone, PartialEq)]
pub struct DepthMap<T> {
    width: usize,
    height: usize,
    values: Vec<T>,
    valid: Vec<bool>,
}

impl<T: Real> DepthMap<T> {
    /// An all-invalid map of the given shape.
    pub fn new(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            values: vec![T::zero(); width * height],
            valid: vec![false; width * height],
        }
    }

    /// Builds a map from explicit values and mask, enforcing the invariants:
    /// matching lengths, finite values, positive depth wherever valid, and
    /// zeros wherever invalid.
    pub fn from_parts(width: usize, height: usize, values: Vec<T>, valid: Vec<bool>) -> Result<Self> {
        let n = width * height;
        if values.len() != n || valid.len() != n {
            return Err(Error::invalid(format!(
                "depth map: expected {n} entries for {width}x{height}, got {} values / {} flags",
                values.len(),
                valid.len()
            )));
        }
        for (i, (&d, &ok)) in values.iter().zip(&valid).enumerate() {
            if !d.is_finite() {
                return Err(Error::invalid(format!("depth map: non-finite value at index {i}")));
            }
            if ok && d <= T::zero() {
                return Err(Error::invalid(format!(
                    "depth map: valid pixel at index {i} has non-positive depth {d}"
                )));
            }
            if !ok && d != T::zero() {
                return Err(Error::invalid(format!(
                    "depth map: invalid pixel at index {i} carries nonzero value {d}"
                )));
            }
        }
        Ok(Self {
            width,
            height,
            values,
            valid,
        })
    }

    /// Builds a map from raw values, deriving the mask: entries that are
    /// positive and finite become valid, everything else becomes invalid
    /// and is stored as 0.
    pub fn from_values(width: usize, height: usize, mut values: Vec<T>) -> Result<Self> {
        let n = width * height;
        if values.len() != n {
            return Err(Error::invalid(format!(
                "depth map: expected {n} entries for {width}x{height}, got {}",
                values.len()
            )));
        }
        let mut valid = vec![false; n];
        for (d, ok) in values.iter_mut().zip(&mut valid) {
            if d.is_finite() && *d > T::zero() {
                *ok = true;
            } else {
                *d = T::zero();
            }
        }
        Ok(Self {
            width,
            height,
            values,
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
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Linear index of pixel (u, v), row-major.
    pub fn idx(&self, u: usize, v: usize) -> usize {
        v * self.width + u
    }

    /// Pixel (u, v) of a linear index.
    pub fn pos(&self, idx: usize) -> (usize, usize) {
        (idx % self.width, idx / self.width)
    }

    pub fn value(&self, idx: usize) -> T {
        self.values[idx]
    }

    pub fn is_valid(&self, idx: usize) -> bool {
        self.valid[idx]
    }

    /// Depth at (u, v), or `None` when the pixel is invalid.
    pub fn get(&self, u: usize, v: usize) -> Option<T> {
        let i = self.idx(u, v);
        self.valid[i].then(|| self.values[i])
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn valid_mask(&self) -> &[bool] {
        &self.valid
    }

    pub fn valid_count(&self) -> usize {
        self.valid.iter().filter(|&&b| b).count()
    }

    pub fn valid_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.valid
            .iter()
            .enumerate()
            .filter_map(|(i, &ok)| ok.then_some(i))
    }
}

/// Organized point cloud: one camera-frame point per pixel, same shape and
/// validity as the depth map it came from. Invalid entries are the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud<T> {
    width: usize,
    height: usize,
    points: Vec<Point3<T>>,
    valid: Vec<bool>,
}

impl<T: Real> PointCloud<T> {
    pub fn from_parts(
        width: usize,
        height: usize,
        points: Vec<Point3<T>>,
        valid: Vec<bool>,
    ) -> Result<Self> {
        let n = width * height;
        if points.len() != n || valid.len() != n {
            return Err(Error::invalid(format!(
                "point cloud: expected {n} entries for {width}x{height}, got {} points / {} flags",
                points.len(),
                valid.len()
            )));
        }
        for (i, (&p, &ok)) in points.iter().zip(&valid).enumerate() {
            if !p.is_finite() {
                return Err(Error::invalid(format!("point cloud: non-finite point at index {i}")));
            }
            if ok && p.z <= T::zero() {
                return Err(Error::invalid(format!(
                    "point cloud: valid point at index {i} has non-positive z"
                )));
            }
        }
        Ok(Self {
            width,
            height,
            points,
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
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn idx(&self, u: usize, v: usize) -> usize {
        v * self.width + u
    }

    pub fn pos(&self, idx: usize) -> (usize, usize) {
        (idx % self.width, idx / self.width)
    }

    pub fn point(&self, idx: usize) -> Point3<T> {
        self.points[idx]
    }

    pub fn is_valid(&self, idx: usize) -> bool {
        self.valid[idx]
    }

    /// Point at (u, v), or `None` when the pixel is invalid.
    pub fn get(&self, u: usize, v: usize) -> Option<Point3<T>> {
        let i = self.idx(u, v);
        self.valid[i].then(|| self.points[i])
    }

    pub fn points(&self) -> &[Point3<T>] {
        &self.points
    }

    pub fn valid_mask(&self) -> &[bool] {
        &self.valid
    }

    pub fn valid_count(&self) -> usize {
        self.valid.iter().filter(|&&b| b).count()
    }
}

/// Back-projects one pixel through the inverse intrinsics.
///
/// Returns (d*(u-cx)/fx, d*(v-cy)/fy, d). The caller is responsible for
/// (u, v) lying inside the image the intrinsics are paired with.
pub fn backproject_pixel<T: Real>(
    u: usize,
    v: usize,
    depth: T,
    k: &CameraIntrinsics<T>,
) -> Result<Point3<T>> {
    if !depth.is_finite() || depth <= T::zero() {
        return Err(Error::invalid(format!(
            "backproject_pixel: depth must be positive and finite, got {depth}"
        )));
    }
    let uu = real::<T>(u as f64);
    let vv = real::<T>(v as f64);
    Ok(Point3::new(
        depth * (uu - k.cx) / k.fx,
        depth * (vv - k.cy) / k.fy,
        depth,
    ))
}

/// Back-projects a whole depth map into an organized point cloud.
///
/// Validity carries over pixel for pixel; invalid pixels produce origin
/// entries. Pairing validity of the intrinsics (principal point inside the
/// image) is checked here.
pub fn backproject_map<T: Real>(d: &DepthMap<T>, k: &CameraIntrinsics<T>) -> Result<PointCloud<T>> {
    k.check_image(d.width(), d.height())?;
    let mut points = vec![Point3::zero(); d.len()];
    for v in 0..d.height() {
        for u in 0..d.width() {
            let i = d.idx(u, v);
            if d.is_valid(i) {
                // Cannot fail: valid pixels are positive and finite.
                points[i] = backproject_pixel(u, v, d.value(i), k)?;
            }
        }
    }
    PointCloud::from_parts(d.width(), d.height(), points, d.valid_mask().to_vec())
}
