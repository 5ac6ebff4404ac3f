//! Eigendecomposition of symmetric 3x3 matrices by Jacobi rotations.
//!
//! The solver repeatedly annihilates the largest off-diagonal entry, which
//! for a 3x3 matrix converges to machine precision in a handful of
//! rotations. Output order and eigenvector signs are pinned so the whole
//! pipeline is bitwise deterministic.

use crate::camera::Point3;
use crate::error::{Error, Result};
use crate::scalar::{real, to_f64, Real};

/// Entry-wise symmetry tolerance for accepted inputs.
const SYMMETRY_TOL: f64 = 1e-9;
/// Eigenvalues in (-NEGATIVE_EPS, 0) are roundoff from PSD inputs and are
/// clamped to zero.
const NEGATIVE_EPS: f64 = 1e-12;
const MAX_ROTATIONS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenDecomposition3<T> {
    /// Ascending: `eigenvalues[0] <= eigenvalues[1] <= eigenvalues[2]`.
    pub eigenvalues: [T; 3],
    /// `eigenvectors[i]` pairs with `eigenvalues[i]`. Orthonormal; each
    /// vector's largest-magnitude component is positive (ties broken by the
    /// first such component).
    pub eigenvectors: [Point3<T>; 3],
}

/// Decomposes a symmetric 3x3 matrix into ascending eigenvalues and
/// orthonormal, sign-normalized eigenvectors.
///
/// Input must be symmetric within 1e-9 per entry; it is symmetrized exactly
/// before iteration. Asymmetric or non-finite input is rejected.
pub fn eigen_symmetric3<T: Real>(c: [[T; 3]; 3]) -> Result<EigenDecomposition3<T>> {
    for row in &c {
        for &e in row {
            if !e.is_finite() {
                return Err(Error::invalid("eigen_symmetric3: non-finite matrix entry"));
            }
        }
    }
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let diff = to_f64(c[i][j] - c[j][i]).abs();
        if diff > SYMMETRY_TOL {
            return Err(Error::invalid(format!(
                "eigen_symmetric3: entries ({i},{j}) and ({j},{i}) differ by {diff:.3e}; matrix is not symmetric"
            )));
        }
    }

    let half = real::<T>(0.5);
    let m01 = (c[0][1] + c[1][0]) * half;
    let m02 = (c[0][2] + c[2][0]) * half;
    let m12 = (c[1][2] + c[2][1]) * half;
    let mut a = [
        [c[0][0], m01, m02],
        [m01, c[1][1], m12],
        [m02, m12, c[2][2]],
    ];
    // v[row][col]: columns are the accumulated eigenvectors.
    let mut v = [
        [T::one(), T::zero(), T::zero()],
        [T::zero(), T::one(), T::zero()],
        [T::zero(), T::zero(), T::one()],
    ];

    let mut scale = T::zero();
    for row in &a {
        for &e in row {
            scale = scale.max(e.abs());
        }
    }
    if scale > T::zero() {
        let tol = scale * T::epsilon();
        for _ in 0..MAX_ROTATIONS {
            let (mut p, mut q) = (0usize, 1usize);
            let mut mx = a[0][1].abs();
            if a[0][2].abs() > mx {
                (p, q, mx) = (0, 2, a[0][2].abs());
            }
            if a[1][2].abs() > mx {
                (p, q, mx) = (1, 2, a[1][2].abs());
            }
            if mx <= tol {
                break;
            }

            let apq = a[p][q];
            let theta = (a[q][q] - a[p][p]) / (apq + apq);
            let sign = if theta < T::zero() { -T::one() } else { T::one() };
            let t = sign / (theta.abs() + theta.hypot(T::one()));
            let cth = T::one() / t.hypot(T::one());
            let sth = t * cth;

            a[p][p] -= t * apq;
            a[q][q] += t * apq;
            a[p][q] = T::zero();
            a[q][p] = T::zero();
            let r = 3 - p - q;
            let arp = a[r][p];
            let arq = a[r][q];
            a[r][p] = cth * arp - sth * arq;
            a[p][r] = a[r][p];
            a[r][q] = sth * arp + cth * arq;
            a[q][r] = a[r][q];

            for row in &mut v {
                let vp = row[p];
                let vq = row[q];
                row[p] = cth * vp - sth * vq;
                row[q] = sth * vp + cth * vq;
            }
        }
    }

    let neg_eps = real::<T>(NEGATIVE_EPS);
    let mut pairs: [(T, Point3<T>); 3] = [
        (a[0][0], Point3::new(v[0][0], v[1][0], v[2][0])),
        (a[1][1], Point3::new(v[0][1], v[1][1], v[2][1])),
        (a[2][2], Point3::new(v[0][2], v[1][2], v[2][2])),
    ];
    for (lambda, _) in &mut pairs {
        if *lambda < T::zero() && *lambda > -neg_eps {
            *lambda = T::zero();
        }
    }
    pairs.sort_by(|l, r| l.0.partial_cmp(&r.0).expect("finite eigenvalues"));

    let eigenvalues = [pairs[0].0, pairs[1].0, pairs[2].0];
    let eigenvectors = [
        sign_normalize(pairs[0].1),
        sign_normalize(pairs[1].1),
        sign_normalize(pairs[2].1),
    ];
    Ok(EigenDecomposition3 {
        eigenvalues,
        eigenvectors,
    })
}

/// Flips the vector so its largest-magnitude component is positive; ties go
/// to the first component of that magnitude.
fn sign_normalize<T: Real>(v: Point3<T>) -> Point3<T> {
    let comps = [v.x, v.y, v.z];
    let mut best = 0;
    for i in 1..3 {
        if comps[i].abs() > comps[best].abs() {
            best = i;
        }
    }
    if comps[best] < T::zero() {
        -v
    } else {
        v
    }
}
