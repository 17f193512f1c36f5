//! Shared small-dimension linear algebra aliases and helpers.

use nalgebra::{Matrix2, Matrix3, Vector2, Vector3};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type Vec3 = Vector3<f64>;
pub type Mat3 = Matrix3<f64>;
/// Complex 2x2 matrix (spin space).
pub type Mat2C = Matrix2<C64>;
/// Two-component complex spinor.
pub type Spinor2 = Vector2<C64>;

/// Hat map: w -> [w]_x with [w]_x v = w x v.
pub fn hat(w: Vec3) -> Mat3 {
    Mat3::new(0.0, -w.z, w.y, w.z, 0.0, -w.x, -w.y, w.x, 0.0)
}

/// Inverse of the hat map for an antisymmetric matrix.
pub fn unhat(m: &Mat3) -> Vec3 {
    Vec3::new(m[(2, 1)], m[(0, 2)], m[(1, 0)])
}

/// Max absolute entry of a 3x3 matrix.
pub fn max_abs(m: &Mat3) -> f64 {
    m.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
}

/// Frobenius norm of the complex 2x2 matrix.
pub fn frob2c(m: &Mat2C) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Re-orthonormalize a near-rotation matrix by polar projection.
///
/// Uses the Newton iteration O <- (O + O^-T)/2, which converges
/// quadratically to the orthogonal factor of the polar decomposition.
pub fn polar_project(m: &Mat3) -> Mat3 {
    let mut o = *m;
    for _ in 0..20 {
        let inv_t = match o.try_inverse() {
            Some(inv) => inv.transpose(),
            None => return o,
        };
        let next = (o + inv_t) * 0.5;
        let delta = max_abs(&(next - o));
        o = next;
        if delta < 1e-15 {
            break;
        }
    }
    o
}
